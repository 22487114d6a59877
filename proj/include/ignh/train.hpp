#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ignh/encode.hpp"
#include "ignh/graph.hpp"
#include "ignh/model.hpp"

namespace ignh {

struct TrainConfig {
    double learning_rate = 1e-3;
    std::size_t max_epochs = 200;
    std::size_t patience = 20;
    std::size_t batch_size = 128;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::uint64_t seed = 0;

    void validate() const;
};

struct EpochStats {
    std::size_t epoch;  // 1-based
    double train_loss;
    double val_metric;
    std::int64_t unix_ms;
};

struct TrainHistory {
    std::vector<EpochStats> epochs;
    std::size_t best_epoch = 0;
    double best_val_metric = 0.0;
};

std::string history_to_csv(const TrainHistory& history);

// Mean batch loss on pre-link outputs `zs` (row-major B x k): numerically
// stable logistic cross-entropy on logits for binary, log-sum-exp softmax
// cross-entropy for multiclass, mean squared error for regression. Labels
// outside the class range throw.
double batch_loss(std::span<const double> zs, std::span<const double> labels, Task task, std::size_t k);

struct BatchGradients {
    std::vector<double> grads;  // same layout as ModelParams::values
    double loss = 0.0;
};

// Exact reverse-mode gradients of the mean batch loss with respect to every
// parameter, including only the embedding rows the batch touches.
BatchGradients backward(const EncodedMatrix& data, std::span<const std::size_t> rows, const ModelParams& params,
                        const GraphView& graph, const ModelConfig& config);

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    std::size_t t = 0;
};

// Standard bias-corrected Adam update; deterministic.
void adam_step(ModelParams& params, std::span<const double> grads, AdamState& state, const TrainConfig& config);

// Validation metric used for early stopping: AUC for classification (higher
// is better), MSE for regression (lower is better).
double validation_metric(const EncodedMatrix& val, const ModelParams& params, const GraphView& graph,
                         const ModelConfig& config);

struct TrainResult {
    ModelParams params;  // best-validation snapshot
    TrainHistory history;
};

// Shuffled minibatch epochs with Adam; evaluates the validation metric after
// each epoch, keeps the best snapshot, stops once `patience` epochs pass
// without improvement. Throws on non-finite loss.
TrainResult train(const EncodedMatrix& train_set, const EncodedMatrix& val_set, const FeatureGraph& graph,
                  const Schema& schema, const EncoderState& encoders, const ModelConfig& model_config,
                  const TrainConfig& train_config);

}  // namespace ignh
