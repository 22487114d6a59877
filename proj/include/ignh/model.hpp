#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ignh/encode.hpp"
#include "ignh/graph.hpp"
#include "ignh/schema.hpp"

namespace ignh {

enum class Activation : std::uint8_t { Relu = 0, Tanh = 1 };
enum class WeightSharing : std::uint8_t { PerNode = 0, Shared = 1 };

std::string to_string(Activation a);
std::string to_string(WeightSharing w);
Activation activation_from_string(const std::string& s);
WeightSharing weight_sharing_from_string(const std::string& s);

struct ModelConfig {
    std::size_t embed_dim = 16;
    std::vector<std::size_t> layer_dims = {16, 16, 16, 16, 16, 16};
    Activation activation = Activation::Relu;
    WeightSharing sharing = WeightSharing::PerNode;
    Task task = Task::Binary;
    std::size_t n_classes = 2;
    std::uint64_t seed = 0;

    std::size_t n_layers() const { return layer_dims.size(); }
    // Width of the pre-link output z: one per class for multiclass, else 1.
    std::size_t n_outputs() const { return task == Task::Multiclass ? n_classes : 1; }
    void validate() const;
};

/// Offsets of every parameter block inside one flat value vector. Keeping the
/// parameters flat makes Adam, serialization, and finite-difference checks
/// uniform.
struct ParamLayout {
    std::size_t m = 0;                  // feature/node count
    std::vector<int> cardinality;       // per feature; -1 for numerical
    std::size_t embed_dim = 0;
    std::vector<std::size_t> dims;      // layer output widths
    WeightSharing sharing = WeightSharing::PerNode;
    std::size_t k = 1;                  // output width

    std::vector<std::size_t> input_off;  // per feature
    std::vector<std::size_t> w_off;      // layer-major, per node (or one per layer when shared)
    std::vector<std::size_t> b_off;
    std::size_t readout_off = 0;         // m x d_L, node-major
    std::size_t out_w_off = 0;           // m x k
    std::size_t bias_off = 0;            // k
    std::size_t total = 0;

    static ParamLayout make(const Schema& schema, const EncoderState& encoders, const ModelConfig& config);

    std::size_t layer_in_dim(std::size_t l) const { return l == 0 ? embed_dim : dims[l - 1]; }
    std::size_t weight_offset(std::size_t l, std::size_t node) const {
        return w_off[sharing == WeightSharing::Shared ? l : l * m + node];
    }
    std::size_t bias_offset(std::size_t l, std::size_t node) const {
        return b_off[sharing == WeightSharing::Shared ? l : l * m + node];
    }
    std::size_t readout_offset(std::size_t node) const { return readout_off + node * dims.back(); }
    std::size_t embedding_offset(std::size_t feature, int token) const {
        return input_off[feature] + static_cast<std::size_t>(token) * embed_dim;
    }
};

struct ModelParams {
    ParamLayout layout;
    std::vector<double> values;
};

// Glorot-uniform weights, zero biases, embedding rows uniform in +-0.05,
// deterministic under config.seed.
ModelParams init_params(const Schema& schema, const EncoderState& encoders, const ModelConfig& config);

/// Adjacency unpacked for the hot loop.
struct GraphView {
    std::vector<double> self_weight;
    std::vector<std::vector<std::pair<std::uint32_t, double>>> neighbors;

    static GraphView make(const FeatureGraph& graph);
    std::size_t n_nodes() const { return self_weight.size(); }
};

/// Per-instance forward cache; reused across calls to avoid reallocation and
/// consumed by the backward pass.
struct ForwardTrace {
    std::vector<std::vector<double>> h;    // n_layers+1 entries, m x d each
    std::vector<std::vector<double>> agg;  // aggregated messages per layer, m x d_in
    std::vector<std::vector<double>> pre;  // pre-activations per layer, m x d_out
    std::vector<double> readout_val;       // m
    std::vector<double> scores;            // m x k
    std::vector<double> z;                 // k
};

// Algorithm: embed, L rounds of fixed-weight aggregation + per-node linear
// map + activation, injective readout, then z_c = bias_c + sum_i s_{i,c}.
void forward(std::span<const double> row, const ModelParams& params, const GraphView& graph, const ModelConfig& config,
             ForwardTrace& trace);

// The individual stages, exposed for direct testing.
std::vector<double> embed_inputs(std::span<const double> row, const ModelParams& params);
std::vector<double> message_pass(std::span<const double> h, const GraphView& graph, const ModelParams& params,
                                 const ModelConfig& config, std::size_t layer);
struct ReadoutResult {
    std::vector<double> scores;  // m x k
    std::vector<double> z;       // k
};
ReadoutResult readout(std::span<const double> h_last, const ModelParams& params);

// Link-function outputs: sigmoid for binary (length 1), softmax for
// multiclass (length k), identity for regression (length 1).
std::vector<double> predict(std::span<const double> row, const ModelParams& params, const GraphView& graph,
                            const ModelConfig& config);

std::vector<double> apply_link(std::span<const double> z, Task task);
double sigmoid(double x);

}  // namespace ignh
