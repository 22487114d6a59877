#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ignh {

/// Operator misuse (bad flags, missing files): exit code 2. Runtime failures
/// map to exit code 1.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BuildGraphOptions {
    std::string data;
    std::string schema;
    std::string out;
    double alpha = 0.05;
    int threads = 1;
};

struct TrainOptions {
    std::string data;
    std::string schema;
    std::string out;
    std::optional<std::string> graph;    // prebuilt graph file
    std::optional<std::string> config;   // JSON config file
    std::optional<std::string> history;  // defaults to <out>.history.csv
    std::optional<double> self_loop;     // explicit weight; wins over fraction
    double self_loop_fraction = 0.9;
    double alpha = 0.05;
    std::vector<double> split_fractions = {0.6, 0.2, 0.2};
    std::uint64_t seed = 0;
    int threads = 1;

    // flag overrides for the config file (flags win)
    std::optional<double> learning_rate;
    std::optional<std::size_t> max_epochs;
    std::optional<std::size_t> patience;
    std::optional<std::size_t> batch_size;
    std::optional<std::size_t> embed_dim;
    std::optional<std::vector<std::size_t>> layer_dims;
    std::optional<std::string> activation;
    std::optional<std::string> weight_sharing;
};

struct PredictOptions {
    std::string model;
    std::string data;
    std::string out;
    int threads = 1;
};

struct ExplainOptions {
    std::string model;
    std::string data;
    std::string out;
    std::size_t top_k = 10;
    bool all_classes = false;
};

struct EvalOptions {
    std::string model;
    std::string data;
};

struct ShapVerifyOptions {
    std::string model;
    std::string data;
    std::string out;
    std::size_t rows = 500;
    std::string budgets = "32,64,128,256,512";  // comma list; "full" = complete enumeration
    std::uint64_t seed = 0;
    int threads = 1;
};

struct DumpAssocOptions {
    std::string data;
    std::string schema;
    std::string out;
    double alpha = 0.05;
};

int cmd_build_graph(const BuildGraphOptions& options);
int cmd_train(const TrainOptions& options);
int cmd_predict(const PredictOptions& options);
int cmd_explain(const ExplainOptions& options);
int cmd_eval(const EvalOptions& options);
int cmd_shap_verify(const ShapVerifyOptions& options);
int cmd_dump_assoc(const DumpAssocOptions& options);

}  // namespace ignh
