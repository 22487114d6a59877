// Shared builders for synthetic schemas, tables, graphs, and models.
#pragma once

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "ignh/encode.hpp"
#include "ignh/graph.hpp"
#include "ignh/model.hpp"
#include "ignh/rng.hpp"
#include "ignh/schema.hpp"
#include "ignh/table.hpp"

namespace support {

inline std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

struct Dataset {
    ignh::Schema schema;
    ignh::RawTable table;
};

// Two informative numeric features and one informative categorical feature,
// plus one numeric and one categorical noise column. `margin` > 0 makes the
// classes linearly separable by that margin.
inline Dataset binary_synthetic(std::size_t n, std::uint64_t seed, double margin = 0.0, double pos_rate = 0.5) {
    ignh::Schema schema;
    schema.features = {{"x1", ignh::FeatureKind::Numerical},
                       {"x2", ignh::FeatureKind::Numerical},
                       {"color", ignh::FeatureKind::Categorical},
                       {"noise", ignh::FeatureKind::Numerical},
                       {"tag", ignh::FeatureKind::Categorical}};
    schema.target_name = "label";
    schema.task = ignh::Task::Binary;
    schema.class_labels = {"neg", "pos"};

    ignh::RawTable table;
    table.n_features = 5;
    table.missing_count.assign(5, 0);
    ignh::Rng rng(seed);
    const char* colors[3] = {"red", "green", "blue"};
    const char* tags[4] = {"a", "b", "c", "d"};
    for (std::size_t r = 0; r < n; ++r) {
        const bool positive = rng.uniform() < pos_rate;
        const double shift = positive ? 1.0 + margin : -1.0 - margin;
        const double x1 = shift + rng.uniform(-1.0, 1.0);
        const double x2 = 0.5 * shift + rng.uniform(-1.0, 1.0);
        // color leans with the class; tag is pure noise
        std::size_t color_idx = rng.uniform() < 0.7 ? (positive ? 0 : 1) : rng.below(3);
        table.cells.push_back({num(x1), num(x2), colors[color_idx], num(rng.uniform(-1.0, 1.0)),
                               tags[rng.below(4)]});
        table.targets.push_back(positive ? "pos" : "neg");
    }
    return {schema, table};
}

// Eight mixed-type features, most informative, for attribution studies.
inline Dataset hetero8_synthetic(std::size_t n, std::uint64_t seed) {
    ignh::Schema schema;
    schema.features = {{"n0", ignh::FeatureKind::Numerical},   {"n1", ignh::FeatureKind::Numerical},
                       {"n2", ignh::FeatureKind::Numerical},   {"n3", ignh::FeatureKind::Numerical},
                       {"n4", ignh::FeatureKind::Numerical},   {"c0", ignh::FeatureKind::Categorical},
                       {"c1", ignh::FeatureKind::Categorical}, {"c2", ignh::FeatureKind::Categorical}};
    schema.target_name = "label";
    schema.task = ignh::Task::Binary;
    schema.class_labels = {"no", "yes"};

    ignh::RawTable table;
    table.n_features = 8;
    table.missing_count.assign(8, 0);
    ignh::Rng rng(seed);
    const char* c0v[2] = {"off", "on"};
    const char* c1v[3] = {"low", "mid", "high"};
    const char* c2v[3] = {"p", "q", "z"};
    for (std::size_t r = 0; r < n; ++r) {
        const double u = rng.uniform(-1.0, 1.0);
        const double n0 = u + rng.uniform(-0.5, 0.5);
        const double n1 = -u + rng.uniform(-0.5, 0.5);
        const double n2 = rng.uniform(-1.0, 1.0);
        const double n3 = 0.5 * n2 + rng.uniform(-0.5, 0.5);
        const double n4 = rng.uniform(-1.0, 1.0);
        const std::size_t i0 = rng.uniform() < 0.5 + 0.4 * u ? 1 : 0;
        const std::size_t i1 = rng.below(3);
        const std::size_t i2 = rng.below(3);
        double logit = 1.6 * n0 + 1.2 * n1 + 0.8 * n2 - 0.6 * n3 + 0.4 * n4;
        logit += i0 == 1 ? 0.9 : -0.9;
        logit += (static_cast<double>(i1) - 1.0) * 0.7;
        logit += i2 == 2 ? 0.5 : -0.25;
        const bool positive = rng.uniform() < 1.0 / (1.0 + std::exp(-2.0 * logit));
        table.cells.push_back({num(n0), num(n1), num(n2), num(n3), num(n4), c0v[i0], c1v[i1], c2v[i2]});
        table.targets.push_back(positive ? "yes" : "no");
    }
    return {schema, table};
}

inline Dataset multiclass_synthetic(std::size_t n, std::uint64_t seed) {
    ignh::Schema schema;
    schema.features = {{"f0", ignh::FeatureKind::Numerical},
                       {"f1", ignh::FeatureKind::Numerical},
                       {"group", ignh::FeatureKind::Categorical}};
    schema.target_name = "y";
    schema.task = ignh::Task::Multiclass;
    schema.class_labels = {"alpha", "beta", "gamma"};

    ignh::RawTable table;
    table.n_features = 3;
    table.missing_count.assign(3, 0);
    ignh::Rng rng(seed);
    const double centers[3][2] = {{-1.5, 0.0}, {1.5, 0.8}, {0.0, -1.6}};
    const char* groups[3] = {"g0", "g1", "g2"};
    for (std::size_t r = 0; r < n; ++r) {
        const std::size_t cls = rng.below(3);
        const double f0 = centers[cls][0] + rng.uniform(-1.0, 1.0);
        const double f1 = centers[cls][1] + rng.uniform(-1.0, 1.0);
        const std::size_t g = rng.uniform() < 0.6 ? cls : rng.below(3);
        table.cells.push_back({num(f0), num(f1), groups[g]});
        table.targets.push_back(schema.class_labels[cls]);
    }
    return {schema, table};
}

inline Dataset regression_synthetic(std::size_t n, std::uint64_t seed) {
    ignh::Schema schema;
    schema.features = {{"a", ignh::FeatureKind::Numerical},
                       {"b", ignh::FeatureKind::Numerical},
                       {"mode", ignh::FeatureKind::Categorical}};
    schema.target_name = "t";
    schema.task = ignh::Task::Regression;

    ignh::RawTable table;
    table.n_features = 3;
    table.missing_count.assign(3, 0);
    ignh::Rng rng(seed);
    const char* modes[2] = {"m0", "m1"};
    for (std::size_t r = 0; r < n; ++r) {
        const double a = rng.uniform(-2.0, 2.0);
        const double b = rng.uniform(-2.0, 2.0);
        const std::size_t mode = rng.below(2);
        const double t = 2.0 * a - b + (mode == 1 ? 1.5 : -1.5) + rng.uniform(-0.2, 0.2);
        table.cells.push_back({num(a), num(b), modes[mode]});
        table.targets.push_back(num(t));
    }
    return {schema, table};
}

// A small random schema/encoders/graph/rows bundle for model-level tests.
struct RandomModelBundle {
    ignh::Schema schema;
    ignh::EncoderState encoders;
    ignh::FeatureGraph graph;
    ignh::ModelConfig config;
    ignh::EncodedMatrix data;  // random encoded rows with labels
};

inline RandomModelBundle random_model_bundle(std::uint64_t seed, ignh::Task task, std::size_t m, std::size_t n_rows,
                                             ignh::Activation activation, std::size_t n_layers = 2,
                                             std::size_t width = 3) {
    ignh::Rng rng(seed);
    RandomModelBundle b;

    b.schema.target_name = "y";
    b.schema.task = task;
    if (task == ignh::Task::Binary) b.schema.class_labels = {"0", "1"};
    if (task == ignh::Task::Multiclass) b.schema.class_labels = {"0", "1", "2"};
    b.encoders.features.resize(m);
    for (std::size_t f = 0; f < m; ++f) {
        const bool categorical = rng.uniform() < 0.4;
        b.schema.features.push_back(
            {"f" + std::to_string(f), categorical ? ignh::FeatureKind::Categorical : ignh::FeatureKind::Numerical});
        auto& enc = b.encoders.features[f];
        enc.kind = b.schema.features[f].kind;
        if (categorical) {
            const std::size_t cards = 2 + rng.below(3);
            for (std::size_t c = 0; c < cards; ++c) {
                enc.categories.push_back("v" + std::to_string(c));
                enc.token_of[enc.categories.back()] = static_cast<int>(c + 1);
            }
        }
    }

    b.graph.schema_hash = ignh::schema_hash(b.schema);
    b.graph.alpha = 0.05;
    for (const auto& f : b.schema.features) b.graph.nodes.push_back({f.name, f.kind});
    b.graph.self_loop.assign(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) b.graph.self_loop[i] = rng.uniform(1.5, 4.0);
    for (std::uint32_t i = 0; i < m; ++i) {
        for (std::uint32_t j = i + 1; j < m; ++j) {
            if (rng.uniform() < 0.5) {
                b.graph.edges.push_back({i, j, rng.uniform(-0.9, 0.9), ignh::AssocKind::Pearson});
            }
        }
    }

    b.config.embed_dim = width;
    b.config.layer_dims.assign(n_layers, width);
    b.config.activation = activation;
    b.config.sharing = rng.uniform() < 0.25 ? ignh::WeightSharing::Shared : ignh::WeightSharing::PerNode;
    b.config.task = task;
    b.config.n_classes = task == ignh::Task::Multiclass ? 3 : (task == ignh::Task::Binary ? 2 : 1);
    b.config.seed = rng.next_u64();

    b.data.n_rows = n_rows;
    b.data.n_features = m;
    b.data.task = task;
    b.data.n_classes = b.schema.n_classes();
    b.data.schema_hash = b.graph.schema_hash;
    b.data.missing.assign(n_rows * m, 0);
    for (std::size_t r = 0; r < n_rows; ++r) {
        for (std::size_t f = 0; f < m; ++f) {
            if (b.encoders.features[f].kind == ignh::FeatureKind::Categorical) {
                b.data.values.push_back(
                    static_cast<double>(rng.below(static_cast<std::uint64_t>(b.encoders.features[f].cardinality()) + 1)));
            } else {
                b.data.values.push_back(rng.uniform(-2.0, 2.0));
            }
        }
        switch (task) {
            case ignh::Task::Binary: b.data.labels.push_back(static_cast<double>(rng.below(2))); break;
            case ignh::Task::Multiclass: b.data.labels.push_back(static_cast<double>(rng.below(3))); break;
            case ignh::Task::Regression: b.data.labels.push_back(rng.uniform(-2.0, 2.0)); break;
        }
    }
    return b;
}

class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        path_ = std::filesystem::temp_directory_path() / ("ignh_test_" + tag + "_" + std::to_string(::getpid()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

inline std::string table_to_csv(const Dataset& d) {
    std::string csv;
    for (std::size_t f = 0; f < d.schema.n_features(); ++f) {
        csv += d.schema.features[f].name + ",";
    }
    csv += d.schema.target_name + "\n";
    for (std::size_t r = 0; r < d.table.n_rows(); ++r) {
        for (const auto& cell : d.table.cells[r]) csv += cell + ",";
        csv += d.table.targets[r] + "\n";
    }
    return csv;
}

}  // namespace support
