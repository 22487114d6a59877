#include "ignh/encode.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "ignh/rng.hpp"

namespace ignh {

EncoderState fit_encoders(const RawTable& train, const Schema& schema) {
    if (train.n_rows() == 0) throw std::invalid_argument("fit_encoders: empty training table");
    if (train.n_features != schema.n_features()) {
        throw std::invalid_argument("fit_encoders: table does not match schema");
    }

    EncoderState state;
    state.features.resize(schema.n_features());
    for (std::size_t f = 0; f < schema.n_features(); ++f) {
        FeatureEncoder& enc = state.features[f];
        enc.kind = schema.features[f].kind;
        if (enc.kind == FeatureKind::Categorical) {
            for (const auto& row : train.cells) {
                const std::string& cell = row[f];
                if (cell.empty()) continue;
                if (enc.token_of.emplace(cell, enc.cardinality() + 1).second) {
                    enc.categories.push_back(cell);
                }
            }
        } else {
            double sum = 0.0, sumsq = 0.0;
            std::size_t n = 0;
            for (const auto& row : train.cells) {
                const std::string& cell = row[f];
                if (cell.empty()) continue;
                double v = std::strtod(cell.c_str(), nullptr);
                sum += v;
                sumsq += v * v;
                ++n;
            }
            if (n == 0) {
                enc.mean = 0.0;
                enc.stdev = 0.0;
                enc.constant = true;
            } else {
                enc.mean = sum / static_cast<double>(n);
                double var = sumsq / static_cast<double>(n) - enc.mean * enc.mean;
                enc.stdev = var > 0.0 ? std::sqrt(var) : 0.0;
                enc.constant = enc.stdev == 0.0;
            }
        }
    }
    return state;
}

EncodedMatrix encode(const RawTable& table, const EncoderState& state, const Schema& schema) {
    if (table.n_features != schema.n_features() || state.features.size() != schema.n_features()) {
        throw std::invalid_argument("encode: table/state/schema mismatch");
    }
    const std::size_t n = table.n_rows();
    const std::size_t m = schema.n_features();

    EncodedMatrix out;
    out.n_rows = n;
    out.n_features = m;
    out.task = schema.task;
    out.n_classes = schema.n_classes();
    out.schema_hash = schema_hash(schema);
    out.values.assign(n * m, 0.0);
    out.missing.assign(n * m, 0);
    out.labels.resize(n);

    std::unordered_map<std::string, double> label_index;
    for (std::size_t c = 0; c < schema.class_labels.size(); ++c) {
        label_index[schema.class_labels[c]] = static_cast<double>(c);
    }

    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t f = 0; f < m; ++f) {
            const std::string& cell = table.cells[r][f];
            const FeatureEncoder& enc = state.features[f];
            double& slot = out.values[r * m + f];
            if (cell.empty()) {
                out.missing[r * m + f] = 1;
                slot = 0.0;
            } else if (enc.kind == FeatureKind::Categorical) {
                auto it = enc.token_of.find(cell);
                slot = it == enc.token_of.end() ? 0.0 : static_cast<double>(it->second);
            } else {
                double v = std::strtod(cell.c_str(), nullptr);
                slot = enc.constant ? 0.0 : (v - enc.mean) / enc.stdev;
            }
        }
        if (schema.task == Task::Regression) {
            out.labels[r] = std::strtod(table.targets[r].c_str(), nullptr);
        } else {
            auto it = label_index.find(table.targets[r]);
            if (it == label_index.end()) {
                throw std::runtime_error("encode: row " + std::to_string(r + 1) + ": target label '" +
                                         table.targets[r] + "' is not in schema class_labels");
            }
            out.labels[r] = it->second;
        }
    }
    return out;
}

EncodedMatrix oversample_minority(const EncodedMatrix& train, std::uint64_t seed) {
    if (train.task != Task::Binary) return train;

    std::vector<std::size_t> class_rows[2];
    for (std::size_t r = 0; r < train.n_rows; ++r) {
        int y = static_cast<int>(train.labels[r]);
        if (y != 0 && y != 1) throw std::runtime_error("oversample_minority: non-binary label encountered");
        class_rows[y].push_back(r);
    }
    if (class_rows[0].empty() || class_rows[1].empty()) {
        throw std::runtime_error("oversample_minority: training set contains a single class");
    }
    if (class_rows[0].size() == class_rows[1].size()) return train;

    const int minority = class_rows[0].size() < class_rows[1].size() ? 0 : 1;
    const auto& pool = class_rows[minority];
    const std::size_t deficit = class_rows[1 - minority].size() - pool.size();

    EncodedMatrix out = train;
    Rng rng = Rng::substream(seed, "oversample");
    const std::size_t m = train.n_features;
    for (std::size_t k = 0; k < deficit; ++k) {
        std::size_t r = pool[rng.below(pool.size())];
        out.values.insert(out.values.end(), train.values.begin() + static_cast<std::ptrdiff_t>(r * m),
                          train.values.begin() + static_cast<std::ptrdiff_t>((r + 1) * m));
        out.missing.insert(out.missing.end(), train.missing.begin() + static_cast<std::ptrdiff_t>(r * m),
                           train.missing.begin() + static_cast<std::ptrdiff_t>((r + 1) * m));
        out.labels.push_back(train.labels[r]);
        ++out.n_rows;
    }
    return out;
}

}  // namespace ignh
