#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "ignh/schema.hpp"
#include "ignh/table.hpp"

namespace ignh {

/// Per-feature encoding state fitted on the training split only.
/// Categorical categories are tokenized 1..K in first-appearance order; token
/// 0 is reserved for missing and unseen values. Numerical features carry the
/// training mean and population standard deviation.
struct FeatureEncoder {
    FeatureKind kind = FeatureKind::Numerical;
    double mean = 0.0;
    double stdev = 1.0;
    bool constant = false;                  // population std was 0 (or no data)
    std::vector<std::string> categories;    // token t maps to categories[t-1]
    std::unordered_map<std::string, int> token_of;

    int cardinality() const { return static_cast<int>(categories.size()); }
};

struct EncoderState {
    std::vector<FeatureEncoder> features;
};

/// Numeric matrix ready for the model: z-scores for numerical features,
/// integer tokens for categorical ones, plus the original missingness mask
/// (encoding imputes missing cells, correlations must still skip them).
struct EncodedMatrix {
    std::size_t n_rows = 0;
    std::size_t n_features = 0;
    std::vector<double> values;      // row-major
    std::vector<std::uint8_t> missing;
    std::vector<double> labels;      // class index, or raw regression target
    Task task = Task::Binary;
    std::size_t n_classes = 0;
    std::uint64_t schema_hash = 0;

    double at(std::size_t r, std::size_t c) const { return values[r * n_features + c]; }
    bool is_missing(std::size_t r, std::size_t c) const { return missing[r * n_features + c] != 0; }
    std::span<const double> row(std::size_t r) const {
        return {values.data() + r * n_features, n_features};
    }
};

// First-appearance tokenization for categorical features; mean / population
// std over non-missing training cells for numerical ones. A std of zero flags
// the feature constant rather than rejecting it. Throws on an empty table.
EncoderState fit_encoders(const RawTable& train, const Schema& schema);

// Numeric cell -> (x - mean) / std, 0 when the feature is constant; missing
// numeric -> 0 (the post-normalization training mean). Categorical cell ->
// token; missing or unseen category -> 0. Classification targets map to their
// class_labels index; unknown target labels are an error.
EncodedMatrix encode(const RawTable& table, const EncoderState& state, const Schema& schema);

// Binary tasks only: duplicates uniformly sampled minority rows until the two
// class counts match. Multiclass and regression inputs are returned
// unchanged. Throws if the training set has a single class.
EncodedMatrix oversample_minority(const EncodedMatrix& train, std::uint64_t seed);

}  // namespace ignh
