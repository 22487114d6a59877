#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace ignh {

struct ClassAuc {
    std::size_t class_index;
    double auc;
    std::size_t support;
};

struct EvalResult {
    double auc = 0.0;
    std::vector<ClassAuc> per_class;  // multiclass only
    std::size_t n_pos = 0;            // binary only
    std::size_t n_neg = 0;
};

// Mann-Whitney AUC: fraction of (positive, negative) pairs ranked correctly,
// ties counting one half. O(n log n) via sorting with tie groups. Throws when
// only one class is present.
double auc_binary(std::span<const double> scores, std::span<const int> labels);

// One-vs-rest AUC per class, weighted by class support. `probabilities` is
// row-major n x k. Every class in 0..k-1 must appear in `labels`.
EvalResult auc_weighted_ovr(std::span<const double> probabilities, std::span<const int> labels, std::size_t k);

}  // namespace ignh
