#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "ignh/encode.hpp"
#include "ignh/model.hpp"

namespace ignh {

/// Game evaluation for attribution: masked input -> pre-link model output.
using PredictFn = std::function<double(std::span<const double>)>;

// Shapley kernel pi(s) = (m-1) / (C(m,s) * s * (m-s)) for 0 < s < m.
double shapley_kernel_weight(std::size_t m, std::size_t s);

// Exact Shapley values by full coalition enumeration (m <= 20). f evaluates
// the row with features outside the coalition replaced by baseline values.
std::vector<double> exact_shapley(const PredictFn& fn, std::span<const double> row,
                                  std::span<const double> baseline);

// KernelSHAP: coalition masks drawn with probability proportional to the
// Shapley kernel (paired with their complements), then a weighted
// least-squares fit with the efficiency constraint eliminated by
// substitution, so sum(phi) = f(full) - f(empty) holds exactly. Deterministic
// under seed. Throws "underdetermined" when the sampled design cannot
// identify all coefficients. Requires n_samples >= m + 2.
std::vector<double> kernel_shap(const PredictFn& fn, std::span<const double> row, std::span<const double> baseline,
                                std::size_t n_samples, std::uint64_t seed);

// Complete-design KernelSHAP: every one of the 2^m - 2 proper masks exactly
// once, weighted by the Shapley kernel. Equals exact_shapley up to the linear
// solve's round-off.
std::vector<double> kernel_shap_complete(const PredictFn& fn, std::span<const double> row,
                                         std::span<const double> baseline);

// a.b / (|a||b|); nullopt when either vector is zero.
std::optional<double> cosine_similarity(std::span<const double> a, std::span<const double> b);

// Pearson correlation of average ranks (ties get mean ranks); nullopt when
// either side is constant.
std::optional<double> spearman(std::span<const double> a, std::span<const double> b);

struct TracePoint {
    std::size_t budget;    // coalition evaluations drawn at this step
    double mean_cosine;    // KernelSHAP estimate vs model scores
    double mean_spearman;
    std::size_t n_rows;    // rows that produced defined similarities
    std::optional<double> mean_cosine_exact;  // KernelSHAP estimate vs exact Shapley
    std::optional<double> mean_spearman_exact;
};

struct ConvergenceTrace {
    std::vector<TracePoint> points;
};

std::string trace_to_csv(const ConvergenceTrace& trace);

constexpr std::size_t kFullBudget = static_cast<std::size_t>(-1);  // complete enumeration sentinel

struct TraceOptions {
    std::vector<std::size_t> budgets;  // strictly increasing; kFullBudget = complete design
    std::uint64_t seed = 0;
    int threads = 1;
    bool include_exact = false;  // also compare against the brute-force oracle (m <= 20)
};

// For each budget and row: run KernelSHAP on the model's pre-link output
// (predicted class for multiclass) against the baseline row and compare the
// estimate to the model's own per-feature scores; similarities are averaged
// over rows. The baseline is the all-zero encoded row unless supplied.
ConvergenceTrace convergence_trace(const EncodedMatrix& data, std::span<const std::size_t> rows,
                                   const ModelParams& params, const GraphView& graph, const ModelConfig& config,
                                   const TraceOptions& options,
                                   std::span<const double> baseline = {});

}  // namespace ignh
