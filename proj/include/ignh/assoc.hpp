#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ignh {

enum class AssocKind : std::uint8_t { Pearson = 0, PointBiserial = 1, Kendall = 2 };

std::string assoc_kind_name(AssocKind kind);

/// One measured association between two feature columns. `n` is the number of
/// pairwise-complete observations the coefficient was computed from.
struct Assoc {
    double r = 0.0;
    double p_value = 1.0;
    std::size_t n = 0;
    AssocKind kind = AssocKind::Pearson;
};

// All coefficients operate on pairwise-complete data (callers drop rows where
// either side is missing). An undefined association — constant input, fewer
// than 3 pairs, a single class, all ties — comes back as nullopt; downstream
// that simply means "no edge". Length mismatches throw.

// Linear correlation with a two-sided t-test p-value (n-2 dof).
std::optional<Assoc> pearson(std::span<const double> x, std::span<const double> y);

// Continuous x against dichotomous y in {0,1}:
// r = ((mean1 - mean0) / population_std(x)) * sqrt(n1*n0 / n^2),
// algebraically identical to pearson(x, y). Same t-test.
std::optional<Assoc> point_biserial(std::span<const double> x, std::span<const double> y_binary);

// Tie-corrected Kendall tau-b with an O(n log n) merge-sort pair counter.
// p-value from the normal approximation z = 3(C-D)/sqrt(n(n-1)(2n+5)/2).
std::optional<Assoc> kendall_tau(std::span<const double> x, std::span<const double> y);

/// Integer pair counts behind tau-b. ties_x / ties_y include pairs tied on
/// both sides; ties_xy counts those once more.
struct KendallCounts {
    std::int64_t concordant_minus_discordant = 0;
    std::uint64_t ties_x = 0;
    std::uint64_t ties_y = 0;
    std::uint64_t ties_xy = 0;
    std::uint64_t total_pairs = 0;
};
KendallCounts kendall_pair_counts(std::span<const double> x, std::span<const double> y);

// Fisher z-space mean: tanh(mean(atanh(r_i))); inputs are clamped to
// |r| <= 1 - 1e-7 before the transform. Throws on an empty list.
double fisher_average(std::span<const double> rs);

// Combined categorical-vs-numerical association: point-biserial against each
// category's one-hot indicator, keep only components with p < alpha, Fisher
// average the survivors. Reported p is the minimum surviving component
// p-value. Nothing significant (or < 2 observed categories) -> nullopt.
std::optional<Assoc> cat_num_association(std::span<const double> cat_tokens, std::span<const double> num,
                                         double alpha);

// Two-sided Student-t tail probability for a correlation r at sample size n
// (n-2 degrees of freedom). Throws for n < 3; |r| >= 1 gives 0.
double t_test_p_value(double r, std::size_t n);

// Continued-fraction regularized incomplete beta I_x(a, b).
double regularized_incomplete_beta(double a, double b, double x);

// Two-sided standard normal tail, 2 * (1 - Phi(|z|)).
double normal_two_sided_p(double z);

}  // namespace ignh
