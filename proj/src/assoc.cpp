#include "ignh/assoc.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

namespace ignh {

namespace {

constexpr double kFisherClamp = 1.0 - 1e-7;

void require_same_length(std::span<const double> x, std::span<const double> y, const char* who) {
    if (x.size() != y.size()) {
        throw std::invalid_argument(std::string(who) + ": input lengths differ");
    }
}

// Continued fraction for the incomplete beta (modified Lentz).
double beta_cf(double a, double b, double x) {
    constexpr double eps = 1e-15;
    constexpr double tiny = 1e-300;
    constexpr int max_iter = 500;

    double qab = a + b;
    double qap = a + 1.0;
    double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) break;
    }
    return h;
}

// Counts inversions of v via bottom-up merge sort; v ends up sorted.
std::uint64_t merge_count_inversions(std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<double> buf(n);
    std::uint64_t swaps = 0;
    for (std::size_t width = 1; width < n; width *= 2) {
        for (std::size_t lo = 0; lo + width < n; lo += 2 * width) {
            std::size_t mid = lo + width;
            std::size_t hi = std::min(lo + 2 * width, n);
            std::size_t i = lo, j = mid, k = lo;
            while (i < mid && j < hi) {
                if (v[j] < v[i]) {
                    swaps += mid - i;
                    buf[k++] = v[j++];
                } else {
                    buf[k++] = v[i++];
                }
            }
            while (i < mid) buf[k++] = v[i++];
            while (j < hi) buf[k++] = v[j++];
            std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo), buf.begin() + static_cast<std::ptrdiff_t>(hi),
                      v.begin() + static_cast<std::ptrdiff_t>(lo));
        }
    }
    return swaps;
}

}  // namespace

std::string assoc_kind_name(AssocKind kind) {
    switch (kind) {
        case AssocKind::Pearson: return "pearson";
        case AssocKind::PointBiserial: return "point_biserial";
        case AssocKind::Kendall: return "kendall";
    }
    throw std::logic_error("bad assoc kind");
}

double regularized_incomplete_beta(double a, double b, double x) {
    if (a <= 0.0 || b <= 0.0) throw std::invalid_argument("regularized_incomplete_beta: a, b must be positive");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * beta_cf(a, b, x) / a;
    }
    return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double normal_two_sided_p(double z) { return std::erfc(std::abs(z) / std::numbers::sqrt2_v<double>); }

double t_test_p_value(double r, std::size_t n) {
    if (n < 3) throw std::invalid_argument("t_test_p_value: need n >= 3 (n-2 degrees of freedom)");
    if (std::abs(r) >= 1.0) return 0.0;
    const double df = static_cast<double>(n - 2);
    const double t2 = r * r * df / (1.0 - r * r);
    // Two-sided tail of Student's t: p = I_{df/(df+t^2)}(df/2, 1/2).
    return regularized_incomplete_beta(df / 2.0, 0.5, df / (df + t2));
}

std::optional<Assoc> pearson(std::span<const double> x, std::span<const double> y) {
    require_same_length(x, y, "pearson");
    const std::size_t n = x.size();
    if (n < 3) return std::nullopt;

    // Single-pass co-moment accumulation (Welford style).
    double mean_x = 0.0, mean_y = 0.0, sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double k = static_cast<double>(i + 1);
        const double dx = x[i] - mean_x;
        const double dy = y[i] - mean_y;
        mean_x += dx / k;
        mean_y += dy / k;
        sxx += dx * (x[i] - mean_x);
        syy += dy * (y[i] - mean_y);
        sxy += dx * (y[i] - mean_y);
    }
    if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;

    double r = sxy / std::sqrt(sxx * syy);
    r = std::clamp(r, -1.0, 1.0);
    return Assoc{r, t_test_p_value(r, n), n, AssocKind::Pearson};
}

std::optional<Assoc> point_biserial(std::span<const double> x, std::span<const double> y_binary) {
    require_same_length(x, y_binary, "point_biserial");
    const std::size_t n = x.size();
    if (n < 3) return std::nullopt;

    double sum1 = 0.0, sum0 = 0.0, sum = 0.0, sumsq = 0.0;
    std::size_t n1 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (y_binary[i] != 0.0 && y_binary[i] != 1.0) {
            throw std::invalid_argument("point_biserial: y must be 0/1");
        }
        if (y_binary[i] == 1.0) {
            sum1 += x[i];
            ++n1;
        } else {
            sum0 += x[i];
        }
        sum += x[i];
        sumsq += x[i] * x[i];
    }
    const std::size_t n0 = n - n1;
    if (n1 == 0 || n0 == 0) return std::nullopt;

    const double mean = sum / static_cast<double>(n);
    const double var = sumsq / static_cast<double>(n) - mean * mean;
    if (var <= 0.0) return std::nullopt;
    const double sigma_n = std::sqrt(var);

    const double mu1 = sum1 / static_cast<double>(n1);
    const double mu0 = sum0 / static_cast<double>(n0);
    double r = (mu1 - mu0) / sigma_n *
               std::sqrt(static_cast<double>(n1) * static_cast<double>(n0) /
                         (static_cast<double>(n) * static_cast<double>(n)));
    r = std::clamp(r, -1.0, 1.0);
    return Assoc{r, t_test_p_value(r, n), n, AssocKind::PointBiserial};
}

KendallCounts kendall_pair_counts(std::span<const double> x, std::span<const double> y) {
    require_same_length(x, y, "kendall_pair_counts");
    const std::size_t n = x.size();
    KendallCounts counts;
    if (n < 2) return counts;

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (x[a] != x[b]) return x[a] < x[b];
        return y[a] < y[b];
    });

    auto pairs_of = [](std::uint64_t t) { return t * (t - 1) / 2; };

    // Tie counts within x and within (x, y) jointly.
    {
        std::size_t run_x = 1, run_xy = 1;
        for (std::size_t i = 1; i < n; ++i) {
            const bool same_x = x[order[i]] == x[order[i - 1]];
            const bool same_xy = same_x && y[order[i]] == y[order[i - 1]];
            if (same_x) {
                ++run_x;
            } else {
                counts.ties_x += pairs_of(run_x);
                run_x = 1;
            }
            if (same_xy) {
                ++run_xy;
            } else {
                counts.ties_xy += pairs_of(run_xy);
                run_xy = 1;
            }
        }
        counts.ties_x += pairs_of(run_x);
        counts.ties_xy += pairs_of(run_xy);
    }

    std::vector<double> y_in_x_order(n);
    for (std::size_t i = 0; i < n; ++i) y_in_x_order[i] = y[order[i]];
    const std::uint64_t swaps = merge_count_inversions(y_in_x_order);  // sorts the buffer

    {
        std::size_t run_y = 1;
        for (std::size_t i = 1; i < n; ++i) {
            if (y_in_x_order[i] == y_in_x_order[i - 1]) {
                ++run_y;
            } else {
                counts.ties_y += pairs_of(run_y);
                run_y = 1;
            }
        }
        counts.ties_y += pairs_of(run_y);
    }

    counts.total_pairs = pairs_of(n);
    // Knight's identity: C - D = n0 - ties_x - ties_y + ties_xy - 2*swaps.
    counts.concordant_minus_discordant =
        static_cast<std::int64_t>(counts.total_pairs) - static_cast<std::int64_t>(counts.ties_x) -
        static_cast<std::int64_t>(counts.ties_y) + static_cast<std::int64_t>(counts.ties_xy) -
        2 * static_cast<std::int64_t>(swaps);
    return counts;
}

std::optional<Assoc> kendall_tau(std::span<const double> x, std::span<const double> y) {
    require_same_length(x, y, "kendall_tau");
    const std::size_t n = x.size();
    if (n < 3) return std::nullopt;

    const KendallCounts counts = kendall_pair_counts(x, y);
    const std::uint64_t n0 = counts.total_pairs;
    if (counts.ties_x == n0 || counts.ties_y == n0) return std::nullopt;  // one side entirely tied

    const auto cd = static_cast<double>(counts.concordant_minus_discordant);
    const double denom =
        std::sqrt(static_cast<double>(n0 - counts.ties_x)) * std::sqrt(static_cast<double>(n0 - counts.ties_y));
    const double tau = std::clamp(cd / denom, -1.0, 1.0);

    const double dn = static_cast<double>(n);
    const double z = 3.0 * cd / std::sqrt(dn * (dn - 1.0) * (2.0 * dn + 5.0) / 2.0);
    return Assoc{tau, normal_two_sided_p(z), n, AssocKind::Kendall};
}

double fisher_average(std::span<const double> rs) {
    if (rs.empty()) throw std::invalid_argument("fisher_average: empty list");
    double sum_z = 0.0;
    for (double r : rs) {
        sum_z += std::atanh(std::clamp(r, -kFisherClamp, kFisherClamp));
    }
    return std::tanh(sum_z / static_cast<double>(rs.size()));
}

std::optional<Assoc> cat_num_association(std::span<const double> cat_tokens, std::span<const double> num,
                                         double alpha) {
    require_same_length(cat_tokens, num, "cat_num_association");
    const std::size_t n = cat_tokens.size();
    if (n < 3) return std::nullopt;

    std::map<double, std::size_t> category_counts;
    for (double t : cat_tokens) ++category_counts[t];
    if (category_counts.size() < 2) return std::nullopt;

    std::vector<double> indicator(n);
    std::vector<double> kept_r;
    double min_p = 1.0;
    for (const auto& [cat, count] : category_counts) {
        (void)count;
        for (std::size_t i = 0; i < n; ++i) indicator[i] = cat_tokens[i] == cat ? 1.0 : 0.0;
        auto pb = point_biserial(num, indicator);
        if (!pb || pb->p_value >= alpha) continue;
        kept_r.push_back(pb->r);
        min_p = std::min(min_p, pb->p_value);
    }
    if (kept_r.empty()) return std::nullopt;
    return Assoc{fisher_average(kept_r), min_p, n, AssocKind::PointBiserial};
}

}  // namespace ignh
