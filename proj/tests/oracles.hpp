// Test-only reference implementations. Each one takes a deliberately
// different route than the library (two-pass formulas, O(n^2) pair counting,
// quadrature) so agreement is meaningful.
#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace oracle {

// Direct two-pass evaluation of the covariance-over-stds formula.
inline double pearson_two_pass(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double num = 0.0, dx2 = 0.0, dy2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        num += (x[i] - mx) * (y[i] - my);
        dx2 += (x[i] - mx) * (x[i] - mx);
        dy2 += (y[i] - my) * (y[i] - my);
    }
    return num / std::sqrt(dx2 * dy2);
}

struct KendallBrute {
    std::int64_t concordant = 0;
    std::int64_t discordant = 0;
    std::int64_t ties_x_only = 0;
    std::int64_t ties_y_only = 0;
    std::int64_t ties_both = 0;

    std::int64_t cd() const { return concordant - discordant; }
    double tau_b() const {
        const double row = static_cast<double>(concordant + discordant + ties_y_only);
        const double col = static_cast<double>(concordant + discordant + ties_x_only);
        return static_cast<double>(cd()) / std::sqrt(row * col);
    }
};

// Exhaustive O(n^2) pair enumeration.
inline KendallBrute kendall_brute(std::span<const double> x, std::span<const double> y) {
    KendallBrute k;
    const std::size_t n = x.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dx = x[i] - x[j];
            const double dy = y[i] - y[j];
            if (dx == 0.0 && dy == 0.0) ++k.ties_both;
            else if (dx == 0.0) ++k.ties_x_only;
            else if (dy == 0.0) ++k.ties_y_only;
            else if (dx * dy > 0.0) ++k.concordant;
            else ++k.discordant;
        }
    }
    return k;
}

// O(n^2) pair counting form of the Mann-Whitney AUC.
inline double auc_brute(std::span<const double> scores, std::span<const int> labels) {
    double wins = 0.0;
    std::size_t n_pos = 0, n_neg = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (labels[i] == 1) {
            ++n_pos;
        } else {
            ++n_neg;
            continue;
        }
        for (std::size_t j = 0; j < scores.size(); ++j) {
            if (labels[j] != 0) continue;
            if (scores[i] > scores[j]) wins += 1.0;
            else if (scores[i] == scores[j]) wins += 0.5;
        }
    }
    return wins / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

// Student-t density with df degrees of freedom.
inline double t_density(double u, double df) {
    const double c = std::exp(std::lgamma((df + 1.0) / 2.0) - std::lgamma(df / 2.0)) /
                     std::sqrt(df * 3.14159265358979323846);
    return c * std::pow(1.0 + u * u / df, -(df + 1.0) / 2.0);
}

// Two-sided tail by composite Simpson over [0, |t|]: p = 1 - 2 * integral.
inline double t_two_sided_p_quadrature(double t, double df) {
    const double b = std::abs(t);
    if (b == 0.0) return 1.0;
    const std::size_t intervals = 40000;  // even
    const double h = b / static_cast<double>(intervals);
    double sum = t_density(0.0, df) + t_density(b, df);
    for (std::size_t i = 1; i < intervals; ++i) {
        sum += t_density(h * static_cast<double>(i), df) * (i % 2 == 1 ? 4.0 : 2.0);
    }
    const double integral = sum * h / 3.0;
    return 1.0 - 2.0 * integral;
}

inline double t_from_r(double r, std::size_t n) {
    const double df = static_cast<double>(n - 2);
    return r * std::sqrt(df / (1.0 - r * r));
}

// Rank-based Spearman through explicit rank vectors.
inline double spearman_brute(std::span<const double> a, std::span<const double> b) {
    auto ranks = [](std::span<const double> v) {
        const std::size_t n = v.size();
        std::vector<double> rank(n);
        for (std::size_t i = 0; i < n; ++i) {
            double less = 0.0, equal = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (v[j] < v[i]) ++less;
                else if (v[j] == v[i]) ++equal;
            }
            rank[i] = less + (equal + 1.0) / 2.0;
        }
        return rank;
    };
    auto ra = ranks(a), rb = ranks(b);
    return pearson_two_pass(ra, rb);
}

}  // namespace oracle
