#include "ignh/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace ignh {

double auc_binary(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) throw std::invalid_argument("auc_binary: length mismatch");
    const std::size_t n = scores.size();

    std::size_t n_pos = 0;
    for (int y : labels) {
        if (y != 0 && y != 1) throw std::invalid_argument("auc_binary: labels must be 0/1");
        n_pos += static_cast<std::size_t>(y);
    }
    const std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0) throw std::invalid_argument("auc_binary: both classes must be present");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Average ranks over tie groups, then the rank-sum form of U.
    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) {
            if (labels[order[k]] == 1) rank_sum_pos += avg_rank;
        }
        i = j + 1;
    }
    const double u = rank_sum_pos - static_cast<double>(n_pos) * (static_cast<double>(n_pos) + 1.0) / 2.0;
    return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

EvalResult auc_weighted_ovr(std::span<const double> probabilities, std::span<const int> labels, std::size_t k) {
    if (k < 2) throw std::invalid_argument("auc_weighted_ovr: need k >= 2");
    const std::size_t n = labels.size();
    if (probabilities.size() != n * k) throw std::invalid_argument("auc_weighted_ovr: matrix shape mismatch");

    std::vector<std::size_t> support(k, 0);
    for (int y : labels) {
        if (y < 0 || static_cast<std::size_t>(y) >= k) throw std::invalid_argument("auc_weighted_ovr: label out of range");
        ++support[static_cast<std::size_t>(y)];
    }

    EvalResult result;
    std::vector<double> col(n);
    std::vector<int> ovr(n);
    double weighted = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
        if (support[c] == 0) {
            throw std::invalid_argument("auc_weighted_ovr: class " + std::to_string(c) + " absent from labels");
        }
        for (std::size_t r = 0; r < n; ++r) {
            col[r] = probabilities[r * k + c];
            ovr[r] = labels[r] == static_cast<int>(c) ? 1 : 0;
        }
        const double auc_c = auc_binary(col, ovr);
        result.per_class.push_back({c, auc_c, support[c]});
        weighted += auc_c * static_cast<double>(support[c]);
    }
    result.auc = weighted / static_cast<double>(n);
    return result;
}

}  // namespace ignh
