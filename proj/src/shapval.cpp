#include "ignh/shapval.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>

#include "ignh/parallel.hpp"
#include "ignh/rng.hpp"

namespace ignh {

namespace {

double binomial(std::size_t n, std::size_t k) {
    if (k > n) return 0.0;
    k = std::min(k, n - k);
    double c = 1.0;
    for (std::size_t i = 1; i <= k; ++i) {
        c *= static_cast<double>(n - k + i) / static_cast<double>(i);
    }
    return c;
}

struct WeightedMask {
    std::vector<std::uint8_t> mask;
    double weight;
    double value;  // f(mask)
};

// Solves the kernel-weighted least squares with the efficiency constraint
// substituted out: phi of the last feature is delta - sum(others).
std::vector<double> solve_masks(const std::vector<WeightedMask>& masks, std::size_t m, double f_empty,
                                double f_full) {
    const double delta = f_full - f_empty;
    const std::size_t p = m - 1;

    std::vector<double> xtx(p * p, 0.0);
    std::vector<double> xty(p, 0.0);
    std::vector<double> xrow(p);
    for (const auto& wm : masks) {
        const double zm = wm.mask[p] ? 1.0 : 0.0;
        for (std::size_t i = 0; i < p; ++i) xrow[i] = (wm.mask[i] ? 1.0 : 0.0) - zm;
        const double target = (wm.value - f_empty) - zm * delta;
        for (std::size_t i = 0; i < p; ++i) {
            if (xrow[i] == 0.0) continue;
            const double wxi = wm.weight * xrow[i];
            for (std::size_t j = 0; j < p; ++j) xtx[i * p + j] += wxi * xrow[j];
            xty[i] += wxi * target;
        }
    }

    // Gaussian elimination with partial pivoting.
    std::vector<double> a = xtx;
    std::vector<double> b = xty;
    for (std::size_t col = 0; col < p; ++col) {
        std::size_t pivot = col;
        double best = std::abs(a[col * p + col]);
        for (std::size_t r = col + 1; r < p; ++r) {
            const double v = std::abs(a[r * p + col]);
            if (v > best) {
                best = v;
                pivot = r;
            }
        }
        if (best < 1e-12) {
            throw std::runtime_error("kernel_shap: underdetermined design (too few distinct coalitions)");
        }
        if (pivot != col) {
            for (std::size_t c = 0; c < p; ++c) std::swap(a[col * p + c], a[pivot * p + c]);
            std::swap(b[col], b[pivot]);
        }
        const double inv = 1.0 / a[col * p + col];
        for (std::size_t r = col + 1; r < p; ++r) {
            const double factor = a[r * p + col] * inv;
            if (factor == 0.0) continue;
            for (std::size_t c = col; c < p; ++c) a[r * p + c] -= factor * a[col * p + c];
            b[r] -= factor * b[col];
        }
    }
    std::vector<double> phi(m, 0.0);
    for (std::size_t col = p; col-- > 0;) {
        double acc = b[col];
        for (std::size_t c = col + 1; c < p; ++c) acc -= a[col * p + c] * phi[c];
        phi[col] = acc / a[col * p + col];
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < p; ++i) sum += phi[i];
    phi[p] = delta - sum;
    return phi;
}

std::vector<double> masked_row(std::span<const double> row, std::span<const double> baseline,
                               const std::vector<std::uint8_t>& mask) {
    std::vector<double> x(row.size());
    for (std::size_t i = 0; i < row.size(); ++i) x[i] = mask[i] ? row[i] : baseline[i];
    return x;
}

}  // namespace

double shapley_kernel_weight(std::size_t m, std::size_t s) {
    if (s == 0 || s >= m) throw std::invalid_argument("shapley_kernel_weight: 0 < s < m required");
    return static_cast<double>(m - 1) /
           (binomial(m, s) * static_cast<double>(s) * static_cast<double>(m - s));
}

std::vector<double> exact_shapley(const PredictFn& fn, std::span<const double> row,
                                  std::span<const double> baseline) {
    const std::size_t m = row.size();
    if (m == 0 || m > 20) throw std::invalid_argument("exact_shapley: supports 1 <= m <= 20 features");
    if (baseline.size() != m) throw std::invalid_argument("exact_shapley: baseline size mismatch");

    const std::size_t n_masks = std::size_t{1} << m;
    std::vector<double> value(n_masks);
    std::vector<std::uint8_t> mask(m);
    for (std::size_t bits = 0; bits < n_masks; ++bits) {
        for (std::size_t i = 0; i < m; ++i) mask[i] = (bits >> i) & 1;
        value[bits] = fn(masked_row(row, baseline, mask));
    }

    // w(s) = s!(m-s-1)!/m! = 1 / (m * C(m-1, s))
    std::vector<double> w(m);
    for (std::size_t s = 0; s < m; ++s) w[s] = 1.0 / (static_cast<double>(m) * binomial(m - 1, s));

    std::vector<double> phi(m, 0.0);
    for (std::size_t bits = 0; bits < n_masks; ++bits) {
        const auto s = static_cast<std::size_t>(std::popcount(bits));
        for (std::size_t i = 0; i < m; ++i) {
            if (bits & (std::size_t{1} << i)) continue;
            phi[i] += w[s] * (value[bits | (std::size_t{1} << i)] - value[bits]);
        }
    }
    return phi;
}

std::vector<double> kernel_shap(const PredictFn& fn, std::span<const double> row, std::span<const double> baseline,
                                std::size_t n_samples, std::uint64_t seed) {
    const std::size_t m = row.size();
    if (m < 2) throw std::invalid_argument("kernel_shap: need at least 2 features");
    if (baseline.size() != m) throw std::invalid_argument("kernel_shap: baseline size mismatch");
    if (n_samples < m + 2) throw std::invalid_argument("kernel_shap: n_samples must be at least m + 2");

    // Size distribution of a mask drawn proportional to the kernel:
    // p(s) ∝ pi(s) * C(m, s) = (m-1)/(s(m-s)).
    std::vector<double> cum(m - 1);
    double total = 0.0;
    for (std::size_t s = 1; s < m; ++s) {
        total += 1.0 / (static_cast<double>(s) * static_cast<double>(m - s));
        cum[s - 1] = total;
    }

    Rng rng(seed);
    std::vector<std::size_t> indices(m);
    std::iota(indices.begin(), indices.end(), 0);

    std::map<std::vector<std::uint8_t>, double> counts;  // mask -> draw count
    std::size_t drawn = 0;
    std::vector<std::uint8_t> mask(m), comp(m);
    while (drawn < n_samples) {
        const double u = rng.uniform() * total;
        std::size_t s = 1;
        while (s < m - 1 && u > cum[s - 1]) ++s;

        // Uniform coalition of size s via a partial Fisher-Yates pass.
        for (std::size_t i = 0; i < s; ++i) {
            const std::size_t j = i + rng.below(m - i);
            std::swap(indices[i], indices[j]);
        }
        std::fill(mask.begin(), mask.end(), 0);
        for (std::size_t i = 0; i < s; ++i) mask[indices[i]] = 1;

        counts[mask] += 1.0;
        ++drawn;
        if (drawn < n_samples) {  // paired complement for variance reduction
            for (std::size_t i = 0; i < m; ++i) comp[i] = mask[i] ? 0 : 1;
            counts[comp] += 1.0;
            ++drawn;
        }
    }
    if (counts.size() < m) {
        throw std::runtime_error("kernel_shap: underdetermined design (fewer distinct coalitions than features)");
    }

    std::vector<WeightedMask> masks;
    masks.reserve(counts.size());
    for (const auto& [key, count] : counts) {
        masks.push_back({key, count, fn(masked_row(row, baseline, key))});
    }
    const double f_empty = fn(std::vector<double>(baseline.begin(), baseline.end()));
    const double f_full = fn(std::vector<double>(row.begin(), row.end()));
    return solve_masks(masks, m, f_empty, f_full);
}

std::vector<double> kernel_shap_complete(const PredictFn& fn, std::span<const double> row,
                                         std::span<const double> baseline) {
    const std::size_t m = row.size();
    if (m < 2 || m > 20) throw std::invalid_argument("kernel_shap_complete: supports 2 <= m <= 20 features");
    if (baseline.size() != m) throw std::invalid_argument("kernel_shap_complete: baseline size mismatch");

    std::vector<WeightedMask> masks;
    masks.reserve((std::size_t{1} << m) - 2);
    std::vector<std::uint8_t> mask(m);
    for (std::size_t bits = 1; bits + 1 < (std::size_t{1} << m); ++bits) {
        for (std::size_t i = 0; i < m; ++i) mask[i] = (bits >> i) & 1;
        const auto s = static_cast<std::size_t>(std::popcount(bits));
        masks.push_back({mask, shapley_kernel_weight(m, s), fn(masked_row(row, baseline, mask))});
    }
    const double f_empty = fn(std::vector<double>(baseline.begin(), baseline.end()));
    const double f_full = fn(std::vector<double>(row.begin(), row.end()));
    return solve_masks(masks, m, f_empty, f_full);
}

std::optional<double> cosine_similarity(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("cosine_similarity: length mismatch");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return std::nullopt;
    return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
        const double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

std::optional<double> pearson_r_plain(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return std::nullopt;
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace

std::optional<double> spearman(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("spearman: length mismatch");
    if (a.size() < 2) throw std::invalid_argument("spearman: need at least 2 elements");
    return pearson_r_plain(average_ranks(a), average_ranks(b));
}

std::string trace_to_csv(const ConvergenceTrace& trace) {
    const bool with_exact = !trace.points.empty() && trace.points.front().mean_cosine_exact.has_value();
    std::string out = with_exact ? "budget,mean_cosine,mean_spearman,n_rows,mean_cosine_exact,mean_spearman_exact\n"
                                 : "budget,mean_cosine,mean_spearman,n_rows\n";
    char buf[192];
    for (const auto& p : trace.points) {
        if (with_exact) {
            std::snprintf(buf, sizeof(buf), "%zu,%.12g,%.12g,%zu,%.12g,%.12g\n", p.budget, p.mean_cosine,
                          p.mean_spearman, p.n_rows, p.mean_cosine_exact.value_or(0.0),
                          p.mean_spearman_exact.value_or(0.0));
        } else {
            std::snprintf(buf, sizeof(buf), "%zu,%.12g,%.12g,%zu\n", p.budget, p.mean_cosine, p.mean_spearman,
                          p.n_rows);
        }
        out += buf;
    }
    return out;
}

ConvergenceTrace convergence_trace(const EncodedMatrix& data, std::span<const std::size_t> rows,
                                   const ModelParams& params, const GraphView& graph, const ModelConfig& config,
                                   const TraceOptions& options, std::span<const double> baseline) {
    if (rows.empty()) throw std::invalid_argument("convergence_trace: no rows to explain");
    if (options.budgets.empty()) throw std::invalid_argument("convergence_trace: no budgets");
    const std::size_t m = data.n_features;

    std::vector<double> base(m, 0.0);
    if (!baseline.empty()) {
        if (baseline.size() != m) throw std::invalid_argument("convergence_trace: baseline size mismatch");
        base.assign(baseline.begin(), baseline.end());
    }

    std::vector<std::size_t> effective(options.budgets.size());
    for (std::size_t i = 0; i < options.budgets.size(); ++i) {
        effective[i] = options.budgets[i] == kFullBudget ? (std::size_t{1} << m) - 2 : options.budgets[i];
        if (i > 0 && effective[i] <= effective[i - 1]) {
            throw std::invalid_argument("convergence_trace: budgets must be strictly increasing");
        }
    }

    const bool want_exact = options.include_exact && m <= 20;

    struct RowResult {
        std::vector<std::optional<double>> cos, rho, cos_ex, rho_ex;  // per budget
    };
    std::vector<RowResult> per_row(rows.size());

    parallel_for(rows.size(), options.threads, [&](std::size_t begin, std::size_t end) {
        ForwardTrace trace;
        for (std::size_t ri = begin; ri < end; ++ri) {
            const std::size_t row_id = rows[ri];
            const auto row = data.row(row_id);

            forward(row, params, graph, config, trace);
            std::size_t cls = 0;
            if (config.task == Task::Multiclass) {
                cls = static_cast<std::size_t>(std::distance(
                    trace.z.begin(), std::max_element(trace.z.begin(), trace.z.end())));
            }
            std::vector<double> model_scores(m);
            for (std::size_t i = 0; i < m; ++i) model_scores[i] = trace.scores[i * params.layout.k + cls];

            PredictFn fn = [&](std::span<const double> x) {
                ForwardTrace t;
                forward(x, params, graph, config, t);
                return t.z[cls];
            };

            std::vector<double> phi_exact;
            if (want_exact) phi_exact = exact_shapley(fn, row, base);

            RowResult& rr = per_row[ri];
            rr.cos.resize(options.budgets.size());
            rr.rho.resize(options.budgets.size());
            rr.cos_ex.resize(options.budgets.size());
            rr.rho_ex.resize(options.budgets.size());
            for (std::size_t bi = 0; bi < options.budgets.size(); ++bi) {
                std::vector<double> phi;
                if (options.budgets[bi] == kFullBudget) {
                    phi = kernel_shap_complete(fn, row, base);
                } else {
                    const std::string name = "shap:" + std::to_string(row_id) + ":" + std::to_string(bi);
                    Rng sub = Rng::substream(options.seed, name);
                    phi = kernel_shap(fn, row, base, effective[bi], sub.next_u64());
                }
                rr.cos[bi] = cosine_similarity(phi, model_scores);
                rr.rho[bi] = spearman(phi, model_scores);
                if (want_exact) {
                    rr.cos_ex[bi] = cosine_similarity(phi, phi_exact);
                    rr.rho_ex[bi] = spearman(phi, phi_exact);
                }
            }
        }
    });

    ConvergenceTrace result;
    for (std::size_t bi = 0; bi < options.budgets.size(); ++bi) {
        TracePoint pt;
        pt.budget = effective[bi];
        double sum_cos = 0.0, sum_rho = 0.0, sum_cos_ex = 0.0, sum_rho_ex = 0.0;
        std::size_t n_valid = 0, n_valid_ex = 0;
        for (const auto& rr : per_row) {
            if (rr.cos[bi] && rr.rho[bi]) {
                sum_cos += *rr.cos[bi];
                sum_rho += *rr.rho[bi];
                ++n_valid;
            }
            if (want_exact && rr.cos_ex[bi] && rr.rho_ex[bi]) {
                sum_cos_ex += *rr.cos_ex[bi];
                sum_rho_ex += *rr.rho_ex[bi];
                ++n_valid_ex;
            }
        }
        if (n_valid == 0) throw std::runtime_error("convergence_trace: no row produced a defined similarity");
        pt.mean_cosine = sum_cos / static_cast<double>(n_valid);
        pt.mean_spearman = sum_rho / static_cast<double>(n_valid);
        pt.n_rows = n_valid;
        if (want_exact && n_valid_ex > 0) {
            pt.mean_cosine_exact = sum_cos_ex / static_cast<double>(n_valid_ex);
            pt.mean_spearman_exact = sum_rho_ex / static_cast<double>(n_valid_ex);
        }
        result.points.push_back(pt);
    }
    return result;
}

}  // namespace ignh
