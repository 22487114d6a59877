#include "ignh/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "ignh/metrics.hpp"
#include "ignh/rng.hpp"

namespace ignh {

void TrainConfig::validate() const {
    if (learning_rate <= 0.0) throw std::invalid_argument("train config: learning_rate must be positive");
    if (max_epochs == 0) throw std::invalid_argument("train config: max_epochs must be >= 1");
    if (patience == 0) throw std::invalid_argument("train config: patience must be >= 1");
    if (patience > max_epochs) throw std::invalid_argument("train config: patience cannot exceed max_epochs");
    if (batch_size == 0) throw std::invalid_argument("train config: batch_size must be >= 1");
    if (beta1 <= 0.0 || beta1 >= 1.0 || beta2 <= 0.0 || beta2 >= 1.0) {
        throw std::invalid_argument("train config: betas must be in (0, 1)");
    }
    if (epsilon <= 0.0) throw std::invalid_argument("train config: epsilon must be positive");
}

std::string history_to_csv(const TrainHistory& history) {
    std::string out = "epoch,train_loss,val_metric,timestamp_ms\n";
    char buf[128];
    for (const auto& e : history.epochs) {
        std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%lld\n", e.epoch, e.train_loss, e.val_metric,
                      static_cast<long long>(e.unix_ms));
        out += buf;
    }
    return out;
}

namespace {

double instance_loss(std::span<const double> z, double label, Task task, std::size_t k) {
    switch (task) {
        case Task::Binary: {
            const double y = label;
            if (y != 0.0 && y != 1.0) throw std::invalid_argument("loss: binary label outside {0,1}");
            const double zz = z[0];
            return std::max(zz, 0.0) - zz * y + std::log1p(std::exp(-std::abs(zz)));
        }
        case Task::Multiclass: {
            const auto y = static_cast<std::size_t>(label);
            if (label < 0.0 || y >= k) throw std::invalid_argument("loss: label outside class range");
            double zmax = z[0];
            for (std::size_t c = 1; c < k; ++c) zmax = std::max(zmax, z[c]);
            double sum = 0.0;
            for (std::size_t c = 0; c < k; ++c) sum += std::exp(z[c] - zmax);
            return zmax + std::log(sum) - z[y];
        }
        case Task::Regression: {
            const double d = z[0] - label;
            return d * d;
        }
    }
    throw std::logic_error("bad task");
}

// dL/dz of the *mean* batch loss, for one instance (scale applied later).
void instance_dz(std::span<const double> z, double label, Task task, std::size_t k, std::vector<double>& dz) {
    dz.assign(k, 0.0);
    switch (task) {
        case Task::Binary:
            dz[0] = sigmoid(z[0]) - label;
            break;
        case Task::Multiclass: {
            auto probs = apply_link(z, Task::Multiclass);
            for (std::size_t c = 0; c < k; ++c) dz[c] = probs[c];
            dz[static_cast<std::size_t>(label)] -= 1.0;
            break;
        }
        case Task::Regression:
            dz[0] = 2.0 * (z[0] - label);
            break;
    }
}

}  // namespace

double batch_loss(std::span<const double> zs, std::span<const double> labels, Task task, std::size_t k) {
    if (labels.empty()) throw std::invalid_argument("loss: empty batch");
    if (zs.size() != labels.size() * k) throw std::invalid_argument("loss: shape mismatch");
    double total = 0.0;
    for (std::size_t b = 0; b < labels.size(); ++b) {
        total += instance_loss(zs.subspan(b * k, k), labels[b], task, k);
    }
    return total / static_cast<double>(labels.size());
}

BatchGradients backward(const EncodedMatrix& data, std::span<const std::size_t> rows, const ModelParams& params,
                        const GraphView& graph, const ModelConfig& config) {
    if (rows.empty()) throw std::invalid_argument("backward: empty batch");
    const ParamLayout& lay = params.layout;
    const std::size_t k = lay.k;
    const std::size_t L = lay.dims.size();
    const double scale = 1.0 / static_cast<double>(rows.size());

    BatchGradients out;
    out.grads.assign(lay.total, 0.0);
    double* g = out.grads.data();

    ForwardTrace trace;
    std::vector<double> dz, d_h, d_pre, d_agg, d_h_prev;
    double total_loss = 0.0;

    for (std::size_t row_idx : rows) {
        const auto row = data.row(row_idx);
        const double label = data.labels[row_idx];
        forward(row, params, graph, config, trace);
        total_loss += instance_loss(trace.z, label, config.task, k);

        instance_dz(trace.z, label, config.task, k, dz);
        for (double& v : dz) v *= scale;

        // Readout and output weights.
        for (std::size_t c = 0; c < k; ++c) g[lay.bias_off + c] += dz[c];
        const std::size_t d_last = lay.dims.back();
        d_h.assign(lay.m * d_last, 0.0);
        for (std::size_t i = 0; i < lay.m; ++i) {
            const double* w_out = params.values.data() + lay.out_w_off + i * k;
            double dr = 0.0;
            for (std::size_t c = 0; c < k; ++c) {
                g[lay.out_w_off + i * k + c] += dz[c] * trace.readout_val[i];
                dr += w_out[c] * dz[c];
            }
            const double* r_vec = params.values.data() + lay.readout_offset(i);
            const double* hi = trace.h[L].data() + i * d_last;
            double* dhi = d_h.data() + i * d_last;
            for (std::size_t d = 0; d < d_last; ++d) {
                g[lay.readout_offset(i) + d] += dr * hi[d];
                dhi[d] = dr * r_vec[d];
            }
        }

        // Message-passing layers, last to first.
        for (std::size_t l = L; l-- > 0;) {
            const std::size_t d_in = lay.layer_in_dim(l);
            const std::size_t d_out = lay.dims[l];

            d_pre.assign(lay.m * d_out, 0.0);
            for (std::size_t i = 0; i < lay.m * d_out; ++i) {
                const double grad_h = d_h[i];
                if (config.activation == Activation::Relu) {
                    d_pre[i] = trace.pre[l][i] > 0.0 ? grad_h : 0.0;
                } else {
                    const double th = trace.h[l + 1][i];
                    d_pre[i] = grad_h * (1.0 - th * th);
                }
            }

            d_agg.assign(lay.m * d_in, 0.0);
            for (std::size_t i = 0; i < lay.m; ++i) {
                const double* w = params.values.data() + lay.weight_offset(l, i);
                const double* a = trace.agg[l].data() + i * d_in;
                const double* dp = d_pre.data() + i * d_out;
                double* da = d_agg.data() + i * d_in;
                double* gw = g + lay.weight_offset(l, i);
                double* gb = g + lay.bias_offset(l, i);
                for (std::size_t o = 0; o < d_out; ++o) {
                    const double dpo = dp[o];
                    if (dpo == 0.0) continue;
                    gb[o] += dpo;
                    const double* wrow = w + o * d_in;
                    double* gwrow = gw + o * d_in;
                    for (std::size_t d = 0; d < d_in; ++d) {
                        gwrow[d] += dpo * a[d];
                        da[d] += wrow[d] * dpo;
                    }
                }
            }

            // The aggregation is linear with symmetric weights, so its
            // adjoint is the same weighted sum applied to d_agg.
            d_h_prev.assign(lay.m * d_in, 0.0);
            for (std::size_t u = 0; u < lay.m; ++u) {
                double* dh = d_h_prev.data() + u * d_in;
                const double* da_self = d_agg.data() + u * d_in;
                const double w_self = graph.self_weight[u];
                for (std::size_t d = 0; d < d_in; ++d) dh[d] = w_self * da_self[d];
                for (const auto& [nbr, w] : graph.neighbors[u]) {
                    const double* da_n = d_agg.data() + static_cast<std::size_t>(nbr) * d_in;
                    for (std::size_t d = 0; d < d_in; ++d) dh[d] += w * da_n[d];
                }
            }
            d_h.swap(d_h_prev);
        }

        // Input blocks.
        const std::size_t d0 = lay.embed_dim;
        for (std::size_t f = 0; f < lay.m; ++f) {
            const double* dh = d_h.data() + f * d0;
            if (lay.cardinality[f] >= 0) {
                const int token = static_cast<int>(row[f]);
                double* ge = g + lay.embedding_offset(f, token);
                for (std::size_t d = 0; d < d0; ++d) ge[d] += dh[d];
            } else {
                double* gp = g + lay.input_off[f];
                double* gb = gp + d0;
                for (std::size_t d = 0; d < d0; ++d) {
                    gp[d] += dh[d] * row[f];
                    gb[d] += dh[d];
                }
            }
        }
    }

    out.loss = total_loss * scale;
    return out;
}

void adam_step(ModelParams& params, std::span<const double> grads, AdamState& state, const TrainConfig& config) {
    const std::size_t n = params.values.size();
    if (grads.size() != n) throw std::invalid_argument("adam_step: gradient size mismatch");
    if (state.m.empty()) {
        state.m.assign(n, 0.0);
        state.v.assign(n, 0.0);
        state.t = 0;
    }
    ++state.t;
    const double b1 = config.beta1;
    const double b2 = config.beta2;
    const double corr1 = 1.0 - std::pow(b1, static_cast<double>(state.t));
    const double corr2 = 1.0 - std::pow(b2, static_cast<double>(state.t));
    for (std::size_t i = 0; i < n; ++i) {
        const double gi = grads[i];
        state.m[i] = b1 * state.m[i] + (1.0 - b1) * gi;
        state.v[i] = b2 * state.v[i] + (1.0 - b2) * gi * gi;
        const double m_hat = state.m[i] / corr1;
        const double v_hat = state.v[i] / corr2;
        params.values[i] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon);
    }
}

double validation_metric(const EncodedMatrix& val, const ModelParams& params, const GraphView& graph,
                         const ModelConfig& config) {
    const std::size_t n = val.n_rows;
    if (n == 0) throw std::invalid_argument("validation_metric: empty validation set");
    ForwardTrace trace;
    switch (config.task) {
        case Task::Binary: {
            std::vector<double> scores(n);
            std::vector<int> labels(n);
            for (std::size_t r = 0; r < n; ++r) {
                forward(val.row(r), params, graph, config, trace);
                scores[r] = sigmoid(trace.z[0]);
                labels[r] = static_cast<int>(val.labels[r]);
            }
            return auc_binary(scores, labels);
        }
        case Task::Multiclass: {
            const std::size_t k = config.n_classes;
            std::vector<double> probs(n * k);
            std::vector<int> labels(n);
            for (std::size_t r = 0; r < n; ++r) {
                forward(val.row(r), params, graph, config, trace);
                auto p = apply_link(trace.z, Task::Multiclass);
                std::copy(p.begin(), p.end(), probs.begin() + static_cast<std::ptrdiff_t>(r * k));
                labels[r] = static_cast<int>(val.labels[r]);
            }
            return auc_weighted_ovr(probs, labels, k).auc;
        }
        case Task::Regression: {
            double mse = 0.0;
            for (std::size_t r = 0; r < n; ++r) {
                forward(val.row(r), params, graph, config, trace);
                const double d = trace.z[0] - val.labels[r];
                mse += d * d;
            }
            return mse / static_cast<double>(n);
        }
    }
    throw std::logic_error("bad task");
}

TrainResult train(const EncodedMatrix& train_set, const EncodedMatrix& val_set, const FeatureGraph& graph,
                  const Schema& schema, const EncoderState& encoders, const ModelConfig& model_config,
                  const TrainConfig& train_config) {
    model_config.validate();
    train_config.validate();
    if (train_set.n_rows == 0) throw std::invalid_argument("train: empty training set");

    const GraphView gv = GraphView::make(graph);
    ModelParams params = init_params(schema, encoders, model_config);
    AdamState adam;
    Rng shuffle_rng = Rng::substream(train_config.seed, "shuffle");

    std::vector<std::size_t> order(train_set.n_rows);
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    const bool maximize = model_config.task != Task::Regression;

    TrainResult result;
    result.params = params;
    TrainHistory& history = result.history;
    double best_metric = maximize ? -1.0 : std::numeric_limits<double>::infinity();
    std::size_t epochs_since_best = 0;

    for (std::size_t epoch = 1; epoch <= train_config.max_epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        double epoch_loss = 0.0;
        std::size_t seen = 0;
        for (std::size_t start = 0; start < order.size(); start += train_config.batch_size) {
            const std::size_t len = std::min(train_config.batch_size, order.size() - start);
            auto batch = std::span<const std::size_t>(order).subspan(start, len);
            BatchGradients bg = backward(train_set, batch, params, gv, model_config);
            if (!std::isfinite(bg.loss)) {
                throw std::runtime_error("train: loss is not finite at epoch " + std::to_string(epoch) +
                                         " (diverged); lower the learning rate");
            }
            adam_step(params, bg.grads, adam, train_config);
            epoch_loss += bg.loss * static_cast<double>(len);
            seen += len;
        }
        epoch_loss /= static_cast<double>(seen);

        const double metric = validation_metric(val_set, params, gv, model_config);
        const auto now_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                                std::chrono::system_clock::now().time_since_epoch())
                                .count();
        history.epochs.push_back({epoch, epoch_loss, metric, now_ms});

        const bool improved = maximize ? metric > best_metric : metric < best_metric;
        if (improved) {
            best_metric = metric;
            history.best_epoch = epoch;
            result.params = params;
            epochs_since_best = 0;
        } else {
            ++epochs_since_best;
        }
        if (epochs_since_best >= train_config.patience) break;
    }
    history.best_val_metric = best_metric;
    return result;
}

}  // namespace ignh
