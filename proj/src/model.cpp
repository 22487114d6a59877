#include "ignh/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ignh/rng.hpp"

namespace ignh {

std::string to_string(Activation a) { return a == Activation::Relu ? "relu" : "tanh"; }
std::string to_string(WeightSharing w) { return w == WeightSharing::PerNode ? "per_node" : "shared"; }

Activation activation_from_string(const std::string& s) {
    if (s == "relu") return Activation::Relu;
    if (s == "tanh") return Activation::Tanh;
    throw std::invalid_argument("unknown activation: " + s);
}

WeightSharing weight_sharing_from_string(const std::string& s) {
    if (s == "per_node") return WeightSharing::PerNode;
    if (s == "shared") return WeightSharing::Shared;
    throw std::invalid_argument("unknown weight sharing mode: " + s);
}

void ModelConfig::validate() const {
    if (embed_dim == 0) throw std::invalid_argument("model config: embed_dim must be >= 1");
    if (layer_dims.empty()) throw std::invalid_argument("model config: need at least one message-passing layer");
    for (std::size_t d : layer_dims) {
        if (d == 0) throw std::invalid_argument("model config: layer dims must be >= 1");
    }
    if (task == Task::Multiclass && n_classes < 2) {
        throw std::invalid_argument("model config: multiclass requires n_classes >= 2");
    }
}

ParamLayout ParamLayout::make(const Schema& schema, const EncoderState& encoders, const ModelConfig& config) {
    config.validate();
    if (encoders.features.size() != schema.n_features()) {
        throw std::invalid_argument("param layout: encoder/schema mismatch");
    }

    ParamLayout lay;
    lay.m = schema.n_features();
    lay.embed_dim = config.embed_dim;
    lay.dims = config.layer_dims;
    lay.sharing = config.sharing;
    lay.k = config.n_outputs();

    std::size_t off = 0;
    lay.cardinality.resize(lay.m);
    lay.input_off.resize(lay.m);
    for (std::size_t f = 0; f < lay.m; ++f) {
        lay.input_off[f] = off;
        if (schema.features[f].kind == FeatureKind::Categorical) {
            lay.cardinality[f] = encoders.features[f].cardinality();
            off += (static_cast<std::size_t>(lay.cardinality[f]) + 1) * lay.embed_dim;  // +1: missing row 0
        } else {
            lay.cardinality[f] = -1;
            off += 2 * lay.embed_dim;  // projection + bias
        }
    }

    const std::size_t L = lay.dims.size();
    const std::size_t blocks_per_layer = config.sharing == WeightSharing::Shared ? 1 : lay.m;
    lay.w_off.resize(L * blocks_per_layer);
    lay.b_off.resize(L * blocks_per_layer);
    for (std::size_t l = 0; l < L; ++l) {
        const std::size_t d_in = lay.layer_in_dim(l);
        const std::size_t d_out = lay.dims[l];
        for (std::size_t bkt = 0; bkt < blocks_per_layer; ++bkt) {
            lay.w_off[l * blocks_per_layer + bkt] = off;
            off += d_in * d_out;
            lay.b_off[l * blocks_per_layer + bkt] = off;
            off += d_out;
        }
    }

    lay.readout_off = off;
    off += lay.m * lay.dims.back();
    lay.out_w_off = off;
    off += lay.m * lay.k;
    lay.bias_off = off;
    off += lay.k;
    lay.total = off;
    return lay;
}

ModelParams init_params(const Schema& schema, const EncoderState& encoders, const ModelConfig& config) {
    ModelParams params;
    params.layout = ParamLayout::make(schema, encoders, config);
    params.values.assign(params.layout.total, 0.0);

    Rng rng = Rng::substream(config.seed, "init");
    auto glorot = [&](std::size_t offset, std::size_t count, std::size_t fan_in, std::size_t fan_out) {
        const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        for (std::size_t i = 0; i < count; ++i) params.values[offset + i] = rng.uniform(-bound, bound);
    };

    const ParamLayout& lay = params.layout;
    for (std::size_t f = 0; f < lay.m; ++f) {
        if (lay.cardinality[f] >= 0) {
            const std::size_t count = (static_cast<std::size_t>(lay.cardinality[f]) + 1) * lay.embed_dim;
            for (std::size_t i = 0; i < count; ++i) {
                params.values[lay.input_off[f] + i] = rng.uniform(-0.05, 0.05);
            }
        } else {
            glorot(lay.input_off[f], lay.embed_dim, 1, lay.embed_dim);  // projection; bias stays 0
        }
    }

    const std::size_t blocks = lay.sharing == WeightSharing::Shared ? 1 : lay.m;
    for (std::size_t l = 0; l < lay.dims.size(); ++l) {
        const std::size_t d_in = lay.layer_in_dim(l);
        const std::size_t d_out = lay.dims[l];
        for (std::size_t bkt = 0; bkt < blocks; ++bkt) {
            glorot(lay.w_off[l * blocks + bkt], d_in * d_out, d_in, d_out);
        }
    }
    for (std::size_t i = 0; i < lay.m; ++i) {
        glorot(lay.readout_offset(i), lay.dims.back(), lay.dims.back(), 1);
    }
    glorot(lay.out_w_off, lay.m * lay.k, lay.m, lay.k);
    // global bias stays 0
    return params;
}

GraphView GraphView::make(const FeatureGraph& graph) {
    GraphView view;
    view.self_weight = graph.self_loop;
    view.neighbors = graph.adjacency();
    return view;
}

namespace {

inline double activate(double x, Activation a) {
    return a == Activation::Relu ? (x > 0.0 ? x : 0.0) : std::tanh(x);
}

void embed_into(std::span<const double> row, const ModelParams& params, std::vector<double>& h0) {
    const ParamLayout& lay = params.layout;
    const std::size_t d0 = lay.embed_dim;
    h0.assign(lay.m * d0, 0.0);
    for (std::size_t f = 0; f < lay.m; ++f) {
        double* out = h0.data() + f * d0;
        if (lay.cardinality[f] >= 0) {
            const int token = static_cast<int>(row[f]);
            if (token < 0 || token > lay.cardinality[f]) {
                throw std::out_of_range("embed_inputs: token " + std::to_string(token) + " outside table for node " +
                                        std::to_string(f));
            }
            const double* emb = params.values.data() + lay.embedding_offset(f, token);
            std::copy(emb, emb + d0, out);
        } else {
            const double* proj = params.values.data() + lay.input_off[f];
            const double* bias = proj + d0;
            for (std::size_t d = 0; d < d0; ++d) out[d] = proj[d] * row[f] + bias[d];
        }
    }
}

void aggregate_into(std::span<const double> h, const GraphView& graph, std::size_t dim, std::vector<double>& agg) {
    const std::size_t m = graph.n_nodes();
    agg.assign(m * dim, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        double* out = agg.data() + i * dim;
        const double* self = h.data() + i * dim;
        const double w_self = graph.self_weight[i];
        for (std::size_t d = 0; d < dim; ++d) out[d] = w_self * self[d];
        for (const auto& [u, w] : graph.neighbors[i]) {
            const double* hu = h.data() + static_cast<std::size_t>(u) * dim;
            for (std::size_t d = 0; d < dim; ++d) out[d] += w * hu[d];
        }
    }
}

void layer_into(std::span<const double> agg, const ModelParams& params, const ModelConfig& config, std::size_t layer,
                std::vector<double>& pre, std::vector<double>& h_next) {
    const ParamLayout& lay = params.layout;
    const std::size_t d_in = lay.layer_in_dim(layer);
    const std::size_t d_out = lay.dims[layer];
    pre.assign(lay.m * d_out, 0.0);
    h_next.assign(lay.m * d_out, 0.0);
    for (std::size_t i = 0; i < lay.m; ++i) {
        const double* w = params.values.data() + lay.weight_offset(layer, i);
        const double* b = params.values.data() + lay.bias_offset(layer, i);
        const double* a = agg.data() + i * d_in;
        double* p = pre.data() + i * d_out;
        double* h = h_next.data() + i * d_out;
        for (std::size_t o = 0; o < d_out; ++o) {
            double acc = b[o];
            const double* wrow = w + o * d_in;
            for (std::size_t d = 0; d < d_in; ++d) acc += wrow[d] * a[d];
            p[o] = acc;
            h[o] = activate(acc, config.activation);
        }
    }
}

void readout_into(std::span<const double> h_last, const ModelParams& params, std::vector<double>& readout_val,
                  std::vector<double>& scores, std::vector<double>& z) {
    const ParamLayout& lay = params.layout;
    const std::size_t d = lay.dims.back();
    readout_val.assign(lay.m, 0.0);
    scores.assign(lay.m * lay.k, 0.0);
    z.assign(lay.k, 0.0);
    const double* bias = params.values.data() + lay.bias_off;
    for (std::size_t c = 0; c < lay.k; ++c) z[c] = bias[c];
    for (std::size_t i = 0; i < lay.m; ++i) {
        const double* r = params.values.data() + lay.readout_offset(i);
        const double* hi = h_last.data() + i * d;
        double acc = 0.0;
        for (std::size_t dd = 0; dd < d; ++dd) acc += r[dd] * hi[dd];
        readout_val[i] = acc;
        const double* w = params.values.data() + lay.out_w_off + i * lay.k;
        for (std::size_t c = 0; c < lay.k; ++c) {
            const double s = w[c] * acc;
            scores[i * lay.k + c] = s;
            z[c] += s;
        }
    }
}

}  // namespace

void forward(std::span<const double> row, const ModelParams& params, const GraphView& graph, const ModelConfig& config,
             ForwardTrace& trace) {
    const ParamLayout& lay = params.layout;
    if (row.size() != lay.m) throw std::invalid_argument("forward: row width does not match model");
    if (graph.n_nodes() != lay.m) throw std::invalid_argument("forward: graph does not match model");

    const std::size_t L = lay.dims.size();
    trace.h.resize(L + 1);
    trace.agg.resize(L);
    trace.pre.resize(L);

    embed_into(row, params, trace.h[0]);
    for (std::size_t l = 0; l < L; ++l) {
        aggregate_into(trace.h[l], graph, lay.layer_in_dim(l), trace.agg[l]);
        layer_into(trace.agg[l], params, config, l, trace.pre[l], trace.h[l + 1]);
    }
    readout_into(trace.h[L], params, trace.readout_val, trace.scores, trace.z);
}

std::vector<double> embed_inputs(std::span<const double> row, const ModelParams& params) {
    if (row.size() != params.layout.m) throw std::invalid_argument("embed_inputs: row width mismatch");
    std::vector<double> h0;
    embed_into(row, params, h0);
    return h0;
}

std::vector<double> message_pass(std::span<const double> h, const GraphView& graph, const ModelParams& params,
                                 const ModelConfig& config, std::size_t layer) {
    const ParamLayout& lay = params.layout;
    if (layer >= lay.dims.size()) throw std::invalid_argument("message_pass: layer index out of range");
    const std::size_t d_in = lay.layer_in_dim(layer);
    if (h.size() != lay.m * d_in) throw std::invalid_argument("message_pass: state shape mismatch");
    std::vector<double> agg, pre, next;
    aggregate_into(h, graph, d_in, agg);
    layer_into(agg, params, config, layer, pre, next);
    return next;
}

ReadoutResult readout(std::span<const double> h_last, const ModelParams& params) {
    const ParamLayout& lay = params.layout;
    if (h_last.size() != lay.m * lay.dims.back()) throw std::invalid_argument("readout: state shape mismatch");
    ReadoutResult result;
    std::vector<double> readout_val;
    readout_into(h_last, params, readout_val, result.scores, result.z);
    return result;
}

double sigmoid(double x) { return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x)); }

std::vector<double> apply_link(std::span<const double> z, Task task) {
    switch (task) {
        case Task::Binary:
            return {sigmoid(z[0])};
        case Task::Regression:
            return {z[0]};
        case Task::Multiclass: {
            double zmax = *std::max_element(z.begin(), z.end());
            std::vector<double> probs(z.size());
            double sum = 0.0;
            for (std::size_t c = 0; c < z.size(); ++c) {
                probs[c] = std::exp(z[c] - zmax);
                sum += probs[c];
            }
            for (double& p : probs) p /= sum;
            return probs;
        }
    }
    throw std::logic_error("bad task");
}

std::vector<double> predict(std::span<const double> row, const ModelParams& params, const GraphView& graph,
                            const ModelConfig& config) {
    ForwardTrace trace;
    forward(row, params, graph, config, trace);
    return apply_link(trace.z, config.task);
}

}  // namespace ignh
