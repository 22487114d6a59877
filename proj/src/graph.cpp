#include "ignh/graph.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>

#include "ignh/bytes.hpp"
#include "ignh/parallel.hpp"

namespace ignh {

namespace {

constexpr char kMagic[6] = {'I', 'G', 'N', 'H', 'G', '\0'};
constexpr std::uint32_t kVersion = 1;

struct PairData {
    std::vector<double> a;
    std::vector<double> b;
};

// Gathers the pairwise-complete rows of two columns.
PairData complete_pairs(const EncodedMatrix& m, std::size_t f, std::size_t g) {
    PairData out;
    out.a.reserve(m.n_rows);
    out.b.reserve(m.n_rows);
    for (std::size_t r = 0; r < m.n_rows; ++r) {
        if (m.is_missing(r, f) || m.is_missing(r, g)) continue;
        out.a.push_back(m.at(r, f));
        out.b.push_back(m.at(r, g));
    }
    return out;
}

std::optional<Assoc> pair_association(const EncodedMatrix& m, const Schema& schema, std::size_t f, std::size_t g,
                                      double alpha) {
    const PairData d = complete_pairs(m, f, g);
    const bool f_cat = schema.features[f].kind == FeatureKind::Categorical;
    const bool g_cat = schema.features[g].kind == FeatureKind::Categorical;

    std::optional<Assoc> a;
    if (!f_cat && !g_cat) {
        a = pearson(d.a, d.b);
    } else if (f_cat && g_cat) {
        a = kendall_tau(d.a, d.b);
    } else if (f_cat) {
        a = cat_num_association(d.a, d.b, alpha);
    } else {
        a = cat_num_association(d.b, d.a, alpha);
    }
    if (!a || a->p_value >= alpha) return std::nullopt;
    return a;
}

}  // namespace

std::vector<std::vector<std::pair<std::uint32_t, double>>> FeatureGraph::adjacency() const {
    std::vector<std::vector<std::pair<std::uint32_t, double>>> adj(nodes.size());
    for (const auto& e : edges) {
        adj[e.i].emplace_back(e.j, e.weight);
        adj[e.j].emplace_back(e.i, e.weight);
    }
    return adj;
}

FeatureGraph build_graph(const EncodedMatrix& train, const Schema& schema, double alpha, int threads) {
    if (alpha <= 0.0 || alpha >= 1.0) throw std::invalid_argument("build_graph: alpha must be in (0, 1)");
    if (train.n_features != schema.n_features()) throw std::invalid_argument("build_graph: matrix/schema mismatch");

    FeatureGraph g;
    g.alpha = alpha;
    g.schema_hash = schema_hash(schema);
    for (const auto& f : schema.features) g.nodes.push_back({f.name, f.kind});
    g.self_loop.assign(schema.n_features(), 1.0);

    const std::size_t m = schema.n_features();
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    pairs.reserve(m * (m - 1) / 2);
    for (std::uint32_t i = 0; i < m; ++i) {
        for (std::uint32_t j = i + 1; j < m; ++j) pairs.emplace_back(i, j);
    }

    std::vector<std::optional<Assoc>> results(pairs.size());
    parallel_for(pairs.size(), threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t k = begin; k < end; ++k) {
            results[k] = pair_association(train, schema, pairs[k].first, pairs[k].second, alpha);
        }
    });

    for (std::size_t k = 0; k < pairs.size(); ++k) {
        if (!results[k]) continue;
        g.edges.push_back({pairs[k].first, pairs[k].second, results[k]->r, results[k]->kind});
    }
    return g;
}

void set_self_loops(FeatureGraph& graph, double weight) {
    if (weight <= 0.0) throw std::invalid_argument("set_self_loops: weight must be positive");
    for (auto& w : graph.self_loop) w = weight;
}

void set_self_loops_fraction(FeatureGraph& graph, double rho) {
    if (rho <= 0.0 || rho >= 1.0) throw std::invalid_argument("set_self_loops_fraction: rho must be in (0, 1)");
    if (graph.edges.empty()) {
        set_self_loops(graph, 1.0);
        return;
    }
    std::vector<double> incident(graph.n_nodes(), 0.0);
    for (const auto& e : graph.edges) {
        incident[e.i] += std::abs(e.weight);
        incident[e.j] += std::abs(e.weight);
    }
    double mean = 0.0;
    for (double v : incident) mean += v;
    mean /= static_cast<double>(graph.n_nodes());
    set_self_loops(graph, rho / (1.0 - rho) * mean);
}

std::vector<std::uint8_t> graph_to_bytes(const FeatureGraph& graph) {
    ByteWriter w;
    w.raw(reinterpret_cast<const std::uint8_t*>(kMagic), sizeof(kMagic));
    w.u32(kVersion);
    w.u64(graph.schema_hash);
    w.f64(graph.alpha);
    w.u32(static_cast<std::uint32_t>(graph.n_nodes()));
    for (std::size_t i = 0; i < graph.n_nodes(); ++i) {
        w.str(graph.nodes[i].name);
        w.u8(static_cast<std::uint8_t>(graph.nodes[i].kind));
        w.f64(graph.self_loop[i]);
    }
    w.u32(static_cast<std::uint32_t>(graph.edges.size()));
    for (const auto& e : graph.edges) {
        w.u32(e.i);
        w.u32(e.j);
        w.u8(static_cast<std::uint8_t>(e.kind));
        w.f64(e.weight);
    }
    std::uint32_t crc = crc32(w.bytes());
    w.u32(crc);
    return w.take();
}

FeatureGraph graph_from_bytes(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < sizeof(kMagic) + 4) throw std::runtime_error("graph container: file too short");
    if (std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
        throw std::runtime_error("graph container: bad magic bytes");
    }
    const std::uint32_t stored_crc = static_cast<std::uint32_t>(bytes[bytes.size() - 4]) |
                                     static_cast<std::uint32_t>(bytes[bytes.size() - 3]) << 8 |
                                     static_cast<std::uint32_t>(bytes[bytes.size() - 2]) << 16 |
                                     static_cast<std::uint32_t>(bytes[bytes.size() - 1]) << 24;
    if (crc32(bytes.subspan(0, bytes.size() - 4)) != stored_crc) {
        throw std::runtime_error("graph container: checksum mismatch (corrupt or truncated file)");
    }

    ByteReader r(bytes.subspan(0, bytes.size() - 4));
    r.raw(sizeof(kMagic));
    std::uint32_t version = r.u32();
    if (version != kVersion) {
        throw std::runtime_error("graph container: unsupported format version " + std::to_string(version));
    }

    FeatureGraph g;
    g.schema_hash = r.u64();
    g.alpha = r.f64();
    std::uint32_t n_nodes = r.u32();
    g.nodes.reserve(n_nodes);
    g.self_loop.reserve(n_nodes);
    for (std::uint32_t i = 0; i < n_nodes; ++i) {
        GraphNode node;
        node.name = r.str();
        node.kind = static_cast<FeatureKind>(r.u8());
        g.nodes.push_back(std::move(node));
        g.self_loop.push_back(r.f64());
    }
    std::uint32_t n_edges = r.u32();
    g.edges.reserve(n_edges);
    for (std::uint32_t k = 0; k < n_edges; ++k) {
        GraphEdge e;
        e.i = r.u32();
        e.j = r.u32();
        e.kind = static_cast<AssocKind>(r.u8());
        e.weight = r.f64();
        if (e.i >= n_nodes || e.j >= n_nodes || e.i >= e.j) {
            throw std::runtime_error("graph container: invalid edge record");
        }
        g.edges.push_back(e);
    }
    return g;
}

void save_graph(const FeatureGraph& graph, const std::string& path) {
    auto bytes = graph_to_bytes(graph);
    write_file_bytes(path, bytes);
}

FeatureGraph load_graph(const std::string& path) { return graph_from_bytes(read_file_bytes(path)); }

FeatureGraph load_graph(const std::string& path, std::uint64_t expected_schema_hash) {
    FeatureGraph g = load_graph(path);
    if (g.schema_hash != expected_schema_hash) {
        throw std::runtime_error("graph file " + path + " was built for a different schema (hash mismatch)");
    }
    return g;
}

}  // namespace ignh
