#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ignh/assoc.hpp"
#include "ignh/encode.hpp"
#include "ignh/schema.hpp"

namespace ignh {

struct GraphNode {
    std::string name;
    FeatureKind kind;
};

struct GraphEdge {
    std::uint32_t i;  // i < j, stored once
    std::uint32_t j;
    double weight;    // correlation in [-1, 1]
    AssocKind kind;
};

/// The feature graph shared by training and inference: significance-gated
/// correlation edges plus fixed self-loop weights. Topology is global; only
/// the node feature values vary per instance.
struct FeatureGraph {
    std::vector<GraphNode> nodes;
    std::vector<GraphEdge> edges;
    std::vector<double> self_loop;  // per node, > 0
    double alpha = 0.05;
    std::uint64_t schema_hash = 0;

    std::size_t n_nodes() const { return nodes.size(); }
    std::vector<std::vector<std::pair<std::uint32_t, double>>> adjacency() const;
};

// One significance-gated association per unordered feature pair, computed on
// pairwise-complete rows: numerical x numerical -> Pearson, numerical x
// categorical -> one-hot point-biserial with Fisher averaging, categorical x
// categorical -> Kendall tau-b. Undefined or insignificant associations
// produce no edge; an isolated node keeps just its self-loop. Self-loops are
// initialized to 1 until one of the set_self_loops modes is applied.
FeatureGraph build_graph(const EncodedMatrix& train, const Schema& schema, double alpha, int threads = 1);

// Uniform explicit self-loop weight (w > 0).
void set_self_loops(FeatureGraph& graph, double weight);

// Single global weight sized so the self-loop carries fraction rho of the
// mean absolute incident edge weight: w = (rho/(1-rho)) * mean_i sum|w_iu|.
// An edgeless graph falls back to w = 1.
void set_self_loops_fraction(FeatureGraph& graph, double rho);

std::vector<std::uint8_t> graph_to_bytes(const FeatureGraph& graph);
FeatureGraph graph_from_bytes(std::span<const std::uint8_t> bytes);

// Versioned binary container (magic "IGNHG\0", schema hash, node table,
// little-endian binary64 weights, CRC). Round trips are bit exact.
void save_graph(const FeatureGraph& graph, const std::string& path);
FeatureGraph load_graph(const std::string& path);
// Also verifies the stored schema hash and names the schema on mismatch.
FeatureGraph load_graph(const std::string& path, std::uint64_t expected_schema_hash);

}  // namespace ignh
