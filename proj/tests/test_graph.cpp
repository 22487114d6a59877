#include <doctest.h>

#include <cmath>
#include <vector>

#include "ignh/graph.hpp"
#include "ignh/rng.hpp"
#include "support.hpp"

using namespace ignh;

namespace {

// Independent re-derivation of the gated edge set: gathers pairwise-complete
// columns and dispatches on kinds, same contract, separate code path.
std::vector<GraphEdge> brute_force_edges(const EncodedMatrix& m, const Schema& schema, double alpha) {
    std::vector<GraphEdge> edges;
    for (std::uint32_t i = 0; i < schema.n_features(); ++i) {
        for (std::uint32_t j = i + 1; j < schema.n_features(); ++j) {
            std::vector<double> a, b;
            for (std::size_t r = 0; r < m.n_rows; ++r) {
                if (m.is_missing(r, i) || m.is_missing(r, j)) continue;
                a.push_back(m.at(r, i));
                b.push_back(m.at(r, j));
            }
            const bool ic = schema.features[i].kind == FeatureKind::Categorical;
            const bool jc = schema.features[j].kind == FeatureKind::Categorical;
            std::optional<Assoc> assoc;
            if (!ic && !jc) assoc = pearson(a, b);
            else if (ic && jc) assoc = kendall_tau(a, b);
            else if (ic) assoc = cat_num_association(a, b, alpha);
            else assoc = cat_num_association(b, a, alpha);
            if (assoc && assoc->p_value < alpha) edges.push_back({i, j, assoc->r, assoc->kind});
        }
    }
    return edges;
}

Schema numeric_schema(std::size_t m) {
    Schema s;
    for (std::size_t f = 0; f < m; ++f) s.features.push_back({"f" + std::to_string(f), FeatureKind::Numerical});
    s.target_name = "y";
    s.task = Task::Regression;
    return s;
}

EncodedMatrix matrix_from_columns(const std::vector<std::vector<double>>& cols, const Schema& schema) {
    EncodedMatrix m;
    m.n_features = cols.size();
    m.n_rows = cols[0].size();
    m.task = schema.task;
    m.schema_hash = schema_hash(schema);
    m.values.resize(m.n_rows * m.n_features);
    m.missing.assign(m.n_rows * m.n_features, 0);
    m.labels.assign(m.n_rows, 0.0);
    for (std::size_t r = 0; r < m.n_rows; ++r) {
        for (std::size_t f = 0; f < m.n_features; ++f) m.values[r * m.n_features + f] = cols[f][r];
    }
    return m;
}

}  // namespace

TEST_CASE("build_graph: exact copy feature gets a weight-1 edge, noise stays isolated") {
    Rng rng(8);
    const std::size_t n = 300;
    std::vector<double> f1(n), f3(n);
    for (std::size_t r = 0; r < n; ++r) {
        f1[r] = rng.uniform(-2.0, 2.0);
        f3[r] = rng.uniform(-2.0, 2.0);
    }
    Schema schema = numeric_schema(3);
    EncodedMatrix m = matrix_from_columns({f1, f1, f3}, schema);

    FeatureGraph g = build_graph(m, schema, 0.05);
    REQUIRE(g.edges.size() >= 1);
    bool found_copy = false;
    for (const auto& e : g.edges) {
        if (e.i == 0 && e.j == 1) {
            found_copy = true;
            CHECK(e.weight == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
    CHECK(found_copy);

    auto brute = brute_force_edges(m, schema, 0.05);
    REQUIRE(g.edges.size() == brute.size());
    for (std::size_t k = 0; k < brute.size(); ++k) {
        CHECK(g.edges[k].i == brute[k].i);
        CHECK(g.edges[k].j == brute[k].j);
        CHECK(g.edges[k].weight == doctest::Approx(brute[k].weight).epsilon(1e-12));
    }
}

TEST_CASE("build_graph: null-hypothesis edge rate near alpha for independent noise") {
    const double alpha = 0.05;
    std::size_t edges = 0, trials = 400;
    Rng rng(123);
    Schema schema = numeric_schema(2);
    for (std::size_t t = 0; t < trials; ++t) {
        const std::size_t n = 1000;
        std::vector<double> a(n), b(n);
        for (std::size_t r = 0; r < n; ++r) {
            a[r] = rng.uniform(-1.0, 1.0);
            b[r] = rng.uniform(-1.0, 1.0);
        }
        EncodedMatrix m = matrix_from_columns({a, b}, schema);
        edges += build_graph(m, schema, alpha).edges.size();
    }
    const double rate = static_cast<double>(edges) / static_cast<double>(trials);
    CHECK(rate > 0.01);
    CHECK(rate < 0.09);
}

TEST_CASE("build_graph matches brute force on mixed-type data, parallel equals serial") {
    auto ds = support::hetero8_synthetic(400, 77);
    EncoderState enc = fit_encoders(ds.table, ds.schema);
    EncodedMatrix m = encode(ds.table, enc, ds.schema);

    FeatureGraph serial = build_graph(m, ds.schema, 0.05, 1);
    FeatureGraph parallel = build_graph(m, ds.schema, 0.05, 4);
    REQUIRE(serial.edges.size() == parallel.edges.size());
    for (std::size_t k = 0; k < serial.edges.size(); ++k) {
        CHECK(serial.edges[k].i == parallel.edges[k].i);
        CHECK(serial.edges[k].j == parallel.edges[k].j);
        CHECK(serial.edges[k].weight == parallel.edges[k].weight);
    }

    auto brute = brute_force_edges(m, ds.schema, 0.05);
    REQUIRE(serial.edges.size() == brute.size());
    for (std::size_t k = 0; k < brute.size(); ++k) {
        CHECK(serial.edges[k].weight == doctest::Approx(brute[k].weight).epsilon(1e-12));
        CHECK(serial.edges[k].kind == brute[k].kind);
        CHECK(std::abs(serial.edges[k].weight) <= 1.0);
    }
}

TEST_CASE("build_graph: pairwise-complete policy reacts to missing cells") {
    Schema s;
    s.features = {{"a", FeatureKind::Numerical}, {"b", FeatureKind::Numerical}};
    s.target_name = "y";
    s.task = Task::Regression;
    // b's missing rows are exactly where a and b disagree; on complete rows they match
    const std::string csv =
        "a,b,y\n"
        "1,1,0\n"
        "2,2,0\n"
        "3,,0\n"
        "4,4,0\n"
        "5,,0\n"
        "6,6,0\n";
    RawTable t = parse_csv_text(csv, s, "test");
    EncoderState enc = fit_encoders(t, s);
    EncodedMatrix m = encode(t, enc, s);
    FeatureGraph g = build_graph(m, s, 0.05);
    REQUIRE(g.edges.size() == 1);
    CHECK(g.edges[0].weight == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("set_self_loops: explicit and fraction modes") {
    Schema schema = numeric_schema(3);
    FeatureGraph g;
    g.schema_hash = schema_hash(schema);
    for (const auto& f : schema.features) g.nodes.push_back({f.name, f.kind});
    g.self_loop.assign(3, 1.0);
    g.edges = {{0, 1, 0.5, AssocKind::Pearson}, {1, 2, -0.5, AssocKind::Pearson}};

    set_self_loops(g, 45.0);
    for (double w : g.self_loop) CHECK(w == 45.0);

    // mean incident |weight| = (0.5 + 1.0 + 0.5) / 3 = 2/3; rho = 0.9 -> 9x
    set_self_loops_fraction(g, 0.9);
    for (double w : g.self_loop) CHECK(w == doctest::Approx(9.0 * 2.0 / 3.0).epsilon(1e-12));

    // rho = 0.5 assigns exactly the mean incident weight
    set_self_loops_fraction(g, 0.5);
    for (double w : g.self_loop) CHECK(w == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

    // edgeless fallback
    FeatureGraph empty;
    empty.nodes = g.nodes;
    empty.self_loop.assign(3, 1.0);
    set_self_loops_fraction(empty, 0.9);
    for (double w : empty.self_loop) CHECK(w == 1.0);

    CHECK_THROWS_AS(set_self_loops(g, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(set_self_loops_fraction(g, 1.0), std::invalid_argument);
}

TEST_CASE("graph container: bit-exact round trip, corruption, schema hash guard") {
    auto ds = support::hetero8_synthetic(300, 13);
    EncoderState enc = fit_encoders(ds.table, ds.schema);
    EncodedMatrix m = encode(ds.table, enc, ds.schema);
    FeatureGraph g = build_graph(m, ds.schema, 0.05);
    set_self_loops_fraction(g, 0.9);

    support::TempDir tmp("graph");
    const std::string path = tmp.file("g.bin");
    save_graph(g, path);
    FeatureGraph loaded = load_graph(path, schema_hash(ds.schema));

    CHECK(loaded.alpha == g.alpha);
    CHECK(loaded.schema_hash == g.schema_hash);
    REQUIRE(loaded.nodes.size() == g.nodes.size());
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        CHECK(loaded.nodes[i].name == g.nodes[i].name);
        CHECK(loaded.nodes[i].kind == g.nodes[i].kind);
        CHECK(loaded.self_loop[i] == g.self_loop[i]);  // bit exact
    }
    REQUIRE(loaded.edges.size() == g.edges.size());
    for (std::size_t k = 0; k < g.edges.size(); ++k) {
        CHECK(loaded.edges[k].i == g.edges[k].i);
        CHECK(loaded.edges[k].j == g.edges[k].j);
        CHECK(loaded.edges[k].weight == g.edges[k].weight);  // bit exact
        CHECK(loaded.edges[k].kind == g.edges[k].kind);
    }

    // byte-identical re-serialization
    CHECK(graph_to_bytes(loaded) == graph_to_bytes(g));

    // truncation trips the checksum
    auto bytes = graph_to_bytes(g);
    auto truncated = std::vector<std::uint8_t>(bytes.begin(), bytes.end() - 9);
    CHECK_THROWS_WITH((void)graph_from_bytes(truncated), doctest::Contains("checksum"));

    // flipping a payload byte trips it too
    auto corrupted = bytes;
    corrupted[bytes.size() / 2] ^= 0xFF;
    CHECK_THROWS_WITH((void)graph_from_bytes(corrupted), doctest::Contains("checksum"));

    // wrong schema hash names the schema
    CHECK_THROWS_WITH((void)load_graph(path, 0xDEADBEEF), doctest::Contains("schema"));
}

TEST_CASE("build_graph: determinism across repeated builds") {
    auto ds = support::hetero8_synthetic(250, 5);
    EncoderState enc = fit_encoders(ds.table, ds.schema);
    EncodedMatrix m = encode(ds.table, enc, ds.schema);
    FeatureGraph a = build_graph(m, ds.schema, 0.05);
    FeatureGraph b = build_graph(m, ds.schema, 0.05);
    CHECK(graph_to_bytes(a) == graph_to_bytes(b));
}
