#include <doctest.h>

#include <cmath>
#include <set>

#include "ignh/encode.hpp"
#include "ignh/schema.hpp"
#include "ignh/table.hpp"
#include "support.hpp"

using namespace ignh;

namespace {

Schema two_feature_schema() {
    Schema s;
    s.features = {{"age", FeatureKind::Numerical}, {"color", FeatureKind::Categorical}};
    s.target_name = "label";
    s.task = Task::Binary;
    s.class_labels = {"no", "yes"};
    return s;
}

}  // namespace

TEST_CASE("schema: json round trip and validation") {
    const char* text = R"({
        "features": [{"name": "age", "kind": "numerical"}, {"name": "color", "kind": "categorical"}],
        "target": {"name": "label", "task": "binary"},
        "class_labels": ["no", "yes"]
    })";
    Schema s = schema_from_json(nlohmann::json::parse(text));
    CHECK(s.n_features() == 2);
    CHECK(s.task == Task::Binary);
    Schema again = schema_from_json(schema_to_json(s));
    CHECK(schema_hash(s) == schema_hash(again));

    Schema dup = s;
    dup.features.push_back({"age", FeatureKind::Numerical});
    CHECK_THROWS_AS(dup.validate(), std::invalid_argument);

    Schema target_clash = s;
    target_clash.target_name = "age";
    CHECK_THROWS_AS(target_clash.validate(), std::invalid_argument);
}

TEST_CASE("load_csv: basic ingestion, quoting, missing cells") {
    Schema s = two_feature_schema();
    const std::string csv =
        "age,color,label\n"
        "31,red,yes\n"
        "\"42\",\"blue, dark\",no\n"
        ",green,yes\n";
    RawTable t = parse_csv_text(csv, s, "test");
    CHECK(t.n_rows() == 3);
    CHECK(t.cells[1][1] == "blue, dark");
    CHECK(t.cells[2][0] == "");
    CHECK(t.missing_count[0] == 1);
    CHECK(t.missing_count[1] == 0);
    CHECK(t.targets[0] == "yes");
}

TEST_CASE("load_csv: empty numeric cell is missing, junk numeric cell is an error") {
    Schema s = two_feature_schema();
    CHECK_NOTHROW(parse_csv_text("age,color,label\n,red,yes\n2,blue,no\n", s, "test"));
    CHECK_THROWS_WITH(parse_csv_text("age,color,label\nabc,red,yes\n", s, "test"),
                      doctest::Contains("row 1") && doctest::Contains("age"));
}

TEST_CASE("load_csv: schema column absent from header names the column") {
    Schema s = two_feature_schema();
    CHECK_THROWS_WITH(parse_csv_text("age,label\n31,yes\n", s, "test"), doctest::Contains("color"));
    CHECK_THROWS_WITH(parse_csv_text("age,color\n31,red\n", s, "test"), doctest::Contains("label"));
}

TEST_CASE("fit_encoders: first-appearance tokens, population std, all-missing column") {
    Schema s = two_feature_schema();
    const std::string csv =
        "age,color,label\n"
        "1,red,yes\n"
        "2,blue,no\n"
        "3,red,yes\n";
    RawTable t = parse_csv_text(csv, s, "test");
    EncoderState enc = fit_encoders(t, s);

    CHECK(enc.features[1].token_of.at("red") == 1);
    CHECK(enc.features[1].token_of.at("blue") == 2);
    CHECK(enc.features[0].mean == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(enc.features[0].stdev == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-12));

    const std::string all_missing =
        "age,color,label\n"
        "1,,yes\n"
        "2,,no\n";
    RawTable t2 = parse_csv_text(all_missing, s, "test");
    EncoderState enc2 = fit_encoders(t2, s);
    CHECK(enc2.features[1].cardinality() == 0);
    EncodedMatrix m2 = encode(t2, enc2, s);
    CHECK(m2.at(0, 1) == 0.0);
    CHECK(m2.at(1, 1) == 0.0);
}

TEST_CASE("encode: centering, unit scaling, unseen category, constant feature") {
    Schema s = two_feature_schema();
    RawTable train = parse_csv_text("age,color,label\n1,red,yes\n2,blue,no\n3,red,yes\n", s, "test");
    EncoderState enc = fit_encoders(train, s);

    RawTable fresh = parse_csv_text("age,color,label\n2,purple,no\n2.8164965809277,red,yes\n,blue,no\n", s, "test");
    EncodedMatrix m = encode(fresh, enc, s);
    CHECK(m.at(0, 0) == doctest::Approx(0.0).epsilon(1e-12));   // value at training mean
    CHECK(m.at(0, 1) == 0.0);                                    // unseen category -> missing token
    CHECK(m.at(1, 0) == doctest::Approx(1.0).epsilon(1e-9));     // mean + one std
    CHECK(m.at(2, 0) == 0.0);                                    // missing numeric -> post-normalization mean
    CHECK(m.is_missing(2, 0));
    CHECK_FALSE(m.is_missing(0, 1));  // unseen is not "missing in the raw data"

    // constant numeric feature encodes to all zeros
    RawTable const_train = parse_csv_text("age,color,label\n5,red,yes\n5,blue,no\n", s, "test");
    EncoderState cenc = fit_encoders(const_train, s);
    CHECK(cenc.features[0].constant);
    EncodedMatrix cm = encode(const_train, cenc, s);
    CHECK(cm.at(0, 0) == 0.0);
    CHECK(cm.at(1, 0) == 0.0);
}

TEST_CASE("encode: deterministic and z-scored training columns") {
    auto ds = support::binary_synthetic(500, 11);
    EncoderState enc = fit_encoders(ds.table, ds.schema);
    EncodedMatrix a = encode(ds.table, enc, ds.schema);
    EncodedMatrix b = encode(ds.table, enc, ds.schema);
    CHECK(a.values == b.values);
    CHECK(a.labels == b.labels);

    // non-constant numeric training columns: mean ~ 0, population std ~ 1
    for (std::size_t f = 0; f < ds.schema.n_features(); ++f) {
        if (ds.schema.features[f].kind != FeatureKind::Numerical) continue;
        double sum = 0.0, sumsq = 0.0;
        for (std::size_t r = 0; r < a.n_rows; ++r) {
            sum += a.at(r, f);
            sumsq += a.at(r, f) * a.at(r, f);
        }
        const double mean = sum / static_cast<double>(a.n_rows);
        const double var = sumsq / static_cast<double>(a.n_rows) - mean * mean;
        CHECK(std::abs(mean) < 1e-9);
        CHECK(std::abs(std::sqrt(var) - 1.0) < 1e-9);
    }

    // token range: all encoded categorical values in {0..K}
    for (std::size_t f = 0; f < ds.schema.n_features(); ++f) {
        if (ds.schema.features[f].kind != FeatureKind::Categorical) continue;
        for (std::size_t r = 0; r < a.n_rows; ++r) {
            const double v = a.at(r, f);
            CHECK(v >= 0.0);
            CHECK(v <= enc.features[f].cardinality());
            CHECK(v == std::floor(v));
        }
    }
}

TEST_CASE("encode: unknown classification target label is an error") {
    Schema s = two_feature_schema();
    RawTable train = parse_csv_text("age,color,label\n1,red,maybe\n", s, "test");
    EncoderState enc = fit_encoders(train, s);
    CHECK_THROWS_WITH((void)encode(train, enc, s), doctest::Contains("maybe"));
}

TEST_CASE("split: sizes, determinism, bad fractions") {
    auto ds = support::binary_synthetic(10, 3);
    TableSplit parts = split(ds.table, {0.8, 0.1, 0.1}, 7);
    CHECK(parts.train.n_rows() == 8);
    CHECK(parts.val.n_rows() == 1);
    CHECK(parts.test.n_rows() == 1);

    TableSplit again = split(ds.table, {0.8, 0.1, 0.1}, 7);
    CHECK(parts.train.cells == again.train.cells);
    CHECK(parts.val.cells == again.val.cells);
    CHECK(parts.test.cells == again.test.cells);

    CHECK_THROWS_AS((void)split(ds.table, {0.5, 0.5, 0.5}, 1), std::invalid_argument);
    auto tiny = support::binary_synthetic(3, 3);
    CHECK_THROWS_AS((void)split(tiny.table, {0.8, 0.1, 0.1}, 1), std::runtime_error);
}

TEST_CASE("split: disjoint and exhaustive") {
    auto ds = support::binary_synthetic(103, 5);
    TableSplit parts = split(ds.table, {0.6, 0.2, 0.2}, 999);
    CHECK(parts.train.n_rows() + parts.val.n_rows() + parts.test.n_rows() == 103);

    // row fingerprints: every original row appears exactly once somewhere
    auto fingerprint = [](const RawTable& t) {
        std::multiset<std::string> rows;
        for (std::size_t r = 0; r < t.n_rows(); ++r) {
            std::string key;
            for (const auto& c : t.cells[r]) key += c + "|";
            key += t.targets[r];
            rows.insert(key);
        }
        return rows;
    };
    auto all = fingerprint(ds.table);
    std::multiset<std::string> combined;
    for (const auto* part : {&parts.train, &parts.val, &parts.test}) {
        for (const auto& key : fingerprint(*part)) combined.insert(key);
    }
    CHECK(all == combined);
}

TEST_CASE("oversample_minority: balances binary, leaves others unchanged") {
    auto ds = support::binary_synthetic(100, 17, 0.0, 0.1);  // ~10% positives
    EncoderState enc = fit_encoders(ds.table, ds.schema);
    EncodedMatrix m = encode(ds.table, enc, ds.schema);

    std::size_t pos = 0;
    for (double y : m.labels) pos += static_cast<std::size_t>(y);
    REQUIRE(pos > 0);
    REQUIRE(pos < m.n_rows / 2);

    EncodedMatrix balanced = oversample_minority(m, 5);
    std::size_t pos2 = 0;
    for (double y : balanced.labels) pos2 += static_cast<std::size_t>(y);
    CHECK(pos2 == balanced.n_rows - pos2);
    CHECK(balanced.n_rows == 2 * (m.n_rows - pos));

    // multiset inclusion: every oversampled row already exists in the input
    std::set<std::vector<double>> originals;
    for (std::size_t r = 0; r < m.n_rows; ++r) {
        originals.insert(std::vector<double>(m.row(r).begin(), m.row(r).end()));
    }
    for (std::size_t r = 0; r < balanced.n_rows; ++r) {
        CHECK(originals.count(std::vector<double>(balanced.row(r).begin(), balanced.row(r).end())) == 1);
    }

    // already balanced input comes back unchanged
    auto even = support::binary_synthetic(40, 23, 0.0, 0.5);
    EncodedMatrix em = encode(even.table, fit_encoders(even.table, even.schema), even.schema);
    std::size_t epos = 0;
    for (double y : em.labels) epos += static_cast<std::size_t>(y);
    if (epos * 2 == em.n_rows) {
        EncodedMatrix same = oversample_minority(em, 1);
        CHECK(same.n_rows == em.n_rows);
        CHECK(same.values == em.values);
    }

    // multiclass is a no-op
    auto mc = support::multiclass_synthetic(60, 2);
    EncodedMatrix mm = encode(mc.table, fit_encoders(mc.table, mc.schema), mc.schema);
    EncodedMatrix mm2 = oversample_minority(mm, 3);
    CHECK(mm2.n_rows == mm.n_rows);

    // single-class training set is an error
    Schema s = ds.schema;
    RawTable single;
    single.n_features = 5;
    single.missing_count.assign(5, 0);
    for (int i = 0; i < 4; ++i) {
        single.cells.push_back({"1", "2", "red", "0.5", "a"});
        single.targets.push_back("pos");
    }
    EncodedMatrix sm = encode(single, enc, s);
    CHECK_THROWS_AS((void)oversample_minority(sm, 1), std::runtime_error);
}
