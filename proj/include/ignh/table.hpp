#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ignh/schema.hpp"

namespace ignh {

/// Raw string-valued table aligned to a schema: one cell column per feature
/// (schema order) plus the target column. Empty string means missing.
struct RawTable {
    std::size_t n_features = 0;
    std::vector<std::vector<std::string>> cells;  // n_rows x n_features
    std::vector<std::string> targets;             // n_rows
    std::vector<std::size_t> missing_count;       // per feature

    std::size_t n_rows() const { return cells.size(); }
};

// RFC-4180-style CSV: quoted fields, doubled quotes, embedded separators and
// newlines inside quotes, header row required. Columns are matched to the
// schema by header name; extra columns are ignored.
//
// Throws std::runtime_error when a schema column is absent from the header or
// a non-missing numeric cell fails to parse (the message names row and
// column). Missing target values are rejected.
RawTable load_csv(const std::string& path, const Schema& schema);

RawTable parse_csv_text(const std::string& text, const Schema& schema, const std::string& origin);

struct SplitFractions {
    double train;
    double val;
    double test;
};

struct TableSplit {
    RawTable train;
    RawTable val;
    RawTable test;
};

// Disjoint, exhaustive, seed-reproducible random split. Train and validation
// sizes are floored, the remainder goes to the test set. Throws when the
// fractions are invalid or any part would be empty.
TableSplit split(const RawTable& table, SplitFractions fractions, std::uint64_t seed);

}  // namespace ignh
