#include "ignh/table.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ignh/rng.hpp"

namespace ignh {

namespace {

std::vector<std::vector<std::string>> parse_csv_records(const std::string& text, const std::string& origin) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;

    auto end_field = [&] {
        record.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_record = [&] {
        end_field();
        records.push_back(std::move(record));
        record.clear();
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        switch (c) {
            case '"':
                if (field.empty() && !field_started) {
                    in_quotes = true;
                    field_started = true;
                } else {
                    field += c;  // stray quote inside unquoted field, keep literally
                }
                break;
            case ',':
                end_field();
                break;
            case '\r':
                if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
                end_record();
                break;
            case '\n':
                end_record();
                break;
            default:
                field += c;
                field_started = true;
                break;
        }
    }
    if (in_quotes) throw std::runtime_error(origin + ": unterminated quoted field");
    if (field_started || !field.empty() || !record.empty()) end_record();

    // Drop trailing fully-empty records (e.g. file ending in a blank line).
    while (!records.empty() && records.back().size() == 1 && records.back()[0].empty()) {
        records.pop_back();
    }
    return records;
}

bool parse_double(const std::string& s, double* out) {
    const char* begin = s.c_str();
    char* end = nullptr;
    errno = 0;
    double v = std::strtod(begin, &end);
    if (end == begin || errno == ERANGE) return false;
    while (*end == ' ' || *end == '\t') ++end;
    if (*end != '\0') return false;
    if (!std::isfinite(v)) return false;
    *out = v;
    return true;
}

RawTable subset_rows(const RawTable& table, const std::vector<std::size_t>& idx) {
    RawTable out;
    out.n_features = table.n_features;
    out.missing_count.assign(table.n_features, 0);
    out.cells.reserve(idx.size());
    out.targets.reserve(idx.size());
    for (std::size_t r : idx) {
        out.cells.push_back(table.cells[r]);
        out.targets.push_back(table.targets[r]);
        for (std::size_t f = 0; f < table.n_features; ++f) {
            if (out.cells.back()[f].empty()) ++out.missing_count[f];
        }
    }
    return out;
}

}  // namespace

RawTable parse_csv_text(const std::string& text, const Schema& schema, const std::string& origin) {
    schema.validate();
    auto records = parse_csv_records(text, origin);
    if (records.empty()) throw std::runtime_error(origin + ": empty CSV, header row required");

    const auto& header = records[0];
    const std::size_t m = schema.n_features();

    std::vector<int> feature_col(m, -1);
    int target_col = -1;
    for (std::size_t c = 0; c < header.size(); ++c) {
        int fi = schema.feature_index(header[c]);
        if (fi >= 0 && feature_col[static_cast<std::size_t>(fi)] < 0) {
            feature_col[static_cast<std::size_t>(fi)] = static_cast<int>(c);
        } else if (header[c] == schema.target_name && target_col < 0) {
            target_col = static_cast<int>(c);
        }
    }
    for (std::size_t f = 0; f < m; ++f) {
        if (feature_col[f] < 0) {
            throw std::runtime_error(origin + ": column '" + schema.features[f].name + "' not found in CSV header");
        }
    }
    if (target_col < 0) {
        throw std::runtime_error(origin + ": column '" + schema.target_name + "' not found in CSV header");
    }

    RawTable table;
    table.n_features = m;
    table.missing_count.assign(m, 0);
    table.cells.reserve(records.size() - 1);
    table.targets.reserve(records.size() - 1);

    const bool numeric_target = schema.task == Task::Regression;
    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto& rec = records[r];
        auto cell = [&](int col) -> std::string {
            return static_cast<std::size_t>(col) < rec.size() ? rec[static_cast<std::size_t>(col)] : std::string();
        };
        std::vector<std::string> row(m);
        for (std::size_t f = 0; f < m; ++f) {
            row[f] = cell(feature_col[f]);
            if (row[f].empty()) {
                ++table.missing_count[f];
            } else if (schema.features[f].kind == FeatureKind::Numerical) {
                double v;
                if (!parse_double(row[f], &v)) {
                    throw std::runtime_error(origin + ": row " + std::to_string(r) + " column '" +
                                             schema.features[f].name + "': cannot parse '" + row[f] +
                                             "' as a number");
                }
            }
        }
        std::string target = cell(target_col);
        if (target.empty()) {
            throw std::runtime_error(origin + ": row " + std::to_string(r) + ": missing target value");
        }
        if (numeric_target) {
            double v;
            if (!parse_double(target, &v)) {
                throw std::runtime_error(origin + ": row " + std::to_string(r) + " column '" + schema.target_name +
                                         "': cannot parse '" + target + "' as a number");
            }
        }
        table.cells.push_back(std::move(row));
        table.targets.push_back(std::move(target));
    }
    return table;
}

RawTable load_csv(const std::string& path, const Schema& schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open data file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_csv_text(ss.str(), schema, path);
}

TableSplit split(const RawTable& table, SplitFractions fractions, std::uint64_t seed) {
    if (fractions.train <= 0 || fractions.val <= 0 || fractions.test <= 0) {
        throw std::invalid_argument("split: all fractions must be positive");
    }
    double sum = fractions.train + fractions.val + fractions.test;
    if (std::abs(sum - 1.0) > 1e-9) {
        throw std::invalid_argument("split: fractions must sum to 1");
    }
    const std::size_t n = table.n_rows();
    // The 1e-9 nudge keeps exact rational fractions (k/n) from flooring down
    // one row due to floating point.
    const auto n_train = static_cast<std::size_t>(std::floor(fractions.train * static_cast<double>(n) + 1e-9));
    const auto n_val = static_cast<std::size_t>(std::floor(fractions.val * static_cast<double>(n) + 1e-9));
    if (n_train == 0 || n_val == 0 || n_train + n_val >= n) {
        throw std::runtime_error("split: table too small, a part would be empty");
    }

    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    Rng rng = Rng::substream(seed, "split");
    rng.shuffle(idx);

    std::vector<std::size_t> train_idx(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
    std::vector<std::size_t> val_idx(idx.begin() + static_cast<std::ptrdiff_t>(n_train),
                                     idx.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
    std::vector<std::size_t> test_idx(idx.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), idx.end());

    return {subset_rows(table, train_idx), subset_rows(table, val_idx), subset_rows(table, test_idx)};
}

}  // namespace ignh
