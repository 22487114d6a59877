#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace ignh {

enum class FeatureKind : std::uint8_t { Numerical = 0, Categorical = 1 };
enum class Task : std::uint8_t { Binary = 0, Multiclass = 1, Regression = 2 };

std::string to_string(FeatureKind kind);
std::string to_string(Task task);
FeatureKind feature_kind_from_string(const std::string& s);
Task task_from_string(const std::string& s);

struct FeatureSpec {
    std::string name;
    FeatureKind kind;
};

/// Typed description of a tabular dataset: ordered feature list, target
/// column, task, and the ordered class labels for classification.
struct Schema {
    std::vector<FeatureSpec> features;
    std::string target_name;
    Task task = Task::Binary;
    std::vector<std::string> class_labels;

    std::size_t n_features() const { return features.size(); }
    std::size_t n_classes() const { return class_labels.size(); }
    int feature_index(const std::string& name) const;

    // Throws std::invalid_argument on duplicate feature names, a target that
    // collides with a feature, or missing/short class label lists.
    void validate() const;
};

Schema schema_from_json(const nlohmann::json& j);
nlohmann::json schema_to_json(const Schema& schema);
Schema load_schema(const std::string& path);

// Stable fingerprint tying encoded matrices, graphs, and model files to the
// schema they were produced from.
std::uint64_t schema_hash(const Schema& schema);

}  // namespace ignh
