#include "ignh/schema.hpp"

#include <fstream>
#include <stdexcept>
#include <unordered_set>

#include "ignh/rng.hpp"

namespace ignh {

std::string to_string(FeatureKind kind) {
    return kind == FeatureKind::Numerical ? "numerical" : "categorical";
}

std::string to_string(Task task) {
    switch (task) {
        case Task::Binary: return "binary";
        case Task::Multiclass: return "multiclass";
        case Task::Regression: return "regression";
    }
    throw std::logic_error("bad task");
}

FeatureKind feature_kind_from_string(const std::string& s) {
    if (s == "numerical") return FeatureKind::Numerical;
    if (s == "categorical") return FeatureKind::Categorical;
    throw std::invalid_argument("unknown feature kind: " + s);
}

Task task_from_string(const std::string& s) {
    if (s == "binary") return Task::Binary;
    if (s == "multiclass") return Task::Multiclass;
    if (s == "regression") return Task::Regression;
    throw std::invalid_argument("unknown task: " + s);
}

int Schema::feature_index(const std::string& name) const {
    for (std::size_t i = 0; i < features.size(); ++i) {
        if (features[i].name == name) return static_cast<int>(i);
    }
    return -1;
}

void Schema::validate() const {
    if (features.empty()) throw std::invalid_argument("schema: feature list is empty");
    std::unordered_set<std::string> seen;
    for (const auto& f : features) {
        if (f.name.empty()) throw std::invalid_argument("schema: empty feature name");
        if (!seen.insert(f.name).second) {
            throw std::invalid_argument("schema: duplicate feature name: " + f.name);
        }
    }
    if (target_name.empty()) throw std::invalid_argument("schema: empty target name");
    if (seen.count(target_name)) {
        throw std::invalid_argument("schema: target '" + target_name + "' is also listed as a feature");
    }
    if (task == Task::Binary) {
        if (class_labels.size() != 2) {
            throw std::invalid_argument("schema: binary task requires exactly 2 class_labels");
        }
    } else if (task == Task::Multiclass) {
        if (class_labels.size() < 2) {
            throw std::invalid_argument("schema: multiclass task requires >= 2 class_labels");
        }
    }
    std::unordered_set<std::string> labels;
    for (const auto& l : class_labels) {
        if (!labels.insert(l).second) {
            throw std::invalid_argument("schema: duplicate class label: " + l);
        }
    }
}

Schema schema_from_json(const nlohmann::json& j) {
    Schema s;
    if (!j.contains("features") || !j["features"].is_array()) {
        throw std::invalid_argument("schema json: missing 'features' array");
    }
    for (const auto& f : j["features"]) {
        s.features.push_back({f.at("name").get<std::string>(),
                              feature_kind_from_string(f.at("kind").get<std::string>())});
    }
    const auto& target = j.at("target");
    s.target_name = target.at("name").get<std::string>();
    s.task = task_from_string(target.at("task").get<std::string>());
    if (j.contains("class_labels")) {
        s.class_labels = j["class_labels"].get<std::vector<std::string>>();
    }
    s.validate();
    return s;
}

nlohmann::json schema_to_json(const Schema& schema) {
    nlohmann::json j;
    j["features"] = nlohmann::json::array();
    for (const auto& f : schema.features) {
        j["features"].push_back({{"name", f.name}, {"kind", to_string(f.kind)}});
    }
    j["target"] = {{"name", schema.target_name}, {"task", to_string(schema.task)}};
    j["class_labels"] = schema.class_labels;
    return j;
}

Schema load_schema(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open schema file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("schema file " + path + ": " + e.what());
    }
    return schema_from_json(j);
}

std::uint64_t schema_hash(const Schema& schema) {
    std::string canon;
    for (const auto& f : schema.features) {
        canon += f.name;
        canon += '\x1f';
        canon += to_string(f.kind);
        canon += '\x1e';
    }
    canon += schema.target_name;
    canon += '\x1f';
    canon += to_string(schema.task);
    for (const auto& l : schema.class_labels) {
        canon += '\x1e';
        canon += l;
    }
    return Rng::fnv1a(canon);
}

}  // namespace ignh
