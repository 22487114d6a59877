#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "ignh/model.hpp"

namespace ignh {

struct FeatureAttribution {
    std::string name;
    std::string value;                 // decoded input (original units / category label)
    double score = 0.0;                // reported class for multiclass
    std::vector<double> class_scores;  // filled when all classes are requested
};

/// Exact per-feature decomposition of one prediction: bias + sum of scores
/// equals the pre-link output of the very forward pass that produced the
/// prediction. Nothing is approximated after the fact.
struct AttributionReport {
    std::size_t instance_id = 0;
    std::vector<FeatureAttribution> features;  // schema order (unsorted)
    double bias = 0.0;
    double pre_link = 0.0;   // z for the reported class
    double prediction = 0.0; // link(z): P(positive) / P(predicted class) / z
    int predicted_class = -1;  // -1 for regression
    std::vector<double> z_all;  // every class's pre-link output
};

// Scores come straight from the readout stage of the forward pass. For
// multiclass the predicted class's component is reported (per-class vectors
// available via all_classes).
AttributionReport attribute(std::span<const double> encoded_row, const ModelParams& params, const GraphView& graph,
                            const ModelConfig& config, const Schema& schema, std::size_t instance_id,
                            const std::vector<std::string>* display_values = nullptr, bool all_classes = false);

// Indices ordered by |score| descending, ties broken by feature index; k is
// clamped to the feature count.
std::vector<std::size_t> top_k(const AttributionReport& report, std::size_t k);

nlohmann::json report_to_json(const AttributionReport& report);

// CSV rows "rank,feature,value,score" for the top-k table.
std::string top_k_csv(const AttributionReport& report, std::size_t k);

}  // namespace ignh
