#include "ignh/explain.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

namespace ignh {

AttributionReport attribute(std::span<const double> encoded_row, const ModelParams& params, const GraphView& graph,
                            const ModelConfig& config, const Schema& schema, std::size_t instance_id,
                            const std::vector<std::string>* display_values, bool all_classes) {
    ForwardTrace trace;
    forward(encoded_row, params, graph, config, trace);
    const ParamLayout& lay = params.layout;
    const std::size_t k = lay.k;

    auto probs = apply_link(trace.z, config.task);

    AttributionReport report;
    report.instance_id = instance_id;
    report.z_all.assign(trace.z.begin(), trace.z.end());

    std::size_t cls = 0;
    if (config.task == Task::Regression) {
        report.predicted_class = -1;
        report.prediction = trace.z[0];
    } else if (config.task == Task::Binary) {
        report.predicted_class = probs[0] >= 0.5 ? 1 : 0;
        report.prediction = probs[0];
    } else {
        cls = static_cast<std::size_t>(
            std::distance(probs.begin(), std::max_element(probs.begin(), probs.end())));
        report.predicted_class = static_cast<int>(cls);
        report.prediction = probs[cls];
    }

    report.bias = params.values[lay.bias_off + cls];
    report.pre_link = trace.z[cls];

    report.features.resize(lay.m);
    for (std::size_t i = 0; i < lay.m; ++i) {
        FeatureAttribution& fa = report.features[i];
        fa.name = schema.features[i].name;
        fa.score = trace.scores[i * k + cls];
        if (all_classes && k > 1) {
            fa.class_scores.assign(trace.scores.begin() + static_cast<std::ptrdiff_t>(i * k),
                                   trace.scores.begin() + static_cast<std::ptrdiff_t>((i + 1) * k));
        }
        if (display_values) {
            fa.value = (*display_values)[i];
        } else {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.17g", encoded_row[i]);
            fa.value = buf;
        }
    }
    return report;
}

std::vector<std::size_t> top_k(const AttributionReport& report, std::size_t k) {
    if (k == 0) throw std::invalid_argument("top_k: k must be >= 1");
    std::vector<std::size_t> idx(report.features.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(report.features[a].score) > std::abs(report.features[b].score);
    });
    idx.resize(std::min(k, idx.size()));
    return idx;
}

nlohmann::json report_to_json(const AttributionReport& report) {
    nlohmann::json j;
    j["instance_id"] = report.instance_id;
    j["prediction"] = report.prediction;
    j["predicted_class"] = report.predicted_class;
    j["bias"] = report.bias;
    j["pre_link"] = report.pre_link;
    j["features"] = nlohmann::json::array();
    for (const auto& f : report.features) {
        nlohmann::json jf{{"name", f.name}, {"value", f.value}, {"score", f.score}};
        if (!f.class_scores.empty()) jf["class_scores"] = f.class_scores;
        j["features"].push_back(std::move(jf));
    }
    j["sorted"] = false;
    return j;
}

std::string top_k_csv(const AttributionReport& report, std::size_t k) {
    auto idx = top_k(report, k);
    std::string out = "rank,feature,value,score\n";
    char buf[64];
    for (std::size_t r = 0; r < idx.size(); ++r) {
        const auto& f = report.features[idx[r]];
        std::snprintf(buf, sizeof(buf), "%.17g", f.score);
        out += std::to_string(r + 1) + "," + f.name + "," + f.value + "," + buf + "\n";
    }
    return out;
}

}  // namespace ignh
