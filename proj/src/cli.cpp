#include "ignh/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "ignh/assoc.hpp"
#include "ignh/encode.hpp"
#include "ignh/explain.hpp"
#include "ignh/graph.hpp"
#include "ignh/metrics.hpp"
#include "ignh/model.hpp"
#include "ignh/model_file.hpp"
#include "ignh/parallel.hpp"
#include "ignh/rng.hpp"
#include "ignh/shapval.hpp"
#include "ignh/table.hpp"
#include "ignh/train.hpp"

namespace ignh {

namespace {

void require_file(const std::string& path, const char* what) {
    if (!std::filesystem::exists(path)) {
        throw UsageError(std::string(what) + " file not found: " + path);
    }
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct LoadedModel {
    ModelFile file;
    GraphView view;
    RawTable table;
    EncodedMatrix data;
};

LoadedModel load_model_and_data(const std::string& model_path, const std::string& data_path) {
    require_file(model_path, "model");
    require_file(data_path, "data");
    LoadedModel lm;
    lm.file = load_model(model_path);
    lm.view = GraphView::make(lm.file.graph);
    lm.table = load_csv(data_path, lm.file.schema);
    lm.data = encode(lm.table, lm.file.encoders, lm.file.schema);
    return lm;
}

std::vector<std::size_t> parse_budgets(const std::string& text) {
    std::vector<std::size_t> budgets;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t comma = text.find(',', pos);
        if (comma == std::string::npos) comma = text.size();
        std::string item = text.substr(pos, comma - pos);
        if (item == "full") {
            budgets.push_back(kFullBudget);
        } else if (!item.empty()) {
            budgets.push_back(static_cast<std::size_t>(std::stoull(item)));
        }
        pos = comma + 1;
    }
    if (budgets.empty()) throw UsageError("--budgets: no budgets given");
    // "full" acts as the final, largest design
    for (std::size_t i = 0; i + 1 < budgets.size(); ++i) {
        if (budgets[i] == kFullBudget) throw UsageError("--budgets: 'full' must be the last entry");
    }
    return budgets;
}

}  // namespace

int cmd_build_graph(const BuildGraphOptions& options) {
    require_file(options.data, "data");
    require_file(options.schema, "schema");
    if (options.alpha <= 0.0 || options.alpha >= 1.0) throw UsageError("--alpha must be in (0, 1)");

    const Schema schema = load_schema(options.schema);
    const RawTable table = load_csv(options.data, schema);
    const EncoderState encoders = fit_encoders(table, schema);
    const EncodedMatrix encoded = encode(table, encoders, schema);
    FeatureGraph graph = build_graph(encoded, schema, options.alpha, options.threads);
    save_graph(graph, options.out);

    std::size_t n_pearson = 0, n_pb = 0, n_kendall = 0;
    for (const auto& e : graph.edges) {
        if (e.kind == AssocKind::Pearson) ++n_pearson;
        else if (e.kind == AssocKind::PointBiserial) ++n_pb;
        else ++n_kendall;
    }
    std::cout << "graph: " << graph.n_nodes() << " nodes, " << graph.edges.size() << " edges (pearson " << n_pearson
              << ", point_biserial " << n_pb << ", kendall " << n_kendall << "), alpha " << graph.alpha << "\n";
    std::cout << "wrote " << options.out << "\n";
    return 0;
}

int cmd_train(const TrainOptions& options) {
    require_file(options.data, "data");
    require_file(options.schema, "schema");
    if (options.graph) require_file(*options.graph, "graph");
    if (options.config) require_file(*options.config, "config");
    if (options.split_fractions.size() != 3) throw UsageError("--split needs three fractions");
    if (options.self_loop && *options.self_loop <= 0.0) throw UsageError("--self-loop must be positive");
    if (options.self_loop_fraction <= 0.0 || options.self_loop_fraction >= 1.0) {
        throw UsageError("--self-loop-frac must be in (0, 1)");
    }

    const Schema schema = load_schema(options.schema);
    const RawTable table = load_csv(options.data, schema);

    ModelConfig model_config;
    TrainConfig train_config;
    if (options.config) {
        std::ifstream in(*options.config);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw UsageError("config file " + *options.config + ": " + e.what());
        }
        if (j.contains("model")) {
            const auto& jm = j["model"];
            if (jm.contains("embed_dim")) model_config.embed_dim = jm["embed_dim"].get<std::size_t>();
            if (jm.contains("layer_dims")) model_config.layer_dims = jm["layer_dims"].get<std::vector<std::size_t>>();
            if (jm.contains("activation")) model_config.activation = activation_from_string(jm["activation"]);
            if (jm.contains("weight_sharing")) model_config.sharing = weight_sharing_from_string(jm["weight_sharing"]);
        }
        if (j.contains("train")) {
            const auto& jt = j["train"];
            if (jt.contains("learning_rate")) train_config.learning_rate = jt["learning_rate"].get<double>();
            if (jt.contains("max_epochs")) train_config.max_epochs = jt["max_epochs"].get<std::size_t>();
            if (jt.contains("patience")) train_config.patience = jt["patience"].get<std::size_t>();
            if (jt.contains("batch_size")) train_config.batch_size = jt["batch_size"].get<std::size_t>();
        }
    }
    // flags win over the config file
    if (options.embed_dim) model_config.embed_dim = *options.embed_dim;
    if (options.layer_dims) model_config.layer_dims = *options.layer_dims;
    if (options.activation) model_config.activation = activation_from_string(*options.activation);
    if (options.weight_sharing) model_config.sharing = weight_sharing_from_string(*options.weight_sharing);
    if (options.learning_rate) train_config.learning_rate = *options.learning_rate;
    if (options.max_epochs) train_config.max_epochs = *options.max_epochs;
    if (options.patience) train_config.patience = *options.patience;
    if (options.batch_size) train_config.batch_size = *options.batch_size;

    model_config.task = schema.task;
    model_config.n_classes = schema.task == Task::Regression ? 1 : schema.n_classes();
    model_config.seed = options.seed;
    train_config.seed = options.seed;
    model_config.validate();
    train_config.validate();

    TableSplit parts = split(table, {options.split_fractions[0], options.split_fractions[1], options.split_fractions[2]},
                             options.seed);
    const EncoderState encoders = fit_encoders(parts.train, schema);
    const EncodedMatrix train_encoded = encode(parts.train, encoders, schema);
    const EncodedMatrix val_encoded = encode(parts.val, encoders, schema);

    FeatureGraph graph;
    if (options.graph) {
        graph = load_graph(*options.graph, schema_hash(schema));
    } else {
        // Correlations come from the original training split; oversampling
        // duplicates would inflate every significance test.
        graph = build_graph(train_encoded, schema, options.alpha, options.threads);
    }
    if (options.self_loop) {
        set_self_loops(graph, *options.self_loop);
    } else {
        set_self_loops_fraction(graph, options.self_loop_fraction);
    }

    EncodedMatrix train_final =
        schema.task == Task::Binary ? oversample_minority(train_encoded, options.seed) : train_encoded;

    TrainResult result = train(train_final, val_encoded, graph, schema, encoders, model_config, train_config);

    ModelFile model;
    model.schema = schema;
    model.encoders = encoders;
    model.graph = graph;
    model.config = model_config;
    model.params = result.params;
    model.meta.seed = options.seed;
    model.meta.best_epoch = static_cast<std::uint32_t>(result.history.best_epoch);
    model.meta.best_val_metric = result.history.best_val_metric;
    model.meta.train_config = train_config;
    save_model(model, options.out);

    const std::string history_path = options.history ? *options.history : options.out + ".history.csv";
    write_text(history_path, history_to_csv(result.history));

    std::cout << "train rows " << train_final.n_rows << " (val " << val_encoded.n_rows << ", test "
              << parts.test.n_rows() << "), epochs run " << result.history.epochs.size() << ", best epoch "
              << result.history.best_epoch << ", best val "
              << (schema.task == Task::Regression ? "mse " : "auc ") << fmt(result.history.best_val_metric) << "\n";
    std::cout << "wrote " << options.out << " and " << history_path << "\n";
    return 0;
}

int cmd_predict(const PredictOptions& options) {
    LoadedModel lm = load_model_and_data(options.model, options.data);
    const std::size_t n = lm.data.n_rows;
    const Task task = lm.file.schema.task;
    const auto& labels = lm.file.schema.class_labels;

    std::string csv = "instance_id";
    if (task == Task::Regression) {
        csv += ",prediction";
    } else {
        for (const auto& l : labels) csv += ",p_" + l;
        csv += ",predicted_label";
    }
    csv += "\n";

    std::vector<std::vector<double>> probs(n);
    parallel_for(n, options.threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t r = begin; r < end; ++r) {
            probs[r] = predict(lm.data.row(r), lm.file.params, lm.view, lm.file.config);
        }
    });

    for (std::size_t r = 0; r < n; ++r) {
        csv += std::to_string(r);
        if (task == Task::Regression) {
            csv += "," + fmt(probs[r][0]);
        } else if (task == Task::Binary) {
            const double p1 = probs[r][0];
            csv += "," + fmt(1.0 - p1) + "," + fmt(p1);
            csv += "," + labels[p1 >= 0.5 ? 1 : 0];
        } else {
            std::size_t arg = 0;
            for (std::size_t c = 0; c < probs[r].size(); ++c) {
                csv += "," + fmt(probs[r][c]);
                if (probs[r][c] > probs[r][arg]) arg = c;
            }
            csv += "," + labels[arg];
        }
        csv += "\n";
    }
    write_text(options.out, csv);
    std::cout << "wrote predictions for " << n << " rows to " << options.out << "\n";
    return 0;
}

int cmd_explain(const ExplainOptions& options) {
    if (options.top_k == 0) throw UsageError("--top-k must be >= 1");
    LoadedModel lm = load_model_and_data(options.model, options.data);

    nlohmann::json reports = nlohmann::json::array();
    std::string topk_csv = "instance_id,rank,feature,value,score\n";
    for (std::size_t r = 0; r < lm.data.n_rows; ++r) {
        AttributionReport report = attribute(lm.data.row(r), lm.file.params, lm.view, lm.file.config, lm.file.schema,
                                             r, &lm.table.cells[r], options.all_classes);
        reports.push_back(report_to_json(report));
        for (std::size_t rank = 0; const std::size_t fi : top_k(report, options.top_k)) {
            const auto& f = report.features[fi];
            topk_csv += std::to_string(r) + "," + std::to_string(++rank) + "," + f.name + "," + f.value + "," +
                        fmt(f.score) + "\n";
        }
    }
    write_text(options.out, reports.dump(2) + "\n");

    std::filesystem::path topk_path(options.out);
    topk_path.replace_extension();
    topk_path += "_topk.csv";
    write_text(topk_path.string(), topk_csv);

    std::cout << "wrote " << lm.data.n_rows << " attribution reports to " << options.out << " (top-" << options.top_k
              << " table: " << topk_path.string() << ")\n";
    return 0;
}

int cmd_eval(const EvalOptions& options) {
    LoadedModel lm = load_model_and_data(options.model, options.data);
    const std::size_t n = lm.data.n_rows;
    const Task task = lm.file.schema.task;

    nlohmann::json j;
    j["task"] = to_string(task);
    j["n_rows"] = n;
    ForwardTrace trace;
    if (task == Task::Binary) {
        std::vector<double> scores(n);
        std::vector<int> labels(n);
        std::size_t n_pos = 0;
        for (std::size_t r = 0; r < n; ++r) {
            forward(lm.data.row(r), lm.file.params, lm.view, lm.file.config, trace);
            scores[r] = sigmoid(trace.z[0]);
            labels[r] = static_cast<int>(lm.data.labels[r]);
            n_pos += static_cast<std::size_t>(labels[r]);
        }
        j["auc"] = auc_binary(scores, labels);
        j["n_pos"] = n_pos;
        j["n_neg"] = n - n_pos;
    } else if (task == Task::Multiclass) {
        const std::size_t k = lm.file.config.n_classes;
        std::vector<double> probs(n * k);
        std::vector<int> labels(n);
        for (std::size_t r = 0; r < n; ++r) {
            forward(lm.data.row(r), lm.file.params, lm.view, lm.file.config, trace);
            auto p = apply_link(trace.z, Task::Multiclass);
            std::copy(p.begin(), p.end(), probs.begin() + static_cast<std::ptrdiff_t>(r * k));
            labels[r] = static_cast<int>(lm.data.labels[r]);
        }
        EvalResult result = auc_weighted_ovr(probs, labels, k);
        j["auc"] = result.auc;
        j["per_class"] = nlohmann::json::array();
        for (const auto& pc : result.per_class) {
            j["per_class"].push_back({{"label", lm.file.schema.class_labels[pc.class_index]},
                                      {"auc", pc.auc},
                                      {"support", pc.support}});
        }
    } else {
        double mse = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            forward(lm.data.row(r), lm.file.params, lm.view, lm.file.config, trace);
            const double d = trace.z[0] - lm.data.labels[r];
            mse += d * d;
        }
        j["mse"] = mse / static_cast<double>(n);
    }
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_shap_verify(const ShapVerifyOptions& options) {
    if (options.rows == 0) throw UsageError("--rows must be >= 1");
    LoadedModel lm = load_model_and_data(options.model, options.data);
    const std::size_t n = lm.data.n_rows;
    if (n == 0) throw std::runtime_error("shap-verify: no data rows");

    TraceOptions trace_options;
    trace_options.budgets = parse_budgets(options.budgets);
    trace_options.seed = options.seed;
    trace_options.threads = options.threads;
    const bool has_full = !trace_options.budgets.empty() && trace_options.budgets.back() == kFullBudget;
    trace_options.include_exact = has_full && lm.data.n_features <= 20;

    std::vector<std::size_t> all_rows(n);
    for (std::size_t i = 0; i < n; ++i) all_rows[i] = i;
    Rng rng = Rng::substream(options.seed, "shap-rows");
    rng.shuffle(all_rows);
    all_rows.resize(std::min(options.rows, n));

    ConvergenceTrace trace = convergence_trace(lm.data, all_rows, lm.file.params, lm.view, lm.file.config,
                                               trace_options);
    write_text(options.out, trace_to_csv(trace));
    std::cout << "explained " << all_rows.size() << " rows at " << trace.points.size() << " budgets; wrote "
              << options.out << "\n";
    for (const auto& p : trace.points) {
        std::cout << "  budget " << p.budget << ": mean cosine " << fmt(p.mean_cosine) << ", mean spearman "
                  << fmt(p.mean_spearman) << "\n";
    }
    return 0;
}

int cmd_dump_assoc(const DumpAssocOptions& options) {
    require_file(options.data, "data");
    require_file(options.schema, "schema");
    const Schema schema = load_schema(options.schema);
    const RawTable table = load_csv(options.data, schema);
    const EncoderState encoders = fit_encoders(table, schema);
    const EncodedMatrix encoded = encode(table, encoders, schema);
    const std::size_t m = schema.n_features();

    std::string csv = "feature_i,feature_j,kind,r,p,n\n";
    std::vector<double> a, b;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            a.clear();
            b.clear();
            for (std::size_t r = 0; r < encoded.n_rows; ++r) {
                if (encoded.is_missing(r, i) || encoded.is_missing(r, j)) continue;
                a.push_back(encoded.at(r, i));
                b.push_back(encoded.at(r, j));
            }
            const bool i_cat = schema.features[i].kind == FeatureKind::Categorical;
            const bool j_cat = schema.features[j].kind == FeatureKind::Categorical;
            std::optional<Assoc> assoc;
            if (!i_cat && !j_cat) assoc = pearson(a, b);
            else if (i_cat && j_cat) assoc = kendall_tau(a, b);
            else if (i_cat) assoc = cat_num_association(a, b, options.alpha);
            else assoc = cat_num_association(b, a, options.alpha);
            if (!assoc) continue;
            csv += schema.features[i].name + "," + schema.features[j].name + "," + assoc_kind_name(assoc->kind) +
                   "," + fmt(assoc->r) + "," + fmt(assoc->p_value) + "," + std::to_string(assoc->n) + "\n";
        }
    }
    write_text(options.out, csv);
    std::cout << "wrote association matrix to " << options.out << "\n";
    return 0;
}

}  // namespace ignh
