#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "ignh/assoc.hpp"
#include "ignh/encode.hpp"
#include "ignh/explain.hpp"
#include "ignh/graph.hpp"
#include "ignh/metrics.hpp"
#include "ignh/model.hpp"
#include "ignh/model_file.hpp"
#include "ignh/shapval.hpp"
#include "ignh/table.hpp"
#include "ignh/train.hpp"

namespace py = pybind11;
using namespace ignh;

namespace {

py::object assoc_to_py(const std::optional<Assoc>& a) {
    if (!a) return py::none();
    py::dict d;
    d["r"] = a->r;
    d["p_value"] = a->p_value;
    d["n"] = a->n;
    d["kind"] = assoc_kind_name(a->kind);
    return d;
}

PredictFn wrap_fn(const py::function& fn) {
    return [fn](std::span<const double> x) {
        py::gil_scoped_acquire gil;
        return fn(std::vector<double>(x.begin(), x.end())).cast<double>();
    };
}

/// Bundles a trained model with everything inference needs.
struct PyModel {
    ModelFile file;
    GraphView view;

    explicit PyModel(ModelFile f) : file(std::move(f)), view(GraphView::make(file.graph)) {}

    std::vector<double> predict_row(const std::vector<double>& row) const {
        return predict(row, file.params, view, file.config);
    }

    std::vector<double> pre_link(const std::vector<double>& row) const {
        ForwardTrace trace;
        forward(row, file.params, view, file.config, trace);
        return trace.z;
    }

    py::dict explain_row(const std::vector<double>& row, bool all_classes) const {
        AttributionReport report =
            attribute(row, file.params, view, file.config, file.schema, 0, nullptr, all_classes);
        py::dict d;
        d["prediction"] = report.prediction;
        d["predicted_class"] = report.predicted_class;
        d["bias"] = report.bias;
        d["pre_link"] = report.pre_link;
        py::list feats;
        for (const auto& f : report.features) {
            py::dict jf;
            jf["name"] = f.name;
            jf["score"] = f.score;
            if (!f.class_scores.empty()) jf["class_scores"] = f.class_scores;
            feats.append(std::move(jf));
        }
        d["features"] = std::move(feats);
        return d;
    }

    py::list shap_trace(const EncodedMatrix& data, const std::vector<std::size_t>& rows,
                        const std::vector<std::size_t>& budgets, std::uint64_t seed, int threads,
                        bool include_exact) const {
        TraceOptions options;
        options.budgets = budgets;
        options.seed = seed;
        options.threads = threads;
        options.include_exact = include_exact;
        ConvergenceTrace trace = convergence_trace(data, rows, file.params, view, file.config, options);
        py::list out;
        for (const auto& p : trace.points) {
            py::dict d;
            d["budget"] = p.budget;
            d["mean_cosine"] = p.mean_cosine;
            d["mean_spearman"] = p.mean_spearman;
            d["n_rows"] = p.n_rows;
            if (p.mean_cosine_exact) d["mean_cosine_exact"] = *p.mean_cosine_exact;
            if (p.mean_spearman_exact) d["mean_spearman_exact"] = *p.mean_spearman_exact;
            out.append(std::move(d));
        }
        return out;
    }
};

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Interpretable feature-graph networks for mixed-type tabular data";

    py::class_<Schema>(m, "Schema")
        .def_static("from_json", [](const std::string& text) { return schema_from_json(nlohmann::json::parse(text)); })
        .def_static("load", &load_schema)
        .def_property_readonly("n_features", &Schema::n_features)
        .def_property_readonly("feature_names",
                               [](const Schema& s) {
                                   std::vector<std::string> names;
                                   for (const auto& f : s.features) names.push_back(f.name);
                                   return names;
                               })
        .def_property_readonly("target", [](const Schema& s) { return s.target_name; })
        .def_property_readonly("task", [](const Schema& s) { return to_string(s.task); })
        .def_property_readonly("class_labels", [](const Schema& s) { return s.class_labels; })
        .def("to_json", [](const Schema& s) { return schema_to_json(s).dump(); });

    py::class_<RawTable>(m, "RawTable")
        .def_property_readonly("n_rows", &RawTable::n_rows)
        .def_property_readonly("missing_count", [](const RawTable& t) { return t.missing_count; });

    py::class_<EncoderState>(m, "EncoderState");

    py::class_<EncodedMatrix>(m, "EncodedMatrix")
        .def_property_readonly("n_rows", [](const EncodedMatrix& e) { return e.n_rows; })
        .def_property_readonly("n_features", [](const EncodedMatrix& e) { return e.n_features; })
        .def_property_readonly("labels", [](const EncodedMatrix& e) { return e.labels; })
        .def("row", [](const EncodedMatrix& e, std::size_t r) {
            auto s = e.row(r);
            return std::vector<double>(s.begin(), s.end());
        });

    py::class_<FeatureGraph>(m, "FeatureGraph")
        .def_property_readonly("n_nodes", &FeatureGraph::n_nodes)
        .def_property_readonly("alpha", [](const FeatureGraph& g) { return g.alpha; })
        .def_property_readonly("self_loop", [](const FeatureGraph& g) { return g.self_loop; })
        .def_property_readonly("edges",
                               [](const FeatureGraph& g) {
                                   py::list edges;
                                   for (const auto& e : g.edges) {
                                       py::dict d;
                                       d["i"] = e.i;
                                       d["j"] = e.j;
                                       d["weight"] = e.weight;
                                       d["kind"] = assoc_kind_name(e.kind);
                                       edges.append(std::move(d));
                                   }
                                   return edges;
                               })
        .def("save", &save_graph);
    m.def("load_graph", [](const std::string& path) { return load_graph(path); });

    py::class_<ModelConfig>(m, "ModelConfig")
        .def(py::init<>())
        .def_readwrite("embed_dim", &ModelConfig::embed_dim)
        .def_readwrite("layer_dims", &ModelConfig::layer_dims)
        .def_readwrite("seed", &ModelConfig::seed)
        .def_property("activation", [](const ModelConfig& c) { return to_string(c.activation); },
                      [](ModelConfig& c, const std::string& s) { c.activation = activation_from_string(s); })
        .def_property("weight_sharing", [](const ModelConfig& c) { return to_string(c.sharing); },
                      [](ModelConfig& c, const std::string& s) { c.sharing = weight_sharing_from_string(s); });

    py::class_<TrainConfig>(m, "TrainConfig")
        .def(py::init<>())
        .def_readwrite("learning_rate", &TrainConfig::learning_rate)
        .def_readwrite("max_epochs", &TrainConfig::max_epochs)
        .def_readwrite("patience", &TrainConfig::patience)
        .def_readwrite("batch_size", &TrainConfig::batch_size)
        .def_readwrite("seed", &TrainConfig::seed);

    py::class_<PyModel>(m, "Model")
        .def_static("load", [](const std::string& path) { return PyModel(load_model(path)); })
        .def("save", [](const PyModel& model, const std::string& path) { save_model(model.file, path); })
        .def("predict_row", &PyModel::predict_row, py::arg("row"))
        .def("pre_link", &PyModel::pre_link, py::arg("row"))
        .def("explain_row", &PyModel::explain_row, py::arg("row"), py::arg("all_classes") = false)
        .def("shap_trace", &PyModel::shap_trace, py::arg("data"), py::arg("rows"), py::arg("budgets"),
             py::arg("seed") = 0, py::arg("threads") = 1, py::arg("include_exact") = false)
        .def_property_readonly("best_epoch", [](const PyModel& m_) { return m_.file.meta.best_epoch; })
        .def_property_readonly("best_val_metric", [](const PyModel& m_) { return m_.file.meta.best_val_metric; })
        .def_property_readonly("graph", [](const PyModel& m_) { return m_.file.graph; });

    m.def("parse_csv", [](const std::string& text, const Schema& schema) {
        return parse_csv_text(text, schema, "<string>");
    });
    m.def("load_csv", &load_csv, py::arg("path"), py::arg("schema"));
    m.def("split",
          [](const RawTable& t, double train, double val, double test, std::uint64_t seed) {
              TableSplit s = split(t, {train, val, test}, seed);
              return py::make_tuple(std::move(s.train), std::move(s.val), std::move(s.test));
          },
          py::arg("table"), py::arg("train"), py::arg("val"), py::arg("test"), py::arg("seed") = 0);
    m.def("fit_encoders", &fit_encoders);
    m.def("encode", &encode);
    m.def("oversample_minority", &oversample_minority, py::arg("train"), py::arg("seed") = 0);

    m.def("build_graph", &build_graph, py::arg("train"), py::arg("schema"), py::arg("alpha") = 0.05,
          py::arg("threads") = 1);
    m.def("set_self_loops",
          [](FeatureGraph& g, std::optional<double> weight, std::optional<double> fraction) {
              if (weight && fraction) throw std::invalid_argument("give either weight or fraction, not both");
              if (weight) set_self_loops(g, *weight);
              else set_self_loops_fraction(g, fraction.value_or(0.9));
          },
          py::arg("graph"), py::arg("weight") = py::none(), py::arg("fraction") = py::none());

    m.def("train",
          [](const EncodedMatrix& train_set, const EncodedMatrix& val_set, const FeatureGraph& graph,
             const Schema& schema, const EncoderState& encoders, const ModelConfig& mc, const TrainConfig& tc) {
              ModelConfig model_config = mc;
              model_config.task = schema.task;
              model_config.n_classes = schema.task == Task::Regression ? 1 : schema.n_classes();
              TrainResult r = ignh::train(train_set, val_set, graph, schema, encoders, model_config, tc);
              ModelFile f;
              f.schema = schema;
              f.encoders = encoders;
              f.graph = graph;
              f.config = model_config;
              f.params = std::move(r.params);
              f.meta.seed = tc.seed;
              f.meta.best_epoch = static_cast<std::uint32_t>(r.history.best_epoch);
              f.meta.best_val_metric = r.history.best_val_metric;
              f.meta.train_config = tc;
              py::list history;
              for (const auto& e : r.history.epochs) {
                  py::dict d;
                  d["epoch"] = e.epoch;
                  d["train_loss"] = e.train_loss;
                  d["val_metric"] = e.val_metric;
                  history.append(std::move(d));
              }
              return py::make_tuple(PyModel(std::move(f)), std::move(history));
          },
          py::arg("train_set"), py::arg("val_set"), py::arg("graph"), py::arg("schema"), py::arg("encoders"),
          py::arg("model_config") = ModelConfig{}, py::arg("train_config") = TrainConfig{});

    m.def("pearson", [](const std::vector<double>& x, const std::vector<double>& y) {
        return assoc_to_py(pearson(x, y));
    });
    m.def("point_biserial", [](const std::vector<double>& x, const std::vector<double>& y) {
        return assoc_to_py(point_biserial(x, y));
    });
    m.def("kendall_tau", [](const std::vector<double>& x, const std::vector<double>& y) {
        return assoc_to_py(kendall_tau(x, y));
    });
    m.def("cat_num_association", [](const std::vector<double>& cat, const std::vector<double>& num, double alpha) {
        return assoc_to_py(cat_num_association(cat, num, alpha));
    });
    m.def("fisher_average", [](const std::vector<double>& rs) { return fisher_average(rs); });
    m.def("t_test_p_value", &t_test_p_value);

    m.def("auc_binary", [](const std::vector<double>& scores, const std::vector<int>& labels) {
        return auc_binary(scores, labels);
    });
    m.def("auc_weighted_ovr", [](const std::vector<double>& probs, const std::vector<int>& labels, std::size_t k) {
        EvalResult r = auc_weighted_ovr(probs, labels, k);
        py::dict d;
        d["auc"] = r.auc;
        py::list per_class;
        for (const auto& c : r.per_class) {
            py::dict pc;
            pc["class_index"] = c.class_index;
            pc["auc"] = c.auc;
            pc["support"] = c.support;
            per_class.append(std::move(pc));
        }
        d["per_class"] = std::move(per_class);
        return d;
    });

    m.def("exact_shapley",
          [](const py::function& fn, const std::vector<double>& row, const std::vector<double>& baseline) {
              return exact_shapley(wrap_fn(fn), row, baseline);
          });
    m.def("kernel_shap",
          [](const py::function& fn, const std::vector<double>& row, const std::vector<double>& baseline,
             std::size_t n_samples, std::uint64_t seed) {
              return kernel_shap(wrap_fn(fn), row, baseline, n_samples, seed);
          },
          py::arg("fn"), py::arg("row"), py::arg("baseline"), py::arg("n_samples"), py::arg("seed") = 0);
    m.def("kernel_shap_complete",
          [](const py::function& fn, const std::vector<double>& row, const std::vector<double>& baseline) {
              return kernel_shap_complete(wrap_fn(fn), row, baseline);
          });
    m.def("cosine_similarity", [](const std::vector<double>& a, const std::vector<double>& b) -> py::object {
        auto c = cosine_similarity(a, b);
        return c ? py::cast(*c) : py::none();
    });
    m.def("spearman", [](const std::vector<double>& a, const std::vector<double>& b) -> py::object {
        auto c = spearman(a, b);
        return c ? py::cast(*c) : py::none();
    });
}
