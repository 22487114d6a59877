#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ignh/cli.hpp"

namespace {

int default_threads() {
    if (const char* env = std::getenv("IGNH_THREADS")) {
        int v = std::atoi(env);
        if (v >= 1) return v;
    }
    return 1;
}

std::vector<std::size_t> parse_dims(const std::string& text) {
    std::vector<std::size_t> dims;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t comma = text.find(',', pos);
        if (comma == std::string::npos) comma = text.size();
        dims.push_back(static_cast<std::size_t>(std::stoull(text.substr(pos, comma - pos))));
        pos = comma + 1;
    }
    return dims;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ignh: interpretable feature-graph networks for mixed-type tabular data"};
    app.require_subcommand(1);
    const int threads = default_threads();

    ignh::BuildGraphOptions bg;
    bg.threads = threads;
    auto* cmd_bg = app.add_subcommand("build-graph", "Build the significance-gated feature graph from a CSV");
    cmd_bg->add_option("--data", bg.data, "Input CSV")->required();
    cmd_bg->add_option("--schema", bg.schema, "Schema JSON")->required();
    cmd_bg->add_option("--out", bg.out, "Output graph file")->required();
    cmd_bg->add_option("--alpha", bg.alpha, "Significance level for edges (default 0.05)");
    cmd_bg->add_option("--threads", bg.threads, "Worker threads for pair computation");

    ignh::TrainOptions tr;
    tr.threads = threads;
    std::string tr_split = "0.6,0.2,0.2";
    std::string tr_layers;
    auto* cmd_tr = app.add_subcommand("train", "Split, encode, oversample, build the graph, and train a model");
    cmd_tr->add_option("--data", tr.data, "Input CSV")->required();
    cmd_tr->add_option("--schema", tr.schema, "Schema JSON")->required();
    cmd_tr->add_option("--out", tr.out, "Output model file")->required();
    cmd_tr->add_option("--graph", tr.graph, "Reuse a prebuilt graph file");
    cmd_tr->add_option("--config", tr.config, "JSON config file (model/train sections); flags win");
    cmd_tr->add_option("--history", tr.history, "Training history CSV path (default <out>.history.csv)");
    cmd_tr->add_option("--self-loop", tr.self_loop, "Explicit uniform self-loop weight");
    cmd_tr->add_option("--self-loop-frac", tr.self_loop_fraction,
                       "Self-loop share of aggregated messages (default 0.9)");
    cmd_tr->add_option("--alpha", tr.alpha, "Significance level when building the graph");
    cmd_tr->add_option("--split", tr_split, "Train,val,test fractions (default 0.6,0.2,0.2)");
    cmd_tr->add_option("--seed", tr.seed, "Seed for split/init/shuffle/oversample");
    cmd_tr->add_option("--threads", tr.threads, "Worker threads for graph building");
    cmd_tr->add_option("--lr", tr.learning_rate, "Learning rate (default 1e-3)");
    cmd_tr->add_option("--max-epochs", tr.max_epochs, "Epoch budget (default 200)");
    cmd_tr->add_option("--patience", tr.patience, "Early stopping patience (default 20)");
    cmd_tr->add_option("--batch-size", tr.batch_size, "Minibatch size (default 128)");
    cmd_tr->add_option("--embed-dim", tr.embed_dim, "Embedding width (default 16)");
    cmd_tr->add_option("--layers", tr_layers, "Comma list of layer widths (default 16x6)");
    cmd_tr->add_option("--activation", tr.activation, "relu|tanh");
    cmd_tr->add_option("--weight-sharing", tr.weight_sharing, "per_node|shared");

    ignh::PredictOptions pr;
    pr.threads = threads;
    auto* cmd_pr = app.add_subcommand("predict", "Write predictions CSV for a dataset");
    cmd_pr->add_option("--model", pr.model, "Model file")->required();
    cmd_pr->add_option("--data", pr.data, "Input CSV")->required();
    cmd_pr->add_option("--out", pr.out, "Output CSV")->required();
    cmd_pr->add_option("--threads", pr.threads, "Worker threads for batch inference");

    ignh::ExplainOptions ex;
    auto* cmd_ex = app.add_subcommand("explain", "Write per-instance attribution reports (JSON + top-k CSV)");
    cmd_ex->add_option("--model", ex.model, "Model file")->required();
    cmd_ex->add_option("--data", ex.data, "Input CSV")->required();
    cmd_ex->add_option("--out", ex.out, "Output JSON")->required();
    cmd_ex->add_option("--top-k", ex.top_k, "Features per instance in the top-k table (default 10)");
    cmd_ex->add_flag("--all-classes", ex.all_classes, "Emit per-class score vectors (multiclass)");

    ignh::EvalOptions ev;
    auto* cmd_ev = app.add_subcommand("eval", "Print evaluation JSON (AUC / weighted OVR AUC / MSE)");
    cmd_ev->add_option("--model", ev.model, "Model file")->required();
    cmd_ev->add_option("--data", ev.data, "Input CSV")->required();

    ignh::ShapVerifyOptions sv;
    sv.threads = threads;
    auto* cmd_sv = app.add_subcommand("shap-verify",
                                      "Compare KernelSHAP estimates against the model's own scores");
    cmd_sv->add_option("--model", sv.model, "Model file")->required();
    cmd_sv->add_option("--data", sv.data, "Input CSV (rows are sampled from it)")->required();
    cmd_sv->add_option("--out", sv.out, "Output trace CSV")->required();
    cmd_sv->add_option("--rows", sv.rows, "Rows to explain (default 500, clamped to data size)");
    cmd_sv->add_option("--budgets", sv.budgets, "Comma list of sample budgets; 'full' = complete enumeration");
    cmd_sv->add_option("--seed", sv.seed, "Seed for row sampling and coalition draws");
    cmd_sv->add_option("--threads", sv.threads, "Worker threads across explained rows");

    ignh::DumpAssocOptions da;
    auto* cmd_da = app.add_subcommand("dump-assoc", "Dump the full pairwise association matrix as CSV");
    cmd_da->add_option("--data", da.data, "Input CSV")->required();
    cmd_da->add_option("--schema", da.schema, "Schema JSON")->required();
    cmd_da->add_option("--out", da.out, "Output CSV")->required();
    cmd_da->add_option("--alpha", da.alpha, "Per-category gate inside mixed-type associations");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (cmd_tr->parsed()) {
            tr.split_fractions.clear();
            std::size_t pos = 0;
            for (int i = 0; i < 3; ++i) {
                std::size_t comma = tr_split.find(',', pos);
                std::string item = tr_split.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
                tr.split_fractions.push_back(std::stod(item));
                if (comma == std::string::npos) break;
                pos = comma + 1;
            }
            if (!tr_layers.empty()) tr.layer_dims = parse_dims(tr_layers);
            return ignh::cmd_train(tr);
        }
        if (cmd_bg->parsed()) return ignh::cmd_build_graph(bg);
        if (cmd_pr->parsed()) return ignh::cmd_predict(pr);
        if (cmd_ex->parsed()) return ignh::cmd_explain(ex);
        if (cmd_ev->parsed()) return ignh::cmd_eval(ev);
        if (cmd_sv->parsed()) return ignh::cmd_shap_verify(sv);
        if (cmd_da->parsed()) return ignh::cmd_dump_assoc(da);
    } catch (const ignh::UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
