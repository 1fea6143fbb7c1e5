// Command-line front end: generate | fit | eval | sweep | diagnose | perturb.
// Every run echoes its effective configuration to <out>/config.echo so that
// `--config config.echo` reproduces it byte-for-byte (timestamps excluded).

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tginee/tginee.hpp"

namespace fs = std::filesystem;
using namespace tginee;

namespace {

void ensure_out_dir(const std::string& out) {
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw std::runtime_error("cannot create output directory: " + out);
}

void echo_config(CLI::App* cmd, const std::string& out) {
    std::ofstream f(out + "/config.echo");
    if (!f) throw std::runtime_error("cannot open for writing: " + out + "/config.echo");
    f << cmd->config_to_str(true, false);
}

std::string trim_ws(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// CLI11 only reads config files attached to the top-level application, not to
// subcommands, so --config files are expanded into ordinary arguments before
// parsing. Options given explicitly on the command line win; empty values in
// the file mean "not set" and keep the built-in default. Unknown keys surface
// as unrecognized-argument errors, named.
std::vector<std::string> expand_config_args(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::string config_path;
    for (std::size_t k = 0; k < args.size(); ++k) {
        if (args[k] == "--config" && k + 1 < args.size())
            config_path = args[k + 1];
        else if (args[k].rfind("--config=", 0) == 0)
            config_path = args[k].substr(9);
    }
    if (config_path.empty()) return args;
    std::ifstream in(config_path);
    if (!in) return args;  // let the option's own existence check report it
    auto given = [&args](const std::string& name) {
        for (const std::string& a : args)
            if (a == name || a.rfind(name + "=", 0) == 0) return true;
        return false;
    };
    std::string line;
    while (std::getline(in, line)) {
        line = trim_ws(line);
        if (line.empty() || line[0] == '#' || line[0] == '[') continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = trim_ws(line.substr(0, eq));
        std::string val = trim_ws(line.substr(eq + 1));
        bool quoted = val.size() >= 2 && val.front() == '"' && val.back() == '"';
        if (quoted) val = val.substr(1, val.size() - 2);
        if (key.empty() || key == "config" || val.empty()) continue;
        if (given("--" + key)) continue;
        if (!quoted && val.find(' ') != std::string::npos) {
            // vector-valued option: one argument per element
            args.push_back("--" + key);
            std::istringstream parts(val);
            std::string tok;
            while (parts >> tok) args.push_back(tok);
        } else {
            args.push_back("--" + key + "=" + val);
        }
    }
    return args;
}

void write_kv(const std::string& path, const std::vector<std::pair<std::string, std::string>>& kv) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    for (const auto& [k, v] : kv) f << k << '=' << v << '\n';
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

struct FitFlags {
    FitConfig cfg;
    std::string link_name = "logit";
    double link_s = 1.0;
    std::string mode_name = "full_batch";

    void attach(CLI::App* cmd) {
        cmd->add_option("--R", cfg.R, "CP rank");
        cmd->add_option("--link", link_name, "identity|logit|probit|sparse_logit")
            ->check(CLI::IsMember({"identity", "logit", "probit", "sparse_logit"}));
        cmd->add_option("--s", link_s, "sparsity coefficient for sparse_logit");
        cmd->add_option("--lr", cfg.learning_rate, "learning rate");
        cmd->add_option("--weight-decay", cfg.weight_decay, "decoupled weight decay");
        cmd->add_option("--epochs", cfg.epochs, "training epochs");
        cmd->add_option("--batch-size", cfg.batch_size, "mini-batch size");
        cmd->add_option("--gee-lambda", cfg.gee_lambda, "GEE loss weight");
        cmd->add_option("--cov-refresh-every", cfg.cov_refresh_every,
                        "covariance refresh cadence (epochs)");
        cmd->add_option("--momentum-mu", cfg.momentum_mu, "covariance momentum");
        cmd->add_option("--warmup-epochs", cfg.warmup_epochs, "epochs before first W refresh");
        cmd->add_option("--neg-ratio", cfg.neg_ratio, "negatives per positive");
        cmd->add_option("--mode", mode_name, "full_batch|mini_batch")
            ->check(CLI::IsMember({"full_batch", "mini_batch"}));
        cmd->add_option("--init-scale", cfg.init_scale, "factor init std");
        cmd->add_option("--ridge-eps", cfg.ridge_eps, "covariance ridge (<0: auto)");
        cmd->add_flag("--gee-full-fiber", cfg.gee_full_fiber,
                      "mini-batch GEE over full layer fibers");
        cmd->add_option("--seed", cfg.seed, "root seed");
    }
    FitConfig resolve() const {
        FitConfig out = cfg;
        out.link = LinkFunction(link_kind_from_string(link_name), link_s);
        out.mode = fit_mode_from_string(mode_name);
        return out;
    }
};

void write_fit_outputs(const std::string& out, const FitReport& report,
                       const LinkFunction& link) {
    write_checkpoint_file(out + "/model.ckpt", {report.factors, report.w_final, link});
    {
        std::ofstream f(out + "/W.csv");
        write_w_csv(f, report.w_final);
    }
    {
        std::ofstream f(out + "/loss.csv");
        f << "epoch,bce,gee,total\n";
        f.precision(10);
        for (std::size_t e = 0; e < report.loss_trace.size(); ++e)
            f << e << ',' << report.loss_trace[e].bce << ',' << report.loss_trace[e].gee
              << ',' << report.loss_trace[e].total << '\n';
    }
    std::vector<std::pair<std::string, std::string>> kv;
    if (!report.loss_trace.empty()) {
        kv.emplace_back("final_bce", fmt(report.loss_trace.back().bce));
        kv.emplace_back("final_gee", fmt(report.loss_trace.back().gee));
        kv.emplace_back("final_total", fmt(report.loss_trace.back().total));
    }
    kv.emplace_back("pairs_N", std::to_string(report.diag.N));
    kv.emplace_back("param_dim_p", std::to_string(report.diag.p));
    kv.emplace_back("observed_edges", std::to_string(report.diag.e_obs));
    kv.emplace_back("ratio_pairs", fmt(report.diag.ratio_pairs));
    kv.emplace_back("ratio_edges", fmt(report.diag.ratio_edges));
    kv.emplace_back("suggested_R", std::to_string(report.diag.suggested_R));
    write_kv(out + "/metrics.kv", kv);
    // wall time only in the side log so numeric outputs stay deterministic
    std::ofstream log(out + "/run.log");
    log << "wall_time_seconds=" << report.wall_time_seconds << '\n';
}

std::uint64_t cell_hash(const std::string& s) { return hash_name(s); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"symmetric CP multilayer graph model: generation, fitting, evaluation"};
    app.require_subcommand(1);

    // ---- generate ----------------------------------------------------------
    auto* gen = app.add_subcommand("generate", "sample a synthetic multilayer graph");
    gen->set_config("--config");
    gen->allow_config_extras(false);
    SynthSpec spec;
    std::string gen_out = "out";
    std::string base_name = "uniform_random";
    std::vector<int> block_sizes;
    std::vector<double> layer_rho_flat;
    bool heterogeneous = false, write_truth = false;
    gen->add_option("--n", spec.n, "node count");
    gen->add_option("--M", spec.M, "layer count");
    gen->add_option("--rho", spec.rho, "shared-structure weight");
    gen->add_option("--base", base_name, "uniform_random|block")
        ->check(CLI::IsMember({"uniform_random", "block"}));
    gen->add_option("--block-sizes", block_sizes, "community sizes (block base)");
    gen->add_option("--within-prob", spec.within_prob, "within-community probability");
    gen->add_option("--between-prob", spec.between_prob, "between-community probability");
    gen->add_flag("--heterogeneous", heterogeneous, "per-layer-pair shared components");
    gen->add_option("--layer-rho", layer_rho_flat,
                    "row-major M*M layer-pair weights (heterogeneous mode)");
    gen->add_option("--seed", spec.seed, "root seed");
    gen->add_flag("--truth", write_truth, "write per-pair probability sidecar");
    gen->add_option("--out", gen_out, "output directory");
    gen->callback([&] {
        spec.base_kind = base_name == "block" ? BaseKind::block : BaseKind::uniform_random;
        spec.block_sizes = block_sizes;
        if (!layer_rho_flat.empty()) {
            if (static_cast<int>(layer_rho_flat.size()) != spec.M * spec.M)
                throw CLI::ValidationError("--layer-rho needs exactly M*M values");
            Matrix lr(spec.M, spec.M);
            for (int a = 0; a < spec.M; ++a)
                for (int b = 0; b < spec.M; ++b)
                    lr(a, b) = layer_rho_flat[static_cast<std::size_t>(a) * spec.M + b];
            spec.layer_rho = lr;
        }
        SynthResult res = heterogeneous ? generate_heterogeneous(spec) : generate(spec);
        ensure_out_dir(gen_out);
        write_edge_list_file(gen_out + "/graph.edges", res.graph);
        if (write_truth) write_truth_file(gen_out + "/truth.tsv", res.truth);
        echo_config(gen, gen_out);
        std::cout << "generate: wrote " << res.graph.total_edges() << " edges to " << gen_out
                  << "/graph.edges\n";
    });

    // ---- fit ---------------------------------------------------------------
    auto* fitc = app.add_subcommand("fit", "fit CP factors to an edge list");
    fitc->set_config("--config");
    fitc->allow_config_extras(false);
    FitFlags fit_flags;
    std::string fit_input, fit_out = "out";
    fitc->add_option("--input", fit_input, "edge-list file")->required();
    fit_flags.attach(fitc);
    fitc->add_option("--out", fit_out, "output directory");
    fitc->callback([&] {
        SparseMultiLayerGraph g = read_edge_list_file(fit_input);
        FitConfig cfg = fit_flags.resolve();
        FitReport report = fit(g, cfg);
        ensure_out_dir(fit_out);
        write_fit_outputs(fit_out, report, cfg.link);
        echo_config(fitc, fit_out);
        std::cout << "fit: checkpoint written to " << fit_out << "/model.ckpt\n";
    });

    // ---- eval --------------------------------------------------------------
    auto* evalc = app.add_subcommand("eval", "evaluate a checkpoint on held-out data");
    evalc->set_config("--config");
    evalc->allow_config_extras(false);
    std::string eval_input, eval_model, eval_out = "out", eval_task = "link";
    std::string zs_strategy = "mean_beta";
    SplitSpec split_spec;
    int zero_shot_layer = -1;
    FitFlags eval_fit_flags;  // used by the triangle task's internal refit
    std::size_t max_triangles = 200;
    evalc->add_option("--input", eval_input, "edge-list file")->required();
    evalc->add_option("--model", eval_model, "checkpoint file");
    evalc->add_option("--task", eval_task, "link|triangle")
        ->check(CLI::IsMember({"link", "triangle"}));
    evalc->add_option("--train-frac", split_spec.train_frac, "train fraction");
    evalc->add_option("--val-frac", split_spec.val_frac, "validation fraction");
    evalc->add_option("--test-frac", split_spec.test_frac, "test fraction");
    evalc->add_option("--split-seed", split_spec.seed, "split seed");
    evalc->add_option("--zero-shot-layer", zero_shot_layer,
                      "layer index scored without training edges");
    evalc->add_option("--strategy", zs_strategy, "mean_beta|nearest_beta|provided_beta")
        ->check(CLI::IsMember({"mean_beta", "nearest_beta", "provided_beta"}));
    evalc->add_option("--max-triangles", max_triangles, "triangle task sample cap");
    eval_fit_flags.attach(evalc);
    evalc->add_option("--out", eval_out, "output directory");
    evalc->callback([&] {
        SparseMultiLayerGraph g = read_edge_list_file(eval_input);
        std::vector<std::pair<std::string, std::string>> kv;

        if (eval_task == "triangle") {
            FitConfig cfg = eval_fit_flags.resolve();
            Rng rng = Rng(cfg.seed).substream("triangle");
            TriangleOptions topts;
            topts.max_triangles = max_triangles;
            double acc = triangle_prediction(
                g,
                [&](const SparseMultiLayerGraph& masked) -> GraphScorer {
                    FitReport rep = fit(masked, cfg);
                    FactorPair f = rep.factors;
                    LinkFunction link = cfg.link;
                    return [f = std::move(f), link](int i, int j, int m) {
                        return predict_score(f, link, i, j, m);
                    };
                },
                rng, topts);
            kv.emplace_back("triangle_accuracy", fmt(acc));
        } else if (zero_shot_layer >= 0) {
            if (eval_model.empty())
                throw CLI::ValidationError("--model required for zero-shot evaluation");
            Checkpoint ckpt = read_checkpoint_file(eval_model);
            ZeroShotContext ctx;
            ctx.strategy = zero_shot_strategy_from_string(zs_strategy);
            if (ctx.strategy == ZeroShotStrategy::nearest_beta) {
                Vector sim(ckpt.factors.M());
                for (int m = 0; m < ckpt.factors.M(); ++m)
                    sim(m) = layer_jaccard(g, zero_shot_layer, m);
                ctx.similarity_to_trained = sim;
            }
            // positives: observed edges on the held-out layer; negatives matched 1:1
            std::vector<double> scores;
            std::vector<int> labels;
            Rng neg_rng = Rng(split_spec.seed).substream("zero-shot-negatives");
            std::size_t n_pos = 0;
            for (const Triplet& t : g.triplets())
                if (t.m == zero_shot_layer) {
                    scores.push_back(
                        zero_shot_layer_score(ckpt.factors, ckpt.link, ctx, t.i, t.j));
                    labels.push_back(1);
                    ++n_pos;
                }
            while (labels.size() < 2 * n_pos) {
                int i = static_cast<int>(
                    neg_rng.uniform_index(static_cast<std::uint64_t>(g.node_count())));
                int j = static_cast<int>(
                    neg_rng.uniform_index(static_cast<std::uint64_t>(g.node_count())));
                if (i == j || g.has_edge(i, j, zero_shot_layer)) continue;
                scores.push_back(zero_shot_layer_score(ckpt.factors, ckpt.link, ctx, i, j));
                labels.push_back(0);
            }
            kv.emplace_back("zero_shot_auc", fmt(auc(scores, labels)));
        } else {
            if (eval_model.empty())
                throw CLI::ValidationError("--model required for link evaluation");
            Checkpoint ckpt = read_checkpoint_file(eval_model);
            SplitResult splits = split_triplets(g, split_spec);
            kv.emplace_back("auc_test", fmt(auc_on_split(ckpt.factors, ckpt.link, splits.test)));
            kv.emplace_back("auc_val", fmt(auc_on_split(ckpt.factors, ckpt.link, splits.val)));
        }

        ensure_out_dir(eval_out);
        write_kv(eval_out + "/metrics.kv", kv);
        {
            std::ofstream csv(eval_out + "/metrics.csv");
            for (std::size_t k = 0; k < kv.size(); ++k)
                csv << (k ? "," : "") << kv[k].first;
            csv << '\n';
            for (std::size_t k = 0; k < kv.size(); ++k)
                csv << (k ? "," : "") << kv[k].second;
            csv << '\n';
        }
        echo_config(evalc, eval_out);
        for (const auto& [k, v] : kv) std::cout << k << '=' << v << '\n';
    });

    // ---- sweep -------------------------------------------------------------
    auto* sweep = app.add_subcommand("sweep", "grid search over fit settings");
    sweep->set_config("--config");
    sweep->allow_config_extras(false);
    std::string sweep_input, sweep_out = "out";
    std::vector<int> grid_R{32};
    std::vector<double> grid_lr{0.01}, grid_lambda{0.1}, grid_perturb{0.0};
    int repeats = 1;
    FitFlags sweep_flags;
    SplitSpec sweep_split;
    sweep->add_option("--input", sweep_input, "edge-list file")->required();
    sweep->add_option("--grid-R", grid_R, "rank grid");
    sweep->add_option("--grid-lr", grid_lr, "learning-rate grid");
    sweep->add_option("--grid-lambda", grid_lambda, "GEE weight grid");
    sweep->add_option("--perturb", grid_perturb, "noise-ratio grid");
    sweep->add_option("--repeats", repeats, "seeds per cell");
    sweep->add_option("--train-frac", sweep_split.train_frac, "train fraction");
    sweep->add_option("--val-frac", sweep_split.val_frac, "validation fraction");
    sweep->add_option("--test-frac", sweep_split.test_frac, "test fraction");
    sweep_flags.attach(sweep);
    sweep->add_option("--out", sweep_out, "output directory");
    sweep->callback([&] {
        if (grid_R.empty() || grid_lr.empty() || grid_lambda.empty() || grid_perturb.empty())
            throw CLI::ValidationError("sweep grid must be non-empty on every axis");
        if (repeats < 1) throw CLI::ValidationError("--repeats must be >= 1");
        SparseMultiLayerGraph g = read_edge_list_file(sweep_input);
        ensure_out_dir(sweep_out);
        std::ofstream csv(sweep_out + "/sweep.csv");
        csv << "cell_hash,R,lr,gee_lambda,perturb,repeats,auc_mean,auc_std\n";
        csv.precision(10);
        for (int R : grid_R)
            for (double lr : grid_lr)
                for (double lambda : grid_lambda)
                    for (double noise : grid_perturb) {
                        std::ostringstream cell;
                        cell << "R=" << R << " lr=" << lr << " lambda=" << lambda
                             << " perturb=" << noise;
                        std::vector<double> aucs;
                        for (int rep = 0; rep < repeats; ++rep) {
                            FitConfig cfg = sweep_flags.resolve();
                            cfg.R = R;
                            cfg.learning_rate = lr;
                            cfg.gee_lambda = lambda;
                            cfg.seed = sweep_flags.cfg.seed +
                                       static_cast<std::uint64_t>(rep);
                            Rng pert_rng = Rng(cfg.seed).substream("perturb");
                            SparseMultiLayerGraph cell_graph =
                                noise > 0.0 ? perturb(g, noise, pert_rng).graph : g;
                            SplitSpec sp = sweep_split;
                            sp.seed = cfg.seed;
                            SplitResult splits = split_triplets(cell_graph, sp);
                            SparseMultiLayerGraph train(cell_graph.node_count(),
                                                        cell_graph.layer_count());
                            for (const Triplet& t : splits.train.positives)
                                train.add_edge(t.i, t.j, t.m);
                            FitReport rep_out = fit(train, cfg);
                            aucs.push_back(
                                auc_on_split(rep_out.factors, cfg.link, splits.test));
                        }
                        double mean = 0.0;
                        for (double a : aucs) mean += a;
                        mean /= static_cast<double>(aucs.size());
                        double var = 0.0;
                        for (double a : aucs) var += (a - mean) * (a - mean);
                        double sd = aucs.size() > 1
                                        ? std::sqrt(var / static_cast<double>(aucs.size() - 1))
                                        : 0.0;
                        csv << cell_hash(cell.str()) << ',' << R << ',' << lr << ','
                            << lambda << ',' << noise << ',' << repeats << ',' << mean
                            << ',' << sd << '\n';
                    }
        echo_config(sweep, sweep_out);
        std::cout << "sweep: results in " << sweep_out << "/sweep.csv\n";
    });

    // ---- diagnose ----------------------------------------------------------
    auto* diag = app.add_subcommand("diagnose", "stability diagnostics for data or checkpoint");
    diag->set_config("--config");
    diag->allow_config_extras(false);
    std::string diag_input, diag_out;
    int diag_R = 32;
    double diag_C = 8.0;
    bool do_kruskal = false, do_suggest = false;
    diag->add_option("--input", diag_input, "edge-list or checkpoint file")->required();
    diag->add_option("--R", diag_R, "rank used for parameter counting");
    diag->add_flag("--kruskal", do_kruskal, "uniqueness check (checkpoint input, R <= 12)");
    diag->add_flag("--suggest-rank", do_suggest, "print heuristic rank");
    diag->add_option("--C", diag_C, "rank heuristic constant");
    diag->add_option("--out", diag_out, "optional output directory");
    diag->callback([&] {
        std::vector<std::pair<std::string, std::string>> kv;
        std::ifstream probe(diag_input);
        if (!probe) throw std::runtime_error("cannot open for reading: " + diag_input);
        std::string first;
        std::getline(probe, first);
        probe.close();
        if (first.rfind("#tginee-model", 0) == 0) {
            Checkpoint ckpt = read_checkpoint_file(diag_input);
            kv.emplace_back("n", std::to_string(ckpt.factors.n()));
            kv.emplace_back("M", std::to_string(ckpt.factors.M()));
            kv.emplace_back("R", std::to_string(ckpt.factors.R()));
            if (do_kruskal) {
                KruskalResult kr = kruskal_check(ckpt.factors);
                kv.emplace_back("kruskal_k_alpha", std::to_string(kr.k_alpha));
                kv.emplace_back("kruskal_k_beta", std::to_string(kr.k_beta));
                kv.emplace_back("kruskal_satisfied", kr.satisfied ? "1" : "0");
            }
            if (do_suggest)
                kv.emplace_back("suggested_R", std::to_string(suggest_rank(
                                                   ckpt.factors.n(), ckpt.factors.M(), diag_C)));
        } else {
            SparseMultiLayerGraph g = read_edge_list_file(diag_input);
            Diagnostics d = diagnostics(g, diag_R, diag_C);
            kv.emplace_back("pairs_N", std::to_string(d.N));
            kv.emplace_back("param_dim_p", std::to_string(d.p));
            kv.emplace_back("observed_edges", std::to_string(d.e_obs));
            kv.emplace_back("ratio_pairs", fmt(d.ratio_pairs));
            kv.emplace_back("ratio_edges", fmt(d.ratio_edges));
            if (do_suggest) kv.emplace_back("suggested_R", std::to_string(d.suggested_R));
            if (do_kruskal)
                throw CLI::ValidationError("--kruskal requires a checkpoint input");
        }
        for (const auto& [k, v] : kv) std::cout << k << '=' << v << '\n';
        if (!diag_out.empty()) {
            ensure_out_dir(diag_out);
            write_kv(diag_out + "/metrics.kv", kv);
            echo_config(diag, diag_out);
        }
    });

    // ---- perturb -----------------------------------------------------------
    auto* pert = app.add_subcommand("perturb", "random edge deletion/addition noise");
    pert->set_config("--config");
    pert->allow_config_extras(false);
    std::string pert_input, pert_out = "out";
    double noise_ratio = 0.1;
    std::uint64_t pert_seed = 42;
    pert->add_option("--input", pert_input, "edge-list file")->required();
    pert->add_option("--noise-ratio", noise_ratio, "fraction of edges rewired");
    pert->add_option("--seed", pert_seed, "root seed");
    pert->add_option("--out", pert_out, "output directory");
    pert->callback([&] {
        SparseMultiLayerGraph g = read_edge_list_file(pert_input);
        Rng rng = Rng(pert_seed).substream("perturb");
        PerturbResult res = perturb(g, noise_ratio, rng);
        ensure_out_dir(pert_out);
        write_edge_list_file(pert_out + "/graph.edges", res.graph);
        std::vector<std::pair<std::string, std::string>> kv;
        for (std::size_t m = 0; m < res.shortfall.size(); ++m)
            kv.emplace_back("shortfall_layer_" + std::to_string(m),
                            std::to_string(res.shortfall[m]));
        write_kv(pert_out + "/metrics.kv", kv);
        echo_config(pert, pert_out);
        std::cout << "perturb: wrote " << res.graph.total_edges() << " edges to " << pert_out
                  << "/graph.edges\n";
    });

    try {
        std::vector<std::string> args = expand_config_args(argc, argv);
        std::reverse(args.begin(), args.end());  // CLI11 consumes from the back
        app.parse(std::move(args));
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return 2;
    } catch (const DivergedError& e) {
        std::cerr << "diverged: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
