// Command-line front end for the influence-maximization pipeline.
//
// Exit codes: 0 ok, 2 bad configuration, 3 I/O failure, 4 numeric failure,
// 5 property violation.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "infmax/eval.hpp"
#include "infmax/glie.hpp"
#include "infmax/graph.hpp"
#include "infmax/maximize.hpp"
#include "infmax/rng.hpp"
#include "infmax/simulate.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace infmax;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitNumeric = 4;
constexpr int kExitProperty = 5;

struct GlobalOpts {
    std::uint64_t seed = 42;
    unsigned threads = 0;  // 0 = available parallelism
    bool quiet = false;
    bool json = false;
};

struct ExitWith {
    int code;
    std::string message;
};

void info(const GlobalOpts& g, const std::string& msg) {
    if (!g.quiet) std::cerr << msg << "\n";
}

std::string read_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ExitWith{kExitIo, "cannot open " + path};
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path);
    if (!f) throw ExitWith{kExitIo, "cannot open " + path + " for writing"};
    f << content;
    if (!f) throw ExitWith{kExitIo, "write failed: " + path};
}

DirectedGraph load_graph(const std::string& path) {
    try {
        return load_edge_list_file(path, true);
    } catch (const ParseError& e) {
        throw ExitWith{kExitIo, std::string("graph parse: ") + e.what()};
    } catch (const std::runtime_error& e) {
        throw ExitWith{kExitIo, e.what()};
    }
}

GlieModel load_model_or_exit(const std::string& path) {
    try {
        return load_model(path);
    } catch (const ModelError& e) {
        throw ExitWith{kExitIo, std::string("model: ") + e.what()};
    } catch (const std::runtime_error& e) {
        throw ExitWith{kExitIo, e.what()};
    }
}

// Seeds file: one original node label per line; mapped to dense ids.
SeedSet load_seeds(const std::string& path, const DirectedGraph& g) {
    std::ifstream f(path);
    if (!f) throw ExitWith{kExitIo, "cannot open " + path};
    SeedSet s;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        std::size_t h = line.find('#');
        if (h != std::string::npos) line.resize(h);
        std::istringstream ls(line);
        std::uint64_t label;
        if (!(ls >> label)) continue;
        auto it = std::lower_bound(g.labels().begin(), g.labels().end(), label);
        if (it == g.labels().end() || *it != label)
            throw ExitWith{kExitConfig, "seeds line " + std::to_string(lineno) + ": label " +
                                            std::to_string(label) + " not in graph"};
        s.members.push_back(static_cast<NodeId>(it - g.labels().begin()));
    }
    if (s.empty()) throw ExitWith{kExitConfig, "seeds file " + path + " has no seeds"};
    try {
        s.validate(g.num_nodes());
    } catch (const ValidationError& e) {
        throw ExitWith{kExitConfig, e.what()};
    }
    return s;
}

std::vector<std::string> edge_files_in(const std::string& dir) {
    std::vector<std::string> paths;
    std::error_code ec;
    for (const auto& e : fs::directory_iterator(dir, ec))
        if (e.is_regular_file() && e.path().extension() == ".edges")
            paths.push_back(e.path().string());
    if (ec) throw ExitWith{kExitIo, "cannot read directory " + dir};
    std::sort(paths.begin(), paths.end());
    if (paths.empty()) throw ExitWith{kExitConfig, "no .edges files in " + dir};
    return paths;
}

// ---- subcommand bodies ----------------------------------------------------

struct GenerateArgs {
    std::string model = "ba";
    std::size_t n = 100;
    std::size_t m = 2;
    double triad_p = 0.25;
    std::size_t count = 1;
    std::string out;
};

int cmd_generate(const GlobalOpts& g, const GenerateArgs& a) {
    if (a.m == 0 || a.m >= a.n)
        throw ExitWith{kExitConfig, "generate: need 0 < m < n"};
    if (a.count == 0) throw ExitWith{kExitConfig, "generate: count must be >= 1"};
    std::error_code ec;
    fs::create_directories(a.out, ec);
    if (ec || !fs::is_directory(a.out))
        throw ExitWith{kExitConfig, "generate: cannot create output directory " + a.out};

    GeneratorConfig cfg;
    cfg.model = a.model == "hk" ? GeneratorConfig::Model::HolmeKim
                                : GeneratorConfig::Model::BarabasiAlbert;
    cfg.n = a.n;
    cfg.m = a.m;
    cfg.triad_p = a.triad_p;
    for (std::size_t i = 0; i < a.count; ++i) {
        cfg.rng_seed = mix_seed(g.seed, i);
        DirectedGraph graph = generate(cfg);
        fs::path base = fs::path(a.out) / ("g_" + std::to_string(i));
        save_edge_list_file(graph, base.string() + ".edges");
        write_file(base.string() + ".json", metadata_json(graph));
    }
    info(g, "generate: wrote " + std::to_string(a.count) + " graphs to " + a.out);
    return kExitOk;
}

struct LabelArgs {
    std::string graphs_dir;
    int max_seeds = 5;
    std::uint64_t sims = 1000;
    int negatives = 30;
    std::string out;
};

int cmd_label(const GlobalOpts& g, const LabelArgs& a) {
    if (a.max_seeds < 1) throw ExitWith{kExitConfig, "label: max-seeds must be >= 1"};
    if (a.negatives < 0) throw ExitWith{kExitConfig, "label: negatives must be >= 0"};
    if (a.sims < 1) throw ExitWith{kExitConfig, "label: sims must be >= 1"};
    std::vector<std::string> paths = edge_files_in(a.graphs_dir);
    std::vector<DirectedGraph> graphs;
    for (const std::string& p : paths) graphs.push_back(load_graph(p));

    Dataset data =
        build_dataset_from_graphs(std::move(graphs), a.max_seeds, a.sims, a.negatives, g.seed,
                                  g.threads);
    fs::path out_dir = fs::path(a.out).parent_path();
    data.graph_paths.clear();
    for (const std::string& p : paths) {
        std::error_code ec;
        fs::path rel = fs::relative(p, out_dir.empty() ? "." : out_dir, ec);
        data.graph_paths.push_back(ec || rel.empty() ? p : rel.string());
    }
    try {
        save_dataset(data, a.out);
    } catch (const std::runtime_error& e) {
        throw ExitWith{kExitIo, e.what()};
    }
    info(g, "label: wrote " + std::to_string(data.samples.size()) + " samples to " + a.out);
    return kExitOk;
}

struct TrainArgs {
    std::string dataset;
    std::string out;
    GlieConfig cfg;
};

int cmd_train(const GlobalOpts& g, const TrainArgs& a) {
    Dataset data;
    try {
        data = load_dataset(a.dataset);
    } catch (const std::runtime_error& e) {
        throw ExitWith{kExitIo, e.what()};
    }
    GlieConfig cfg = a.cfg;
    cfg.rng_seed = g.seed;
    try {
        cfg.validate();
    } catch (const ValidationError& e) {
        throw ExitWith{kExitConfig, e.what()};
    }
    TrainReport report;
    GlieModel model;
    try {
        model = train(cfg, data, &report,
                      [&](const EpochStats& e) {
                          if (!g.quiet)
                              std::cerr << "epoch " << e.epoch << " train_mse=" << e.train_mse
                                        << " val_mse=" << e.val_mse << "\n";
                      },
                      g.threads);
    } catch (const TrainingError& e) {
        throw ExitWith{kExitNumeric,
                       std::string(e.what()) + " (epoch " + std::to_string(e.epoch) + ")"};
    } catch (const ValidationError& e) {
        throw ExitWith{kExitConfig, e.what()};
    }
    try {
        save_model(model, a.out);
    } catch (const std::runtime_error& e) {
        throw ExitWith{kExitIo, e.what()};
    }
    std::cout << "best_epoch=" << report.best_epoch << "\n";
    return kExitOk;
}

struct TrainQnetArgs {
    std::string graphs_dir;
    std::string model_path;
    std::string out;
    GrimConfig cfg;
};

int cmd_train_qnet(const GlobalOpts& g, const TrainQnetArgs& a) {
    if (a.cfg.episodes < 1) throw ExitWith{kExitConfig, "train-qnet: episodes must be >= 1"};
    if (a.cfg.seeds_per_game < 1)
        throw ExitWith{kExitConfig, "train-qnet: seeds-per-game must be >= 1"};
    std::vector<DirectedGraph> graphs;
    for (const std::string& p : edge_files_in(a.graphs_dir)) graphs.push_back(load_graph(p));
    GlieModel model = load_model_or_exit(a.model_path);
    QNet net;
    try {
        net = grim_train(graphs, model, a.cfg, g.seed);
    } catch (const ValidationError& e) {
        throw ExitWith{kExitConfig, e.what()};
    }
    try {
        save_qnet(net, a.out);
    } catch (const std::runtime_error& e) {
        throw ExitWith{kExitIo, e.what()};
    }
    info(g, "train-qnet: wrote " + a.out);
    return kExitOk;
}

struct MaximizeArgs {
    std::string graph;
    std::string model_path;
    std::string qnet_path;
    std::string method = "celf-glie";
    std::size_t k = 10;
    std::uint64_t sims = 1000;  // celf-mc estimator
    std::string out;
    bool timing = false;
};

int cmd_maximize(const GlobalOpts& g, const MaximizeArgs& a) {
    if (a.k == 0) throw ExitWith{kExitConfig, "maximize: k must be >= 1"};
    const bool needs_model =
        a.method == "celf-glie" || a.method == "pun" || a.method == "grim";
    if (needs_model && a.model_path.empty())
        throw ExitWith{kExitConfig, "maximize: --method " + a.method + " needs --model"};
    if (a.method == "grim" && a.qnet_path.empty())
        throw ExitWith{kExitConfig, "maximize: --method grim needs --qnet"};

    DirectedGraph graph = load_graph(a.graph);
    GlieModel model;
    if (needs_model) model = load_model_or_exit(a.model_path);

    MaximizeResult res;
    try {
        if (a.method == "celf-mc") {
            auto est = [&](const SeedSet& s) {
                return simulate_ic(graph, s, a.sims, mix_seed(g.seed, seedset_hash(s)),
                                   g.threads)
                    .mean;
            };
            res = celf(graph, a.k, est, filter_candidates(graph), g.threads);
            res.method = "celf-mc";
        } else if (a.method == "celf-glie") {
            res = celf_glie(graph, a.k, model, {}, g.threads);
        } else if (a.method == "pun") {
            res = pun(graph, a.k, model);
        } else if (a.method == "grim") {
            QNet qnet;
            try {
                qnet = load_qnet(a.qnet_path);
            } catch (const std::runtime_error& e) {
                throw ExitWith{kExitIo, e.what()};
            }
            res = grim_select(graph, a.k, model, qnet);
        } else if (a.method == "degdisc") {
            res = degree_discount(graph, a.k);
        } else if (a.method == "kcore") {
            res = k_core(graph, a.k);
        } else {
            throw ExitWith{kExitConfig, "maximize: unknown method " + a.method};
        }
    } catch (const ValidationError& e) {
        throw ExitWith{kExitConfig, e.what()};
    }
    std::string out_json = res.to_json(graph, a.timing);
    if (!a.out.empty())
        write_file(a.out, out_json);
    else
        std::cout << out_json;
    return kExitOk;
}

struct EvaluateArgs {
    std::string graph;
    std::string seeds;
    std::uint64_t sims = 10000;
};

int cmd_evaluate(const GlobalOpts& g, const EvaluateArgs& a) {
    DirectedGraph graph = load_graph(a.graph);
    SeedSet s = load_seeds(a.seeds, graph);
    SpreadEstimate est;
    try {
        est = simulate_ic(graph, s, a.sims, g.seed, g.threads);
    } catch (const ValidationError& e) {
        throw ExitWith{kExitConfig, e.what()};
    }
    nlohmann::ordered_json j;
    j["mean"] = est.mean;
    j["std_err"] = est.std_err;
    j["n_sims"] = est.n_sims;
    std::cout << j.dump() << "\n";
    return kExitOk;
}

struct EstimateArgs {
    std::string graph;
    std::string seeds;
    std::string model_path;
};

int cmd_estimate(const GlobalOpts& g, const EstimateArgs& a) {
    DirectedGraph graph = load_graph(a.graph);
    SeedSet s = load_seeds(a.seeds, graph);
    GlieModel model = load_model_or_exit(a.model_path);
    double sigma = predict_spread(model, graph, s);
    if (!std::isfinite(sigma)) throw ExitWith{kExitNumeric, "estimate: non-finite prediction"};
    nlohmann::ordered_json j;
    j["sigma_hat"] = sigma;
    if (sigma > static_cast<double>(graph.num_nodes())) {
        j["note"] = "estimate exceeds node count";
        info(g, "estimate: prediction exceeds node count (" + std::to_string(sigma) + " > " +
                    std::to_string(graph.num_nodes()) + ")");
    }
    std::cout << j.dump() << "\n";
    return kExitOk;
}

struct CheckArgs {
    std::string graph;
    std::string model_path;
    std::string property = "mono";  // mono | submod (both series always computed)
    std::size_t k = 10;
    std::string out_dir = ".";
};

int cmd_check(const GlobalOpts& g, const CheckArgs& a) {
    if (a.property != "mono" && a.property != "submod")
        throw ExitWith{kExitConfig, "check: property must be mono or submod"};
    DirectedGraph graph = load_graph(a.graph);
    GlieModel model = load_model_or_exit(a.model_path);
    if (a.k < 3 || a.k > graph.num_nodes())
        throw ExitWith{kExitConfig, "check: k must be in [3, n]"};

    MaximizeResult sel = celf_glie(graph, a.k, model, {}, g.threads);
    Rng rng(mix_seed(g.seed, 0xC3ECULL));
    std::vector<NodeId> pool(graph.num_nodes());
    std::iota(pool.begin(), pool.end(), NodeId{0});
    std::shuffle(pool.begin(), pool.end(), rng);
    SeedSet random_seq;
    for (NodeId u : pool) {
        if (random_seq.size() == sel.seeds.size()) break;
        random_seq.members.push_back(u);
    }

    Estimator est = [&](const SeedSet& s) { return predict_spread(model, graph, s); };
    PropertySeries series = check_monotone_submodular(est, sel.seeds, random_seq);

    std::error_code ec;
    fs::create_directories(a.out_dir, ec);
    auto dump = [&](const char* name, const std::vector<double>& v) {
        std::ostringstream os;
        for (double x : v) os << x << "\n";
        write_file((fs::path(a.out_dir) / (std::string(name) + ".txt")).string(), os.str());
    };
    dump("m_ss", series.m_ss);
    dump("m_sr", series.m_sr);
    dump("s_ss", series.s_ss);
    dump("s_sr", series.s_sr);

    constexpr double kEps = 1e-6;
    double mn = series.min_value();
    if (mn < -kEps) {
        std::cerr << "check: series minimum " << mn << " below -" << kEps << "\n";
        return kExitProperty;
    }
    info(g, "check: all series >= -1e-6 (min " + std::to_string(mn) + ")");
    return kExitOk;
}

struct RelerrArgs {
    std::string graph;
    std::string model_path;
    std::size_t k = 20;
    std::uint64_t sims = 10000;
};

int cmd_relerr(const GlobalOpts& g, const RelerrArgs& a) {
    DirectedGraph graph = load_graph(a.graph);
    GlieModel model = load_model_or_exit(a.model_path);
    Estimator est = [&](const SeedSet& s) { return predict_spread(model, graph, s); };
    double err;
    try {
        err = seedset_relative_error(graph, est, a.k, a.sims, g.seed, g.threads);
    } catch (const ValidationError& e) {
        throw ExitWith{kExitConfig, e.what()};
    }
    nlohmann::ordered_json j;
    j["rel_err"] = err;
    j["k"] = a.k;
    std::cout << j.dump() << "\n";
    return kExitOk;
}

struct ReportArgs {
    std::string config;
    std::string out_csv;
};

int cmd_report(const GlobalOpts& g, const ReportArgs& a) {
    ExperimentConfig cfg;
    try {
        cfg = experiment_config_from_json(read_file(a.config));
    } catch (const ParseError& e) {
        throw ExitWith{kExitConfig, e.what()};
    }
    cfg.rng_seed = g.seed;
    ExperimentReport rep;
    try {
        rep = run_experiment(cfg, g.threads);
    } catch (const ValidationError& e) {
        throw ExitWith{kExitConfig, e.what()};
    } catch (const ModelError& e) {
        throw ExitWith{kExitIo, e.what()};
    } catch (const ParseError& e) {
        throw ExitWith{kExitIo, e.what()};
    } catch (const std::runtime_error& e) {
        throw ExitWith{kExitIo, e.what()};
    }
    if (!a.out_csv.empty()) write_file(a.out_csv, rep.to_csv());
    if (g.json)
        std::cout << rep.to_json();
    else
        std::cout << rep.to_csv();
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"influence spread estimation and seed-set maximization"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--seed", g.seed, "global rng seed")->capture_default_str();
    app.add_option("--threads", g.threads, "worker threads (0 = all cores)");
    app.add_flag("--quiet", g.quiet, "suppress diagnostics");
    app.add_flag("--json", g.json, "machine-readable stdout");

    GenerateArgs gen;
    auto* c_gen = app.add_subcommand("generate", "write synthetic preferential-attachment graphs");
    c_gen->fallthrough();
    c_gen->add_option("--model", gen.model, "ba or hk")
        ->check(CLI::IsMember({"ba", "hk"}))
        ->capture_default_str();
    c_gen->add_option("--n", gen.n, "nodes per graph")->capture_default_str();
    c_gen->add_option("--m", gen.m, "edges per new node")->capture_default_str();
    c_gen->add_option("--triad-p", gen.triad_p, "triad closure probability (hk)")
        ->capture_default_str();
    c_gen->add_option("--count", gen.count, "number of graphs")->capture_default_str();
    c_gen->add_option("--out", gen.out, "output directory")->required();

    LabelArgs lab;
    auto* c_lab = app.add_subcommand("label", "build an MC-labeled training dataset");
    c_lab->fallthrough();
    c_lab->add_option("--graphs", lab.graphs_dir, "directory of .edges files")->required();
    c_lab->add_option("--max-seeds", lab.max_seeds, "seed-set sizes 1..max")
        ->capture_default_str();
    c_lab->add_option("--sims", lab.sims, "MC simulations per label")->capture_default_str();
    c_lab->add_option("--negatives", lab.negatives, "random sets per size")
        ->capture_default_str();
    c_lab->add_option("--out", lab.out, "dataset JSONL path")->required();

    TrainArgs tr;
    auto* c_tr = app.add_subcommand("train", "train the spread estimator");
    c_tr->fallthrough();
    c_tr->add_option("--dataset", tr.dataset, "dataset JSONL path")->required();
    c_tr->add_option("--out", tr.out, "model JSON path")->required();
    c_tr->add_option("--feat-dim", tr.cfg.feat_dim, "input feature dimension")
        ->capture_default_str();
    c_tr->add_option("--layers", tr.cfg.layer_widths, "hidden layer widths")
        ->capture_default_str();
    c_tr->add_option("--dropout", tr.cfg.dropout, "dropout rate")->capture_default_str();
    c_tr->add_option("--lr", tr.cfg.lr, "learning rate")->capture_default_str();
    c_tr->add_option("--epochs", tr.cfg.epochs, "max epochs")->capture_default_str();
    c_tr->add_option("--patience", tr.cfg.patience, "early-stop patience")
        ->capture_default_str();
    c_tr->add_option("--batch-size", tr.cfg.batch_size, "minibatch size")
        ->capture_default_str();

    TrainQnetArgs tq;
    auto* c_tq = app.add_subcommand("train-qnet", "train the seed-selection q-network");
    c_tq->fallthrough();
    c_tq->add_option("--graphs", tq.graphs_dir, "directory of .edges training graphs")
        ->required();
    c_tq->add_option("--model", tq.model_path, "trained estimator model")->required();
    c_tq->add_option("--out", tq.out, "q-net JSON path")->required();
    c_tq->add_option("--episodes", tq.cfg.episodes, "training episodes")
        ->capture_default_str();
    c_tq->add_option("--seeds-per-game", tq.cfg.seeds_per_game, "seeds selected per game")
        ->capture_default_str();
    c_tq->add_option("--epsilon", tq.cfg.qnet.epsilon, "initial exploration rate")
        ->capture_default_str();
    c_tq->add_option("--lr", tq.cfg.qnet.lr, "q-net learning rate")->capture_default_str();

    MaximizeArgs mx;
    auto* c_mx = app.add_subcommand("maximize", "select a seed set");
    c_mx->fallthrough();
    c_mx->add_option("--graph", mx.graph, "edge-list file")->required();
    c_mx->add_option("--model", mx.model_path, "trained estimator model");
    c_mx->add_option("--qnet", mx.qnet_path, "trained q-net (grim)");
    c_mx->add_option("--method", mx.method, "celf-mc|celf-glie|pun|grim|degdisc|kcore")
        ->check(CLI::IsMember({"celf-mc", "celf-glie", "pun", "grim", "degdisc", "kcore"}))
        ->capture_default_str();
    c_mx->add_option("--k", mx.k, "seed budget")->capture_default_str();
    c_mx->add_option("--sims", mx.sims, "estimator simulations (celf-mc)")
        ->capture_default_str();
    c_mx->add_option("--out", mx.out, "output JSON path (default stdout)");
    c_mx->add_flag("--timing", mx.timing, "include wall-clock timings in output");

    EvaluateArgs ev;
    auto* c_ev = app.add_subcommand("evaluate", "MC-evaluate a seed set");
    c_ev->fallthrough();
    c_ev->add_option("--graph", ev.graph, "edge-list file")->required();
    c_ev->add_option("--seeds", ev.seeds, "seeds file, one label per line")->required();
    c_ev->add_option("--sims", ev.sims, "MC simulations")->capture_default_str();

    EstimateArgs es;
    auto* c_es = app.add_subcommand("estimate", "model-estimate a seed set's spread");
    c_es->fallthrough();
    c_es->add_option("--graph", es.graph, "edge-list file")->required();
    c_es->add_option("--seeds", es.seeds, "seeds file, one label per line")->required();
    c_es->add_option("--model", es.model_path, "trained estimator model")->required();

    CheckArgs ck;
    auto* c_ck = app.add_subcommand("check", "empirical monotonicity/submodularity check");
    c_ck->fallthrough();
    c_ck->add_option("--graph", ck.graph, "edge-list file")->required();
    c_ck->add_option("--model", ck.model_path, "trained estimator model")->required();
    c_ck->add_option("--property", ck.property, "mono or submod")
        ->check(CLI::IsMember({"mono", "submod"}))
        ->capture_default_str();
    c_ck->add_option("--k", ck.k, "trajectory length")->capture_default_str();
    c_ck->add_option("--out", ck.out_dir, "series output directory")->capture_default_str();

    RelerrArgs re;
    auto* c_re = app.add_subcommand("relerr", "prediction error over sampled seed sets");
    c_re->fallthrough();
    c_re->add_option("--graph", re.graph, "edge-list file")->required();
    c_re->add_option("--model", re.model_path, "trained estimator model")->required();
    c_re->add_option("--k", re.k, "seed-set size")->capture_default_str();
    c_re->add_option("--sims", re.sims, "ground-truth MC simulations")->capture_default_str();

    ReportArgs rp;
    auto* c_rp = app.add_subcommand("report", "run an experiment config");
    c_rp->fallthrough();
    c_rp->add_option("--config", rp.config, "experiment config JSON")->required();
    c_rp->add_option("--out", rp.out_csv, "also write CSV here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (c_gen->parsed()) return cmd_generate(g, gen);
        if (c_lab->parsed()) return cmd_label(g, lab);
        if (c_tr->parsed()) return cmd_train(g, tr);
        if (c_tq->parsed()) return cmd_train_qnet(g, tq);
        if (c_mx->parsed()) return cmd_maximize(g, mx);
        if (c_ev->parsed()) return cmd_evaluate(g, ev);
        if (c_es->parsed()) return cmd_estimate(g, es);
        if (c_ck->parsed()) return cmd_check(g, ck);
        if (c_re->parsed()) return cmd_relerr(g, re);
        if (c_rp->parsed()) return cmd_report(g, rp);
    } catch (const ExitWith& e) {
        std::cerr << "error: " << e.message << "\n";
        return e.code;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitConfig;
}
