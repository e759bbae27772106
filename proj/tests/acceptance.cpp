// End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails. The CLI binary path arrives as the
// first program argument (used by the determinism criterion).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "infmax/eval.hpp"
#include "infmax/glie.hpp"
#include "infmax/graph.hpp"
#include "infmax/maximize.hpp"
#include "infmax/rng.hpp"
#include "infmax/simulate.hpp"

using namespace infmax;
namespace fs = std::filesystem;
using clk = std::chrono::steady_clock;

namespace {

bool g_all_ok = true;

void report(int idx, const std::string& name, bool ok, const std::string& detail) {
    std::printf("[%2d] %-34s %s (%s)\n", idx, name.c_str(), ok ? "PASS" : "FAIL",
                detail.c_str());
    std::fflush(stdout);
    g_all_ok = g_all_ok && ok;
}

double secs(clk::time_point a, clk::time_point b) {
    return std::chrono::duration<double>(b - a).count();
}

std::string fmt(const char* f, ...) {
    char buf[256];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof(buf), f, ap);
    va_end(ap);
    return buf;
}

DirectedGraph random_graph(Rng& rng, std::size_t max_nodes, std::size_t max_edges) {
    std::uniform_int_distribution<std::size_t> nd(3, max_nodes);
    std::size_t n = nd(rng);
    std::uniform_int_distribution<std::size_t> md(2, max_edges);
    std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(n - 1));
    std::uniform_real_distribution<double> pd(0.05, 0.95);
    std::size_t target = md(rng);
    std::vector<Edge> edges;
    for (int tries = 0; tries < 400 && edges.size() < target; ++tries) {
        NodeId a = pick(rng), b = pick(rng);
        if (a == b) continue;
        bool dup = false;
        for (const Edge& e : edges) dup |= (e.src == a && e.dst == b);
        if (!dup) edges.push_back({a, b, pd(rng)});
    }
    return DirectedGraph::from_edges(n, std::move(edges));
}

SeedSet random_seeds(Rng& rng, std::size_t n, std::size_t max_k) {
    std::uniform_int_distribution<std::size_t> kd(1, std::min(max_k, n));
    std::size_t k = kd(rng);
    std::vector<NodeId> pool(n);
    std::iota(pool.begin(), pool.end(), NodeId{0});
    std::shuffle(pool.begin(), pool.end(), rng);
    pool.resize(k);
    return SeedSet(pool);
}

SeedSet naive_greedy(const DirectedGraph& g, std::size_t k, const Estimator& est) {
    SeedSet s;
    double sigma = 0.0;
    for (std::size_t step = 0; step < k; ++step) {
        NodeId best = 0;
        double best_gain = -1.0;
        bool found = false;
        for (NodeId u = 0; u < g.num_nodes(); ++u) {
            if (s.contains(u)) continue;
            double gain = est(s.with(u)) - sigma;
            if (!found || gain > best_gain) {
                best = u;
                best_gain = gain;
                found = true;
            }
        }
        if (!found) break;
        s.members.push_back(best);
        sigma += best_gain;
    }
    return s;
}

DirectedGraph ba(std::size_t n, std::size_t m, std::uint64_t seed) {
    GeneratorConfig gc;
    gc.n = n;
    gc.m = m;
    gc.rng_seed = seed;
    return generate(gc);
}

// Clustered fixtures for the method-ordering and gain-series checks: high
// triad closure matches the community structure of the small real network
// these stand in for, where degree-based seeding overlaps and greedy
// selection has room to win.
DirectedGraph hk(std::size_t n, std::size_t m, std::uint64_t seed) {
    GeneratorConfig gc;
    gc.model = GeneratorConfig::Model::HolmeKim;
    gc.n = n;
    gc.m = m;
    gc.triad_p = 0.8;
    gc.rng_seed = seed;
    return generate(gc);
}

// ---- criterion 1: MC vs exact enumeration ----------------------------------
void criterion_1() {
    auto t0 = clk::now();
    Rng rng(101);
    int ok = 0, total = 50;
    for (int t = 0; t < total; ++t) {
        DirectedGraph g = random_graph(rng, 7, 10);
        SeedSet s = random_seeds(rng, g.num_nodes(), 3);
        double exact = exact_spread(g, s).mean;
        SpreadEstimate mc = simulate_ic(g, s, 50000, 7000 + t, 1);
        if (std::abs(mc.mean - exact) <= std::max(4.0 * mc.std_err, 1e-9)) ++ok;
    }
    double el = secs(t0, clk::now());
    report(1, "monte carlo vs exact", ok >= 48 && el < 60.0,
           fmt("%d/%d within 4 SE, %.1fs", ok, total, el));
}

// ---- criterion 2: hop-limited upper bound on DAGs --------------------------
void criterion_2() {
    Rng rng(202);
    std::uniform_real_distribution<double> pd(0.05, 0.95);
    std::uniform_int_distribution<int> coin(0, 9);
    int violations = 0;
    for (int t = 0; t < 100; ++t) {
        // 5 layers of 2 nodes; edges only point down-layer, so depth <= 4
        std::vector<Edge> es;
        for (int l = 0; l < 4; ++l)
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) {
                    NodeId u = static_cast<NodeId>(2 * l + a);
                    if (coin(rng) < 6) es.push_back({u, static_cast<NodeId>(2 * (l + 1) + b), pd(rng)});
                    if (l < 3 && coin(rng) < 2 && es.size() < 24)
                        es.push_back({u, static_cast<NodeId>(2 * (l + 2) + b), pd(rng)});
                }
        if (es.size() > 24) es.resize(24);
        DirectedGraph g = DirectedGraph::from_edges(10, std::move(es));
        SeedSet s = random_seeds(rng, g.num_nodes(), 3);
        if (upper_bound_spread(g, s, 4) < exact_spread(g, s).mean - 1e-9) ++violations;
    }
    report(2, "hop-limited upper bound", violations == 0,
           fmt("%d violations over 100 DAGs", violations));
}

// ---- criterion 4: gradient check -------------------------------------------
void criterion_4() {
    GlieConfig cfg;
    cfg.feat_dim = 4;
    cfg.layer_widths = {3, 2};
    cfg.dropout = 0.0;
    DirectedGraph g = assign_weighted_cascade(DirectedGraph::from_edges(
        5, {{0, 1, 0}, {1, 2, 0}, {2, 3, 0}, {3, 4, 0}, {4, 0, 0}, {0, 2, 0}, {1, 3, 0}}));
    GlieModel model = init_model(cfg, 17);
    SeedSet s{0, 3};
    const double label = 3.0, h = 1e-4;

    GlieGradients grads;
    loss_and_gradients(model, g, s, label, grads, true, 0);
    auto fd_loss = [&](GlieModel& m) {
        GlieGradients scratch;
        return loss_and_gradients(m, g, s, label, scratch, true, 0);
    };
    double worst = 0.0;
    auto check_entry = [&](double* p, double analytic) {
        double orig = *p;
        *p = orig + h;
        double up = fd_loss(model);
        *p = orig - h;
        double down = fd_loss(model);
        *p = orig;
        double fd = (up - down) / (2.0 * h);
        double denom = std::max({std::abs(fd), std::abs(analytic), 1e-6});
        worst = std::max(worst, std::abs(fd - analytic) / denom);
    };
    for (std::size_t t = 0; t < model.layers.size(); ++t) {
        auto& l = model.layers[t];
        for (Eigen::Index i = 0; i < l.W.size(); ++i) check_entry(l.W.data() + i, grads.dW[t](i));
        for (Eigen::Index i = 0; i < l.bn.gamma.size(); ++i)
            check_entry(l.bn.gamma.data() + i, grads.dgamma[t][i]);
        for (Eigen::Index i = 0; i < l.bn.beta.size(); ++i)
            check_entry(l.bn.beta.data() + i, grads.dbeta[t][i]);
    }
    for (Eigen::Index i = 0; i < model.W_o.size(); ++i)
        check_entry(model.W_o.data() + i, grads.dW_o[i]);
    report(4, "analytic vs numeric gradients", worst <= 1e-3,
           fmt("max relative error %.2e", worst));
}

// ---- criterion 5: lazy greedy equals naive greedy --------------------------
void criterion_5() {
    Rng rng(505);
    int match = 0, total = 30;
    for (int t = 0; t < total; ++t) {
        DirectedGraph g = random_graph(rng, 12, 16);
        auto est = [&](const SeedSet& s) { return s.empty() ? 0.0 : exact_spread(g, s).mean; };
        std::vector<NodeId> all(g.num_nodes());
        std::iota(all.begin(), all.end(), NodeId{0});
        std::size_t k = std::min<std::size_t>(4, g.num_nodes());
        if (celf(g, k, est, all, 1).seeds.members == naive_greedy(g, k, est).members) ++match;
    }
    report(5, "lazy greedy == exhaustive greedy", match == total,
           fmt("%d/%d seed sequences identical", match, total));
}

// ---- criterion 9: forward-count contract -----------------------------------
void criterion_9(const GlieModel& model) {
    DirectedGraph g = ba(200, 2, 909);
    QNet net = init_qnet({}, 3);
    CandidatePolicy policy;
    std::uint64_t forwards = 0;
    grim_select(g, 10, model, net, policy, &forwards);
    std::uint64_t expected = filter_candidates(g, policy).size() + 9;
    report(9, "q-selection forward budget", forwards == expected,
           fmt("counted %llu, expected %llu", static_cast<unsigned long long>(forwards),
               static_cast<unsigned long long>(expected)));
}

// ---- criterion 11: CLI determinism -----------------------------------------
int shell(const std::string& cmd) { return std::system(cmd.c_str()); }

std::string slurp(const fs::path& p) {
    std::ifstream f(p);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void criterion_11(const std::string& bin, const fs::path& tmp, const fs::path& model_path) {
    fs::path d = tmp / "cli";
    fs::create_directories(d);
    auto q = [&](const std::string& args) {
        return shell(bin + " " + args + " >/dev/null 2>&1");
    };
    bool ok = true;
    std::string detail = "generate/maximize/report reruns byte-identical";

    ok &= q("generate --out " + (d / "ga").string() + " --count 2 --n 60 --m 2 --seed 11") == 0;
    ok &= q("generate --out " + (d / "gb").string() + " --count 2 --n 60 --m 2 --seed 11") == 0;
    for (int i = 0; i < 2 && ok; ++i) {
        std::string name = "g_" + std::to_string(i) + ".edges";
        ok &= slurp(d / "ga" / name) == slurp(d / "gb" / name);
    }
    std::string graph = (d / "ga" / "g_0.edges").string();
    for (std::string method : {std::string("kcore"), std::string("celf-glie"), std::string("pun")}) {
        std::string extra = method == "kcore" ? "" : " --model " + model_path.string();
        for (int r = 0; r < 2 && ok; ++r)
            ok &= q("maximize --graph " + graph + " --method " + method + " --k 5 --seed 7" +
                    extra + " --out " + (d / ("m" + std::to_string(r) + ".json")).string()) == 0;
        ok &= slurp(d / "m0.json") == slurp(d / "m1.json");
        if (!ok) detail = "mismatch in maximize --method " + method;
    }
    if (ok) {
        std::ofstream cfg(d / "cfg.json");
        cfg << "{\"graphs\": [\"" << graph << "\"], \"methods\": [\"kcore\", \"degdisc\"], "
            << "\"budgets\": [5], \"eval_sims\": 2000, \"seed\": 3}";
        cfg.close();
        for (int r = 0; r < 2 && ok; ++r)
            ok &= q("report --config " + (d / "cfg.json").string() + " --out " +
                    (d / ("r" + std::to_string(r) + ".csv")).string()) == 0;
        ok &= slurp(d / "r0.csv") == slurp(d / "r1.csv");
        if (!ok) detail = "mismatch in report csv";
    }
    report(11, "cli rerun determinism", ok, detail);
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: acceptance <path-to-cli-binary>\n");
        return 1;
    }
    const std::string bin = argv[1];
    fs::path tmp = fs::temp_directory_path() / ("infmax_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(tmp);

    criterion_1();
    criterion_2();

    // ---- criterion 3: estimator accuracy on the labeled protocol dataset ----
    auto t0 = clk::now();
    std::vector<DirectedGraph> graphs;
    for (std::size_t i = 0; i < 40; ++i) {
        std::size_t n = i < 32 ? 100 + (i * 100) / 31 : 300 + ((i - 32) * 200) / 7;
        graphs.push_back(ba(n, 2, 3000 + i));
    }
    Dataset ds = build_dataset_from_graphs(graphs, 5, 1000, 30, 42, 1);
    GlieConfig cfg;  // feature dim 50, layers 32/16, dropout 0.4, lr 0.01
    cfg.epochs = 100;
    cfg.patience = 50;
    cfg.rng_seed = 42;
    TrainReport tr;
    GlieModel model = train(cfg, ds, &tr, nullptr, 1);
    double train_time = secs(t0, clk::now());

    std::vector<double> preds, labels;
    for (std::size_t i : ds.sample_indices(Split::Test)) {
        const TrainingSample& s = ds.samples[i];
        preds.push_back(predict_spread(model, ds.graphs[s.graph_id], s.seeds));
        labels.push_back(s.label);
    }
    double mae = mae_relative(preds, labels);
    report(3, "estimator held-out accuracy", mae <= 0.10 && train_time < 1800.0,
           fmt("MAE/mean %.4f over %zu test sets, %.0fs train+label", mae, preds.size(),
               train_time));
    save_model(model, (tmp / "model.json").string());

    criterion_4();
    criterion_5();

    // ---- criterion 6: proxy objective monotone + submodular -----------------
    {
        Rng rng(606);
        int violations = 0, checked = 0;
        for (int gi = 0; gi < 5; ++gi) {
            const DirectedGraph& g = ds.graphs[gi * 7];
            auto f = [&](const SeedSet& s) {
                return static_cast<double>(extract_influence_sets(model, g, s).sigma_m());
            };
            for (int t = 0; t < 200; ++t) {
                SeedSet si = random_seeds(rng, g.num_nodes(), 3);
                SeedSet sj = si;
                for (int extra = std::uniform_int_distribution<int>(1, 3)(rng); extra > 0;) {
                    NodeId u = std::uniform_int_distribution<NodeId>(
                        0, static_cast<NodeId>(g.num_nodes() - 1))(rng);
                    if (!sj.contains(u)) {
                        sj.members.push_back(u);
                        --extra;
                    }
                }
                NodeId u;
                do {
                    u = std::uniform_int_distribution<NodeId>(
                        0, static_cast<NodeId>(g.num_nodes() - 1))(rng);
                } while (sj.contains(u));
                double fi = f(si), fiu = f(si.with(u));
                double fj = f(sj), fju = f(sj.with(u));
                ++checked;
                if (fiu < fi || fju < fj) ++violations;               // monotone
                else if ((fiu - fi) < (fju - fj)) ++violations;       // submodular
            }
        }
        report(6, "proxy objective properties", violations == 0,
               fmt("%d violations over %d triples", violations, checked));
    }

    // ---- criterion 7: marginal-gain series along a 20-seed trajectory -------
    {
        DirectedGraph cr = hk(800, 4, 40);
        auto est = [&](const SeedSet& s) { return predict_spread(model, cr, s); };
        SeedSet traj = celf_glie(cr, 20, model).seeds;
        Rng rng(964);
        std::vector<NodeId> pool(cr.num_nodes());
        std::iota(pool.begin(), pool.end(), NodeId{0});
        std::shuffle(pool.begin(), pool.end(), rng);
        pool.resize(20);
        PropertySeries ps = check_monotone_submodular(est, traj, SeedSet(pool));
        double mean_ss = std::accumulate(ps.m_ss.begin(), ps.m_ss.end(), 0.0) / ps.m_ss.size();
        double mean_sr = std::accumulate(ps.m_sr.begin(), ps.m_sr.end(), 0.0) / ps.m_sr.size();
        bool ok = ps.min_value() >= -1e-6 && mean_ss >= mean_sr;
        report(7, "trajectory gain series", ok,
               fmt("min %.3g, mean gains %.3f (greedy) vs %.3f (random)", ps.min_value(),
                   mean_ss, mean_sr));
    }

    // ---- criterion 8: method ordering at fixture scale ----------------------
    {
        bool ok = true;
        std::string detail;
        std::vector<DirectedGraph> evals = {hk(800, 4, 14), hk(2000, 2, 84), hk(2000, 2, 81)};
        const char* names[] = {"cr", "hk2k-a", "hk2k-b"};
        for (std::size_t gi = 0; gi < evals.size() && ok; ++gi) {
            const DirectedGraph& g = evals[gi];
            auto spread = [&](const SeedSet& s) {
                return simulate_ic(g, s, 10000, mix_seed(808, gi, seedset_hash(s))).mean;
            };
            double glie = spread(celf_glie(g, 20, model).seeds);
            double pun_s = spread(pun(g, 20, model).seeds);
            double core = spread(k_core(g, 20).seeds);
            if (!(glie >= pun_s && pun_s >= core && pun_s >= 0.95 * glie)) {
                ok = false;
                detail = fmt("%s: celf-glie %.1f, pun %.1f, kcore %.1f", names[gi], glie, pun_s,
                             core);
            }
        }
        if (ok) {
            std::vector<DirectedGraph> train_graphs;
            for (std::uint64_t i = 0; i < 8; ++i) train_graphs.push_back(ba(300, 2, 900 + i));
            GrimConfig gcfg;
            gcfg.episodes = 120;
            gcfg.seeds_per_game = 20;
            QNet qnet = grim_train(train_graphs, model, gcfg, 7);
            for (std::uint64_t i = 0; i < 2 && ok; ++i) {
                DirectedGraph g = ba(500, 2, 913 + i);
                auto spread = [&](const SeedSet& s) {
                    return simulate_ic(g, s, 10000, mix_seed(818, i, seedset_hash(s))).mean;
                };
                double grim_s = spread(grim_select(g, 20, model, qnet).seeds);
                double dd = spread(degree_discount(g, 20).seeds);
                if (grim_s < dd) {
                    ok = false;
                    detail = fmt("ba eval %llu: grim %.1f < degdisc %.1f",
                                 static_cast<unsigned long long>(i), grim_s, dd);
                }
            }
        }
        if (ok) detail = "celf-glie >= pun >= kcore, pun within 5%, grim >= degdisc";
        report(8, "method spread ordering", ok, detail);
    }

    criterion_9(model);

    // ---- criterion 10: selection time scaling -------------------------------
    {
        // attachment graphs at ~1k/4k/16k directed edges
        std::vector<DirectedGraph> gs = {ba(129, 4, 1001), ba(504, 4, 1002), ba(2004, 4, 1003)};
        std::vector<ScalingRow> rows = scaling_smoke(gs, {"1k", "4k", "16k"}, 20, model, 9);
        double slope = loglog_slope(rows);
        report(10, "selection time scaling", slope <= 1.3,
               fmt("log-log slope %.2f over %.3fs/%.3fs/%.3fs", slope, rows[0].time_s,
                   rows[1].time_s, rows[2].time_s));
    }

    criterion_11(bin, tmp, tmp / "model.json");

    fs::remove_all(tmp);
    std::printf("%s\n", g_all_ok ? "acceptance: all criteria passed"
                                 : "acceptance: FAILURES present");
    return g_all_ok ? 0 : 1;
}
