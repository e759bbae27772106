// Drives the installed binary end-to-end. The binary path arrives as the
// first program argument (wired up by the build).
#define DOCTEST_CONFIG_IMPLEMENT
#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include "doctest.h"
#include "infmax/glie.hpp"
#include "infmax/graph.hpp"
#include "json.hpp"

namespace fs = std::filesystem;

static std::string g_bin;

namespace {

struct RunResult {
    int code = -1;
    std::string out;
};

RunResult run(const std::string& args, const std::string& stderr_to = "/dev/null") {
    std::string cmd = g_bin + " " + args + " 2>" + stderr_to;
    RunResult r;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    std::array<char, 4096> buf;
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
    int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("infmax_cli_" + std::to_string(::getpid()) + "_" +
                std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
    std::ifstream f(path);
    REQUIRE(f.good());
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void spit(const std::string& path, const std::string& text) {
    std::ofstream f(path);
    f << text;
}

std::size_t count_lines(const std::string& text) {
    std::size_t c = 0;
    for (char ch : text)
        if (ch == '\n') ++c;
    return c;
}

// a small trained-enough artifact is unnecessary for plumbing tests; a
// freshly initialized estimator exercises the same code paths
void save_fresh_model(const std::string& path, std::uint64_t seed = 3, double wo_scale = 1.0) {
    infmax::GlieConfig cfg;
    cfg.feat_dim = 8;
    cfg.layer_widths = {4, 2};
    infmax::GlieModel m = infmax::init_model(cfg, seed);
    m.W_o *= wo_scale;
    infmax::save_model(m, path);
}

}  // namespace

TEST_CASE("generate") {
    TempDir tmp;
    std::string d1 = tmp.str("a"), d2 = tmp.str("b");
    RunResult r = run("generate --out " + d1 + " --count 3 --n 30 --m 2 --seed 9");
    CHECK(r.code == 0);
    for (int i = 0; i < 3; ++i) {
        CHECK(fs::exists(fs::path(d1) / ("g_" + std::to_string(i) + ".edges")));
        CHECK(fs::exists(fs::path(d1) / ("g_" + std::to_string(i) + ".json")));
    }
    SUBCASE("same seed, same bytes") {
        CHECK(run("generate --out " + d2 + " --count 3 --n 30 --m 2 --seed 9").code == 0);
        for (int i = 0; i < 3; ++i) {
            std::string name = "g_" + std::to_string(i) + ".edges";
            CHECK(slurp((fs::path(d1) / name).string()) == slurp((fs::path(d2) / name).string()));
        }
    }
    SUBCASE("degenerate attachment count is a config error") {
        CHECK(run("generate --out " + d2 + " --count 1 --n 30 --m 0").code == 2);
    }
}

TEST_CASE("label") {
    TempDir tmp;
    std::string gd = tmp.str("graphs");
    REQUIRE(run("generate --out " + gd + " --count 1 --n 150 --m 2 --seed 4").code == 0);
    SUBCASE("sample count is sizes times (one optimal plus negatives)") {
        std::string ds = tmp.str("ds.jsonl");
        RunResult r = run("label --graphs " + gd +
                          " --max-seeds 5 --sims 100 --negatives 30 --out " + ds);
        CHECK(r.code == 0);
        CHECK(count_lines(slurp(ds)) == 5 * (1 + 30));
    }
    SUBCASE("zero seed sizes rejected") {
        CHECK(run("label --graphs " + gd + " --max-seeds 0 --out " + tmp.str("x.jsonl")).code ==
              2);
    }
    SUBCASE("missing graph directory is an I/O error") {
        CHECK(run("label --graphs " + tmp.str("nope") + " --out " + tmp.str("x.jsonl")).code ==
              3);
    }
}

TEST_CASE("train") {
    TempDir tmp;
    std::string gd = tmp.str("graphs"), ds = tmp.str("ds.jsonl"), model = tmp.str("m.json");
    REQUIRE(run("generate --out " + gd + " --count 4 --n 25 --m 2 --seed 5").code == 0);
    REQUIRE(run("label --graphs " + gd + " --max-seeds 2 --sims 100 --negatives 4 --out " + ds)
                .code == 0);
    RunResult r = run("train --dataset " + ds + " --out " + model +
                      " --feat-dim 8 --layers 4 2 --epochs 5 --patience 5 --batch-size 8");
    CHECK(r.code == 0);
    CHECK(r.out.find("best_epoch=") != std::string::npos);
    CHECK(fs::exists(model));
}

TEST_CASE("maximize") {
    TempDir tmp;
    std::string graph = tmp.str("g.edges");
    // labels deliberately non-dense to confirm output uses original ids
    spit(graph, "10 20 1\n20 30 1\n30 10 1\n20 40 0.5\n40 20 0.5\n");
    SUBCASE("core method needs no model") {
        RunResult r = run("maximize --graph " + graph + " --method kcore --k 2");
        CHECK(r.code == 0);
        auto j = nlohmann::json::parse(r.out);
        CHECK(j["method"] == "kcore");
        REQUIRE(j["seeds"].size() == 2);
        for (std::uint64_t s : j["seeds"].get<std::vector<std::uint64_t>>())
            CHECK((s == 10 || s == 20 || s == 30 || s == 40));
        // rerun is byte-identical
        CHECK(run("maximize --graph " + graph + " --method kcore --k 2").out == r.out);
    }
    SUBCASE("q-learning selection requires its network") {
        save_fresh_model(tmp.str("m.json"));
        CHECK(run("maximize --graph " + graph + " --method grim --k 1 --model " +
                  tmp.str("m.json"))
                  .code == 2);
    }
    SUBCASE("estimator methods require a model") {
        CHECK(run("maximize --graph " + graph + " --method celf-glie --k 1").code == 2);
    }
    SUBCASE("missing graph file") {
        CHECK(run("maximize --graph " + tmp.str("nope.edges") + " --method kcore --k 1").code ==
              3);
    }
    SUBCASE("output file target") {
        std::string out = tmp.str("sel.json");
        CHECK(run("maximize --graph " + graph + " --method degdisc --k 1 --out " + out).code ==
              0);
        auto j = nlohmann::json::parse(slurp(out));
        CHECK(j["seeds"].size() == 1);
    }
}

TEST_CASE("evaluate") {
    TempDir tmp;
    spit(tmp.str("chain.edges"), "0 1 1\n1 2 1\n");
    spit(tmp.str("s.txt"), "0\n");
    RunResult r = run("evaluate --graph " + tmp.str("chain.edges") + " --seeds " +
                      tmp.str("s.txt") + " --sims 100");
    CHECK(r.code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["mean"] == 3.0);
    CHECK(j["std_err"] == 0.0);
    SUBCASE("unknown seed label") {
        spit(tmp.str("bad.txt"), "7\n");
        CHECK(run("evaluate --graph " + tmp.str("chain.edges") + " --seeds " +
                  tmp.str("bad.txt"))
                  .code == 2);
    }
}

TEST_CASE("estimate") {
    TempDir tmp;
    spit(tmp.str("g.edges"), "0 1 1\n1 2 1\n2 0 1\n");
    spit(tmp.str("all.txt"), "0\n1\n2\n");
    save_fresh_model(tmp.str("m.json"));
    RunResult r = run("estimate --graph " + tmp.str("g.edges") + " --seeds " + tmp.str("all.txt") +
                      " --model " + tmp.str("m.json"));
    CHECK(r.code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["sigma_hat"].get<double>() >= 0.0);
    SUBCASE("overshoot past the node count is flagged") {
        save_fresh_model(tmp.str("big.json"), 3, 1e6);
        RunResult rb = run("estimate --graph " + tmp.str("g.edges") + " --seeds " +
                           tmp.str("all.txt") + " --model " + tmp.str("big.json"));
        CHECK(rb.code == 0);
        auto jb = nlohmann::json::parse(rb.out);
        if (jb["sigma_hat"].get<double>() > 3.0) CHECK(jb.contains("note"));
    }
}

TEST_CASE("property check") {
    TempDir tmp;
    std::string gd = tmp.str("graphs");
    REQUIRE(run("generate --out " + gd + " --count 1 --n 40 --m 2 --seed 6").code == 0);
    // zero estimator: every gain is exactly zero, so both properties hold
    infmax::GlieConfig cfg;
    cfg.feat_dim = 8;
    cfg.layer_widths = {4, 2};
    infmax::GlieModel zm = infmax::init_model(cfg, 1);
    for (auto& l : zm.layers) l.W.setZero();
    zm.W_o.setZero();
    infmax::save_model(zm, tmp.str("zero.json"));
    std::string outdir = tmp.str("series");
    RunResult r = run("check --graph " + gd + "/g_0.edges --model " + tmp.str("zero.json") +
                      " --k 5 --out " + outdir);
    CHECK(r.code == 0);
    for (const char* f : {"m_ss.txt", "m_sr.txt", "s_ss.txt", "s_sr.txt"})
        CHECK(fs::exists(fs::path(outdir) / f));
    SUBCASE("trajectory shorter than three seeds rejected") {
        CHECK(run("check --graph " + gd + "/g_0.edges --model " + tmp.str("zero.json") +
                  " --k 2 --out " + outdir)
                  .code == 2);
    }
}

TEST_CASE("relerr") {
    TempDir tmp;
    std::string gd = tmp.str("graphs");
    REQUIRE(run("generate --out " + gd + " --count 1 --n 30 --m 2 --seed 2").code == 0);
    save_fresh_model(tmp.str("m.json"));
    RunResult r = run("relerr --graph " + gd + "/g_0.edges --model " + tmp.str("m.json") +
                      " --k 3 --sims 200");
    CHECK(r.code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["rel_err"].get<double>() >= 0.0);
    CHECK(j["k"] == 3);
}

TEST_CASE("report") {
    TempDir tmp;
    std::string gd = tmp.str("graphs");
    REQUIRE(run("generate --out " + gd + " --count 1 --n 40 --m 2 --seed 3").code == 0);
    nlohmann::json cfg = {
        {"graphs", {gd + "/g_0.edges"}},
        {"methods", {"kcore", "degdisc"}},
        {"budgets", {3}},
        {"eval_sims", 500},
    };
    spit(tmp.str("cfg.json"), cfg.dump());
    std::string csv1 = tmp.str("r1.csv"), csv2 = tmp.str("r2.csv");
    RunResult a = run("report --config " + tmp.str("cfg.json") + " --out " + csv1);
    CHECK(a.code == 0);
    CHECK(a.out.rfind("graph,method,k,spread_mean,spread_stderr,time_s,mae,rel_err", 0) == 0);
    CHECK(count_lines(a.out) == 3);  // header + 2 rows
    RunResult b = run("report --config " + tmp.str("cfg.json") + " --out " + csv2);
    CHECK(b.out == a.out);
    CHECK(slurp(csv1) == slurp(csv2));  // reruns are byte-identical
    SUBCASE("missing config") {
        CHECK(run("report --config " + tmp.str("nope.json")).code == 3);
    }
}

TEST_CASE("numeric divergence surfaces as exit 4") {
    TempDir tmp;
    std::string gd = tmp.str("graphs"), ds = tmp.str("ds.jsonl");
    REQUIRE(run("generate --out " + gd + " --count 4 --n 20 --m 2 --seed 8").code == 0);
    REQUIRE(run("label --graphs " + gd + " --max-seeds 2 --sims 50 --negatives 2 --out " + ds)
                .code == 0);
    // poison the labels so the first epoch's squared error overflows
    std::string text = slurp(ds);
    std::size_t pos = 0;
    while ((pos = text.find("\"label\":", pos)) != std::string::npos) {
        std::size_t end = text.find_first_of(",}", pos + 8);
        REQUIRE(end != std::string::npos);
        text = text.substr(0, pos + 8) + "1e200" + text.substr(end);
        pos += 8;
    }
    spit(ds, text);
    CHECK(run("train --dataset " + ds + " --out " + tmp.str("m.json") +
              " --feat-dim 8 --layers 4 2 --epochs 3")
              .code == 4);
}

int main(int argc, char** argv) {
    doctest::Context ctx;
    int first_doctest_arg = 1;
    if (argc > 1 && argv[1][0] != '-') {
        g_bin = argv[1];
        first_doctest_arg = 2;
    }
    ctx.applyCommandLine(argc - first_doctest_arg + 1, argv + first_doctest_arg - 1);
    if (g_bin.empty()) {
        std::fprintf(stderr, "usage: test_cli <path-to-binary> [doctest args]\n");
        return 1;
    }
    return ctx.run();
}
