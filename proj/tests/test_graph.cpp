#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "doctest.h"
#include "infmax/graph.hpp"
#include "json.hpp"

using namespace infmax;

TEST_CASE("edge list parsing") {
    SUBCASE("unweighted pairs") {
        std::istringstream in("0 1\n1 2\n");
        DirectedGraph g = load_edge_list(in, false);
        CHECK(g.num_nodes() == 3);
        CHECK(g.num_edges() == 2);
        for (const Edge& e : g.edges()) CHECK(e.p == 0.0);
    }
    SUBCASE("weighted edge") {
        std::istringstream in("0 1 0.5\n");
        DirectedGraph g = load_edge_list(in, true);
        REQUIRE(g.num_edges() == 1);
        CHECK(g.edges()[0].src == 0);
        CHECK(g.edges()[0].dst == 1);
        CHECK(g.edges()[0].p == 0.5);
    }
    SUBCASE("probability out of range") {
        std::istringstream in("0 1 1.5\n");
        CHECK_THROWS_AS(load_edge_list(in, true), ValidationError);
    }
    SUBCASE("malformed line reports line number") {
        std::istringstream in("0 1\nbogus\n");
        try {
            load_edge_list(in, false);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(std::string(e.what()).find("line 2") != std::string::npos);
        }
    }
    SUBCASE("comments and blank lines skipped") {
        std::istringstream in("# header\n\n  \t\n0 1\n# tail\n");
        CHECK(load_edge_list(in, false).num_edges() == 1);
    }
    SUBCASE("self-loop rejected") {
        std::istringstream in("3 3\n");
        CHECK_THROWS_AS(load_edge_list(in, false), ValidationError);
    }
    SUBCASE("sparse labels densified in ascending order") {
        std::istringstream in("100 7\n7 42\n");
        DirectedGraph g = load_edge_list(in, false);
        CHECK(g.num_nodes() == 3);
        CHECK(g.labels() == std::vector<std::uint64_t>{7, 42, 100});
        // 100 -> 7 becomes dense 2 -> 0
        bool found = false;
        for (const Edge& e : g.edges())
            if (e.src == 2 && e.dst == 0) found = true;
        CHECK(found);
    }
}

TEST_CASE("save then load is identity on canonical form") {
    std::istringstream in("5 9 0.25\n1 5 0.125\n9 1 1\n");
    DirectedGraph g = load_edge_list(in, true);
    std::ostringstream out;
    save_edge_list(g, out);
    std::istringstream back(out.str());
    DirectedGraph g2 = load_edge_list(back, true);
    REQUIRE(g2.num_edges() == g.num_edges());
    CHECK(g2.labels() == g.labels());
    for (std::size_t i = 0; i < g.num_edges(); ++i) {
        CHECK(g.labels()[g.edges()[i].src] == g2.labels()[g2.edges()[i].src]);
        CHECK(g.labels()[g.edges()[i].dst] == g2.labels()[g2.edges()[i].dst]);
        CHECK(g.edges()[i].p == g2.edges()[i].p);
    }
    // second round-trip is byte-identical
    std::ostringstream out2;
    save_edge_list(g2, out2);
    CHECK(out.str() == out2.str());
}

TEST_CASE("construction validation") {
    CHECK_THROWS_AS(DirectedGraph::from_edges(2, {{0, 1, 0.5}, {0, 1, 0.5}}), ValidationError);
    CHECK_THROWS_AS(DirectedGraph::from_edges(2, {{0, 2, 0.5}}), ValidationError);
    CHECK_THROWS_AS(DirectedGraph::from_edges(2, {{1, 1, 0.5}}), ValidationError);
    CHECK_THROWS_AS(DirectedGraph::from_edges(2, {{0, 1, -0.1}}), ValidationError);
}

TEST_CASE("weighted cascade assignment") {
    SUBCASE("star of three leaves into a center") {
        DirectedGraph g = assign_weighted_cascade(
            DirectedGraph::from_edges(4, {{1, 0, 0}, {2, 0, 0}, {3, 0, 0}}));
        for (const Edge& e : g.edges()) CHECK(e.p == doctest::Approx(1.0 / 3).epsilon(1e-12));
    }
    SUBCASE("chain gets probability one") {
        DirectedGraph g =
            assign_weighted_cascade(DirectedGraph::from_edges(3, {{0, 1, 0}, {1, 2, 0}}));
        for (const Edge& e : g.edges()) CHECK(e.p == 1.0);
    }
    SUBCASE("in-probabilities sum to one for every fed node") {
        DirectedGraph g = assign_weighted_cascade(DirectedGraph::from_edges(
            5, {{0, 4, 0}, {1, 4, 0}, {2, 4, 0}, {3, 4, 0}, {4, 0, 0}}));
        for (NodeId u = 0; u < 5; ++u) {
            double sum = 0.0;
            for (const InArc& a : g.in_neighbors(u)) sum += a.p;
            if (g.in_degree(u) > 0)
                CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
            else
                CHECK(sum == 0.0);
        }
        CHECK(g.weighting() == Weighting::WeightedCascade);
    }
}

TEST_CASE("symmetrize") {
    SUBCASE("adds reverse edges with zeroed probabilities") {
        DirectedGraph g = symmetrize(DirectedGraph::from_edges(2, {{0, 1, 0.7}}));
        CHECK(g.num_edges() == 2);
        for (const Edge& e : g.edges()) CHECK(e.p == 0.0);
    }
    SUBCASE("idempotent on symmetric graphs") {
        DirectedGraph g = DirectedGraph::from_edges(2, {{0, 1, 0}, {1, 0, 0}});
        CHECK(symmetrize(g).num_edges() == 2);
    }
    SUBCASE("empty graph") { CHECK(symmetrize(DirectedGraph::from_edges(3, {})).num_edges() == 0); }
}

TEST_CASE("uniform probability assignment") {
    DirectedGraph base = DirectedGraph::from_edges(3, {{0, 1, 0}, {1, 2, 0}, {2, 0, 0}});
    for (double p : {0.0, 1.0, 0.01}) {
        DirectedGraph g = uniform_ic(base, p);
        for (const Edge& e : g.edges()) CHECK(e.p == p);
    }
    CHECK_THROWS_AS(uniform_ic(base, 1.5), ValidationError);
}

TEST_CASE("synthetic generators") {
    SUBCASE("deterministic for a fixed seed") {
        GeneratorConfig cfg;
        cfg.n = 5;
        cfg.m = 1;
        cfg.rng_seed = 7;
        DirectedGraph a = generate(cfg), b = generate(cfg);
        REQUIRE(a.num_edges() == b.num_edges());
        for (std::size_t i = 0; i < a.num_edges(); ++i) {
            CHECK(a.edges()[i].src == b.edges()[i].src);
            CHECK(a.edges()[i].dst == b.edges()[i].dst);
            CHECK(a.edges()[i].p == b.edges()[i].p);
        }
    }
    SUBCASE("attachment edge count") {
        GeneratorConfig cfg;
        cfg.n = 100;
        cfg.m = 2;
        cfg.rng_seed = 3;
        // m*(n-m) undirected attachments, doubled by symmetrization
        CHECK(generate(cfg).num_edges() == 2 * cfg.m * (cfg.n - cfg.m));
    }
    SUBCASE("triad-closure graphs are heavy-tailed") {
        GeneratorConfig cfg;
        cfg.model = GeneratorConfig::Model::HolmeKim;
        cfg.n = 100;
        cfg.m = 2;
        cfg.triad_p = 0.5;
        int heavy = 0;
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            cfg.rng_seed = seed;
            DirectedGraph g = generate(cfg);
            std::size_t max_deg = 0;
            for (NodeId u = 0; u < g.num_nodes(); ++u)
                max_deg = std::max(max_deg, g.out_degree(u));
            double mean = static_cast<double>(g.num_edges()) / static_cast<double>(g.num_nodes());
            if (static_cast<double>(max_deg) > 2.0 * mean) ++heavy;
        }
        CHECK(heavy == 20);
    }
    SUBCASE("generated graphs are weighted-cascade") {
        GeneratorConfig cfg;
        cfg.n = 50;
        cfg.m = 2;
        DirectedGraph g = generate(cfg);
        CHECK(g.weighting() == Weighting::WeightedCascade);
        for (NodeId u = 0; u < g.num_nodes(); ++u) {
            if (g.in_degree(u) == 0) continue;
            double sum = 0.0;
            for (const InArc& a : g.in_neighbors(u)) sum += a.p;
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
    SUBCASE("invalid m rejected") {
        GeneratorConfig cfg;
        cfg.n = 5;
        cfg.m = 0;
        CHECK_THROWS_AS(generate(cfg), ValidationError);
        cfg.m = 5;
        CHECK_THROWS_AS(generate(cfg), ValidationError);
    }
}

TEST_CASE("metadata sidecar") {
    std::istringstream in("10 20 0.5\n20 10 0.5\n");
    DirectedGraph g = load_edge_list(in, true);
    auto j = nlohmann::json::parse(metadata_json(g));
    CHECK(j["n"] == 2);
    CHECK(j["directed"] == true);
    CHECK(j["weighting"] == "explicit");
    CHECK(j["label_map"] == std::vector<std::uint64_t>{10, 20});
}

TEST_CASE("seed sets") {
    SeedSet s{2, 0, 1};
    CHECK(s.contains(0));
    CHECK(!s.contains(3));
    CHECK_NOTHROW(s.validate(3));
    CHECK_THROWS_AS(s.validate(2), ValidationError);
    SeedSet dup{1, 1};
    CHECK_THROWS_AS(dup.validate(5), ValidationError);
    CHECK(s.with(3).size() == 4);
    // hash ignores insertion order
    CHECK(seedset_hash(SeedSet{2, 0, 1}) == seedset_hash(SeedSet{0, 1, 2}));
    CHECK(seedset_hash(SeedSet{0, 1}) != seedset_hash(SeedSet{0, 2}));
}

TEST_CASE("induced subgraph keeps labels and probabilities") {
    DirectedGraph g = DirectedGraph::from_edges(
        4, {{0, 1, 0.5}, {1, 2, 0.25}, {2, 3, 0.75}, {3, 0, 1.0}});
    DirectedGraph h = g.subgraph({1, 2});
    CHECK(h.num_nodes() == 2);
    REQUIRE(h.num_edges() == 1);
    CHECK(h.edges()[0].p == 0.25);
    CHECK(h.labels() == std::vector<std::uint64_t>{1, 2});
}
