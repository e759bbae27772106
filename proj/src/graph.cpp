#include "infmax/graph.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_set>

#include "infmax/rng.hpp"
#include "json.hpp"

namespace infmax {

bool SeedSet::contains(NodeId u) const {
    return std::find(members.begin(), members.end(), u) != members.end();
}

void SeedSet::validate(std::size_t n) const {
    std::unordered_set<NodeId> seen;
    for (NodeId u : members) {
        if (u >= n) throw ValidationError("seed id " + std::to_string(u) + " out of range");
        if (!seen.insert(u).second)
            throw ValidationError("duplicate seed id " + std::to_string(u));
    }
}

SeedSet SeedSet::with(NodeId u) const {
    SeedSet s = *this;
    s.members.push_back(u);
    return s;
}

std::uint64_t seedset_hash(const SeedSet& s) {
    std::vector<NodeId> sorted = s.members;
    std::sort(sorted.begin(), sorted.end());
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (NodeId u : sorted) {
        h ^= u;
        h *= 0x100000001b3ULL;
    }
    return h;
}

DirectedGraph DirectedGraph::from_edges(std::size_t n, std::vector<Edge> edges, Weighting w) {
    DirectedGraph g;
    g.n_ = n;
    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
        return std::tie(a.src, a.dst) < std::tie(b.src, b.dst);
    });
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const Edge& e = edges[i];
        if (e.src >= n || e.dst >= n)
            throw ValidationError("edge endpoint out of range");
        if (e.src == e.dst)
            throw ValidationError("self-loop on node " + std::to_string(e.src));
        if (e.p < 0.0 || e.p > 1.0)
            throw ValidationError("edge probability out of [0,1]");
        if (i > 0 && edges[i - 1].src == e.src && edges[i - 1].dst == e.dst)
            throw ValidationError("duplicate edge (" + std::to_string(e.src) + "," +
                                  std::to_string(e.dst) + ")");
    }
    g.edges_ = std::move(edges);
    g.in_.resize(n);
    g.out_.resize(n);
    for (const Edge& e : g.edges_) {
        g.out_[e.src].push_back({e.dst, e.p});
        g.in_[e.dst].push_back({e.src, e.p});
    }
    g.labels_.resize(n);
    std::iota(g.labels_.begin(), g.labels_.end(), std::uint64_t{0});
    g.weighting_ = w;
    return g;
}

DirectedGraph DirectedGraph::from_edges(std::size_t n, std::vector<Edge> edges, Weighting w,
                                        std::vector<std::uint64_t> labels) {
    DirectedGraph g = from_edges(n, std::move(edges), w);
    if (labels.size() != n) throw ValidationError("label map size mismatch");
    g.labels_ = std::move(labels);
    return g;
}

DirectedGraph DirectedGraph::subgraph(const std::vector<NodeId>& keep) const {
    std::vector<NodeId> remap(n_, static_cast<NodeId>(-1));
    for (std::size_t i = 0; i < keep.size(); ++i) remap[keep[i]] = static_cast<NodeId>(i);
    std::vector<Edge> es;
    for (const Edge& e : edges_) {
        NodeId s = remap[e.src], d = remap[e.dst];
        if (s != static_cast<NodeId>(-1) && d != static_cast<NodeId>(-1))
            es.push_back({s, d, e.p});
    }
    DirectedGraph g = from_edges(keep.size(), std::move(es), weighting_);
    for (std::size_t i = 0; i < keep.size(); ++i) g.labels_[i] = labels_[keep[i]];
    return g;
}

DirectedGraph load_edge_list(std::istream& in, bool weighted) {
    struct RawEdge {
        std::uint64_t src, dst;
        double p;
    };
    std::vector<RawEdge> raw;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos || line[start] == '#') continue;
        std::istringstream ls(line);
        std::uint64_t s, d;
        if (!(ls >> s >> d))
            throw ParseError("malformed edge at line " + std::to_string(lineno));
        double p = 0.0;
        if (weighted) {
            std::string ptok;
            if (ls >> ptok) {
                try {
                    std::size_t used = 0;
                    p = std::stod(ptok, &used);
                    if (used != ptok.size()) throw std::invalid_argument("");
                } catch (const std::exception&) {
                    throw ParseError("malformed probability at line " + std::to_string(lineno));
                }
                if (p < 0.0 || p > 1.0)
                    throw ValidationError("probability out of [0,1] at line " +
                                          std::to_string(lineno));
            }
        }
        std::string trailing;
        if (!weighted && (ls >> trailing) && trailing[0] != '#') {
            // third column present but weighted flag unset: ignore the value,
            // probabilities stay 0 pending assignment
        }
        if (s == d)
            throw ValidationError("self-loop at line " + std::to_string(lineno));
        raw.push_back({s, d, p});
    }
    // dense re-index by ascending numeric label
    std::map<std::uint64_t, NodeId> remap;
    for (const RawEdge& e : raw) {
        remap.emplace(e.src, 0);
        remap.emplace(e.dst, 0);
    }
    NodeId next = 0;
    for (auto& [label, id] : remap) id = next++;
    std::vector<Edge> edges;
    edges.reserve(raw.size());
    for (const RawEdge& e : raw)
        edges.push_back({remap.at(e.src), remap.at(e.dst), e.p});
    DirectedGraph g = DirectedGraph::from_edges(remap.size(), std::move(edges),
                                               weighted ? Weighting::Explicit : Weighting::Unset);
    for (const auto& [label, id] : remap) g.labels_[id] = label;
    return g;
}

DirectedGraph load_edge_list_file(const std::string& path, bool weighted) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    return load_edge_list(f, weighted);
}

void save_edge_list(const DirectedGraph& g, std::ostream& out) {
    char buf[64];
    for (const Edge& e : g.edges()) {
        std::uint64_t s = g.labels()[e.src], d = g.labels()[e.dst];
        std::snprintf(buf, sizeof(buf), "%llu %llu %.9g\n",
                      static_cast<unsigned long long>(s),
                      static_cast<unsigned long long>(d), e.p);
        out << buf;
    }
}

void save_edge_list_file(const DirectedGraph& g, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    save_edge_list(g, f);
}

std::string metadata_json(const DirectedGraph& g) {
    nlohmann::ordered_json j;
    j["n"] = g.num_nodes();
    j["directed"] = true;
    switch (g.weighting()) {
        case Weighting::WeightedCascade: j["weighting"] = "wc"; break;
        case Weighting::Uniform: j["weighting"] = "uniform"; break;
        case Weighting::Explicit: j["weighting"] = "explicit"; break;
        default: j["weighting"] = "unset"; break;
    }
    j["label_map"] = g.labels();
    return j.dump(2) + "\n";
}

DirectedGraph assign_weighted_cascade(const DirectedGraph& g) {
    std::vector<std::size_t> indeg(g.num_nodes(), 0);
    for (const Edge& e : g.edges()) ++indeg[e.dst];
    std::vector<Edge> es = g.edges();
    for (Edge& e : es) e.p = 1.0 / static_cast<double>(indeg[e.dst]);
    return DirectedGraph::from_edges(g.num_nodes(), std::move(es), Weighting::WeightedCascade,
                                     g.labels());
}

DirectedGraph symmetrize(const DirectedGraph& g) {
    std::set<std::pair<NodeId, NodeId>> pairs;
    for (const Edge& e : g.edges()) {
        pairs.emplace(e.src, e.dst);
        pairs.emplace(e.dst, e.src);
    }
    std::vector<Edge> es;
    es.reserve(pairs.size());
    for (const auto& [s, d] : pairs) es.push_back({s, d, 0.0});
    return DirectedGraph::from_edges(g.num_nodes(), std::move(es), Weighting::Unset, g.labels());
}

DirectedGraph uniform_ic(const DirectedGraph& g, double p) {
    if (p < 0.0 || p > 1.0) throw ValidationError("uniform probability out of [0,1]");
    std::vector<Edge> es = g.edges();
    for (Edge& e : es) e.p = p;
    return DirectedGraph::from_edges(g.num_nodes(), std::move(es), Weighting::Uniform,
                                     g.labels());
}

namespace {

// m distinct nodes drawn preferentially (uniform draws from the urn until
// m distinct are collected).
std::vector<NodeId> preferential_subset(const std::vector<NodeId>& urn, std::size_t m, Rng& rng) {
    std::set<NodeId> chosen;
    std::uniform_int_distribution<std::size_t> pick(0, urn.size() - 1);
    while (chosen.size() < m) chosen.insert(urn[pick(rng)]);
    return {chosen.begin(), chosen.end()};
}

}  // namespace

DirectedGraph generate(const GeneratorConfig& cfg) {
    if (cfg.m < 1 || cfg.m >= cfg.n)
        throw ValidationError("generator requires 1 <= m < n");
    if (cfg.triad_p < 0.0 || cfg.triad_p > 1.0)
        throw ValidationError("triad_p out of [0,1]");
    Rng rng(cfg.rng_seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    std::set<std::pair<NodeId, NodeId>> und;  // undirected edges, src < dst
    auto add_edge = [&](NodeId a, NodeId b) {
        if (a == b) return false;  // self-loops dropped silently
        auto e = std::minmax(a, b);
        return und.emplace(e.first, e.second).second;
    };
    std::vector<std::vector<NodeId>> adj(cfg.n);
    auto connect = [&](NodeId a, NodeId b) {
        if (add_edge(a, b)) {
            adj[a].push_back(b);
            adj[b].push_back(a);
            return true;
        }
        return false;
    };

    std::vector<NodeId> urn;  // one entry per edge endpoint
    std::vector<NodeId> targets(cfg.m);
    std::iota(targets.begin(), targets.end(), NodeId{0});

    for (NodeId v = static_cast<NodeId>(cfg.m); v < cfg.n; ++v) {
        if (cfg.model == GeneratorConfig::Model::BarabasiAlbert) {
            for (NodeId t : targets) {
                connect(v, t);
                urn.push_back(t);
                urn.push_back(v);
            }
            targets = preferential_subset(urn, cfg.m, rng);
        } else {
            // Holme-Kim: preferential attachment plus triangle closure.
            std::vector<NodeId> pool = targets;
            NodeId last = pool.back();
            pool.pop_back();
            connect(v, last);
            urn.push_back(last);
            std::size_t made = 1;
            while (made < cfg.m) {
                bool closed = false;
                if (unif(rng) < cfg.triad_p && !adj[last].empty()) {
                    // candidates: neighbors of `last` not already adjacent to v
                    std::vector<NodeId> cand;
                    for (NodeId w : adj[last])
                        if (w != v && !und.count(std::minmax(v, w)))
                            cand.push_back(w);
                    if (!cand.empty()) {
                        std::sort(cand.begin(), cand.end());
                        cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
                        std::uniform_int_distribution<std::size_t> pick(0, cand.size() - 1);
                        NodeId w = cand[pick(rng)];
                        connect(v, w);
                        urn.push_back(w);
                        closed = true;
                    }
                }
                if (!closed) {
                    if (pool.empty()) pool = preferential_subset(urn, cfg.m, rng);
                    last = pool.back();
                    pool.pop_back();
                    if (connect(v, last)) urn.push_back(last);
                }
                ++made;
            }
            for (std::size_t i = 0; i < cfg.m; ++i) urn.push_back(v);
            targets = preferential_subset(urn, cfg.m, rng);
        }
    }

    std::vector<Edge> es;
    es.reserve(und.size() * 2);
    for (const auto& [a, b] : und) {
        es.push_back({a, b, 0.0});
        es.push_back({b, a, 0.0});
    }
    DirectedGraph g = DirectedGraph::from_edges(cfg.n, std::move(es), Weighting::Unset);
    return assign_weighted_cascade(g);
}

}  // namespace infmax
