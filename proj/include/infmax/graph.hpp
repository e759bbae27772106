#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace infmax {

using NodeId = std::uint32_t;

struct Edge {
    NodeId src;
    NodeId dst;
    double p;  // influence probability in [0,1]
};

struct InArc {
    NodeId src;
    double p;
};

struct OutArc {
    NodeId dst;
    double p;
};

enum class Weighting { Unset, WeightedCascade, Uniform, Explicit };

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Ordered seed set; insertion order records selection order.
struct SeedSet {
    std::vector<NodeId> members;

    SeedSet() = default;
    SeedSet(std::initializer_list<NodeId> ids) : members(ids) {}
    explicit SeedSet(std::vector<NodeId> ids) : members(std::move(ids)) {}

    std::size_t size() const { return members.size(); }
    bool empty() const { return members.empty(); }
    bool contains(NodeId u) const;
    // Throws ValidationError on duplicates or ids >= n.
    void validate(std::size_t n) const;
    SeedSet with(NodeId u) const;
};

// Order-independent FNV hash; used to derive per-set rng streams.
std::uint64_t seedset_hash(const SeedSet& s);

// Immutable directed influence graph. Node ids are dense in [0, n);
// original labels from an edge-list file live in labels().
class DirectedGraph {
public:
    DirectedGraph() = default;

    // Validates: p in [0,1], ids < n, no self-loops, no duplicate (src,dst).
    static DirectedGraph from_edges(std::size_t n, std::vector<Edge> edges,
                                    Weighting w = Weighting::Unset);
    static DirectedGraph from_edges(std::size_t n, std::vector<Edge> edges, Weighting w,
                                    std::vector<std::uint64_t> labels);

    std::size_t num_nodes() const { return n_; }
    std::size_t num_edges() const { return edges_.size(); }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<InArc>& in_neighbors(NodeId u) const { return in_[u]; }
    const std::vector<OutArc>& out_neighbors(NodeId u) const { return out_[u]; }
    std::size_t in_degree(NodeId u) const { return in_[u].size(); }
    std::size_t out_degree(NodeId u) const { return out_[u].size(); }

    Weighting weighting() const { return weighting_; }
    // Dense id -> original label. Identity for generated graphs.
    const std::vector<std::uint64_t>& labels() const { return labels_; }

    // Induced subgraph on `keep` (dense-reindexed in the order given),
    // edge probabilities preserved.
    DirectedGraph subgraph(const std::vector<NodeId>& keep) const;

private:
    std::size_t n_ = 0;
    std::vector<Edge> edges_;  // sorted by (src, dst)
    std::vector<std::vector<InArc>> in_;
    std::vector<std::vector<OutArc>> out_;
    std::vector<std::uint64_t> labels_;
    Weighting weighting_ = Weighting::Unset;

    friend DirectedGraph load_edge_list(std::istream&, bool);
};

struct GeneratorConfig {
    enum class Model { BarabasiAlbert, HolmeKim };
    Model model = Model::BarabasiAlbert;
    std::size_t n = 100;
    std::size_t m = 2;        // edges per new node
    double triad_p = 0.25;    // Holme-Kim only
    std::uint64_t rng_seed = 42;
};

// Edge-list format: `src dst [p]` per line, `#` comments. Labels are
// remapped to dense ids by ascending numeric label.
DirectedGraph load_edge_list(std::istream& in, bool weighted);
DirectedGraph load_edge_list_file(const std::string& path, bool weighted);

// Canonical form: edges sorted by (src,dst), p with 9 significant digits.
void save_edge_list(const DirectedGraph& g, std::ostream& out);
void save_edge_list_file(const DirectedGraph& g, const std::string& path);

// JSON sidecar {n, directed, weighting, label_map} next to the edge file.
std::string metadata_json(const DirectedGraph& g);

// Every in-edge of u gets 1/indeg(u).
DirectedGraph assign_weighted_cascade(const DirectedGraph& g);

// Adds the reverse of every edge; probabilities reset to 0.
DirectedGraph symmetrize(const DirectedGraph& g);

// All edges get probability p.
DirectedGraph uniform_ic(const DirectedGraph& g, double p);

// Synthetic preferential-attachment graph, symmetrized and
// weighted-cascade-assigned. Pure function of its config.
DirectedGraph generate(const GeneratorConfig& cfg);

}  // namespace infmax
