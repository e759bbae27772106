#include "infmax/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <thread>
#include <vector>

#include "infmax/rng.hpp"

namespace infmax {

namespace {

constexpr std::uint64_t kChunkSims = 1024;  // fixed, so results ignore thread count

struct ChunkStats {
    double sum = 0.0;
    double sum_sq = 0.0;
};

// One batch of cascades; visited/queue buffers reused across sims.
ChunkStats run_chunk(const DirectedGraph& g, const SeedSet& s, std::uint64_t sims,
                     std::uint64_t chunk_seed) {
    Rng rng(chunk_seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const std::size_t n = g.num_nodes();
    std::vector<std::uint8_t> active(n, 0);
    std::vector<NodeId> frontier;
    ChunkStats st;
    for (std::uint64_t i = 0; i < sims; ++i) {
        std::fill(active.begin(), active.end(), 0);
        frontier.clear();
        for (NodeId u : s.members) {
            active[u] = 1;
            frontier.push_back(u);
        }
        std::size_t count = s.members.size();
        for (std::size_t head = 0; head < frontier.size(); ++head) {
            NodeId u = frontier[head];
            for (const OutArc& a : g.out_neighbors(u)) {
                if (active[a.dst]) continue;
                if (unif(rng) < a.p) {
                    active[a.dst] = 1;
                    frontier.push_back(a.dst);
                    ++count;
                }
            }
        }
        double c = static_cast<double>(count);
        st.sum += c;
        st.sum_sq += c * c;
    }
    return st;
}

}  // namespace

SpreadEstimate simulate_ic(const DirectedGraph& g, const SeedSet& s, std::uint64_t n_sims,
                           std::uint64_t rng_seed, unsigned threads) {
    if (s.empty()) throw ValidationError("simulate_ic: empty seed set");
    if (n_sims < 1) throw ValidationError("simulate_ic: n_sims must be >= 1");
    s.validate(g.num_nodes());

    const std::uint64_t n_chunks = (n_sims + kChunkSims - 1) / kChunkSims;
    std::vector<ChunkStats> stats(n_chunks);
    auto work = [&](std::uint64_t c) {
        std::uint64_t sims = std::min(kChunkSims, n_sims - c * kChunkSims);
        stats[c] = run_chunk(g, s, sims, mix_seed(rng_seed, c));
    };

    unsigned nthreads = threads ? threads : std::thread::hardware_concurrency();
    nthreads = std::max(1u, std::min<unsigned>(nthreads, static_cast<unsigned>(n_chunks)));
    if (nthreads <= 1 || n_chunks == 1) {
        for (std::uint64_t c = 0; c < n_chunks; ++c) work(c);
    } else {
        std::atomic<std::uint64_t> next{0};
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < nthreads; ++t)
            pool.emplace_back([&] {
                for (std::uint64_t c; (c = next.fetch_add(1)) < n_chunks;) work(c);
            });
        for (auto& t : pool) t.join();
    }

    double sum = 0.0, sum_sq = 0.0;
    for (const ChunkStats& st : stats) {  // fixed merge order
        sum += st.sum;
        sum_sq += st.sum_sq;
    }
    double nd = static_cast<double>(n_sims);
    double mean = sum / nd;
    double std_err = 0.0;
    if (n_sims > 1) {
        double var = std::max(0.0, (sum_sq - nd * mean * mean) / (nd - 1.0));
        std_err = std::sqrt(var / nd);
    }
    return {mean, std_err, n_sims, rng_seed};
}

SpreadEstimate exact_spread(const DirectedGraph& g, const SeedSet& s) {
    s.validate(g.num_nodes());
    const std::size_t m = g.num_edges();
    if (m > kExactEdgeGuard)
        throw ValidationError("exact_spread: " + std::to_string(m) + " edges exceeds guard of " +
                              std::to_string(kExactEdgeGuard));
    const std::size_t n = g.num_nodes();
    const auto& edges = g.edges();
    std::vector<std::uint8_t> reach(n);
    std::vector<NodeId> frontier;
    std::vector<std::vector<std::pair<NodeId, std::size_t>>> out(n);  // (dst, edge index)
    for (std::size_t i = 0; i < m; ++i) out[edges[i].src].push_back({edges[i].dst, i});

    double total = 0.0;
    for (std::uint64_t mask = 0; mask < (1ULL << m); ++mask) {
        double prob = 1.0;
        for (std::size_t i = 0; i < m; ++i)
            prob *= (mask >> i & 1) ? edges[i].p : 1.0 - edges[i].p;
        if (prob == 0.0) continue;
        std::fill(reach.begin(), reach.end(), 0);
        frontier.clear();
        for (NodeId u : s.members) {
            reach[u] = 1;
            frontier.push_back(u);
        }
        std::size_t count = s.members.size();
        for (std::size_t head = 0; head < frontier.size(); ++head) {
            for (const auto& [dst, ei] : out[frontier[head]]) {
                if ((mask >> ei & 1) && !reach[dst]) {
                    reach[dst] = 1;
                    frontier.push_back(dst);
                    ++count;
                }
            }
        }
        total += prob * static_cast<double>(count);
    }
    return {total, 0.0, 0, 0};
}

double upper_bound_spread(const DirectedGraph& g, const SeedSet& s, int hops) {
    if (hops < 1 || hops > 4)
        throw ValidationError("upper_bound_spread: hops must be in [1,4]");
    s.validate(g.num_nodes());
    const std::size_t n = g.num_nodes();
    std::vector<double> h(n, 0.0), acc(n, 0.0), next(n, 0.0);
    for (NodeId u : s.members) h[u] = 1.0;
    for (std::size_t u = 0; u < n; ++u) acc[u] = h[u];
    for (int t = 0; t < hops; ++t) {
        for (std::size_t u = 0; u < n; ++u) {
            double sum = 0.0;
            for (const InArc& a : g.in_neighbors(static_cast<NodeId>(u))) sum += a.p * h[a.src];
            next[u] = sum;
        }
        std::swap(h, next);
        for (std::size_t u = 0; u < n; ++u) acc[u] += h[u];
    }
    double est = 0.0;
    for (std::size_t u = 0; u < n; ++u) est += std::min(1.0, acc[u]);
    return est;
}

}  // namespace infmax
