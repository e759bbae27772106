#pragma once

#include <cstdint>

#include "infmax/graph.hpp"

namespace infmax {

struct SpreadEstimate {
    double mean = 0.0;
    double std_err = 0.0;     // 0 for exact results
    std::uint64_t n_sims = 0; // 0 for exact results
    std::uint64_t rng_seed = 0;
};

// Monte-Carlo independent cascade. Deterministic in (g, s, n_sims,
// rng_seed); the chunked fan-out makes the result independent of the
// worker count.
SpreadEstimate simulate_ic(const DirectedGraph& g, const SeedSet& s, std::uint64_t n_sims,
                           std::uint64_t rng_seed, unsigned threads = 0);

// Exact sigma(S) by live-edge enumeration over all 2^|E| edge subsets.
// Refuses graphs with more than kExactEdgeGuard edges.
inline constexpr std::size_t kExactEdgeGuard = 25;
SpreadEstimate exact_spread(const DirectedGraph& g, const SeedSet& s);

// Analytic bound from truncated probability propagation: H_0 = 1_S,
// H_{t+1} = A H_t, per-node mass capped at 1. hops in [1,4].
double upper_bound_spread(const DirectedGraph& g, const SeedSet& s, int hops);

}  // namespace infmax
