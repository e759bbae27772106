#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "infmax/glie.hpp"
#include "infmax/graph.hpp"
#include "infmax/rng.hpp"

namespace infmax {

// Total spread estimator sigma~(S); must be defined for every candidate
// superset the selector evaluates.
using Estimator = std::function<double(const SeedSet&)>;

struct MaximizeResult {
    std::string method;
    SeedSet seeds;                     // dense ids, selection order
    std::vector<double> per_step_gain; // predicted marginal gain at selection
    std::vector<double> per_step_ms;   // selection wall time per step
    std::string to_json(const DirectedGraph& g, bool with_timing) const;
};

struct CandidatePolicy {
    enum class Kind { MeanDegree, TopFraction, All };
    Kind kind = Kind::MeanDegree;
    double fraction = 0.1;        // TopFraction only
    std::size_t cap = 5000;       // max candidates by degree
};

// Nodes with out-degree >= distribution mean (default policy), capped at
// `cap` top-degree nodes. Ascending id order.
std::vector<NodeId> filter_candidates(const DirectedGraph& g, const CandidatePolicy& policy = {});

// Lazy-forward greedy. Ties broken by lowest node id. Equivalent to naive
// greedy whenever the estimator is monotone submodular on the evaluated
// lattice. k > |candidates| selects all candidates (warns on stderr).
MaximizeResult celf(const DirectedGraph& g, std::size_t k, const Estimator& estimator,
                    const std::vector<NodeId>& candidates, unsigned threads = 0);

// celf with the trained estimator over degree-filtered candidates.
MaximizeResult celf_glie(const DirectedGraph& g, std::size_t k, const GlieModel& model,
                         const CandidatePolicy& policy = {}, unsigned threads = 0);

// Potentially-uninfluenced-neighbors proxy with adaptive full feedback:
// first seed is the max-out-degree node; every aff_interval seeds the
// predicted-influenced nodes are removed from the working graph.
MaximizeResult pun(const DirectedGraph& g, std::size_t k, const GlieModel& model,
                   int aff_interval = 5);

// ---- GRIM -----------------------------------------------------------------

struct QNetConfig {
    int hid = 16;
    double epsilon = 0.3;
    double epsilon_decay = 0.99;
    std::size_t replay_capacity = 10000;
    int minibatch = 64;
    int target_sync = 100;  // updates between target-network syncs
    double lr = 1e-3;
};

struct QNet {
    QNetConfig cfg;
    Eigen::MatrixXd W_k;         // 3 x hid
    Eigen::VectorXd W_q;         // hid
    Eigen::MatrixXd W_k_target;
    Eigen::VectorXd W_q_target;
};

QNet init_qnet(const QNetConfig& cfg, std::uint64_t rng_seed);
// Q(u,S,G) = ReLU(ReLU(f W_k) W_q), f = [sigma_hat(S), sigma_hat(s), O(S,s)].
double q_value(const QNet& net, const Eigen::Vector3d& f, bool use_target = false);

// Epsilon-greedy action over per-candidate features; exposed for tests.
std::size_t grim_choose(const QNet& net, const std::vector<Eigen::Vector3d>& feats,
                        double epsilon, Rng& rng);

struct GrimConfig {
    int episodes = 500;
    int seeds_per_game = 100;
    QNetConfig qnet;
    CandidatePolicy candidates;
    int reward_delay = 2;  // n-step return, undiscounted
};

// Q-learning over IM games on the training graphs with a frozen spread
// model; retains the net with the best average game influence.
QNet grim_train(const std::vector<DirectedGraph>& train_graphs, const GlieModel& model,
                const GrimConfig& cfg, std::uint64_t rng_seed);

// Greedy Q selection; exactly one model forward per step after the first.
MaximizeResult grim_select(const DirectedGraph& g, std::size_t k, const GlieModel& model,
                           const QNet& qnet, const CandidatePolicy& policy = {},
                           std::uint64_t* forward_count_out = nullptr);

std::string qnet_to_json(const QNet& net);
QNet qnet_from_json(const std::string& text);
void save_qnet(const QNet& net, const std::string& path);
QNet load_qnet(const std::string& path);

// ---- classical heuristics -------------------------------------------------

// DegreeDiscount with dd_v = d_v - 2 t_v - (d_v - t_v) t_v p_v, where t_v
// counts seeded neighbors and p_v is the mean incident edge probability.
MaximizeResult degree_discount(const DirectedGraph& g, std::size_t k);

// Top-k nodes by (core number, degree, -id) on the undirected skeleton.
MaximizeResult k_core(const DirectedGraph& g, std::size_t k);

// Core numbers via min-degree peeling (exposed for tests).
std::vector<std::size_t> core_numbers(const DirectedGraph& g);

}  // namespace infmax
