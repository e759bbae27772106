#include "infmax/maximize.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <deque>
#include <fstream>
#include <iostream>
#include <numeric>
#include <queue>
#include <sstream>
#include <thread>

#include "infmax/rng.hpp"
#include "json.hpp"

namespace infmax {

using Eigen::MatrixXd;
using Eigen::Vector3d;
using Eigen::VectorXd;

namespace {

double elapsed_ms(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
        .count();
}

template <typename Fn>
void parallel_over(std::size_t count, unsigned threads, Fn&& fn) {
    unsigned nthreads = threads ? threads : std::thread::hardware_concurrency();
    nthreads = std::max(1u, std::min<unsigned>(nthreads, static_cast<unsigned>(count)));
    if (nthreads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < nthreads; ++t)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < count;) fn(i);
        });
    for (auto& t : pool) t.join();
}

}  // namespace

std::string MaximizeResult::to_json(const DirectedGraph& g, bool with_timing) const {
    nlohmann::ordered_json j;
    j["method"] = method;
    nlohmann::ordered_json labels = nlohmann::ordered_json::array();
    for (NodeId u : seeds.members) labels.push_back(g.labels()[u]);
    j["seeds"] = std::move(labels);
    j["per_step_gain"] = per_step_gain;
    if (with_timing)
        j["per_step_ms"] = per_step_ms;
    else
        j["per_step_ms"] = std::vector<double>(per_step_ms.size(), 0.0);
    return j.dump(2) + "\n";
}

std::vector<NodeId> filter_candidates(const DirectedGraph& g, const CandidatePolicy& policy) {
    const std::size_t n = g.num_nodes();
    std::vector<NodeId> kept;
    switch (policy.kind) {
        case CandidatePolicy::Kind::All:
            kept.resize(n);
            std::iota(kept.begin(), kept.end(), NodeId{0});
            break;
        case CandidatePolicy::Kind::MeanDegree: {
            double mean = n ? static_cast<double>(g.num_edges()) / static_cast<double>(n) : 0.0;
            for (std::size_t u = 0; u < n; ++u)
                if (static_cast<double>(g.out_degree(static_cast<NodeId>(u))) >= mean)
                    kept.push_back(static_cast<NodeId>(u));
            break;
        }
        case CandidatePolicy::Kind::TopFraction: {
            std::size_t take = std::max<std::size_t>(
                1, static_cast<std::size_t>(std::ceil(policy.fraction * static_cast<double>(n))));
            kept.resize(n);
            std::iota(kept.begin(), kept.end(), NodeId{0});
            std::sort(kept.begin(), kept.end(), [&](NodeId a, NodeId b) {
                return std::make_pair(g.out_degree(b), a) < std::make_pair(g.out_degree(a), b);
            });
            kept.resize(std::min(take, kept.size()));
            std::sort(kept.begin(), kept.end());
            break;
        }
    }
    if (kept.size() > policy.cap) {
        std::sort(kept.begin(), kept.end(), [&](NodeId a, NodeId b) {
            return std::make_pair(g.out_degree(b), a) < std::make_pair(g.out_degree(a), b);
        });
        kept.resize(policy.cap);
        std::sort(kept.begin(), kept.end());
    }
    return kept;
}

MaximizeResult celf(const DirectedGraph& g, std::size_t k, const Estimator& estimator,
                    const std::vector<NodeId>& candidates, unsigned threads) {
    if (candidates.empty()) throw ValidationError("celf: empty candidate set");
    if (k > candidates.size()) {
        std::cerr << "celf: budget " << k << " exceeds " << candidates.size()
                  << " candidates; selecting all\n";
        k = candidates.size();
    }

    struct Entry {
        double gain;
        NodeId node;
        std::size_t last_updated;
    };
    // max-heap on gain, ties to the lowest node id
    auto worse = [](const Entry& a, const Entry& b) {
        if (a.gain != b.gain) return a.gain < b.gain;
        return a.node > b.node;
    };
    std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> heap(worse);

    MaximizeResult res;
    res.method = "celf";
    auto start = std::chrono::steady_clock::now();

    std::vector<double> initial(candidates.size());
    parallel_over(candidates.size(), threads, [&](std::size_t i) {
        initial[i] = estimator(SeedSet{candidates[i]});
    });
    for (std::size_t i = 0; i < candidates.size(); ++i)
        heap.push({initial[i], candidates[i], 0});

    SeedSet seeds;
    double sigma_s = 0.0;
    while (seeds.size() < k && !heap.empty()) {
        Entry top = heap.top();
        heap.pop();
        if (top.last_updated == seeds.size()) {
            // A stale cached gain can round an ulp below an exactly tied fresh
            // one; refresh near-ties so equal gains resolve by lowest id.
            constexpr double kTieEps = 1e-9;
            if (!heap.empty()) {
                Entry next = heap.top();
                if (next.last_updated != seeds.size() && next.gain >= top.gain - kTieEps) {
                    heap.pop();
                    next.gain = estimator(seeds.with(next.node)) - sigma_s;
                    next.last_updated = seeds.size();
                    heap.push(next);
                    heap.push(top);
                    continue;
                }
            }
            seeds.members.push_back(top.node);
            sigma_s += top.gain;  // running total of the estimator's view
            res.per_step_gain.push_back(top.gain);
            res.per_step_ms.push_back(elapsed_ms(start));
            start = std::chrono::steady_clock::now();
            if (seeds.size() == 1) sigma_s = estimator(seeds);  // exact anchor
        } else {
            top.gain = estimator(seeds.with(top.node)) - sigma_s;
            top.last_updated = seeds.size();
            heap.push(top);
        }
    }
    res.seeds = std::move(seeds);
    return res;
}

MaximizeResult celf_glie(const DirectedGraph& g, std::size_t k, const GlieModel& model,
                         const CandidatePolicy& policy, unsigned threads) {
    std::vector<NodeId> cands = filter_candidates(g, policy);
    MaximizeResult res = celf(
        g, k, [&](const SeedSet& s) { return predict_spread(model, g, s); }, cands, threads);
    res.method = "celf-glie";
    return res;
}

MaximizeResult pun(const DirectedGraph& g, std::size_t k, const GlieModel& model,
                   int aff_interval) {
    if (aff_interval < 1) throw ValidationError("pun: aff_interval must be >= 1");
    MaximizeResult res;
    res.method = "pun";
    if (k == 0) return res;
    auto start = std::chrono::steady_clock::now();

    DirectedGraph work = g;
    std::vector<NodeId> to_orig(g.num_nodes());
    std::iota(to_orig.begin(), to_orig.end(), NodeId{0});
    SeedSet work_seeds;  // selected seeds still present in the working graph
    std::size_t removed = 0;

    // first seed: highest out-degree, ties to the lowest id
    NodeId first = 0;
    for (NodeId u = 1; u < g.num_nodes(); ++u)
        if (g.out_degree(u) > g.out_degree(first)) first = u;
    work_seeds.members.push_back(first);
    res.seeds.members.push_back(first);
    res.per_step_gain.push_back(static_cast<double>(g.out_degree(first)));
    res.per_step_ms.push_back(elapsed_ms(start));

    std::vector<Eigen::VectorXd> baseline = influence_baseline(model, work);
    while (res.seeds.size() < k) {
        start = std::chrono::steady_clock::now();
        InfluenceSets sets = extract_influence_sets(model, work, work_seeds, &baseline);

        // AFF: periodically drop predicted-influenced nodes (seeds included)
        if (res.seeds.size() % static_cast<std::size_t>(aff_interval) == 0) {
            std::vector<NodeId> keep;
            for (NodeId u = 0; u < work.num_nodes(); ++u)
                if (!sets.Lp[u]) keep.push_back(u);
            if (keep.size() < work.num_nodes()) {
                removed += work.num_nodes() - keep.size();
                std::vector<NodeId> new_map(keep.size());
                for (std::size_t i = 0; i < keep.size(); ++i) new_map[i] = to_orig[keep[i]];
                work = work.subgraph(keep);
                to_orig = std::move(new_map);
                work_seeds.members.clear();
                if (work.num_nodes() == 0) break;
                baseline = influence_baseline(model, work);
                sets = extract_influence_sets(model, work, work_seeds, &baseline);
            }
        }

        NodeId best = static_cast<NodeId>(-1);
        double best_gain = -1.0;
        for (NodeId u = 0; u < work.num_nodes(); ++u) {
            if (work_seeds.contains(u)) continue;
            if (res.seeds.contains(to_orig[u])) continue;
            if (sets.m[u] > best_gain) {
                best_gain = sets.m[u];
                best = u;
            }
        }
        if (best == static_cast<NodeId>(-1)) break;
        work_seeds.members.push_back(best);
        res.seeds.members.push_back(to_orig[best]);
        res.per_step_gain.push_back(best_gain);
        res.per_step_ms.push_back(elapsed_ms(start));
    }
    if (res.seeds.size() < k)
        std::cerr << "pun: graph exhausted after " << res.seeds.size() << " of " << k
                  << " seeds\n";
    return res;
}

// ---- GRIM -----------------------------------------------------------------

QNet init_qnet(const QNetConfig& cfg, std::uint64_t rng_seed) {
    QNet net;
    net.cfg = cfg;
    Rng rng(rng_seed);
    double l1 = std::sqrt(6.0 / static_cast<double>(3 + cfg.hid));
    std::uniform_real_distribution<double> u1(-l1, l1);
    net.W_k = MatrixXd::NullaryExpr(3, cfg.hid, [&] { return u1(rng); });
    double l2 = std::sqrt(6.0 / static_cast<double>(cfg.hid + 1));
    std::uniform_real_distribution<double> u2(0.0, l2);
    net.W_q = VectorXd::NullaryExpr(cfg.hid, [&] { return u2(rng); });
    net.W_k_target = net.W_k;
    net.W_q_target = net.W_q;
    return net;
}

double q_value(const QNet& net, const Vector3d& f, bool use_target) {
    const MatrixXd& wk = use_target ? net.W_k_target : net.W_k;
    const VectorXd& wq = use_target ? net.W_q_target : net.W_q;
    VectorXd h = (wk.transpose() * f).cwiseMax(0.0);
    return std::max(0.0, h.dot(wq));
}

std::size_t grim_choose(const QNet& net, const std::vector<Vector3d>& feats, double epsilon,
                        Rng& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    if (unif(rng) < epsilon) {
        std::uniform_int_distribution<std::size_t> pick(0, feats.size() - 1);
        return pick(rng);
    }
    std::size_t best = 0;
    double best_q = q_value(net, feats[0]);
    for (std::size_t i = 1; i < feats.size(); ++i) {
        double q = q_value(net, feats[i]);
        if (q > best_q) {
            best_q = q;
            best = i;
        }
    }
    return best;
}

namespace {

struct Transition {
    Vector3d sa;
    std::vector<Vector3d> next_actions;  // empty at terminal
    double reward = 0.0;
};

struct QAdam {
    MatrixXd mk, vk;
    VectorXd mq, vq;
    std::uint64_t step = 0;
    explicit QAdam(const QNet& n)
        : mk(MatrixXd::Zero(3, n.cfg.hid)),
          vk(MatrixXd::Zero(3, n.cfg.hid)),
          mq(VectorXd::Zero(n.cfg.hid)),
          vq(VectorXd::Zero(n.cfg.hid)) {}
};

// One SGD step on (Q_online(sa) - y)^2 for a sampled minibatch.
void qnet_update(QNet& net, const std::vector<Transition>& replay,
                 const std::vector<std::size_t>& batch, QAdam& adam) {
    MatrixXd dWk = MatrixXd::Zero(3, net.cfg.hid);
    VectorXd dWq = VectorXd::Zero(net.cfg.hid);
    const double scale = 1.0 / static_cast<double>(batch.size());
    for (std::size_t bi : batch) {
        const Transition& t = replay[bi];
        double y = t.reward;
        if (!t.next_actions.empty()) {
            // double-Q: online argmax, target evaluation
            std::size_t best = 0;
            double best_q = q_value(net, t.next_actions[0]);
            for (std::size_t i = 1; i < t.next_actions.size(); ++i) {
                double q = q_value(net, t.next_actions[i]);
                if (q > best_q) {
                    best_q = q;
                    best = i;
                }
            }
            y += q_value(net, t.next_actions[best], true);
        }
        VectorXd pre = net.W_k.transpose() * t.sa;
        VectorXd h = pre.cwiseMax(0.0);
        double o = h.dot(net.W_q);
        double q = std::max(0.0, o);
        double dq = 2.0 * (q - y) * (o > 0.0 ? 1.0 : 0.0);
        dWq += scale * dq * h;
        VectorXd dh = dq * net.W_q;
        VectorXd dpre = (pre.array() > 0.0).select(dh, 0.0);
        dWk += scale * (t.sa * dpre.transpose());
    }
    ++adam.step;
    constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    double bc1 = 1.0 - std::pow(b1, static_cast<double>(adam.step));
    double bc2 = 1.0 - std::pow(b2, static_cast<double>(adam.step));
    adam.mk = b1 * adam.mk + (1 - b1) * dWk;
    adam.vk = (b2 * adam.vk.array() + (1 - b2) * dWk.array().square()).matrix();
    net.W_k.array() -= net.cfg.lr * (adam.mk.array() / bc1) / ((adam.vk.array() / bc2).sqrt() + eps);
    adam.mq = b1 * adam.mq + (1 - b1) * dWq;
    adam.vq = (b2 * adam.vq.array() + (1 - b2) * dWq.array().square()).matrix();
    net.W_q.array() -= net.cfg.lr * (adam.mq.array() / bc1) / ((adam.vq.array() / bc2).sqrt() + eps);
}

// Count of entries where L_s covers at least as much as L_S.
double overlap_score(const std::vector<std::uint8_t>& l_s, const std::vector<std::uint8_t>& l_S) {
    std::size_t c = 0;
    for (std::size_t i = 0; i < l_s.size(); ++i)
        if (static_cast<int>(l_s[i]) - static_cast<int>(l_S[i]) >= 0) ++c;
    return static_cast<double>(c);
}

}  // namespace

QNet grim_train(const std::vector<DirectedGraph>& train_graphs, const GlieModel& model,
                const GrimConfig& cfg, std::uint64_t rng_seed) {
    if (train_graphs.empty()) throw ValidationError("grim_train: no training graphs");
    QNet net = init_qnet(cfg.qnet, mix_seed(rng_seed, 0x51ULL));
    QAdam adam(net);
    std::vector<Transition> replay;
    replay.reserve(cfg.qnet.replay_capacity);
    std::size_t replay_head = 0;
    std::uint64_t updates = 0;
    double epsilon = cfg.qnet.epsilon;
    Rng rng(mix_seed(rng_seed, 0x474d454dULL));

    // per-graph candidate precomputation: initial sigma and L for each node
    struct GraphCache {
        std::vector<NodeId> cands;
        std::vector<double> sigma1;
        std::vector<std::vector<std::uint8_t>> l1;
    };
    std::vector<GraphCache> caches(train_graphs.size());
    for (std::size_t gi = 0; gi < train_graphs.size(); ++gi) {
        const DirectedGraph& g = train_graphs[gi];
        GraphCache& c = caches[gi];
        c.cands = filter_candidates(g, cfg.candidates);
        c.sigma1.resize(c.cands.size());
        c.l1.resize(c.cands.size());
        parallel_over(c.cands.size(), 0, [&](std::size_t i) {
            SeedSet s{c.cands[i]};
            ForwardResult fr = forward(model, g, s);
            c.sigma1[i] = fr.sigma_hat;
            c.l1[i] = influence_sets_from_forward(fr, model, g, s).L;
        });
    }

    QNet best = net;
    double best_avg = -std::numeric_limits<double>::infinity();

    for (int ep = 0; ep < cfg.episodes; ++ep) {
        double episode_influence = 0.0;
        for (std::size_t gi = 0; gi < train_graphs.size(); ++gi) {
            const DirectedGraph& g = train_graphs[gi];
            const GraphCache& c = caches[gi];
            const std::size_t k =
                std::min<std::size_t>(cfg.seeds_per_game, c.cands.size());
            if (k == 0) continue;

            std::vector<std::uint8_t> used(c.cands.size(), 0);
            std::size_t first = static_cast<std::size_t>(
                std::max_element(c.sigma1.begin(), c.sigma1.end()) - c.sigma1.begin());
            SeedSet seeds{c.cands[first]};
            used[first] = 1;
            double sigma_s = c.sigma1[first];
            std::vector<std::uint8_t> l_S = c.l1[first];

            // pending n-step transitions awaiting future rewards / state
            std::deque<std::pair<Transition, int>> pending;  // (transition, rewards still due)
            auto flush_ready = [&](const std::vector<Vector3d>* next_feats) {
                while (!pending.empty() && pending.front().second == 0) {
                    Transition& t = pending.front().first;
                    if (next_feats) t.next_actions = *next_feats;
                    if (replay.size() < cfg.qnet.replay_capacity) {
                        replay.push_back(std::move(t));
                    } else {
                        replay[replay_head] = std::move(t);
                        replay_head = (replay_head + 1) % cfg.qnet.replay_capacity;
                    }
                    pending.pop_front();
                }
            };

            while (seeds.size() < k) {
                std::vector<Vector3d> feats;
                std::vector<std::size_t> idx;
                for (std::size_t i = 0; i < c.cands.size(); ++i) {
                    if (used[i]) continue;
                    feats.emplace_back(sigma_s, c.sigma1[i], overlap_score(c.l1[i], l_S));
                    idx.push_back(i);
                }
                flush_ready(&feats);
                std::size_t choice = grim_choose(net, feats, epsilon, rng);
                std::size_t ci = idx[choice];
                used[ci] = 1;
                seeds.members.push_back(c.cands[ci]);

                ForwardResult fr = forward(model, g, seeds);
                double new_sigma = fr.sigma_hat;
                double reward = new_sigma - sigma_s;
                for (auto& [t, due] : pending)
                    if (due > 0) {
                        t.reward += reward;
                        --due;
                    }
                Transition t;
                t.sa = feats[choice];
                t.reward = reward;
                pending.emplace_back(std::move(t), cfg.reward_delay - 1);

                sigma_s = new_sigma;
                l_S = influence_sets_from_forward(fr, model, g, seeds).L;

                if (replay.size() >= static_cast<std::size_t>(cfg.qnet.minibatch)) {
                    std::uniform_int_distribution<std::size_t> pick(0, replay.size() - 1);
                    std::vector<std::size_t> batch(cfg.qnet.minibatch);
                    for (auto& b : batch) b = pick(rng);
                    qnet_update(net, replay, batch, adam);
                    if (++updates % static_cast<std::uint64_t>(cfg.qnet.target_sync) == 0) {
                        net.W_k_target = net.W_k;
                        net.W_q_target = net.W_q;
                    }
                }
            }
            // terminal: no bootstrap for whatever is still pending
            for (auto& [t, due] : pending) due = 0;
            flush_ready(nullptr);
            episode_influence += sigma_s;
        }
        episode_influence /= static_cast<double>(train_graphs.size());
        if (episode_influence > best_avg) {
            best_avg = episode_influence;
            best = net;
        }
        epsilon *= cfg.qnet.epsilon_decay;
    }
    return best;
}

MaximizeResult grim_select(const DirectedGraph& g, std::size_t k, const GlieModel& model,
                           const QNet& qnet, const CandidatePolicy& policy,
                           std::uint64_t* forward_count_out) {
    MaximizeResult res;
    res.method = "grim";
    std::uint64_t forwards = 0;
    if (k == 0) {
        if (forward_count_out) *forward_count_out = 0;
        return res;
    }
    auto start = std::chrono::steady_clock::now();

    std::vector<NodeId> cands = filter_candidates(g, policy);
    if (k > cands.size()) {
        std::cerr << "grim: budget " << k << " exceeds " << cands.size()
                  << " candidates; selecting all\n";
        k = cands.size();
    }
    std::vector<double> sigma1(cands.size());
    std::vector<std::vector<std::uint8_t>> l1(cands.size());
    for (std::size_t i = 0; i < cands.size(); ++i) {
        SeedSet s{cands[i]};
        ForwardResult fr = forward(model, g, s);
        ++forwards;
        sigma1[i] = fr.sigma_hat;
        l1[i] = influence_sets_from_forward(fr, model, g, s).L;
    }
    std::vector<std::uint8_t> used(cands.size(), 0);
    std::size_t first = 0;
    for (std::size_t i = 1; i < cands.size(); ++i)
        if (sigma1[i] > sigma1[first]) first = i;
    used[first] = 1;
    SeedSet seeds{cands[first]};
    double sigma_s = sigma1[first];
    std::vector<std::uint8_t> l_S = l1[first];
    res.per_step_gain.push_back(sigma_s);
    res.per_step_ms.push_back(elapsed_ms(start));

    while (seeds.size() < k) {
        start = std::chrono::steady_clock::now();
        // one forward per step: refresh the seed-set view
        ForwardResult fr = forward(model, g, seeds);
        ++forwards;
        sigma_s = fr.sigma_hat;
        l_S = influence_sets_from_forward(fr, model, g, seeds).L;

        std::size_t best = static_cast<std::size_t>(-1);
        double best_q = -1.0;
        for (std::size_t i = 0; i < cands.size(); ++i) {
            if (used[i]) continue;
            Vector3d f(sigma_s, sigma1[i], overlap_score(l1[i], l_S));
            double q = q_value(qnet, f);
            if (q > best_q) {
                best_q = q;
                best = i;
            }
        }
        if (best == static_cast<std::size_t>(-1)) break;
        used[best] = 1;
        seeds.members.push_back(cands[best]);
        res.per_step_gain.push_back(best_q);
        res.per_step_ms.push_back(elapsed_ms(start));
    }
    res.seeds = std::move(seeds);
    if (forward_count_out) *forward_count_out = forwards;
    return res;
}

std::string qnet_to_json(const QNet& net) {
    nlohmann::ordered_json j;
    j["version"] = 1;
    j["hid"] = net.cfg.hid;
    nlohmann::ordered_json wk = nlohmann::ordered_json::array();
    for (Eigen::Index r = 0; r < net.W_k.rows(); ++r) {
        nlohmann::ordered_json row = nlohmann::ordered_json::array();
        for (Eigen::Index c = 0; c < net.W_k.cols(); ++c) row.push_back(net.W_k(r, c));
        wk.push_back(std::move(row));
    }
    j["W_k"] = std::move(wk);
    std::vector<double> wq(net.W_q.data(), net.W_q.data() + net.W_q.size());
    j["W_q"] = wq;
    return j.dump(2) + "\n";
}

QNet qnet_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ModelError(std::string("malformed q-net file: ") + e.what());
    }
    for (const char* key : {"version", "hid", "W_k", "W_q"})
        if (!j.contains(key)) throw ModelError(std::string("q-net file missing ") + key);
    if (j["version"].get<int>() != 1) throw ModelError("q-net version unsupported");
    QNet net;
    net.cfg.hid = j["hid"].get<int>();
    const auto& wk = j["W_k"];
    if (wk.size() != 3) throw ModelError("W_k must have 3 rows");
    net.W_k.resize(3, net.cfg.hid);
    for (std::size_t r = 0; r < 3; ++r)
        for (int c = 0; c < net.cfg.hid; ++c)
            net.W_k(static_cast<Eigen::Index>(r), c) = wk[r][c].get<double>();
    auto wq = j["W_q"].get<std::vector<double>>();
    if (static_cast<int>(wq.size()) != net.cfg.hid) throw ModelError("W_q size mismatch");
    net.W_q = Eigen::Map<VectorXd>(wq.data(), net.cfg.hid);
    net.W_k_target = net.W_k;
    net.W_q_target = net.W_q;
    return net;
}

void save_qnet(const QNet& net, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f << qnet_to_json(net);
}

QNet load_qnet(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return qnet_from_json(ss.str());
}

// ---- classical heuristics -------------------------------------------------

MaximizeResult degree_discount(const DirectedGraph& g, std::size_t k) {
    const std::size_t n = g.num_nodes();
    MaximizeResult res;
    res.method = "degdisc";
    k = std::min(k, n);
    auto start = std::chrono::steady_clock::now();

    // undirected neighbor view for the discount bookkeeping
    std::vector<std::vector<NodeId>> nbrs(n);
    for (const Edge& e : g.edges()) nbrs[e.src].push_back(e.dst);
    for (auto& v : nbrs) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }
    std::vector<double> pbar(n, 0.0);
    std::vector<std::size_t> inc(n, 0);
    for (const Edge& e : g.edges()) {
        pbar[e.src] += e.p;
        pbar[e.dst] += e.p;
        ++inc[e.src];
        ++inc[e.dst];
    }
    for (std::size_t u = 0; u < n; ++u)
        if (inc[u]) pbar[u] /= static_cast<double>(inc[u]);

    std::vector<double> dd(n);
    std::vector<double> t(n, 0.0);  // seeded-neighbor count
    for (std::size_t u = 0; u < n; ++u) dd[u] = static_cast<double>(g.out_degree(u));
    std::vector<std::uint8_t> seeded(n, 0);

    for (std::size_t step = 0; step < k; ++step) {
        std::size_t best = n;
        for (std::size_t u = 0; u < n; ++u) {
            if (seeded[u]) continue;
            if (best == n || dd[u] > dd[best]) best = u;
        }
        seeded[best] = 1;
        res.seeds.members.push_back(static_cast<NodeId>(best));
        res.per_step_gain.push_back(dd[best]);
        res.per_step_ms.push_back(elapsed_ms(start));
        start = std::chrono::steady_clock::now();
        for (NodeId v : nbrs[best]) {
            if (seeded[v]) continue;
            t[v] += 1.0;
            double d = static_cast<double>(g.out_degree(v));
            dd[v] = d - 2.0 * t[v] - (d - t[v]) * t[v] * pbar[v];
        }
    }
    return res;
}

std::vector<std::size_t> core_numbers(const DirectedGraph& g) {
    const std::size_t n = g.num_nodes();
    std::vector<std::vector<NodeId>> nbrs(n);
    for (const Edge& e : g.edges()) nbrs[e.src].push_back(e.dst);
    for (std::size_t u = 0; u < n; ++u) {
        auto& v = nbrs[u];
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }
    // make it symmetric (undirected skeleton)
    std::vector<std::vector<NodeId>> und(n);
    for (std::size_t u = 0; u < n; ++u)
        for (NodeId v : nbrs[u]) {
            und[u].push_back(v);
            und[v].push_back(static_cast<NodeId>(u));
        }
    for (auto& v : und) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }

    std::vector<std::size_t> deg(n), core(n, 0);
    std::size_t maxd = 0;
    for (std::size_t u = 0; u < n; ++u) {
        deg[u] = und[u].size();
        maxd = std::max(maxd, deg[u]);
    }
    // bucket peeling
    std::vector<std::vector<NodeId>> buckets(maxd + 1);
    for (std::size_t u = 0; u < n; ++u) buckets[deg[u]].push_back(static_cast<NodeId>(u));
    std::vector<std::uint8_t> done(n, 0);
    std::size_t current = 0;
    for (std::size_t processed = 0; processed < n;) {
        std::size_t d = 0;
        while (d <= maxd && buckets[d].empty()) ++d;
        if (d > maxd) break;
        NodeId u = buckets[d].back();
        buckets[d].pop_back();
        if (done[u] || deg[u] != d) continue;
        done[u] = 1;
        ++processed;
        current = std::max(current, d);
        core[u] = current;
        for (NodeId v : und[u]) {
            if (done[v] || deg[v] <= d) continue;
            --deg[v];
            buckets[deg[v]].push_back(v);
        }
    }
    return core;
}

MaximizeResult k_core(const DirectedGraph& g, std::size_t k) {
    const std::size_t n = g.num_nodes();
    MaximizeResult res;
    res.method = "kcore";
    auto start = std::chrono::steady_clock::now();
    std::vector<std::size_t> core = core_numbers(g);
    std::vector<NodeId> order(n);
    std::iota(order.begin(), order.end(), NodeId{0});
    std::sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
        if (core[a] != core[b]) return core[a] > core[b];
        std::size_t da = g.out_degree(a), db = g.out_degree(b);
        if (da != db) return da > db;
        return a < b;
    });
    k = std::min(k, n);
    double ms = elapsed_ms(start);
    for (std::size_t i = 0; i < k; ++i) {
        res.seeds.members.push_back(order[i]);
        res.per_step_gain.push_back(static_cast<double>(core[order[i]]));
        res.per_step_ms.push_back(i == 0 ? ms : 0.0);
    }
    return res;
}

}  // namespace infmax
