#include "infmax/glie.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include "infmax/maximize.hpp"
#include "infmax/rng.hpp"
#include "infmax/simulate.hpp"
#include "json.hpp"

namespace infmax {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {
constexpr double kBnEps = 1e-5;
constexpr double kBnMomentum = 0.1;
}  // namespace

void GlieConfig::validate() const {
    if (feat_dim < 1) throw ModelError("feat_dim must be >= 1");
    if (layer_widths.empty()) throw ModelError("at least one layer required");
    for (std::size_t i = 0; i < layer_widths.size(); ++i) {
        if (layer_widths[i] < 1) throw ModelError("layer width must be >= 1");
        if (i > 0 && layer_widths[i] > layer_widths[i - 1])
            throw ModelError("layer widths must be non-increasing");
    }
    if (dropout < 0.0 || dropout >= 1.0) throw ModelError("dropout must be in [0,1)");
    if (batch_size < 1) throw ModelError("batch_size must be >= 1");
}

int GlieModel::readout_dim() const {
    int d = config.feat_dim;
    for (const auto& l : layers) d += static_cast<int>(l.W.cols());
    return d;
}

void GlieModel::check_shapes() const {
    config.validate();
    if (layers.size() != config.layer_widths.size())
        throw ModelError("layer count mismatch");
    int in_w = config.feat_dim;
    for (std::size_t t = 0; t < layers.size(); ++t) {
        const GlieLayer& l = layers[t];
        int out_w = config.layer_widths[t];
        if (l.W.rows() != 2 * in_w || l.W.cols() != out_w)
            throw ModelError("layer " + std::to_string(t) + " weight shape mismatch");
        if (l.bn.gamma.size() != out_w || l.bn.beta.size() != out_w ||
            l.bn.running_mean.size() != out_w || l.bn.running_var.size() != out_w)
            throw ModelError("layer " + std::to_string(t) + " batchnorm shape mismatch");
        if ((l.bn.running_var.array() <= 0.0).any())
            throw ModelError("running_var must be positive");
        in_w = out_w;
    }
    if (W_o.size() != readout_dim()) throw ModelError("output weight shape mismatch");
}

GlieModel init_model(const GlieConfig& cfg, std::uint64_t rng_seed) {
    cfg.validate();
    GlieModel m;
    m.config = cfg;
    Rng rng(rng_seed);
    int in_w = cfg.feat_dim;
    for (int w : cfg.layer_widths) {
        GlieLayer l;
        double limit = std::sqrt(6.0 / static_cast<double>(2 * in_w + w));
        std::uniform_real_distribution<double> u(-limit, limit);
        l.W = MatrixXd::NullaryExpr(2 * in_w, w, [&] { return u(rng); });
        l.bn.gamma = VectorXd::Ones(w);
        l.bn.beta = VectorXd::Zero(w);
        l.bn.running_mean = VectorXd::Zero(w);
        l.bn.running_var = VectorXd::Ones(w);
        m.layers.push_back(std::move(l));
        in_w = w;
    }
    int rd = m.readout_dim();
    double limit = std::sqrt(6.0 / static_cast<double>(rd + 1));
    // nonnegative init: the readout is nonnegative, so the output ReLU
    // starts alive
    std::uniform_real_distribution<double> u(0.0, limit);
    m.W_o = VectorXd::NullaryExpr(rd, [&] { return u(rng); });
    return m;
}

Eigen::MatrixXd encode_seeds(const DirectedGraph& g, const SeedSet& s, int d) {
    if (d < 1) throw ModelError("feature width must be >= 1");
    s.validate(g.num_nodes());
    MatrixXd x = MatrixXd::Zero(static_cast<Eigen::Index>(g.num_nodes()), d);
    for (NodeId u : s.members) x.row(u).setOnes();
    return x;
}

namespace {

using RowMajorMatrixXd =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

MatrixXd propagate(const DirectedGraph& g, const MatrixXd& h) {
    // gather rows through a row-major copy (per-edge access contiguous
    // instead of strided by the node count) and accumulate each output
    // row in a scratch buffer so it is stored exactly once
    RowMajorMatrixXd hr = h;
    RowMajorMatrixXd out(h.rows(), h.cols());
    Eigen::RowVectorXd acc(h.cols());
    for (std::size_t u = 0; u < g.num_nodes(); ++u) {
        acc.setZero();
        for (const InArc& a : g.in_neighbors(static_cast<NodeId>(u)))
            acc += a.p * hr.row(a.src);
        out.row(u) = acc;
    }
    return out;
}

// dH_prev contribution of P = A * H_prev given dP.
void propagate_transpose_add(const DirectedGraph& g, const MatrixXd& dp, MatrixXd& dh_prev) {
    for (std::size_t u = 0; u < g.num_nodes(); ++u)
        for (const InArc& a : g.in_neighbors(static_cast<NodeId>(u)))
            dh_prev.row(a.src) += a.p * dp.row(u);
}

struct LayerTrace {
    MatrixXd Z;       // [H_prev, A H_prev]
    MatrixXd xhat;
    MatrixXd B;       // pre-ReLU
    MatrixXd C;       // post-ReLU
    MatrixXd mask;    // inverted dropout mask; empty when dropout off
    MatrixXd H;       // layer output
    VectorXd invstd;  // statistics used for normalization
};

struct Trace {
    MatrixXd X;
    std::vector<LayerTrace> layers;
    VectorXd readout;
    double o = 0.0;
    double sigma = 0.0;
};

void forward_impl(const GlieModel& model, const DirectedGraph& g, const SeedSet& s,
                  bool batch_stats, bool dropout_on, std::uint64_t dropout_seed, Trace& tr,
                  std::vector<BatchNorm>* batch_stats_out, bool need_trace = true) {
    model.check_shapes();
    const Eigen::Index n = static_cast<Eigen::Index>(g.num_nodes());
    const int d = model.config.feat_dim;
    // X = x * 1^T with x the seed indicator, so the first layer's product
    // collapses to two rank-1 terms; the light path (no backprop trace)
    // exploits this and never materializes the n x d input blocks.
    if (need_trace) tr.X = encode_seeds(g, s, d);
    s.validate(g.num_nodes());
    tr.layers.resize(model.layers.size());
    if (batch_stats_out) batch_stats_out->resize(model.layers.size());

    Rng drop_rng(dropout_seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double rate = model.config.dropout;

    const MatrixXd* h_prev = nullptr;
    for (std::size_t t = 0; t < model.layers.size(); ++t) {
        const GlieLayer& layer = model.layers[t];
        LayerTrace& lt = tr.layers[t];
        MatrixXd y;
        if (t == 0 && !need_trace) {
            VectorXd x = VectorXd::Zero(n);
            for (NodeId u : s.members) x[u] = 1.0;
            VectorXd ax = VectorXd::Zero(n);
            for (std::size_t u = 0; u < g.num_nodes(); ++u)
                for (const InArc& a : g.in_neighbors(static_cast<NodeId>(u)))
                    if (x[a.src] != 0.0) ax[u] += a.p;
            y.noalias() = x * layer.W.topRows(d).colwise().sum() +
                          ax * layer.W.bottomRows(d).colwise().sum();
        } else if (!need_trace) {
            // same product without materializing the n x 2w concatenation
            const MatrixXd& hp = *h_prev;
            const Eigen::Index w_in = hp.cols();
            y.noalias() = hp * layer.W.topRows(w_in);
            y.noalias() += propagate(g, hp) * layer.W.bottomRows(w_in);
        } else {
            const MatrixXd& hp = t == 0 ? tr.X : *h_prev;
            const Eigen::Index w_in = hp.cols();
            lt.Z.resize(n, 2 * w_in);
            lt.Z.leftCols(w_in) = hp;
            lt.Z.rightCols(w_in) = propagate(g, hp);
            y.noalias() = lt.Z * layer.W;
        }

        VectorXd mean, var;
        if (batch_stats || batch_stats_out) {
            VectorXd bmean = y.colwise().mean();
            VectorXd bvar =
                (y.rowwise() - bmean.transpose()).array().square().colwise().mean();
            if (batch_stats_out) {
                (*batch_stats_out)[t].running_mean = bmean;
                (*batch_stats_out)[t].running_var = bvar;
            }
            if (batch_stats) {
                mean = std::move(bmean);
                var = std::move(bvar);
            }
        }
        if (!batch_stats) {
            mean = layer.bn.running_mean;
            var = layer.bn.running_var;
        }
        lt.invstd = (var.array() + kBnEps).rsqrt();
        if (need_trace) {
            lt.xhat = (y.rowwise() - mean.transpose()).array().rowwise() *
                      lt.invstd.transpose().array();
            lt.B = (lt.xhat.array().rowwise() * layer.bn.gamma.transpose().array()).rowwise() +
                   layer.bn.beta.transpose().array();
        } else {
            // fold normalize + affine into one in-place scale/shift pass
            VectorXd scale = lt.invstd.cwiseProduct(layer.bn.gamma);
            VectorXd shift = layer.bn.beta - mean.cwiseProduct(scale);
            y = (y.array().rowwise() * scale.transpose().array()).rowwise() +
                shift.transpose().array();
            lt.B = std::move(y);
        }
        lt.C = lt.B.cwiseMax(0.0);
        if (dropout_on && rate > 0.0) {
            lt.mask = MatrixXd::NullaryExpr(n, lt.C.cols(), [&] {
                return unif(drop_rng) < rate ? 0.0 : 1.0 / (1.0 - rate);
            });
            lt.H = lt.C.cwiseProduct(lt.mask);
            h_prev = &lt.H;
        } else if (need_trace) {
            lt.H = lt.C;
            h_prev = &lt.H;
        } else {
            lt.H.resize(0, 0);
            h_prev = &lt.C;  // skip the copy; readout reads C directly
        }
    }

    tr.readout.resize(model.readout_dim());
    Eigen::Index off = 0;
    // X columns each sum to the seed count
    tr.readout.segment(off, d).setConstant(static_cast<double>(s.members.size()));
    off += d;
    for (const LayerTrace& lt : tr.layers) {
        const MatrixXd& h = lt.H.size() ? lt.H : lt.C;
        tr.readout.segment(off, h.cols()) = h.colwise().sum();
        off += h.cols();
    }
    tr.o = tr.readout.dot(model.W_o);
    tr.sigma = std::max(0.0, tr.o);
}

void backward_impl(const GlieModel& model, const DirectedGraph& g, const Trace& tr,
                   double dsigma, bool batch_stats, GlieGradients& grads) {
    const std::size_t T = model.layers.size();
    grads.dW.resize(T);
    grads.dgamma.resize(T);
    grads.dbeta.resize(T);
    const Eigen::Index n = tr.X.rows();

    double dout = tr.o > 0.0 ? dsigma : 0.0;
    grads.dW_o = tr.readout * dout;
    VectorXd dr = model.W_o * dout;

    // readout contributions, broadcast over rows
    std::vector<MatrixXd> dh(T);
    Eigen::Index off = tr.X.cols();  // H_0 segment carries no parameters
    for (std::size_t t = 0; t < T; ++t) {
        const Eigen::Index w = tr.layers[t].H.cols();
        dh[t] = dr.segment(off, w).transpose().replicate(n, 1);
        off += w;
    }

    for (std::size_t t = T; t-- > 0;) {
        const GlieLayer& layer = model.layers[t];
        const LayerTrace& lt = tr.layers[t];
        MatrixXd dc = lt.mask.size() ? dh[t].cwiseProduct(lt.mask) : std::move(dh[t]);
        MatrixXd db = (lt.B.array() > 0.0).select(dc, 0.0);
        grads.dgamma[t] = db.cwiseProduct(lt.xhat).colwise().sum();
        grads.dbeta[t] = db.colwise().sum();
        MatrixXd dxhat = db.array().rowwise() * layer.bn.gamma.transpose().array();
        MatrixXd dy;
        if (batch_stats) {
            const double N = static_cast<double>(n);
            VectorXd sum_dxhat = dxhat.colwise().sum();
            VectorXd sum_dxhat_xhat = dxhat.cwiseProduct(lt.xhat).colwise().sum();
            dy = ((dxhat * N).rowwise() - sum_dxhat.transpose() -
                  (lt.xhat.array().rowwise() * sum_dxhat_xhat.transpose().array()).matrix())
                     .array()
                     .rowwise() *
                 (lt.invstd.transpose().array() / N);
        } else {
            dy = dxhat.array().rowwise() * lt.invstd.transpose().array();
        }
        grads.dW[t] = lt.Z.transpose() * dy;
        MatrixXd dz = dy * layer.W.transpose();
        if (t > 0) {
            const Eigen::Index w_in = lt.Z.cols() / 2;
            dh[t - 1] += dz.leftCols(w_in);
            propagate_transpose_add(g, dz.rightCols(w_in), dh[t - 1]);
        }
    }
}

}  // namespace

ForwardResult forward(const GlieModel& model, const DirectedGraph& g, const SeedSet& s,
                      ForwardMode mode, std::uint64_t dropout_seed) {
    Trace tr;
    bool train = mode == ForwardMode::Train;
    // Inference normalizes with frozen running statistics: a fixed affine
    // map keeps sigma_hat local in the seed set, so adding a node cannot
    // drag every other activation down through a shifted batch mean.
    forward_impl(model, g, s, train, train, dropout_seed, tr, nullptr, train);
    ForwardResult fr;
    fr.sigma_hat = tr.sigma;
    fr.activations.reserve(tr.layers.size());
    fr.pre_activations.reserve(tr.layers.size());
    for (auto& lt : tr.layers) {
        fr.activations.push_back(std::move(lt.C));
        fr.pre_activations.push_back(std::move(lt.B));
    }
    return fr;
}

double predict_spread(const GlieModel& model, const DirectedGraph& g, const SeedSet& s) {
    Trace tr;
    forward_impl(model, g, s, false, false, 0, tr, nullptr, false);
    return tr.sigma;
}

std::size_t InfluenceSets::sigma_m() const {
    return static_cast<std::size_t>(std::count(Lp.begin(), Lp.end(), std::uint8_t{1}));
}

std::vector<VectorXd> influence_baseline(const GlieModel& model, const DirectedGraph& g) {
    ForwardResult fr = forward(model, g, SeedSet{});
    std::vector<VectorXd> base(fr.pre_activations.size());
    for (std::size_t t = 0; t < fr.pre_activations.size(); ++t)
        base[t] = fr.pre_activations[t].rowwise().sum();
    return base;
}

InfluenceSets influence_sets_from_forward(const ForwardResult& fr, const GlieModel& model,
                                          const DirectedGraph& g, const SeedSet& s,
                                          const std::vector<VectorXd>* baseline) {
    const std::size_t n = g.num_nodes();
    InfluenceSets is;
    is.L.assign(n, 0);
    is.Lp.assign(n, 0);
    is.hatL.assign(n, 0);
    // Signed pre-ReLU scores measured against the zero-seed rest state: a
    // node is predicted influenced when seeding pushed its representation
    // above where it sits untouched. Absolute thresholds do not work here
    // because the frozen normalization shift gives untouched nodes an
    // arbitrary-signed resting value.
    std::vector<VectorXd> local_base;
    if (!baseline) {
        local_base = influence_baseline(model, g);
        baseline = &local_base;
    }
    VectorXd layer_score = VectorXd::Zero(static_cast<Eigen::Index>(n));
    for (std::size_t t = 0; t < fr.pre_activations.size(); ++t)
        layer_score += (fr.pre_activations[t].rowwise().sum() - (*baseline)[t]) /
                       static_cast<double>(fr.pre_activations[t].cols());
    VectorXd first_score = fr.pre_activations.front().rowwise().sum() - (*baseline)[0];
    for (std::size_t u = 0; u < n; ++u) {
        is.L[u] = layer_score[static_cast<Eigen::Index>(u)] > 0.0 ? 1 : 0;
        is.Lp[u] = first_score[static_cast<Eigen::Index>(u)] > 0.0 ? 1 : 0;
    }
    for (NodeId u : s.members) {
        is.Lp[u] = 1;  // seeds are deterministically active
        is.L[u] = 1;
    }
    for (std::size_t u = 0; u < n; ++u) is.hatL[u] = 1 - is.Lp[u];
    is.m = VectorXd::Zero(static_cast<Eigen::Index>(n));
    for (std::size_t u = 0; u < n; ++u) {
        double sum = 0.0;
        for (const OutArc& a : g.out_neighbors(static_cast<NodeId>(u)))
            sum += a.p * static_cast<double>(is.hatL[a.dst]);
        is.m[static_cast<Eigen::Index>(u)] = sum;
    }
    for (NodeId u : s.members) is.m[u] = 0.0;
    return is;
}

InfluenceSets extract_influence_sets(const GlieModel& model, const DirectedGraph& g,
                                     const SeedSet& s,
                                     const std::vector<VectorXd>* baseline) {
    return influence_sets_from_forward(forward(model, g, s), model, g, s, baseline);
}

double loss_and_gradients(const GlieModel& model, const DirectedGraph& g, const SeedSet& s,
                          double label, GlieGradients& grads, bool frozen_bn,
                          std::uint64_t dropout_seed, double* sigma_out,
                          std::vector<BatchNorm>* batch_stats_out) {
    Trace tr;
    bool batch = !frozen_bn;
    forward_impl(model, g, s, batch, batch, dropout_seed, tr, batch_stats_out);
    double err = tr.sigma - label;
    backward_impl(model, g, tr, 2.0 * err, batch, grads);
    if (sigma_out) *sigma_out = tr.sigma;
    return err * err;
}

namespace {

// Training step: normalize with the current running statistics (exactly
// the inference computation, so there is no train/test shift to absorb),
// keep dropout, and report the sample's batch statistics so the caller
// can advance the running averages.
double train_step(const GlieModel& model, const DirectedGraph& g, const SeedSet& s, double label,
                  GlieGradients& grads, std::uint64_t dropout_seed,
                  std::vector<BatchNorm>* batch_stats_out) {
    Trace tr;
    forward_impl(model, g, s, false, true, dropout_seed, tr, batch_stats_out);
    double err = tr.sigma - label;
    backward_impl(model, g, tr, 2.0 * err, false, grads);
    return err * err;
}

}  // namespace

// ---- training -------------------------------------------------------------

std::vector<std::size_t> Dataset::sample_indices(Split s) const {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < samples.size(); ++i)
        if (graph_split[samples[i].graph_id] == s) idx.push_back(i);
    return idx;
}

namespace {

struct AdamState {
    std::vector<MatrixXd> mW, vW;
    std::vector<VectorXd> mg, vg, mb, vb;
    VectorXd mo, vo;
    std::uint64_t step = 0;

    explicit AdamState(const GlieModel& model) {
        for (const auto& l : model.layers) {
            mW.push_back(MatrixXd::Zero(l.W.rows(), l.W.cols()));
            vW.push_back(MatrixXd::Zero(l.W.rows(), l.W.cols()));
            mg.push_back(VectorXd::Zero(l.bn.gamma.size()));
            vg.push_back(VectorXd::Zero(l.bn.gamma.size()));
            mb.push_back(VectorXd::Zero(l.bn.beta.size()));
            vb.push_back(VectorXd::Zero(l.bn.beta.size()));
        }
        mo = VectorXd::Zero(model.W_o.size());
        vo = VectorXd::Zero(model.W_o.size());
    }

    template <typename T>
    static void update_one(T& param, const T& grad, T& m, T& v, double lr, double bc1,
                           double bc2) {
        constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
        m = b1 * m + (1.0 - b1) * grad;
        v = (b2 * v.array() + (1.0 - b2) * grad.array().square()).matrix();
        param.array() -= lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + eps);
    }

    void apply(GlieModel& model, const GlieGradients& g, double lr) {
        ++step;
        double bc1 = 1.0 - std::pow(0.9, static_cast<double>(step));
        double bc2 = 1.0 - std::pow(0.999, static_cast<double>(step));
        for (std::size_t t = 0; t < model.layers.size(); ++t) {
            update_one(model.layers[t].W, g.dW[t], mW[t], vW[t], lr, bc1, bc2);
            update_one(model.layers[t].bn.gamma, g.dgamma[t], mg[t], vg[t], lr, bc1, bc2);
            update_one(model.layers[t].bn.beta, g.dbeta[t], mb[t], vb[t], lr, bc1, bc2);
        }
        update_one(model.W_o, g.dW_o, mo, vo, lr, bc1, bc2);
        // The readout is entrywise nonnegative (ReLU activations plus seed
        // counts), so keeping W_o in the nonnegative orthant both preserves
        // the submodular-proxy structure and makes the output ReLU undying.
        model.W_o = model.W_o.cwiseMax(0.0);
    }
};

void accumulate(GlieGradients& acc, const GlieGradients& g, double scale) {
    if (acc.dW.empty()) {
        acc = g;
        for (auto& m : acc.dW) m *= scale;
        for (auto& m : acc.dgamma) m *= scale;
        for (auto& m : acc.dbeta) m *= scale;
        acc.dW_o *= scale;
        return;
    }
    for (std::size_t t = 0; t < g.dW.size(); ++t) {
        acc.dW[t] += scale * g.dW[t];
        acc.dgamma[t] += scale * g.dgamma[t];
        acc.dbeta[t] += scale * g.dbeta[t];
    }
    acc.dW_o += scale * g.dW_o;
}

template <typename Fn>
void parallel_indexed(std::size_t count, unsigned threads, Fn&& fn) {
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

GlieModel train(const GlieConfig& cfg, const Dataset& data, TrainReport* report,
                const TrainCallback& cb, unsigned threads) {
    cfg.validate();
    auto train_idx = data.sample_indices(Split::Train);
    auto val_idx = data.sample_indices(Split::Val);
    if (train_idx.empty()) throw TrainingError("empty training split", 0);
    if (val_idx.empty()) throw TrainingError("empty validation split", 0);

    GlieModel model = init_model(cfg, cfg.rng_seed);
    AdamState adam(model);
    GlieModel best = model;
    double best_val = std::numeric_limits<double>::infinity();
    int best_epoch = 0;
    TrainReport local_report;

    auto val_mse = [&](const GlieModel& m) {
        std::vector<double> losses(val_idx.size());
        parallel_indexed(val_idx.size(), threads, [&](std::size_t i) {
            const TrainingSample& s = data.samples[val_idx[i]];
            double err = predict_spread(m, data.graphs[s.graph_id], s.seeds) - s.label;
            losses[i] = err * err;
        });
        return std::accumulate(losses.begin(), losses.end(), 0.0) /
               static_cast<double>(losses.size());
    };

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        std::vector<std::size_t> order = train_idx;
        Rng shuffle_rng(mix_seed(cfg.rng_seed, static_cast<std::uint64_t>(epoch)));
        std::shuffle(order.begin(), order.end(), shuffle_rng);

        double epoch_loss = 0.0;
        for (std::size_t b = 0; b < order.size(); b += cfg.batch_size) {
            std::size_t bn = std::min<std::size_t>(cfg.batch_size, order.size() - b);
            std::vector<GlieGradients> grads(bn);
            std::vector<std::vector<BatchNorm>> stats(bn);
            std::vector<double> losses(bn);
            parallel_indexed(bn, threads, [&](std::size_t i) {
                const TrainingSample& s = data.samples[order[b + i]];
                std::uint64_t dseed =
                    mix_seed(cfg.rng_seed, static_cast<std::uint64_t>(epoch), b + i);
                losses[i] = train_step(model, data.graphs[s.graph_id], s.seeds, s.label,
                                       grads[i], dseed, &stats[i]);
            });
            // fixed-order reductions keep training independent of thread count
            GlieGradients total;
            double scale = 1.0 / static_cast<double>(bn);
            for (std::size_t i = 0; i < bn; ++i) {
                epoch_loss += losses[i];
                accumulate(total, grads[i], scale);
            }
            // One EMA step per minibatch over the averaged per-sample
            // statistics; per-sample updates leave the running estimate
            // hostage to whichever handful of graphs came last.
            for (std::size_t t = 0; t < model.layers.size(); ++t) {
                VectorXd m = VectorXd::Zero(model.layers[t].bn.running_mean.size());
                VectorXd v = VectorXd::Zero(m.size());
                for (std::size_t i = 0; i < bn; ++i) {
                    m += stats[i][t].running_mean;
                    v += stats[i][t].running_var;
                }
                BatchNorm& rbn = model.layers[t].bn;
                rbn.running_mean =
                    (1.0 - kBnMomentum) * rbn.running_mean + (kBnMomentum * scale) * m;
                rbn.running_var =
                    (1.0 - kBnMomentum) * rbn.running_var + (kBnMomentum * scale) * v;
            }
            adam.apply(model, total, cfg.lr);
        }
        epoch_loss /= static_cast<double>(order.size());
        if (!std::isfinite(epoch_loss))
            throw TrainingError("training loss diverged (NaN) at epoch " + std::to_string(epoch),
                                epoch);
        double vmse = val_mse(model);
        if (!std::isfinite(vmse))
            throw TrainingError("validation loss diverged (NaN) at epoch " +
                                    std::to_string(epoch),
                                epoch);
        EpochStats es{epoch, epoch_loss, vmse};
        local_report.history.push_back(es);
        if (cb) cb(es);
        if (vmse < best_val) {
            best_val = vmse;
            best = model;
            best_epoch = epoch;
        } else if (epoch - best_epoch >= cfg.patience) {
            break;
        }
    }
    local_report.best_epoch = best_epoch;
    local_report.best_val_mse = best_val;
    if (report) *report = std::move(local_report);
    return best;
}

// ---- dataset --------------------------------------------------------------

Dataset build_dataset_from_graphs(std::vector<DirectedGraph> graphs, int max_seeds,
                                  std::uint64_t n_sims, int negatives_per_size,
                                  std::uint64_t rng_seed, unsigned threads) {
    if (max_seeds < 1) throw ValidationError("max_seeds must be >= 1");
    if (negatives_per_size < 0) throw ValidationError("negatives_per_size must be >= 0");
    Dataset data;
    data.graphs = std::move(graphs);
    const std::size_t G = data.graphs.size();

    std::vector<std::vector<TrainingSample>> per_graph(G);
    parallel_indexed(G, threads, [&](std::size_t gi) {
        const DirectedGraph& g = data.graphs[gi];
        std::uint64_t gseed = mix_seed(rng_seed, gi);
        // MC estimate as a pure function of the seed set, so CELF sees a
        // consistent estimator and labels match the CELF view
        auto estimate = [&](const SeedSet& s) {
            return simulate_ic(g, s, n_sims, mix_seed(gseed, seedset_hash(s)), 1).mean;
        };
        std::vector<NodeId> all(g.num_nodes());
        std::iota(all.begin(), all.end(), NodeId{0});
        std::size_t k = std::min<std::size_t>(max_seeds, g.num_nodes());
        MaximizeResult opt = celf(g, k, estimate, all, 1);

        std::vector<TrainingSample>& out = per_graph[gi];
        Rng rng(mix_seed(gseed, 0x4e65674cULL));
        std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(g.num_nodes() - 1));
        for (std::size_t size = 1; size <= static_cast<std::size_t>(max_seeds); ++size) {
            if (size <= opt.seeds.size()) {
                SeedSet prefix(std::vector<NodeId>(opt.seeds.members.begin(),
                                                   opt.seeds.members.begin() + size));
                out.push_back({gi, prefix, estimate(prefix)});
            }
            for (int r = 0; r < negatives_per_size; ++r) {
                std::set<NodeId> chosen;
                while (chosen.size() < std::min<std::size_t>(size, g.num_nodes()))
                    chosen.insert(pick(rng));
                SeedSet rs(std::vector<NodeId>(chosen.begin(), chosen.end()));
                out.push_back({gi, rs, estimate(rs)});
            }
        }
    });
    for (auto& v : per_graph)
        data.samples.insert(data.samples.end(), v.begin(), v.end());

    // 60/20/20 split by graph, never by sample
    std::vector<std::size_t> order(G);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng split_rng(mix_seed(rng_seed, 0x53504c4954ULL));
    std::shuffle(order.begin(), order.end(), split_rng);
    data.graph_split.assign(G, Split::Train);
    std::size_t n_train = (G * 6 + 5) / 10, n_val = (G * 2 + 5) / 10;
    for (std::size_t i = 0; i < G; ++i) {
        if (i < n_train)
            data.graph_split[order[i]] = Split::Train;
        else if (i < n_train + n_val)
            data.graph_split[order[i]] = Split::Val;
        else
            data.graph_split[order[i]] = Split::Test;
    }
    return data;
}

Dataset build_dataset(const std::vector<GeneratorConfig>& cfgs, int max_seeds,
                      std::uint64_t n_sims, int negatives_per_size, std::uint64_t rng_seed,
                      unsigned threads) {
    std::vector<DirectedGraph> graphs;
    graphs.reserve(cfgs.size());
    for (const GeneratorConfig& c : cfgs) graphs.push_back(generate(c));
    return build_dataset_from_graphs(std::move(graphs), max_seeds, n_sims, negatives_per_size,
                                     rng_seed, threads);
}

// ---- serialization --------------------------------------------------------

namespace {

nlohmann::ordered_json matrix_to_json(const MatrixXd& m) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        nlohmann::ordered_json row = nlohmann::ordered_json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

MatrixXd matrix_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.empty()) throw ModelError("expected non-empty matrix");
    MatrixXd m(j.size(), j[0].size());
    for (std::size_t r = 0; r < j.size(); ++r)
        for (std::size_t c = 0; c < j[r].size(); ++c)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                j[r][c].get<double>();
    return m;
}

nlohmann::ordered_json vector_to_json(const VectorXd& v) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

VectorXd vector_from_json(const nlohmann::json& j) {
    VectorXd v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i)
        v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    return v;
}

}  // namespace

std::string model_to_json(const GlieModel& model) {
    nlohmann::ordered_json j;
    j["version"] = kModelVersion;
    j["config"] = {{"feat_dim", model.config.feat_dim},
                   {"layer_widths", model.config.layer_widths},
                   {"dropout", model.config.dropout},
                   {"lr", model.config.lr},
                   {"epochs", model.config.epochs},
                   {"patience", model.config.patience},
                   {"batch_size", model.config.batch_size},
                   {"rng_seed", model.config.rng_seed}};
    j["layers"] = nlohmann::ordered_json::array();
    for (const GlieLayer& l : model.layers) {
        nlohmann::ordered_json lj;
        lj["W"] = matrix_to_json(l.W);
        lj["gamma"] = vector_to_json(l.bn.gamma);
        lj["beta"] = vector_to_json(l.bn.beta);
        lj["running_mean"] = vector_to_json(l.bn.running_mean);
        lj["running_var"] = vector_to_json(l.bn.running_var);
        j["layers"].push_back(std::move(lj));
    }
    j["W_o"] = vector_to_json(model.W_o);
    return j.dump(2) + "\n";
}

GlieModel model_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ModelError(std::string("malformed model file: ") + e.what());
    }
    if (!j.contains("version")) throw ModelError("model file missing version");
    if (j["version"].get<int>() != kModelVersion)
        throw ModelError("model version " + j["version"].dump() + " unsupported (expected " +
                         std::to_string(kModelVersion) + ")");
    for (const char* key : {"config", "layers", "W_o"})
        if (!j.contains(key)) throw ModelError(std::string("model file missing ") + key);
    GlieModel m;
    const auto& c = j["config"];
    m.config.feat_dim = c.at("feat_dim").get<int>();
    m.config.layer_widths = c.at("layer_widths").get<std::vector<int>>();
    m.config.dropout = c.at("dropout").get<double>();
    m.config.lr = c.at("lr").get<double>();
    m.config.epochs = c.at("epochs").get<int>();
    m.config.patience = c.at("patience").get<int>();
    m.config.batch_size = c.at("batch_size").get<int>();
    m.config.rng_seed = c.at("rng_seed").get<std::uint64_t>();
    for (const auto& lj : j["layers"]) {
        for (const char* key : {"W", "gamma", "beta", "running_mean", "running_var"})
            if (!lj.contains(key)) throw ModelError(std::string("layer missing ") + key);
        GlieLayer l;
        l.W = matrix_from_json(lj["W"]);
        l.bn.gamma = vector_from_json(lj["gamma"]);
        l.bn.beta = vector_from_json(lj["beta"]);
        l.bn.running_mean = vector_from_json(lj["running_mean"]);
        l.bn.running_var = vector_from_json(lj["running_var"]);
        m.layers.push_back(std::move(l));
    }
    m.W_o = vector_from_json(j["W_o"]);
    m.check_shapes();
    return m;
}

void save_model(const GlieModel& model, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f << model_to_json(model);
}

GlieModel load_model(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return model_from_json(ss.str());
}

void save_dataset(const Dataset& data, const std::string& path) {
    if (data.graph_paths.size() != data.graphs.size())
        throw std::runtime_error("dataset has no graph paths; cannot serialize");
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    static const char* split_names[] = {"train", "val", "test"};
    for (const TrainingSample& s : data.samples) {
        nlohmann::ordered_json j;
        j["graph"] = data.graph_paths[s.graph_id];
        j["graph_id"] = s.graph_id;
        j["split"] = split_names[static_cast<int>(data.graph_split[s.graph_id])];
        j["seeds"] = s.seeds.members;
        j["label"] = s.label;
        f << j.dump() << "\n";
    }
}

Dataset load_dataset(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    std::filesystem::path base = std::filesystem::path(path).parent_path();
    Dataset data;
    std::map<std::string, std::size_t> graph_ids;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line);
        std::string gpath = j.at("graph").get<std::string>();
        std::string split = j.at("split").get<std::string>();
        auto [it, inserted] = graph_ids.emplace(gpath, data.graphs.size());
        if (inserted) {
            std::filesystem::path p(gpath);
            if (p.is_relative()) p = base / p;
            data.graphs.push_back(load_edge_list_file(p.string(), true));
            data.graph_paths.push_back(gpath);
            data.graph_split.push_back(split == "val" ? Split::Val
                                       : split == "test" ? Split::Test
                                                         : Split::Train);
        }
        TrainingSample s;
        s.graph_id = it->second;
        s.seeds = SeedSet(j.at("seeds").get<std::vector<NodeId>>());
        s.label = j.at("label").get<double>();
        data.samples.push_back(std::move(s));
    }
    return data;
}

}  // namespace infmax
