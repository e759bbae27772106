#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "infmax/graph.hpp"

namespace infmax {

struct ModelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct TrainingError : std::runtime_error {
    int epoch;
    TrainingError(const std::string& msg, int e) : std::runtime_error(msg), epoch(e) {}
};

struct GlieConfig {
    int feat_dim = 50;
    std::vector<int> layer_widths{32, 16};  // non-increasing
    double dropout = 0.4;
    double lr = 0.01;
    int epochs = 100;
    int patience = 50;
    int batch_size = 64;
    std::uint64_t rng_seed = 42;

    void validate() const;
};

struct BatchNorm {
    Eigen::VectorXd gamma, beta, running_mean, running_var;
};

struct GlieLayer {
    // W: (2 * in_width) x out_width; the layer input is [H, A*H].
    Eigen::MatrixXd W;
    BatchNorm bn;
};

struct GlieModel {
    GlieConfig config;
    std::vector<GlieLayer> layers;
    Eigen::VectorXd W_o;  // (feat_dim + sum(layer_widths)) x 1

    int readout_dim() const;
    void check_shapes() const;
};

// Identity batchnorm (gamma=1, beta=0, mean=0, var=1) and rng-initialized
// weights; the fresh-model starting point for training.
GlieModel init_model(const GlieConfig& cfg, std::uint64_t rng_seed);

enum class ForwardMode { Train, Infer };

struct ForwardResult {
    double sigma_hat = 0.0;
    // Post-activation H_t for t=1..T (post-ReLU, pre-dropout).
    std::vector<Eigen::MatrixXd> activations;
    // Post-batchnorm, pre-ReLU values: these carry sign, so the
    // influenced/uninfluenced indicators threshold them.
    std::vector<Eigen::MatrixXd> pre_activations;
};

// Row u of X is all-ones if u is a seed, all-zeros otherwise.
Eigen::MatrixXd encode_seeds(const DirectedGraph& g, const SeedSet& s, int d);

// Full forward pass. Train mode uses per-graph batch statistics and
// dropout (driven by dropout_seed); infer mode uses running statistics
// and no dropout.
ForwardResult forward(const GlieModel& model, const DirectedGraph& g, const SeedSet& s,
                      ForwardMode mode = ForwardMode::Infer, std::uint64_t dropout_seed = 0);

// Convenience: predicted spread only.
double predict_spread(const GlieModel& model, const DirectedGraph& g, const SeedSet& s);

struct InfluenceSets {
    std::vector<std::uint8_t> L;     // multi-layer influence indicator
    std::vector<std::uint8_t> hatL;  // predicted uninfluenced
    std::vector<std::uint8_t> Lp;    // predicted influenced (first layer), seeds forced to 1
    Eigen::VectorXd m;               // potential marginal gains, 0 on seeds
    std::size_t sigma_m() const;     // |Lp|
};

// Per-layer row sums of the zero-seed pre-activations: the rest state the
// influence indicators are measured against. Depends only on (model, g),
// so callers running many extractions on one graph compute it once.
std::vector<Eigen::VectorXd> influence_baseline(const GlieModel& model, const DirectedGraph& g);

InfluenceSets extract_influence_sets(const GlieModel& model, const DirectedGraph& g,
                                     const SeedSet& s,
                                     const std::vector<Eigen::VectorXd>* baseline = nullptr);
// Same extraction from an existing forward result (saves a pass).
InfluenceSets influence_sets_from_forward(const ForwardResult& fr, const GlieModel& model,
                                          const DirectedGraph& g, const SeedSet& s,
                                          const std::vector<Eigen::VectorXd>* baseline = nullptr);

// ---- training -------------------------------------------------------------

struct TrainingSample {
    std::size_t graph_id = 0;
    SeedSet seeds;
    double label = 0.0;  // sigma(S) from MC
};

enum class Split { Train = 0, Val = 1, Test = 2 };

struct Dataset {
    std::vector<DirectedGraph> graphs;
    std::vector<std::string> graph_paths;  // may be empty for in-memory graphs
    std::vector<Split> graph_split;        // per graph
    std::vector<TrainingSample> samples;

    std::vector<std::size_t> sample_indices(Split s) const;
};

// CELF-labeled dataset per the synthetic-data protocol: optimal seed
// prefixes for sizes 1..max_seeds plus `negatives_per_size` random sets
// per size, each labeled with an n_sims MC mean; 60/20/20 split by graph.
Dataset build_dataset(const std::vector<GeneratorConfig>& cfgs, int max_seeds,
                      std::uint64_t n_sims, int negatives_per_size, std::uint64_t rng_seed,
                      unsigned threads = 0);
// Same, over pre-built graphs.
Dataset build_dataset_from_graphs(std::vector<DirectedGraph> graphs, int max_seeds,
                                  std::uint64_t n_sims, int negatives_per_size,
                                  std::uint64_t rng_seed, unsigned threads = 0);

struct EpochStats {
    int epoch;
    double train_mse;
    double val_mse;
};
using TrainCallback = std::function<void(const EpochStats&)>;

struct TrainReport {
    int best_epoch = 0;
    double best_val_mse = 0.0;
    std::vector<EpochStats> history;
};

// Minibatch MSE training with Adam (beta1=0.9, beta2=0.999, eps=1e-8),
// early stopping on validation MSE. Returns the best-validation model.
// Throws TrainingError on NaN loss.
GlieModel train(const GlieConfig& cfg, const Dataset& data, TrainReport* report = nullptr,
                const TrainCallback& cb = nullptr, unsigned threads = 0);

// ---- gradients (exposed for verification) ---------------------------------

struct GlieGradients {
    std::vector<Eigen::MatrixXd> dW;
    std::vector<Eigen::VectorXd> dgamma, dbeta;
    Eigen::VectorXd dW_o;
};

// Squared-error loss (sigma_hat - label)^2 for one sample; returns loss
// and analytic gradients. frozen_bn uses running statistics (no dropout);
// otherwise batch statistics with full backprop through them.
double loss_and_gradients(const GlieModel& model, const DirectedGraph& g, const SeedSet& s,
                          double label, GlieGradients& grads, bool frozen_bn,
                          std::uint64_t dropout_seed, double* sigma_out = nullptr,
                          std::vector<BatchNorm>* batch_stats_out = nullptr);

// ---- serialization --------------------------------------------------------

inline constexpr int kModelVersion = 1;
std::string model_to_json(const GlieModel& model);
GlieModel model_from_json(const std::string& text);
void save_model(const GlieModel& model, const std::string& path);
GlieModel load_model(const std::string& path);

void save_dataset(const Dataset& data, const std::string& path);
// Graphs are re-loaded from the paths recorded in the file, relative to
// the dataset file's directory when not absolute.
Dataset load_dataset(const std::string& path);

}  // namespace infmax
