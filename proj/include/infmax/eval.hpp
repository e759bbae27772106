#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "infmax/glie.hpp"
#include "infmax/graph.hpp"
#include "infmax/maximize.hpp"

namespace infmax {

// mean(|pred - label|) / mean(label). Throws ValidationError on empty or
// length-mismatched input and on zero mean label.
double mae_relative(const std::vector<double>& preds, const std::vector<double>& labels);

// Marginal-gain series along a selector trajectory, against a same-length
// random sequence. m-series check monotonicity, s-series (second
// differences with a fixed probe node) check submodularity.
struct PropertySeries {
    std::vector<double> m_ss, m_sr, s_ss, s_sr;
    double min_value() const;
};

PropertySeries check_monotone_submodular(const Estimator& estimator, const SeedSet& trajectory,
                                         const SeedSet& random_seq);

// Seed-set prediction error protocol: 9 random k-sets plus the top-degree
// k-set, ground truth from MC; returns mean(|pred - truth|) / mean(truth).
double seedset_relative_error(const DirectedGraph& g, const Estimator& estimator, std::size_t k,
                              std::uint64_t n_sims, std::uint64_t rng_seed, unsigned threads = 0);

struct ScalingRow {
    std::string graph;
    std::size_t n_edges = 0;
    std::size_t k = 0;
    double time_s = 0.0;
};

// Median-of-repeats PUN selection wall time per graph.
std::vector<ScalingRow> scaling_smoke(const std::vector<DirectedGraph>& graphs,
                                      const std::vector<std::string>& names, std::size_t k,
                                      const GlieModel& model, int repeats = 3);

// Least-squares slope of log(time) vs log(|E|).
double loglog_slope(const std::vector<ScalingRow>& rows);

// ---- experiment orchestration ---------------------------------------------

struct ExperimentRowSpec {
    std::string graph_path;
    std::string method;  // celf-mc | celf-glie | pun | grim | degdisc | kcore
    std::size_t k = 0;
};

struct ExperimentConfig {
    std::vector<ExperimentRowSpec> rows;
    std::string model_path;  // required by celf-glie / pun / grim
    std::string qnet_path;   // required by grim
    std::uint64_t eval_sims = 10000;
    std::uint64_t selector_sims = 1000;  // celf-mc estimator sims
    std::uint64_t rng_seed = 42;
    bool with_timing = false;  // off: time_s emitted as 0 for byte-stable reruns
};

struct ExperimentRow {
    std::string graph;
    std::string method;
    std::size_t k = 0;
    double spread_mean = 0.0;
    double spread_stderr = 0.0;
    double time_s = 0.0;
    double mae = 0.0;      // |model estimate - MC mean|, 0 for model-free methods
    double rel_err = 0.0;  // mae / MC mean
};

struct ExperimentReport {
    std::vector<ExperimentRow> rows;
    std::string to_csv() const;
    std::string to_json() const;
};

inline constexpr const char* kReportCsvHeader =
    "graph,method,k,spread_mean,spread_stderr,time_s,mae,rel_err";

ExperimentConfig experiment_config_from_json(const std::string& text);
ExperimentReport report_from_csv(const std::string& text);

ExperimentReport run_experiment(const ExperimentConfig& cfg, unsigned threads = 0);

}  // namespace infmax
