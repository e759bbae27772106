#include "infmax/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "infmax/rng.hpp"
#include "infmax/simulate.hpp"
#include "json.hpp"

namespace infmax {

double mae_relative(const std::vector<double>& preds, const std::vector<double>& labels) {
    if (preds.empty() || preds.size() != labels.size())
        throw ValidationError("mae_relative: inputs must be equal-length and non-empty");
    double abs_err = 0.0, label_sum = 0.0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        abs_err += std::abs(preds[i] - labels[i]);
        label_sum += labels[i];
    }
    if (label_sum == 0.0) throw ValidationError("mae_relative: zero mean label");
    return abs_err / label_sum;
}

double PropertySeries::min_value() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto* s : {&m_ss, &m_sr, &s_ss, &s_sr})
        for (double v : *s) m = std::min(m, v);
    return m;
}

PropertySeries check_monotone_submodular(const Estimator& estimator, const SeedSet& trajectory,
                                         const SeedSet& random_seq) {
    if (trajectory.size() != random_seq.size())
        throw ValidationError("check_monotone_submodular: sequence length mismatch");
    const std::size_t len = trajectory.size();
    PropertySeries out;
    if (len < 2) return out;

    auto prefix = [&](const SeedSet& seq, std::size_t j) {
        SeedSet s;
        s.members.assign(seq.members.begin(), seq.members.begin() + static_cast<long>(j));
        return s;
    };
    auto gain = [&](const SeedSet& base, double sigma_base, NodeId u) {
        if (base.contains(u)) return 0.0;
        return estimator(base.with(u)) - sigma_base;
    };

    // fixed probe nodes for the second differences: the sequences' last
    // elements, absent from every prefix the series touches
    NodeId probe_s = trajectory.members.back();
    NodeId probe_r = random_seq.members.back();

    std::vector<double> sigma(len);
    for (std::size_t j = 1; j < len; ++j) sigma[j] = estimator(prefix(trajectory, j));

    for (std::size_t j = 1; j + 1 < len; ++j) {
        SeedSet sj = prefix(trajectory, j);
        out.m_ss.push_back(gain(sj, sigma[j], trajectory.members[j]));
        out.m_sr.push_back(gain(sj, sigma[j], random_seq.members[j]));
        if (j >= 2) {
            SeedSet si = prefix(trajectory, j - 1);
            out.s_ss.push_back(gain(si, sigma[j - 1], probe_s) - gain(sj, sigma[j], probe_s));
            out.s_sr.push_back(gain(si, sigma[j - 1], probe_r) - gain(sj, sigma[j], probe_r));
        }
    }
    return out;
}

double seedset_relative_error(const DirectedGraph& g, const Estimator& estimator, std::size_t k,
                              std::uint64_t n_sims, std::uint64_t rng_seed, unsigned threads) {
    const std::size_t n = g.num_nodes();
    if (k == 0 || k > n) throw ValidationError("seedset_relative_error: bad k");
    std::vector<SeedSet> sets;
    Rng rng(mix_seed(rng_seed, 0xE11ULL));
    std::vector<NodeId> all(n);
    std::iota(all.begin(), all.end(), NodeId{0});
    for (int r = 0; r < 9; ++r) {
        std::vector<NodeId> pool = all;
        std::shuffle(pool.begin(), pool.end(), rng);
        SeedSet s;
        s.members.assign(pool.begin(), pool.begin() + static_cast<long>(k));
        std::sort(s.members.begin(), s.members.end());
        sets.push_back(std::move(s));
    }
    std::vector<NodeId> by_deg = all;
    std::sort(by_deg.begin(), by_deg.end(), [&](NodeId a, NodeId b) {
        return std::make_pair(g.out_degree(b), a) < std::make_pair(g.out_degree(a), b);
    });
    SeedSet top;
    top.members.assign(by_deg.begin(), by_deg.begin() + static_cast<long>(k));
    std::sort(top.members.begin(), top.members.end());
    sets.push_back(std::move(top));

    std::vector<double> preds, truths;
    for (std::size_t i = 0; i < sets.size(); ++i) {
        preds.push_back(estimator(sets[i]));
        truths.push_back(simulate_ic(g, sets[i], n_sims, mix_seed(rng_seed, i), threads).mean);
    }
    return mae_relative(preds, truths);
}

std::vector<ScalingRow> scaling_smoke(const std::vector<DirectedGraph>& graphs,
                                      const std::vector<std::string>& names, std::size_t k,
                                      const GlieModel& model, int repeats) {
    if (graphs.size() < 3) throw ValidationError("scaling_smoke: need at least 3 graphs");
    std::vector<ScalingRow> rows;
    for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
        std::vector<double> times;
        pun(graphs[gi], k, model);  // warm caches/allocator before timing
        for (int r = 0; r < std::max(1, repeats); ++r) {
            auto t0 = std::chrono::steady_clock::now();
            pun(graphs[gi], k, model);
            times.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                                .count());
        }
        ScalingRow row;
        row.graph = gi < names.size() ? names[gi] : "g" + std::to_string(gi);
        row.n_edges = graphs[gi].num_edges();
        row.k = k;
        // fastest repeat: scheduler noise only ever inflates a run
        row.time_s = *std::min_element(times.begin(), times.end());
        rows.push_back(std::move(row));
    }
    return rows;
}

double loglog_slope(const std::vector<ScalingRow>& rows) {
    if (rows.size() < 2) throw ValidationError("loglog_slope: need at least 2 rows");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const ScalingRow& r : rows) {
        double x = std::log(static_cast<double>(r.n_edges));
        double y = std::log(std::max(r.time_s, 1e-9));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double n = static_cast<double>(rows.size());
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// ---- experiment orchestration ---------------------------------------------

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);  // exact round-trip
    return buf;
}

}  // namespace

std::string ExperimentReport::to_csv() const {
    std::ostringstream os;
    os << kReportCsvHeader << "\n";
    for (const ExperimentRow& r : rows)
        os << r.graph << ',' << r.method << ',' << r.k << ',' << fmt_double(r.spread_mean) << ','
           << fmt_double(r.spread_stderr) << ',' << fmt_double(r.time_s) << ','
           << fmt_double(r.mae) << ',' << fmt_double(r.rel_err) << "\n";
    return os.str();
}

std::string ExperimentReport::to_json() const {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const ExperimentRow& r : rows) {
        nlohmann::ordered_json j;
        j["graph"] = r.graph;
        j["method"] = r.method;
        j["k"] = r.k;
        j["spread_mean"] = r.spread_mean;
        j["spread_stderr"] = r.spread_stderr;
        j["time_s"] = r.time_s;
        j["mae"] = r.mae;
        j["rel_err"] = r.rel_err;
        arr.push_back(std::move(j));
    }
    nlohmann::ordered_json out;
    out["rows"] = std::move(arr);
    return out.dump(2) + "\n";
}

ExperimentReport report_from_csv(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line) || line != kReportCsvHeader)
        throw ParseError("report csv: bad header");
    ExperimentReport rep;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ls, field, ',')) fields.push_back(field);
        if (fields.size() != 8)
            throw ParseError("report csv line " + std::to_string(lineno) + ": expected 8 fields");
        ExperimentRow r;
        r.graph = fields[0];
        r.method = fields[1];
        try {
            r.k = std::stoul(fields[2]);
            r.spread_mean = std::stod(fields[3]);
            r.spread_stderr = std::stod(fields[4]);
            r.time_s = std::stod(fields[5]);
            r.mae = std::stod(fields[6]);
            r.rel_err = std::stod(fields[7]);
        } catch (const std::exception&) {
            throw ParseError("report csv line " + std::to_string(lineno) + ": bad number");
        }
        rep.rows.push_back(std::move(r));
    }
    return rep;
}

ExperimentConfig experiment_config_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("experiment config: ") + e.what());
    }
    ExperimentConfig cfg;
    cfg.model_path = j.value("model", "");
    cfg.qnet_path = j.value("qnet", "");
    cfg.eval_sims = j.value("eval_sims", std::uint64_t{10000});
    cfg.selector_sims = j.value("selector_sims", std::uint64_t{1000});
    cfg.rng_seed = j.value("seed", std::uint64_t{42});
    cfg.with_timing = j.value("timing", false);
    if (j.contains("rows")) {
        for (const auto& jr : j["rows"]) {
            ExperimentRowSpec spec;
            spec.graph_path = jr.at("graph").get<std::string>();
            spec.method = jr.at("method").get<std::string>();
            spec.k = jr.at("k").get<std::size_t>();
            cfg.rows.push_back(std::move(spec));
        }
    } else {
        // cross-product shorthand: graphs x methods x budgets
        for (const auto& gp : j.value("graphs", std::vector<std::string>{}))
            for (const auto& m : j.value("methods", std::vector<std::string>{}))
                for (std::size_t k : j.value("budgets", std::vector<std::size_t>{}))
                    cfg.rows.push_back({gp, m, k});
    }
    return cfg;
}

namespace {

std::uint64_t row_seed(const ExperimentConfig& cfg, const ExperimentRowSpec& spec) {
    // content-derived so identical rows give identical results
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&](const std::string& s) {
        for (char c : s) {
            h ^= static_cast<unsigned char>(c);
            h *= 1099511628211ULL;
        }
        h ^= 0xFF;
        h *= 1099511628211ULL;
    };
    mix(spec.graph_path);
    mix(spec.method);
    mix(std::to_string(spec.k));
    return mix_seed(cfg.rng_seed, h);
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& cfg, unsigned threads) {
    ExperimentReport rep;
    bool need_model = false, need_qnet = false;
    for (const auto& spec : cfg.rows) {
        if (spec.method == "celf-glie" || spec.method == "pun" || spec.method == "grim")
            need_model = true;
        if (spec.method == "grim") need_qnet = true;
    }
    GlieModel model;
    if (need_model) {
        if (cfg.model_path.empty())
            throw ValidationError("run_experiment: config needs a model for the listed methods");
        model = load_model(cfg.model_path);
    }
    QNet qnet;
    if (need_qnet) {
        if (cfg.qnet_path.empty())
            throw ValidationError("run_experiment: grim rows need a qnet file");
        qnet = load_qnet(cfg.qnet_path);
    }

    for (const auto& spec : cfg.rows) {
        DirectedGraph g = load_edge_list_file(spec.graph_path, true);
        std::uint64_t seed = row_seed(cfg, spec);

        auto t0 = std::chrono::steady_clock::now();
        MaximizeResult sel;
        if (spec.method == "celf-mc") {
            auto est = [&](const SeedSet& s) {
                return simulate_ic(g, s, cfg.selector_sims, mix_seed(seed, seedset_hash(s)),
                                   threads)
                    .mean;
            };
            sel = celf(g, spec.k, est, filter_candidates(g), threads);
        } else if (spec.method == "celf-glie") {
            sel = celf_glie(g, spec.k, model, {}, threads);
        } else if (spec.method == "pun") {
            sel = pun(g, spec.k, model);
        } else if (spec.method == "grim") {
            sel = grim_select(g, spec.k, model, qnet);
        } else if (spec.method == "degdisc") {
            sel = degree_discount(g, spec.k);
        } else if (spec.method == "kcore") {
            sel = k_core(g, spec.k);
        } else {
            throw ValidationError("run_experiment: unknown method " + spec.method);
        }
        double select_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                              .count();

        SpreadEstimate ev = simulate_ic(g, sel.seeds, cfg.eval_sims, mix_seed(seed, 0xECULL),
                                        threads);
        ExperimentRow row;
        row.graph = spec.graph_path;
        row.method = spec.method;
        row.k = spec.k;
        row.spread_mean = ev.mean;
        row.spread_stderr = ev.std_err;
        row.time_s = cfg.with_timing ? select_s : 0.0;
        if (spec.method == "celf-glie" || spec.method == "pun" || spec.method == "grim") {
            double pred = predict_spread(model, g, sel.seeds);
            row.mae = std::abs(pred - ev.mean);
            row.rel_err = ev.mean > 0.0 ? row.mae / ev.mean : 0.0;
        }
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

}  // namespace infmax
