#pragma once

#include "uplift/boosting.hpp"
#include "uplift/common.hpp"
#include "uplift/dataset.hpp"
#include "uplift/tree.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace uplift {

// ---------------------------------------------------------------------------
// uplift curves
// ---------------------------------------------------------------------------

struct ScoredRecord {
    double score = 0.0;
    int outcome = 0;
};

struct ScoredGroup {
    std::vector<ScoredRecord> records;
};

struct CurvePoint {
    double fraction = 0.0;      // of the pooled test population targeted
    double net_gain_pct = 0.0;  // percentage points of success probability
};

struct UpliftCurve {
    // (0, 0) first, (1, overall uplift) last, fractions strictly increasing
    std::vector<CurvePoint> points;
    double auuc = 0.0;  // diagonal-subtracted; may be negative

    double overall_uplift_pct() const { return points.back().net_gain_pct; }
};

// Trapezoidal area between consecutive points minus the diagonal triangle.
inline double auuc_from_points(const std::vector<CurvePoint>& pts) {
    double area = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
        area += 0.5 * (pts[i].net_gain_pct + pts[i + 1].net_gain_pct) *
                (pts[i + 1].fraction - pts[i].fraction);
    return area - 0.5 * pts.back().net_gain_pct;
}

inline double auuc(const UpliftCurve& c) { return auuc_from_points(c.points); }

// Treatment lift minus control lift, each normalized by its own test group
// size and expressed in percentage points.  Records tied at a score enter
// atomically.  The walk is over pooled distinct score values descending, so
// the fraction axis uses the pooled population.
inline UpliftCurve uplift_curve(const ScoredGroup& t, const ScoredGroup& c) {
    if (t.records.empty() || c.records.empty())
        throw EvalError("uplift_curve: empty test group");

    struct Item {
        double score;
        int outcome;
        bool treated;
    };
    std::vector<Item> pool;
    pool.reserve(t.records.size() + c.records.size());
    for (const auto& r : t.records) pool.push_back({r.score, r.outcome, true});
    for (const auto& r : c.records) pool.push_back({r.score, r.outcome, false});
    std::sort(pool.begin(), pool.end(),
              [](const Item& a, const Item& b) { return a.score > b.score; });

    const auto nt = static_cast<double>(t.records.size());
    const auto nc = static_cast<double>(c.records.size());
    const auto n = static_cast<double>(pool.size());

    UpliftCurve curve;
    curve.points.push_back({0.0, 0.0});
    std::size_t taken = 0;
    long t_succ = 0, c_succ = 0;
    std::size_t i = 0;
    while (i < pool.size()) {
        const double s = pool[i].score;
        while (i < pool.size() && pool[i].score == s) {
            ++taken;
            if (pool[i].treated) t_succ += pool[i].outcome;
            else c_succ += pool[i].outcome;
            ++i;
        }
        curve.points.push_back({static_cast<double>(taken) / n,
                                100.0 * (static_cast<double>(t_succ) / nt -
                                         static_cast<double>(c_succ) / nc)});
    }
    curve.auuc = auuc_from_points(curve.points);
    return curve;
}

// scoring helpers for the three modalities
inline ScoredGroup ensemble_scores(const BoostingEnsemble& e, const std::vector<Record>& recs) {
    ScoredGroup g;
    g.records.reserve(recs.size());
    for (const Record& r : recs) g.records.push_back({e.score(r), r.outcome});
    return g;
}

inline ScoredGroup tree_decision_scores(const UpliftTree& t, const std::vector<Record>& recs) {
    ScoredGroup g;
    g.records.reserve(recs.size());
    for (const Record& r : recs)
        g.records.push_back({static_cast<double>(t.predict(r)), r.outcome});
    return g;
}

inline ScoredGroup tree_uplift_scores(const UpliftTree& t, const std::vector<Record>& recs) {
    ScoredGroup g;
    g.records.reserve(recs.size());
    for (const Record& r : recs) g.records.push_back({t.predict_score(r), r.outcome});
    return g;
}

// ---------------------------------------------------------------------------
// the repeated-split experiment protocol
// ---------------------------------------------------------------------------

struct AlgorithmSpec {
    std::string name;
    BoostConfig config;  // the seed field is overridden per repetition
};

struct ExperimentConfig {
    std::vector<AlgorithmSpec> algorithms;
    int repetitions = 256;
    double train_fraction = 0.8;
    std::uint64_t master_seed = 0;
    std::vector<int> checkpoints = {1, 2, 3, 5, 8, 13, 21, 34, 55, 89, 101};
    TreeConfig base_tree;  // the reference base model (base_01 / base_score entries)
    int jobs = 1;
};

struct CheckpointStat {
    int size = 0;
    int count = 0;  // repetitions where the ensemble reached this size
    double mean = 0.0, sd = 0.0, se = 0.0;
    std::vector<double> values;
};

struct AlgorithmResult {
    std::string name;
    std::vector<double> auucs;  // per repetition, full ensemble
    double mean = 0.0, sd = 0.0, se = 0.0;
    bool has_balance = false;
    double balance_diag_max = 0.0;  // max over repetitions
    std::vector<CheckpointStat> series;
    UpliftCurve last_curve;  // from the final repetition
};

struct ExperimentReport {
    int repetitions = 0;
    double train_fraction = 0.8;
    std::uint64_t master_seed = 0;
    std::vector<int> checkpoints;
    std::vector<AlgorithmResult> algorithms;  // configured entries + base_01 + base_score
};

namespace detail {

struct Moments {
    double mean = 0.0, sd = 0.0, se = 0.0;
};

inline Moments moments(const std::vector<double>& v) {
    Moments m;
    if (v.empty()) return m;
    double sum = 0.0;
    for (double x : v) sum += x;
    m.mean = sum / static_cast<double>(v.size());
    if (v.size() > 1) {
        double ss = 0.0;
        for (double x : v) ss += (x - m.mean) * (x - m.mean);
        m.sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
        m.se = m.sd / std::sqrt(static_cast<double>(v.size()));
    }
    return m;
}

// Cumulative-score curves of one ensemble at the requested prefix sizes.
inline std::vector<std::pair<int, UpliftCurve>> checkpoint_curves(
    const BoostingEnsemble& e, const std::vector<Record>& t_recs,
    const std::vector<Record>& c_recs, const std::vector<int>& checkpoints) {
    std::vector<int> sizes;
    for (int k : checkpoints)
        if (k >= 1 && static_cast<std::size_t>(k) <= e.members.size()) sizes.push_back(k);

    std::vector<double> log_w(e.members.size());
    for (std::size_t m = 0; m < e.members.size(); ++m)
        log_w[m] = std::log(1.0 / e.members[m].beta);

    auto prefix_scores = [&](const std::vector<Record>& recs) {
        // scores[s][i]: record i's score with the first sizes[s] members
        std::vector<std::vector<double>> scores(sizes.size(),
                                                std::vector<double>(recs.size(), 0.0));
        for (std::size_t i = 0; i < recs.size(); ++i) {
            double acc = 0.0;
            std::size_t si = 0;
            for (std::size_t m = 0; m < e.members.size() && si < sizes.size(); ++m) {
                if (e.members[m].tree.predict(recs[i]) == 1) acc += log_w[m];
                while (si < sizes.size() && static_cast<std::size_t>(sizes[si]) == m + 1) {
                    scores[si][i] = acc;
                    ++si;
                }
            }
        }
        return scores;
    };
    const auto ts = prefix_scores(t_recs);
    const auto cs = prefix_scores(c_recs);

    std::vector<std::pair<int, UpliftCurve>> out;
    for (std::size_t s = 0; s < sizes.size(); ++s) {
        ScoredGroup tg, cg;
        tg.records.reserve(t_recs.size());
        for (std::size_t i = 0; i < t_recs.size(); ++i)
            tg.records.push_back({ts[s][i], t_recs[i].outcome});
        cg.records.reserve(c_recs.size());
        for (std::size_t i = 0; i < c_recs.size(); ++i)
            cg.records.push_back({cs[s][i], c_recs[i].outcome});
        out.emplace_back(sizes[s], uplift_curve(tg, cg));
    }
    return out;
}

struct RepResult {
    // index-aligned with cfg.algorithms, then base_01 and base_score appended
    std::vector<double> full_auuc;
    std::vector<std::vector<std::pair<int, double>>> checkpoint_auuc;
    std::vector<double> balance;  // NaN when the entry records no history
    std::vector<UpliftCurve> curves;  // filled only for the final repetition
};

}  // namespace detail

// Seed derivation: rep_seed = derive(master_seed, r); the split uses
// derive(rep_seed, 0) and algorithm a uses derive(rep_seed, a + 1).
// Repetitions are independent and may run on `jobs` worker threads; results
// are keyed by repetition index, so the report does not depend on the worker
// count.
inline ExperimentReport run_experiment(const UpliftDataset& d, const ExperimentConfig& cfg) {
    if (cfg.repetitions < 1) throw EvalError("run_experiment: repetitions must be >= 1");
    if (cfg.algorithms.empty()) throw EvalError("run_experiment: no algorithms given");

    const std::size_t n_algos = cfg.algorithms.size();
    const std::size_t n_entries = n_algos + 2;  // + base_01, base_score
    const int last_rep = cfg.repetitions - 1;

    std::vector<detail::RepResult> results(static_cast<std::size_t>(cfg.repetitions));

    auto evaluate_rep = [&](int r) {
        const std::uint64_t rep_seed = Rng::derive(cfg.master_seed, static_cast<std::uint64_t>(r));
        auto [train, test] = split_train_test(d, cfg.train_fraction, Rng::derive(rep_seed, 0));

        detail::RepResult res;
        res.full_auuc.resize(n_entries);
        res.checkpoint_auuc.resize(n_entries);
        res.balance.assign(n_entries, std::numeric_limits<double>::quiet_NaN());
        if (r == last_rep) res.curves.resize(n_entries);

        for (std::size_t a = 0; a < n_algos; ++a) {
            BoostConfig bc = cfg.algorithms[a].config;
            bc.seed = Rng::derive(rep_seed, a + 1);
            const BoostingEnsemble ens = fit_boosting(train, bc);

            const UpliftCurve full =
                uplift_curve(ensemble_scores(ens, test.treatment), ensemble_scores(ens, test.control));
            res.full_auuc[a] = full.auuc;
            for (const auto& [size, curve] :
                 detail::checkpoint_curves(ens, test.treatment, test.control, cfg.checkpoints))
                res.checkpoint_auuc[a].emplace_back(size, curve.auuc);
            if (!ens.history.empty()) res.balance[a] = balance_diagnostic(ens.history);
            if (r == last_rep) res.curves[a] = full;
        }

        const std::vector<double> wt(train.n_treatment(), 1.0), wc(train.n_control(), 1.0);
        const UpliftTree base = fit_tree(train, wt, wc, cfg.base_tree);
        const UpliftCurve c01 = uplift_curve(tree_decision_scores(base, test.treatment),
                                             tree_decision_scores(base, test.control));
        const UpliftCurve csc = uplift_curve(tree_uplift_scores(base, test.treatment),
                                             tree_uplift_scores(base, test.control));
        res.full_auuc[n_algos] = c01.auuc;
        res.full_auuc[n_algos + 1] = csc.auuc;
        if (r == last_rep) {
            res.curves[n_algos] = c01;
            res.curves[n_algos + 1] = csc;
        }
        results[static_cast<std::size_t>(r)] = std::move(res);
    };

    if (cfg.jobs <= 1) {
        for (int r = 0; r < cfg.repetitions; ++r) {
            try {
                evaluate_rep(r);
            } catch (const Error& e) {
                throw EvalError("repetition " + std::to_string(r) + ": " + e.what());
            }
        }
    } else {
        std::atomic<int> next{0};
        std::mutex fail_mutex;
        std::map<int, std::string> failures;
        auto worker = [&] {
            for (;;) {
                const int r = next.fetch_add(1);
                if (r >= cfg.repetitions) return;
                try {
                    evaluate_rep(r);
                } catch (const Error& e) {
                    std::lock_guard<std::mutex> lock(fail_mutex);
                    failures.emplace(r, e.what());
                } catch (const std::exception& e) {
                    std::lock_guard<std::mutex> lock(fail_mutex);
                    failures.emplace(r, e.what());
                }
            }
        };
        std::vector<std::thread> threads;
        const int n_threads = std::min(cfg.jobs, cfg.repetitions);
        threads.reserve(static_cast<std::size_t>(n_threads));
        for (int i = 0; i < n_threads; ++i) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
        if (!failures.empty())
            throw EvalError("repetition " + std::to_string(failures.begin()->first) + ": " +
                            failures.begin()->second);
    }

    // aggregate
    ExperimentReport report;
    report.repetitions = cfg.repetitions;
    report.train_fraction = cfg.train_fraction;
    report.master_seed = cfg.master_seed;
    report.checkpoints = cfg.checkpoints;

    for (std::size_t a = 0; a < n_entries; ++a) {
        AlgorithmResult ar;
        ar.name = a < n_algos ? cfg.algorithms[a].name : (a == n_algos ? "base_01" : "base_score");
        for (const auto& res : results) ar.auucs.push_back(res.full_auuc[a]);
        const auto m = detail::moments(ar.auucs);
        ar.mean = m.mean;
        ar.sd = m.sd;
        ar.se = m.se;

        std::map<int, std::vector<double>> by_size;
        for (const auto& res : results)
            for (const auto& [size, value] : res.checkpoint_auuc[a]) by_size[size].push_back(value);
        for (auto& [size, values] : by_size) {
            CheckpointStat cs;
            cs.size = size;
            cs.count = static_cast<int>(values.size());
            const auto cm = detail::moments(values);
            cs.mean = cm.mean;
            cs.sd = cm.sd;
            cs.se = cm.se;
            cs.values = std::move(values);
            ar.series.push_back(std::move(cs));
        }

        for (const auto& res : results) {
            const double b = res.balance[a];
            if (!std::isnan(b)) {
                ar.balance_diag_max = ar.has_balance ? std::max(ar.balance_diag_max, b) : b;
                ar.has_balance = true;
            }
        }
        ar.last_curve = results.back().curves.empty() ? UpliftCurve{} : results.back().curves[a];
        report.algorithms.push_back(std::move(ar));
    }
    return report;
}

// ---------------------------------------------------------------------------
// exports
// ---------------------------------------------------------------------------

inline nlohmann::json report_to_json(const ExperimentReport& r) {
    nlohmann::json j;
    j["format"] = "uplift-report-v1";
    j["repetitions"] = r.repetitions;
    j["train_fraction"] = r.train_fraction;
    j["master_seed"] = r.master_seed;
    j["checkpoints"] = r.checkpoints;
    nlohmann::json algos = nlohmann::json::array();
    for (const auto& a : r.algorithms) {
        nlohmann::json aj;
        aj["name"] = a.name;
        aj["mean_auuc"] = a.mean;
        aj["sd"] = a.sd;
        aj["se"] = a.se;
        aj["repetitions"] = static_cast<int>(a.auucs.size());
        if (a.has_balance) aj["balance_diagnostic_max"] = a.balance_diag_max;
        aj["per_repetition_auuc"] = a.auucs;
        nlohmann::json series = nlohmann::json::array();
        for (const auto& cs : a.series) {
            nlohmann::json sj;
            sj["size"] = cs.size;
            sj["count"] = cs.count;
            sj["mean_auuc"] = cs.mean;
            sj["sd"] = cs.sd;
            sj["se"] = cs.se;
            series.push_back(std::move(sj));
        }
        aj["by_ensemble_size"] = std::move(series);
        algos.push_back(std::move(aj));
    }
    j["algorithms"] = std::move(algos);
    return j;
}

inline void write_curve_csv(const UpliftCurve& c, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw EvalError("write_curve_csv: cannot open '" + path + "' for writing");
    out << "fraction,net_gain_pct\n";
    for (const auto& p : c.points)
        out << format_double(p.fraction) << ',' << format_double(p.net_gain_pct) << '\n';
}

}  // namespace uplift
