#pragma once

#include "uplift/common.hpp"
#include "uplift/dataset.hpp"
#include "uplift/tree.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace uplift {

enum class Variant { adaboost, balanced, balanced_forgetting, bagging };

inline std::string to_string(Variant v) {
    switch (v) {
        case Variant::adaboost: return "adaboost";
        case Variant::balanced: return "balanced";
        case Variant::balanced_forgetting: return "balanced_forgetting";
        case Variant::bagging: return "bagging";
    }
    return "?";
}

inline Variant variant_from_string(const std::string& s) {
    if (s == "adaboost") return Variant::adaboost;
    if (s == "balanced") return Variant::balanced;
    if (s == "balanced_forgetting") return Variant::balanced_forgetting;
    if (s == "bagging") return Variant::bagging;
    throw ConfigError("unknown variant '" + s + "'");
}

// ---------------------------------------------------------------------------
// weight state
// ---------------------------------------------------------------------------

struct WeightState {
    std::vector<double> wt;  // per treatment record, all > 0
    std::vector<double> wc;  // per control record, all > 0

    double sum_t() const {
        double s = 0.0;
        for (double w : wt) s += w;
        return s;
    }
    double sum_c() const {
        double s = 0.0;
        for (double w : wc) s += w;
        return s;
    }
    double p_t() const {
        const double st = sum_t();
        return st / (st + sum_c());
    }
    double p_c() const { return 1.0 - p_t(); }

    // total weight across both groups -> 1
    void normalize() {
        const double total = sum_t() + sum_c();
        for (double& w : wt) w /= total;
        for (double& w : wc) w /= total;
    }
};

// Per-variant initialization: uplift AdaBoost starts from unit weights, the
// balanced variants from 1/N per group so both group totals are equal.
inline WeightState init_weights(Variant v, std::size_t n_treatment, std::size_t n_control) {
    if (n_treatment == 0 || n_control == 0)
        throw ValidationError("init_weights: both groups must be nonempty");
    WeightState s;
    const bool balanced = v == Variant::balanced || v == Variant::balanced_forgetting;
    s.wt.assign(n_treatment, balanced ? 1.0 / static_cast<double>(n_treatment) : 1.0);
    s.wc.assign(n_control, balanced ? 1.0 / static_cast<double>(n_control) : 1.0);
    return s;
}

// ---------------------------------------------------------------------------
// uplift error
// ---------------------------------------------------------------------------

// A treatment record is correct when h(x) = y, a control record when
// h(x) = 1 - y.
struct Correctness {
    std::vector<char> treatment;
    std::vector<char> control;
};

inline Correctness uplift_correctness(const UpliftTree& h, const UpliftDataset& d) {
    Correctness c;
    c.treatment.reserve(d.n_treatment());
    for (const Record& r : d.treatment) c.treatment.push_back(h.predict(r) == r.outcome);
    c.control.reserve(d.n_control());
    for (const Record& r : d.control) c.control.push_back(h.predict(r) == 1 - r.outcome);
    return c;
}

struct ErrorRates {
    double eps_t = 0.0;
    double eps_c = 0.0;
    double eps = 0.0;  // p_t * eps_t + p_c * eps_c
};

inline ErrorRates error_rates_from(const Correctness& corr, const WeightState& s) {
    double wrong_t = 0.0, wrong_c = 0.0;
    for (std::size_t i = 0; i < s.wt.size(); ++i)
        if (!corr.treatment[i]) wrong_t += s.wt[i];
    for (std::size_t i = 0; i < s.wc.size(); ++i)
        if (!corr.control[i]) wrong_c += s.wc[i];
    const double st = s.sum_t(), sc = s.sum_c();
    ErrorRates e;
    e.eps_t = wrong_t / st;
    e.eps_c = wrong_c / sc;
    const double p_t = st / (st + sc);
    e.eps = p_t * e.eps_t + (1.0 - p_t) * e.eps_c;
    return e;
}

inline ErrorRates compute_errors(const UpliftTree& h, const WeightState& s,
                                 const UpliftDataset& d) {
    return error_rates_from(uplift_correctness(h, d), s);
}

// ---------------------------------------------------------------------------
// coefficient schemes
// ---------------------------------------------------------------------------

struct Coefficients {
    double beta_t = 1.0;
    double beta_c = 1.0;
    double beta = 1.0;  // model weight, min{beta_t, beta_c}
    bool restart = false;
};

// epsilon treated as outside (0, 1/2) when within tol of an endpoint
inline bool outside_open_half(double eps, double tol) {
    return eps <= tol || eps >= 0.5 - tol;
}

// beta_t = beta_c = beta = eps / (1 - eps) with the combined uplift error;
// signals a restart when the combined error leaves (0, 1/2).
inline Coefficients coefficients_adaboost(double eps_t, double eps_c, double p_t, double p_c,
                                          double tol = 1e-12) {
    const double eps = p_t * eps_t + p_c * eps_c;
    if (outside_open_half(eps, tol)) return {1.0, 1.0, 1.0, true};
    const double beta = eps / (1.0 - eps);
    return {beta, beta, beta, false};
}

// beta_t that keeps the group totals equal given beta_c (treatment total update
// must equal the control total update).
inline double balance_beta_t(double eps_t, double eps_c, double beta_c) {
    const double a = (1.0 - eps_c) / (1.0 - eps_t);
    const double b = (eps_c - eps_t) / (1.0 - eps_t);
    return a * beta_c + b;
}

// Minimizer of the per-iteration bound under the balance constraint: the error
// closer to 1/2 is reweighted with the classical eps/(1-eps) factor and the
// other group follows from the balance equation.  When the errors straddle 1/2
// (or touch it) the minimum is at beta = 1, which signals a restart.
inline Coefficients coefficients_balanced(double eps_t, double eps_c, double p_t = 0.5,
                                          double tol = 1e-12) {
    if (std::abs(p_t - 0.5) > 1e-9)
        throw FitError("coefficients_balanced: balance violated (p_t = " + std::to_string(p_t) +
                       ")");
    if (eps_t <= tol || eps_t >= 1.0 - tol || eps_c <= tol || eps_c >= 1.0 - tol)
        return {1.0, 1.0, 1.0, true};
    if (std::abs(eps_t - 0.5) <= tol || std::abs(eps_c - 0.5) <= tol)
        return {1.0, 1.0, 1.0, true};
    const bool t_low = eps_t < 0.5, c_low = eps_c < 0.5;
    if (t_low != c_low) return {1.0, 1.0, 1.0, true};

    double beta_c;
    if (std::abs(0.5 - eps_t) < std::abs(0.5 - eps_c)) {
        beta_c = (2.0 * eps_t - eps_c) / (1.0 - eps_c);
    } else {
        beta_c = eps_c / (1.0 - eps_c);
    }
    const double beta_t = balance_beta_t(eps_t, eps_c, beta_c);
    return {beta_t, beta_c, std::min(beta_t, beta_c), false};
}

// beta_t = eps_c / (1 - eps_t), beta_c = eps_t / (1 - eps_c): keeps balance and
// makes the just-added member's combined error exactly 1/2 under the new
// weights.  No bound-decrease guarantee.
inline Coefficients coefficients_balanced_forgetting(double eps_t, double eps_c,
                                                     double tol = 1e-12) {
    if (eps_t <= tol || eps_t >= 1.0 - tol || eps_c <= tol || eps_c >= 1.0 - tol)
        return {1.0, 1.0, 1.0, true};
    const double beta_t = eps_c / (1.0 - eps_t);
    const double beta_c = eps_t / (1.0 - eps_c);
    return {beta_t, beta_c, std::min(beta_t, beta_c), false};
}

// ---------------------------------------------------------------------------
// weight updates
// ---------------------------------------------------------------------------

// Correctly classified records (uplift sense) are multiplied by the group's
// beta; afterwards all weights are normalized to total 1.
inline void update_weights(WeightState& s, const Correctness& corr, double beta_t,
                           double beta_c) {
    for (std::size_t i = 0; i < s.wt.size(); ++i)
        if (corr.treatment[i]) s.wt[i] *= beta_t;
    for (std::size_t i = 0; i < s.wc.size(); ++i)
        if (corr.control[i]) s.wc[i] *= beta_c;
    s.normalize();
}

// Fresh i.i.d. Exponential(1) weights from the run's stream (treatment records
// first, then control).  With rebalance_groups each group is renormalized to
// total 1/2, preserving the balance condition across the restart; otherwise
// the whole vector is normalized to total 1.
inline void restart_weights(WeightState& s, Rng& rng, bool rebalance_groups = false) {
    for (double& w : s.wt) w = rng.exponential();
    for (double& w : s.wc) w = rng.exponential();
    if (rebalance_groups) {
        const double st = s.sum_t(), sc = s.sum_c();
        for (double& w : s.wt) w *= 0.5 / st;
        for (double& w : s.wc) w *= 0.5 / sc;
    } else {
        s.normalize();
    }
}

// ---------------------------------------------------------------------------
// ensembles
// ---------------------------------------------------------------------------

struct IterationRecord {
    int iteration = 0;  // 1-based loop index
    double eps_t = 0.0, eps_c = 0.0, eps = 0.0;
    double beta_t = 1.0, beta_c = 1.0, beta = 1.0;
    double p_t = 0.5, p_c = 0.5;  // at iteration start, after normalization
    bool restarted = false;
};

struct BoostConfig {
    Variant variant = Variant::adaboost;
    int iterations = 50;  // M
    TreeConfig tree;
    std::uint64_t seed = 0;
    double tolerance = 1e-12;  // boundary tolerance for the restart conditions
};

struct EnsembleMember {
    UpliftTree tree;
    double beta = 0.0;  // in (0, 1) for every retained member
};

struct BoostingEnsemble {
    Variant variant = Variant::adaboost;
    std::vector<EnsembleMember> members;
    std::vector<IterationRecord> history;  // includes restarted iterations, flagged

    static constexpr std::size_t all_members = std::numeric_limits<std::size_t>::max();

    // s(x) = sum log(1/beta_m) h_m(x) over the first k members
    double score(const Record& r, std::size_t k = all_members) const {
        if (members.empty()) throw UsageError("ensemble has no members");
        k = std::min(k, members.size());
        double s = 0.0;
        for (std::size_t m = 0; m < k; ++m)
            if (members[m].tree.predict(r) == 1) s += std::log(1.0 / members[m].beta);
        return s;
    }

    double score_threshold(std::size_t k = all_members) const {
        if (members.empty()) throw UsageError("ensemble has no members");
        k = std::min(k, members.size());
        double s = 0.0;
        for (std::size_t m = 0; m < k; ++m) s += std::log(1.0 / members[m].beta);
        return 0.5 * s;
    }

    // 1 iff s(x) >= (1/2) sum log(1/beta_m)
    int decide(const Record& r, std::size_t k = all_members) const {
        return score(r, k) >= score_threshold(k) ? 1 : 0;
    }
};

// ---------------------------------------------------------------------------
// diagnostics
// ---------------------------------------------------------------------------

// [1 - p^T (1-eps^T)(1-beta^T) - p^C (1-eps^C)(1-beta^C)] / sqrt(beta)
inline double iteration_bound_factor(const IterationRecord& r) {
    const double num = 1.0 - r.p_t * (1.0 - r.eps_t) * (1.0 - r.beta_t) -
                       r.p_c * (1.0 - r.eps_c) * (1.0 - r.beta_c);
    return num / std::sqrt(r.beta);
}

// Running product of the per-iteration factors over non-restarted iterations;
// an upper bound on the training error of the final hypothesis.
inline double error_bound(const std::vector<IterationRecord>& history) {
    double prod = 1.0;
    for (const auto& r : history)
        if (!r.restarted) prod *= iteration_bound_factor(r);
    return prod;
}

// max over iterations of max{p^T/p^C, p^C/p^T}
inline double balance_diagnostic(const std::vector<IterationRecord>& history) {
    if (history.empty()) throw UsageError("balance_diagnostic: empty history");
    double worst = 0.0;
    for (const auto& r : history)
        worst = std::max(worst, std::max(r.p_t / r.p_c, r.p_c / r.p_t));
    return worst;
}

// Training error of the (possibly truncated) final hypothesis under the
// initial-weight convention: uniform within each group, group shares p_1 taken
// from the variant's weight initialization.
inline double training_uplift_error(const BoostingEnsemble& e, const UpliftDataset& d,
                                    std::size_t first_k = BoostingEnsemble::all_members) {
    std::size_t wrong_t = 0, wrong_c = 0;
    for (const Record& r : d.treatment)
        if (e.decide(r, first_k) != r.outcome) ++wrong_t;
    for (const Record& r : d.control)
        if (e.decide(r, first_k) != 1 - r.outcome) ++wrong_c;
    const auto nt = static_cast<double>(d.n_treatment());
    const auto nc = static_cast<double>(d.n_control());
    const bool balanced =
        e.variant == Variant::balanced || e.variant == Variant::balanced_forgetting;
    const double p_t = balanced ? 0.5 : nt / (nt + nc);
    return p_t * (static_cast<double>(wrong_t) / nt) +
           (1.0 - p_t) * (static_cast<double>(wrong_c) / nc);
}

// ---------------------------------------------------------------------------
// fitting
// ---------------------------------------------------------------------------

// Optional per-iteration weight capture for invariant checks.
struct BoostingTrace {
    struct Step {
        bool restarted = false;
        std::vector<double> wt_start, wc_start;  // after normalization, before the fit
        std::vector<double> wt_next, wc_next;    // after the update (retained iterations only)
    };
    std::vector<Step> steps;
};

BoostingEnsemble fit_bagging(const UpliftDataset& train, const BoostConfig& cfg);

// The boosting loop.  For m = 1..M: normalize weights, fit a tree on the
// weighted data, compute the uplift errors, compute the variant's
// coefficients, then either restart (random exponential weights; the
// iteration is consumed and no member is added) or rescale the correctly
// classified records and add the member with beta_m = min{beta^T, beta^C}.
// The run's Rng is consumed only by restarts, in iteration order.
inline BoostingEnsemble fit_boosting(const UpliftDataset& train, const BoostConfig& cfg,
                                     BoostingTrace* trace = nullptr) {
    if (cfg.iterations < 1) throw ConfigError("fit_boosting: iterations must be >= 1");
    train.validate();
    if (cfg.variant == Variant::bagging) return fit_bagging(train, cfg);

    const bool keep_balance =
        cfg.variant == Variant::balanced || cfg.variant == Variant::balanced_forgetting;
    const double tol = cfg.tolerance;

    WeightState state = init_weights(cfg.variant, train.n_treatment(), train.n_control());
    Rng rng(cfg.seed);

    BoostingEnsemble out;
    out.variant = cfg.variant;

    for (int m = 1; m <= cfg.iterations; ++m) {
        state.normalize();
        const double p_t = state.p_t();
        const double p_c = 1.0 - p_t;

        UpliftTree h = fit_tree(train, state.wt, state.wc, cfg.tree);
        const Correctness corr = uplift_correctness(h, train);
        const ErrorRates e = error_rates_from(corr, state);

        IterationRecord rec;
        rec.iteration = m;
        rec.eps_t = e.eps_t;
        rec.eps_c = e.eps_c;
        rec.eps = e.eps;
        rec.p_t = p_t;
        rec.p_c = p_c;

        Coefficients k{1.0, 1.0, 1.0, true};
        const bool eps_out = outside_open_half(e.eps_t, tol) || outside_open_half(e.eps_c, tol);
        if (!eps_out) {
            switch (cfg.variant) {
                case Variant::adaboost:
                    k = coefficients_adaboost(e.eps_t, e.eps_c, p_t, p_c, tol);
                    break;
                case Variant::balanced:
                    k = coefficients_balanced(e.eps_t, e.eps_c, p_t, tol);
                    break;
                case Variant::balanced_forgetting:
                    k = coefficients_balanced_forgetting(e.eps_t, e.eps_c, tol);
                    break;
                case Variant::bagging: break;  // handled above
            }
        }
        const bool unit_betas = std::abs(k.beta_t - 1.0) <= tol && std::abs(k.beta_c - 1.0) <= tol;

        if (eps_out || k.restart || unit_betas) {
            rec.restarted = true;
            out.history.push_back(rec);
            if (trace) trace->steps.push_back({true, state.wt, state.wc, {}, {}});
            restart_weights(state, rng, keep_balance);
            continue;
        }

        rec.beta_t = k.beta_t;
        rec.beta_c = k.beta_c;
        rec.beta = k.beta;
        BoostingTrace::Step step;
        if (trace) {
            step.wt_start = state.wt;
            step.wc_start = state.wc;
        }
        update_weights(state, corr, k.beta_t, k.beta_c);
        if (trace) {
            step.wt_next = state.wt;
            step.wc_next = state.wc;
            trace->steps.push_back(std::move(step));
        }
        out.history.push_back(rec);
        out.members.push_back({std::move(h), k.beta});
    }

    if (out.members.empty())
        throw FitError("fit_boosting: every iteration restarted, no members retained");
    return out;
}

// Verification twin of the adaboost variant: classical discrete AdaBoost run
// on the merged dataset with control labels flipped (class variable
// transformation).  The merged order is all treatment records followed by all
// control records so restart draws line up with fit_boosting.  Shares the base
// learner; the error/update bookkeeping is written in the merged frame.
inline BoostingEnsemble adaboost_cvt_oracle(const UpliftDataset& train, const BoostConfig& cfg) {
    if (cfg.iterations < 1) throw ConfigError("adaboost_cvt_oracle: iterations must be >= 1");
    train.validate();
    const double tol = cfg.tolerance;
    const std::size_t nt = train.n_treatment();
    const std::size_t nc = train.n_control();
    const std::size_t n = nt + nc;

    std::vector<int> z(n);  // transformed labels
    for (std::size_t i = 0; i < nt; ++i) z[i] = train.treatment[i].outcome;
    for (std::size_t i = 0; i < nc; ++i) z[nt + i] = 1 - train.control[i].outcome;

    std::vector<double> w(n, 1.0);
    Rng rng(cfg.seed);

    BoostingEnsemble out;
    out.variant = Variant::adaboost;

    for (int m = 1; m <= cfg.iterations; ++m) {
        double total = 0.0;
        for (double x : w) total += x;
        for (double& x : w) x /= total;

        const std::vector<double> wt(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(nt));
        const std::vector<double> wc(w.begin() + static_cast<std::ptrdiff_t>(nt), w.end());
        UpliftTree h = fit_tree(train, wt, wc, cfg.tree);

        std::vector<char> correct(n);
        for (std::size_t i = 0; i < nt; ++i) correct[i] = h.predict(train.treatment[i]) == z[i];
        for (std::size_t i = 0; i < nc; ++i)
            correct[nt + i] = h.predict(train.control[i]) == z[nt + i];

        double werr = 0.0, werr_t = 0.0, werr_c = 0.0, wsum_t = 0.0, wsum_c = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            (i < nt ? wsum_t : wsum_c) += w[i];
            if (!correct[i]) {
                werr += w[i];
                (i < nt ? werr_t : werr_c) += w[i];
            }
        }
        const double eps = werr / (wsum_t + wsum_c);
        const double eps_t = werr_t / wsum_t;
        const double eps_c = werr_c / wsum_c;

        IterationRecord rec;
        rec.iteration = m;
        rec.eps_t = eps_t;
        rec.eps_c = eps_c;
        rec.eps = eps;
        rec.p_t = wsum_t / (wsum_t + wsum_c);
        rec.p_c = 1.0 - rec.p_t;

        if (outside_open_half(eps_t, tol) || outside_open_half(eps_c, tol) ||
            outside_open_half(eps, tol)) {
            rec.restarted = true;
            out.history.push_back(rec);
            for (double& x : w) x = rng.exponential();
            double t2 = 0.0;
            for (double x : w) t2 += x;
            for (double& x : w) x /= t2;
            continue;
        }

        const double beta = eps / (1.0 - eps);
        for (std::size_t i = 0; i < n; ++i)
            if (correct[i]) w[i] *= beta;

        rec.beta_t = rec.beta_c = rec.beta = beta;
        out.history.push_back(rec);
        out.members.push_back({std::move(h), beta});
    }

    if (out.members.empty())
        throw FitError("adaboost_cvt_oracle: every iteration restarted, no members retained");
    return out;
}

// Bagging baseline: each member is fit with unit weights on independent
// per-group bootstrap resamples.  All members carry beta = 1/e so every vote
// has weight log(1/beta) = 1 and the score is the vote count.
inline BoostingEnsemble fit_bagging(const UpliftDataset& train, const BoostConfig& cfg) {
    if (cfg.iterations < 1) throw ConfigError("fit_bagging: iterations must be >= 1");
    train.validate();
    const std::size_t nt = train.n_treatment();
    const std::size_t nc = train.n_control();
    Rng rng(cfg.seed);  // per member: nt treatment index draws, then nc control

    BoostingEnsemble out;
    out.variant = Variant::bagging;
    const double beta = std::exp(-1.0);

    for (int m = 1; m <= cfg.iterations; ++m) {
        UpliftDataset boot;
        boot.schema = train.schema;
        boot.treatment.reserve(nt);
        for (std::size_t i = 0; i < nt; ++i) boot.treatment.push_back(train.treatment[rng.index(nt)]);
        boot.control.reserve(nc);
        for (std::size_t i = 0; i < nc; ++i) boot.control.push_back(train.control[rng.index(nc)]);

        const std::vector<double> wt(nt, 1.0), wc(nc, 1.0);
        out.members.push_back({fit_tree(boot, wt, wc, cfg.tree), beta});
    }
    return out;
}

// ---------------------------------------------------------------------------
// serialization
// ---------------------------------------------------------------------------

inline nlohmann::json schema_to_json(const Schema& schema) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& f : schema.features) {
        nlohmann::json j;
        j["name"] = f.name;
        j["kind"] = f.kind == FeatureKind::numeric ? "numeric" : "categorical";
        if (f.kind == FeatureKind::categorical) j["labels"] = f.labels;
        arr.push_back(std::move(j));
    }
    return arr;
}

inline Schema schema_from_json(const nlohmann::json& arr) {
    Schema s;
    for (const auto& j : arr) {
        FeatureInfo f;
        f.name = j.at("name").get<std::string>();
        const std::string kind = j.at("kind").get<std::string>();
        if (kind == "numeric") f.kind = FeatureKind::numeric;
        else if (kind == "categorical") f.kind = FeatureKind::categorical;
        else throw SchemaError("schema_from_json: unknown kind '" + kind + "'");
        if (j.contains("labels")) f.labels = j.at("labels").get<std::vector<std::string>>();
        s.features.push_back(std::move(f));
    }
    return s;
}

inline nlohmann::json ensemble_to_json(const BoostingEnsemble& e, const Schema& schema) {
    nlohmann::json j;
    j["format"] = "uplift-ensemble-v1";
    j["variant"] = to_string(e.variant);
    j["feature_schema"] = schema_to_json(schema);
    nlohmann::json members = nlohmann::json::array();
    for (const auto& m : e.members) {
        nlohmann::json mj;
        mj["beta"] = m.beta;
        mj["tree"] = tree_to_json(m.tree, schema);
        members.push_back(std::move(mj));
    }
    j["members"] = std::move(members);
    nlohmann::json hist = nlohmann::json::array();
    for (const auto& r : e.history) {
        nlohmann::json hj;
        hj["iteration"] = r.iteration;
        hj["eps_t"] = r.eps_t;
        hj["eps_c"] = r.eps_c;
        hj["eps"] = r.eps;
        hj["beta_t"] = r.beta_t;
        hj["beta_c"] = r.beta_c;
        hj["beta"] = r.beta;
        hj["p_t"] = r.p_t;
        hj["p_c"] = r.p_c;
        hj["restarted"] = r.restarted;
        hist.push_back(std::move(hj));
    }
    j["history"] = std::move(hist);
    return j;
}

inline BoostingEnsemble ensemble_from_json(const nlohmann::json& j, Schema& schema_out) {
    if (j.value("format", "") != "uplift-ensemble-v1")
        throw SchemaError("ensemble_from_json: unrecognized format tag");
    schema_out = schema_from_json(j.at("feature_schema"));
    BoostingEnsemble e;
    e.variant = variant_from_string(j.at("variant").get<std::string>());
    for (const auto& mj : j.at("members"))
        e.members.push_back({tree_from_json(mj.at("tree"), schema_out), mj.at("beta").get<double>()});
    for (const auto& hj : j.at("history")) {
        IterationRecord r;
        r.iteration = hj.at("iteration").get<int>();
        r.eps_t = hj.at("eps_t").get<double>();
        r.eps_c = hj.at("eps_c").get<double>();
        r.eps = hj.at("eps").get<double>();
        r.beta_t = hj.at("beta_t").get<double>();
        r.beta_c = hj.at("beta_c").get<double>();
        r.beta = hj.at("beta").get<double>();
        r.p_t = hj.at("p_t").get<double>();
        r.p_c = hj.at("p_c").get<double>();
        r.restarted = hj.at("restarted").get<bool>();
        e.history.push_back(r);
    }
    return e;
}

}  // namespace uplift
