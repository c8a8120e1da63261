#pragma once

#include "uplift/common.hpp"
#include "uplift/dataset.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace uplift {

// Ground-truth generator: features are i.i.d. Uniform(-1, 1); control outcomes
// are Bernoulli(base_rate) and treatment outcomes Bernoulli(clamp(base_rate +
// u(x), 0, 1)), where u(x) is a first-match-wins piecewise rule list.

struct UpliftRule {
    int feature = 0;
    enum class Op { gt, ge, lt, le } op = Op::gt;
    double threshold = 0.0;
    double uplift = 0.0;

    bool matches(const std::vector<double>& x) const {
        const double v = x[static_cast<std::size_t>(feature)];
        switch (op) {
            case Op::gt: return v > threshold;
            case Op::ge: return v >= threshold;
            case Op::lt: return v < threshold;
            case Op::le: return v <= threshold;
        }
        return false;
    }
};

struct SyntheticSpec {
    std::size_t n_treatment = 0;
    std::size_t n_control = 0;
    int n_features = 1;
    double base_rate = 0.5;  // success probability in the control group
    std::vector<UpliftRule> rules;
    double default_uplift = 0.0;
    std::uint64_t seed = 0;

    void validate() const {
        if (n_treatment == 0) throw ValidationError("synthetic spec: n_treatment must be >= 1");
        if (n_control == 0) throw ValidationError("synthetic spec: n_control must be >= 1");
        if (n_features < 1) throw ValidationError("synthetic spec: n_features must be >= 1");
        if (!(base_rate > 0.0) || !(base_rate < 1.0))
            throw ValidationError("synthetic spec: p0 must lie in (0, 1)");
        for (const auto& r : rules)
            if (r.feature < 0 || r.feature >= n_features)
                throw ValidationError("synthetic spec: rule feature index out of range");
    }

    double uplift_at(const std::vector<double>& x) const {
        for (const auto& r : rules)
            if (r.matches(x)) return r.uplift;
        return default_uplift;
    }
};

inline UpliftRule::Op rule_op_from_string(const std::string& s) {
    if (s == ">") return UpliftRule::Op::gt;
    if (s == ">=") return UpliftRule::Op::ge;
    if (s == "<") return UpliftRule::Op::lt;
    if (s == "<=") return UpliftRule::Op::le;
    throw ValidationError("synthetic spec: unknown rule op '" + s + "'");
}

inline SyntheticSpec synthetic_spec_from_json(const nlohmann::json& j) {
    SyntheticSpec s;
    try {
        s.n_treatment = j.at("n_treatment").get<std::size_t>();
        s.n_control = j.at("n_control").get<std::size_t>();
        s.n_features = j.at("n_features").get<int>();
        s.base_rate = j.at("p0").get<double>();
        s.seed = j.at("seed").get<std::uint64_t>();
        s.default_uplift = j.value("default_uplift", 0.0);
        if (j.contains("rules")) {
            for (const auto& rj : j.at("rules")) {
                UpliftRule r;
                if (rj.at("feature").is_string()) {
                    const std::string name = rj.at("feature").get<std::string>();
                    // feature columns are named x1..xk
                    if (name.size() < 2 || name[0] != 'x')
                        throw ValidationError("synthetic spec: bad feature name '" + name + "'");
                    r.feature = std::stoi(name.substr(1)) - 1;
                } else {
                    r.feature = rj.at("feature").get<int>();
                }
                r.op = rule_op_from_string(rj.at("op").get<std::string>());
                r.threshold = rj.at("threshold").get<double>();
                r.uplift = rj.at("uplift").get<double>();
                s.rules.push_back(r);
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("synthetic spec: ") + e.what());
    }
    s.validate();
    return s;
}

inline UpliftDataset generate_synthetic(const SyntheticSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);  // draw order: treatment records first, then control;
                         // per record: features, then the outcome

    UpliftDataset ds;
    for (int f = 0; f < spec.n_features; ++f)
        ds.schema.features.push_back({"x" + std::to_string(f + 1), FeatureKind::numeric, {}});

    auto clamp01 = [](double p) { return p < 0.0 ? 0.0 : (p > 1.0 ? 1.0 : p); };

    auto make_record = [&](bool treated) {
        Record r;
        r.features.reserve(static_cast<std::size_t>(spec.n_features));
        for (int f = 0; f < spec.n_features; ++f) r.features.push_back(rng.uniform(-1.0, 1.0));
        const double p =
            treated ? clamp01(spec.base_rate + spec.uplift_at(r.features)) : spec.base_rate;
        r.outcome = rng.bernoulli(p) ? 1 : 0;
        return r;
    };

    ds.treatment.reserve(spec.n_treatment);
    for (std::size_t i = 0; i < spec.n_treatment; ++i) ds.treatment.push_back(make_record(true));
    ds.control.reserve(spec.n_control);
    for (std::size_t i = 0; i < spec.n_control; ++i) ds.control.push_back(make_record(false));
    return ds;
}

}  // namespace uplift
