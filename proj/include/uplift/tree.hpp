#pragma once

#include "uplift/common.hpp"
#include "uplift/dataset.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace uplift {

// ---------------------------------------------------------------------------
// class distributions and E-divergence
// ---------------------------------------------------------------------------

// Weighted relative frequencies over the binary outcome.  p0 + p1 == 1
// whenever total_weight > 0.
struct ClassDist {
    double p0 = 0.0;
    double p1 = 0.0;
    double total_weight = 0.0;

    static ClassDist from_weights(double w0, double w1) {
        ClassDist d;
        d.total_weight = w0 + w1;
        if (d.total_weight > 0.0) {
            d.p0 = w0 / d.total_weight;
            d.p1 = w1 / d.total_weight;
        }
        return d;
    }
};

// Squared Euclidean distance between the two class distributions.
inline double e_divergence(const ClassDist& a, const ClassDist& b) {
    if (!(a.total_weight > 0.0) || !(b.total_weight > 0.0))
        throw DistributionError("e_divergence: class distribution has zero total weight");
    const double d0 = a.p0 - b.p0;
    const double d1 = a.p1 - b.p1;
    return d0 * d0 + d1 * d1;
}

// ---------------------------------------------------------------------------
// splits
// ---------------------------------------------------------------------------

// Binary tests only; left child is the "test true" branch.  Records missing
// the tested feature follow missing_to_left, which is frozen at fit time as
// the side with the larger total weight among known-valued records.
struct Split {
    enum class Kind { numeric_threshold, categorical_one_vs_rest };

    Kind kind = Kind::numeric_threshold;
    int feature = 0;
    double threshold = 0.0;  // numeric: true iff value <= threshold
    int label = -1;          // categorical: true iff value == label id
    bool missing_to_left = true;

    bool test(const Record& r) const {
        const double v = r.features[static_cast<std::size_t>(feature)];
        if (is_missing(v)) return missing_to_left;
        if (kind == Kind::numeric_threshold) return v <= threshold;
        return static_cast<int>(v) == label;
    }
};

struct TreeConfig {
    int max_depth = 1;
    double min_leaf_weight = -1.0;  // < 0: resolved to 1e-6 of the total weight at fit time
    double penalty_factor = 1.0;    // divisor applied to every gain
};

// A node's worth of weighted training data: record indices into the dataset's
// group lists plus the full per-group weight vectors.
struct NodeData {
    const UpliftDataset* data = nullptr;
    std::vector<std::size_t> treatment;
    std::vector<std::size_t> control;
    const std::vector<double>* wt = nullptr;
    const std::vector<double>* wc = nullptr;
};

inline NodeData root_node(const UpliftDataset& d, const std::vector<double>& wt,
                          const std::vector<double>& wc) {
    NodeData nd;
    nd.data = &d;
    nd.wt = &wt;
    nd.wc = &wc;
    nd.treatment.resize(d.n_treatment());
    for (std::size_t i = 0; i < nd.treatment.size(); ++i) nd.treatment[i] = i;
    nd.control.resize(d.n_control());
    for (std::size_t i = 0; i < nd.control.size(); ++i) nd.control[i] = i;
    return nd;
}

namespace detail {

struct GroupAgg {
    double w = 0.0;   // total weight
    double w1 = 0.0;  // weight with outcome 1

    void add(double weight, int outcome) {
        w += weight;
        w1 += weight * outcome;
    }
};

struct SideAgg {
    GroupAgg t, c;

    double combined() const { return t.w + c.w; }

    SideAgg minus(const SideAgg& o) const {
        return {{t.w - o.t.w, t.w1 - o.t.w1}, {c.w - o.c.w, c.w1 - o.c.w1}};
    }
    void add(const SideAgg& o) {
        t.w += o.t.w;
        t.w1 += o.t.w1;
        c.w += o.c.w;
        c.w1 += o.c.w1;
    }
};

inline ClassDist dist_of(const GroupAgg& g) { return ClassDist::from_weights(g.w - g.w1, g.w1); }

inline bool side_valid(const SideAgg& s, double min_child_weight) {
    return s.t.w > 0.0 && s.c.w > 0.0 && s.t.w >= min_child_weight && s.c.w >= min_child_weight;
}

inline SideAgg node_aggregates(const NodeData& nd) {
    SideAgg agg;
    for (std::size_t i : nd.treatment)
        agg.t.add((*nd.wt)[i], nd.data->treatment[i].outcome);
    for (std::size_t i : nd.control)
        agg.c.add((*nd.wc)[i], nd.data->control[i].outcome);
    return agg;
}

// E_gain = sum_a P(a) E(P^T(Y|a) : P^C(Y|a)) - E(P^T(Y) : P^C(Y)), where P(a)
// mixes the per-group probabilities of outcome a by the relative group
// weights, which reduces to the combined child weight fraction.
inline double gain_from_sides(const SideAgg& left, const SideAgg& right, const SideAgg& parent,
                              double penalty_factor) {
    const double e_parent = e_divergence(dist_of(parent.t), dist_of(parent.c));
    const double e_left = e_divergence(dist_of(left.t), dist_of(left.c));
    const double e_right = e_divergence(dist_of(right.t), dist_of(right.c));
    const double w = parent.combined();
    const double gain =
        (left.combined() / w) * e_left + (right.combined() / w) * e_right - e_parent;
    return gain / penalty_factor;
}

}  // namespace detail

// Gain of one concrete split on the node data; the split's own missing routing
// is applied.  Invalid splits (a child with no weight in either group) raise.
inline double e_gain(const Split& split, const NodeData& nd, double penalty_factor = 1.0) {
    detail::SideAgg left, right;
    for (std::size_t i : nd.treatment) {
        const Record& r = nd.data->treatment[i];
        (split.test(r) ? left : right).t.add((*nd.wt)[i], r.outcome);
    }
    for (std::size_t i : nd.control) {
        const Record& r = nd.data->control[i];
        (split.test(r) ? left : right).c.add((*nd.wc)[i], r.outcome);
    }
    if (!detail::side_valid(left, 0.0) || !detail::side_valid(right, 0.0))
        throw SplitError("e_gain: a child has no weight in the treatment or control group");
    detail::SideAgg parent = left;
    parent.add(right);
    return detail::gain_from_sides(left, right, parent, penalty_factor);
}

// Exhaustive candidate search: numeric thresholds at midpoints between
// consecutive distinct observed values, one-vs-rest tests per categorical
// label.  Returns the split with maximum gain if that maximum is > 0.
// Ties break on (lowest feature index, smallest threshold / lexicographically
// smallest label).
inline std::optional<Split> best_split(const NodeData& nd, const Schema& schema,
                                       double penalty_factor = 1.0,
                                       double min_child_weight = 0.0) {
    using detail::GroupAgg;
    using detail::SideAgg;

    const SideAgg parent = detail::node_aggregates(nd);
    if (!(parent.t.w > 0.0) || !(parent.c.w > 0.0))
        throw DistributionError("best_split: node has no weight in a group");

    struct Candidate {
        double gain;
        Split split;
        std::string label;  // tie-break key for categorical splits
    };
    std::optional<Candidate> best;

    auto consider = [&](double gain, const Split& s, const std::string& label) {
        if (!(gain > 0.0)) return;
        if (best) {
            if (gain < best->gain) return;
            if (gain == best->gain) {
                if (s.feature > best->split.feature) return;
                if (s.feature == best->split.feature) {
                    if (s.kind == Split::Kind::numeric_threshold) {
                        if (s.threshold >= best->split.threshold) return;
                    } else {
                        if (label >= best->label) return;
                    }
                }
            }
        }
        best = Candidate{gain, s, label};
    };

    auto route_and_score = [&](SideAgg left, const SideAgg& known_total, const SideAgg& missing,
                               Split s, const std::string& label) {
        SideAgg right = known_total.minus(left);
        s.missing_to_left = left.combined() >= right.combined();
        (s.missing_to_left ? left : right).add(missing);
        if (!detail::side_valid(left, min_child_weight) ||
            !detail::side_valid(right, min_child_weight))
            return;
        consider(detail::gain_from_sides(left, right, parent, penalty_factor), s, label);
    };

    for (int f = 0; f < static_cast<int>(schema.size()); ++f) {
        const FeatureInfo& info = schema.features[static_cast<std::size_t>(f)];
        const auto fi = static_cast<std::size_t>(f);

        if (info.kind == FeatureKind::numeric) {
            struct Obs {
                double v, w;
                int y;
                bool treated;
            };
            std::vector<Obs> obs;
            obs.reserve(nd.treatment.size() + nd.control.size());
            SideAgg missing, known_total;
            auto gather = [&](const std::vector<std::size_t>& idx, const std::vector<Record>& recs,
                              const std::vector<double>& w, bool treated) {
                for (std::size_t i : idx) {
                    const double v = recs[i].features[fi];
                    if (is_missing(v)) {
                        (treated ? missing.t : missing.c).add(w[i], recs[i].outcome);
                    } else {
                        obs.push_back({v, w[i], recs[i].outcome, treated});
                        (treated ? known_total.t : known_total.c).add(w[i], recs[i].outcome);
                    }
                }
            };
            gather(nd.treatment, nd.data->treatment, *nd.wt, true);
            gather(nd.control, nd.data->control, *nd.wc, false);
            if (obs.size() < 2) continue;
            std::sort(obs.begin(), obs.end(), [](const Obs& a, const Obs& b) { return a.v < b.v; });

            SideAgg left;
            std::size_t i = 0;
            while (i < obs.size()) {
                const double v = obs[i].v;
                while (i < obs.size() && obs[i].v == v) {
                    (obs[i].treated ? left.t : left.c).add(obs[i].w, obs[i].y);
                    ++i;
                }
                if (i == obs.size()) break;
                const double next = obs[i].v;
                double thr = v + (next - v) * 0.5;
                if (!(thr < next)) thr = v;  // midpoint rounded up between adjacent doubles
                Split s;
                s.kind = Split::Kind::numeric_threshold;
                s.feature = f;
                s.threshold = thr;
                route_and_score(left, known_total, missing, s, std::string());
            }
        } else {
            const std::size_t n_labels = info.labels.size();
            std::vector<SideAgg> per_label(n_labels);
            SideAgg missing, known_total;
            auto gather = [&](const std::vector<std::size_t>& idx, const std::vector<Record>& recs,
                              const std::vector<double>& w, bool treated) {
                for (std::size_t i : idx) {
                    const double v = recs[i].features[fi];
                    if (is_missing(v)) {
                        (treated ? missing.t : missing.c).add(w[i], recs[i].outcome);
                    } else {
                        auto& agg = per_label[static_cast<std::size_t>(v)];
                        (treated ? agg.t : agg.c).add(w[i], recs[i].outcome);
                        (treated ? known_total.t : known_total.c).add(w[i], recs[i].outcome);
                    }
                }
            };
            gather(nd.treatment, nd.data->treatment, *nd.wt, true);
            gather(nd.control, nd.data->control, *nd.wc, false);

            std::vector<std::size_t> order;
            for (std::size_t l = 0; l < n_labels; ++l)
                if (per_label[l].combined() > 0.0) order.push_back(l);
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                return info.labels[a] < info.labels[b];
            });
            for (std::size_t l : order) {
                Split s;
                s.kind = Split::Kind::categorical_one_vs_rest;
                s.feature = f;
                s.label = static_cast<int>(l);
                route_and_score(per_label[l], known_total, missing, s, info.labels[l]);
            }
        }
    }

    if (!best) return std::nullopt;
    return best->split;
}

// ---------------------------------------------------------------------------
// the tree
// ---------------------------------------------------------------------------

struct TreeNode {
    bool leaf = true;
    Split split;                  // internal nodes
    double uplift_estimate = 0.0; // leaves: P^T(y=1) - P^C(y=1)
    int decision = 0;             // leaves: 1 iff uplift_estimate > 0
    int left = -1;
    int right = -1;
};

struct UpliftTree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root
    std::size_t n_features = 0;

    const TreeNode& leaf_for(const Record& r) const {
        if (nodes.empty()) throw PredictError("predict: tree has no nodes");
        if (r.features.size() != n_features)
            throw PredictError("predict: record does not conform to the tree's schema");
        int cur = 0;
        while (!nodes[static_cast<std::size_t>(cur)].leaf) {
            const TreeNode& n = nodes[static_cast<std::size_t>(cur)];
            cur = n.split.test(r) ? n.left : n.right;
        }
        return nodes[static_cast<std::size_t>(cur)];
    }

    int predict(const Record& r) const { return leaf_for(r).decision; }
    double predict_score(const Record& r) const { return leaf_for(r).uplift_estimate; }

    int depth() const { return depth_below(0); }

    int leaf_count() const {
        int n = 0;
        for (const auto& node : nodes) n += node.leaf ? 1 : 0;
        return n;
    }

private:
    int depth_below(int idx) const {
        const TreeNode& n = nodes[static_cast<std::size_t>(idx)];
        if (n.leaf) return 0;
        return 1 + std::max(depth_below(n.left), depth_below(n.right));
    }
};

namespace detail {

struct TreeBuilder {
    const UpliftDataset* data;
    const Schema* schema;
    TreeConfig cfg;
    double min_leaf;
    std::vector<TreeNode>* nodes;

    int build(NodeData&& nd, int depth) {
        const SideAgg agg = node_aggregates(nd);
        const double uplift = dist_of(agg.t).p1 - dist_of(agg.c).p1;

        std::optional<Split> split;
        if (depth < cfg.max_depth)
            split = best_split(nd, *schema, cfg.penalty_factor, min_leaf);

        const int idx = static_cast<int>(nodes->size());
        nodes->emplace_back();
        if (!split) {
            TreeNode& n = (*nodes)[static_cast<std::size_t>(idx)];
            n.leaf = true;
            n.uplift_estimate = uplift;
            n.decision = uplift > 0.0 ? 1 : 0;
            return idx;
        }

        NodeData left, right;
        left.data = right.data = nd.data;
        left.wt = right.wt = nd.wt;
        left.wc = right.wc = nd.wc;
        for (std::size_t i : nd.treatment)
            (split->test(nd.data->treatment[i]) ? left : right).treatment.push_back(i);
        for (std::size_t i : nd.control)
            (split->test(nd.data->control[i]) ? left : right).control.push_back(i);

        const int l = build(std::move(left), depth + 1);
        const int r = build(std::move(right), depth + 1);
        TreeNode& n = (*nodes)[static_cast<std::size_t>(idx)];
        n.leaf = false;
        n.split = *split;
        n.left = l;
        n.right = r;
        return idx;
    }
};

}  // namespace detail

// Greedy unpruned growth; a node becomes a leaf when the depth limit is
// reached, no candidate has positive gain, or a child would fall below
// min_leaf_weight in either group.
inline UpliftTree fit_tree(const UpliftDataset& d, const std::vector<double>& wt,
                           const std::vector<double>& wc, const TreeConfig& cfg = {}) {
    if (cfg.max_depth < 1) throw ValidationError("fit_tree: max_depth must be >= 1");
    if (wt.size() != d.n_treatment() || wc.size() != d.n_control())
        throw ValidationError("fit_tree: weight vector sizes do not match the dataset");
    double sum_t = 0.0, sum_c = 0.0;
    for (double w : wt) sum_t += w;
    for (double w : wc) sum_c += w;
    if (!(sum_t > 0.0) || !(sum_c > 0.0))
        throw FitError("fit_tree: a group has zero total weight");

    UpliftTree tree;
    tree.n_features = d.schema.size();

    detail::TreeBuilder builder;
    builder.data = &d;
    builder.schema = &d.schema;
    builder.cfg = cfg;
    builder.min_leaf = cfg.min_leaf_weight < 0.0 ? 1e-6 * (sum_t + sum_c) : cfg.min_leaf_weight;
    builder.nodes = &tree.nodes;
    builder.build(root_node(d, wt, wc), 0);
    return tree;
}

// ---------------------------------------------------------------------------
// JSON serialization (round-trippable bit-exactly for decisions)
// ---------------------------------------------------------------------------

namespace detail {

inline nlohmann::json node_to_json(const UpliftTree& t, int idx, const Schema& schema) {
    const TreeNode& n = t.nodes[static_cast<std::size_t>(idx)];
    nlohmann::json j;
    if (n.leaf) {
        j["kind"] = "leaf";
        j["uplift"] = n.uplift_estimate;
        j["decision"] = n.decision;
        return j;
    }
    j["kind"] = "split";
    j["feature"] = n.split.feature;
    j["feature_name"] = schema.features[static_cast<std::size_t>(n.split.feature)].name;
    if (n.split.kind == Split::Kind::numeric_threshold) {
        j["test"] = "le";
        j["threshold"] = n.split.threshold;
    } else {
        j["test"] = "eq";
        j["label"] = schema.features[static_cast<std::size_t>(n.split.feature)]
                         .labels[static_cast<std::size_t>(n.split.label)];
    }
    j["missing"] = n.split.missing_to_left ? "left" : "right";
    j["left"] = node_to_json(t, n.left, schema);
    j["right"] = node_to_json(t, n.right, schema);
    return j;
}

inline int node_from_json(const nlohmann::json& j, const Schema& schema, UpliftTree& t) {
    const int idx = static_cast<int>(t.nodes.size());
    t.nodes.emplace_back();
    if (j.at("kind") == "leaf") {
        TreeNode& n = t.nodes[static_cast<std::size_t>(idx)];
        n.leaf = true;
        n.uplift_estimate = j.at("uplift").get<double>();
        n.decision = j.at("decision").get<int>();
        return idx;
    }
    Split s;
    s.feature = j.at("feature").get<int>();
    if (s.feature < 0 || s.feature >= static_cast<int>(schema.size()))
        throw SchemaError("tree_from_json: feature index out of range");
    if (j.at("test") == "le") {
        s.kind = Split::Kind::numeric_threshold;
        s.threshold = j.at("threshold").get<double>();
    } else {
        s.kind = Split::Kind::categorical_one_vs_rest;
        const std::string label = j.at("label").get<std::string>();
        s.label = schema.features[static_cast<std::size_t>(s.feature)].label_id(label);
        if (s.label < 0) throw SchemaError("tree_from_json: unknown label '" + label + "'");
    }
    s.missing_to_left = j.at("missing") == "left";
    const int l = node_from_json(j.at("left"), schema, t);
    const int r = node_from_json(j.at("right"), schema, t);
    TreeNode& n = t.nodes[static_cast<std::size_t>(idx)];
    n.leaf = false;
    n.split = s;
    n.left = l;
    n.right = r;
    return idx;
}

}  // namespace detail

inline nlohmann::json tree_to_json(const UpliftTree& t, const Schema& schema) {
    nlohmann::json j;
    j["n_features"] = t.n_features;
    j["root"] = detail::node_to_json(t, 0, schema);
    return j;
}

inline UpliftTree tree_from_json(const nlohmann::json& j, const Schema& schema) {
    UpliftTree t;
    t.n_features = j.at("n_features").get<std::size_t>();
    detail::node_from_json(j.at("root"), schema, t);
    return t;
}

// Structural equality of the split skeleton and leaf decisions; leaf uplift
// estimates are not compared.
inline bool same_structure(const UpliftTree& a, const UpliftTree& b) {
    if (a.nodes.size() != b.nodes.size()) return false;
    for (std::size_t i = 0; i < a.nodes.size(); ++i) {
        const TreeNode& x = a.nodes[i];
        const TreeNode& y = b.nodes[i];
        if (x.leaf != y.leaf) return false;
        if (x.leaf) {
            if (x.decision != y.decision) return false;
        } else {
            if (x.split.kind != y.split.kind || x.split.feature != y.split.feature ||
                x.split.threshold != y.split.threshold || x.split.label != y.split.label ||
                x.split.missing_to_left != y.split.missing_to_left || x.left != y.left ||
                x.right != y.right)
                return false;
        }
    }
    return true;
}

}  // namespace uplift
