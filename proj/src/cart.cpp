#include "learnad/cart.hpp"

#include <algorithm>
#include <numeric>

namespace learnad {

using nlohmann::json;

double gini(ClassCounts counts) {
    if (counts.n_ad < 0 || counts.n_cn < 0) throw Error("negative class count");
    const std::int64_t n = counts.total();
    if (n <= 0) throw Error("gini of an empty node");
    const double p_ad = static_cast<double>(counts.n_ad) / static_cast<double>(n);
    const double p_cn = static_cast<double>(counts.n_cn) / static_cast<double>(n);
    return 1.0 - p_ad * p_ad - p_cn * p_cn;
}

DecisionTree::DecisionTree(std::vector<TreeNode> nodes, TreeParams params,
                           std::vector<EdgeId> feature_order)
    : nodes_(std::move(nodes)), params_(params), feature_order_(std::move(feature_order)) {
    if (nodes_.empty()) throw Error("decision tree without nodes");
}

int DecisionTree::depth() const {
    std::function<int(int)> walk = [&](int k) -> int {
        const TreeNode& n = nodes_[static_cast<std::size_t>(k)];
        if (n.is_leaf) return 0;
        return 1 + std::max(walk(n.left), walk(n.right));
    };
    return walk(0);
}

Label DecisionTree::predict(std::span<const double> x) const {
    if (x.size() != feature_order_.size()) {
        throw Error("feature vector length " + std::to_string(x.size()) +
                    " does not match tree feature count " + std::to_string(feature_order_.size()));
    }
    const TreeNode* node = &nodes_.front();
    while (!node->is_leaf) {
        const int next = x[static_cast<std::size_t>(node->feature)] <= node->threshold ? node->left
                                                                                        : node->right;
        node = &nodes_[static_cast<std::size_t>(next)];
    }
    return node->prediction;
}

namespace {

__extension__ typedef __int128 i128;

// Sum of squared class counts over a node's size, kept as an exact fraction
// so split comparisons are free of rounding ties.
struct Purity {
    i128 num;
    i128 den;
};

bool greater(const Purity& a, const Purity& b) { return a.num * b.den > b.num * a.den; }

ClassCounts count_labels(std::span<const FeatureVector> samples, const std::vector<std::size_t>& idx) {
    ClassCounts c;
    for (std::size_t k : idx) c.add(samples[k].label);
    return c;
}

std::optional<Split> best_split_on(std::span<const FeatureVector> samples,
                                   const std::vector<std::size_t>& idx,
                                   const std::vector<std::size_t>& features) {
    const auto n = static_cast<std::int64_t>(idx.size());
    if (n < 2) return std::nullopt;
    const ClassCounts parent = count_labels(samples, idx);
    const i128 parent_sq = static_cast<i128>(parent.n_ad) * parent.n_ad +
                           static_cast<i128>(parent.n_cn) * parent.n_cn;
    const Purity parent_purity{parent_sq, n};

    std::optional<Split> best;
    Purity best_purity{0, 1};
    std::vector<std::size_t> order(idx.size());

    for (std::size_t f : features) {
        order = idx;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return samples[a].values[f] < samples[b].values[f];
        });
        ClassCounts left;
        for (std::size_t pos = 0; pos + 1 < order.size(); ++pos) {
            left.add(samples[order[pos]].label);
            const double lo = samples[order[pos]].values[f];
            const double hi = samples[order[pos + 1]].values[f];
            if (!(lo < hi)) continue;
            const ClassCounts right{parent.n_ad - left.n_ad, parent.n_cn - left.n_cn};
            const i128 n_l = left.total();
            const i128 n_r = right.total();
            const i128 sq_l = static_cast<i128>(left.n_ad) * left.n_ad +
                              static_cast<i128>(left.n_cn) * left.n_cn;
            const i128 sq_r = static_cast<i128>(right.n_ad) * right.n_ad +
                              static_cast<i128>(right.n_cn) * right.n_cn;
            const Purity purity{sq_l * n_r + sq_r * n_l, n_l * n_r};
            if (!greater(purity, parent_purity)) continue;
            if (best && !greater(purity, best_purity)) continue;

            double threshold = lo + (hi - lo) / 2.0;
            if (!(threshold < hi)) threshold = lo;
            const double gain = (static_cast<double>(purity.num) / static_cast<double>(purity.den) -
                                 static_cast<double>(parent_sq) / static_cast<double>(n)) /
                                static_cast<double>(n);
            best = Split{f, threshold, gain};
            best_purity = purity;
        }
    }
    return best;
}

class TreeBuilder {
  public:
    TreeBuilder(std::span<const FeatureVector> samples, TreeParams params, std::size_t n_features,
                const FeatureSampler& sampler)
        : samples_(samples), params_(params), n_features_(n_features), sampler_(sampler) {}

    std::vector<TreeNode> build(const std::vector<std::size_t>& idx) {
        grow(idx, 0);
        return std::move(nodes_);
    }

  private:
    int grow(const std::vector<std::size_t>& idx, int depth) {
        const int id = static_cast<int>(nodes_.size());
        const std::size_t ordinal = nodes_.size();
        nodes_.emplace_back();
        TreeNode node;
        node.counts = count_labels(samples_, idx);
        node.n_samples = node.counts.total();
        node.prediction = node.counts.majority();

        std::optional<Split> split;
        const bool pure = node.counts.n_ad == 0 || node.counts.n_cn == 0;
        if (depth < params_.max_depth && node.n_samples >= params_.min_samples_split && !pure) {
            std::vector<std::size_t> features;
            if (sampler_) {
                features = sampler_(ordinal, n_features_);
            } else {
                features.resize(n_features_);
                std::iota(features.begin(), features.end(), 0);
            }
            split = best_split_on(samples_, idx, features);
        }
        if (split) {
            std::vector<std::size_t> left_idx;
            std::vector<std::size_t> right_idx;
            for (std::size_t k : idx) {
                (samples_[k].values[split->feature] <= split->threshold ? left_idx : right_idx)
                    .push_back(k);
            }
            node.is_leaf = false;
            node.feature = static_cast<int>(split->feature);
            node.threshold = split->threshold;
            node.impurity_decrease = split->impurity_decrease;
            nodes_[static_cast<std::size_t>(id)] = node;
            const int l = grow(left_idx, depth + 1);
            const int r = grow(right_idx, depth + 1);
            nodes_[static_cast<std::size_t>(id)].left = l;
            nodes_[static_cast<std::size_t>(id)].right = r;
        } else {
            nodes_[static_cast<std::size_t>(id)] = node;
        }
        return id;
    }

    std::span<const FeatureVector> samples_;
    TreeParams params_;
    std::size_t n_features_;
    const FeatureSampler& sampler_;
    std::vector<TreeNode> nodes_;
};

void check_dimensions(std::span<const FeatureVector> samples, std::size_t n_features) {
    for (const auto& s : samples) {
        if (s.values.size() != n_features) {
            throw Error("sample '" + s.subject_id + "' has " + std::to_string(s.values.size()) +
                        " values, expected " + std::to_string(n_features));
        }
    }
}

}  // namespace

std::optional<Split> best_split(std::span<const FeatureVector> samples) {
    if (samples.size() < 2) return std::nullopt;
    const std::size_t n_features = samples.front().values.size();
    check_dimensions(samples, n_features);
    std::vector<std::size_t> idx(samples.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<std::size_t> features(n_features);
    std::iota(features.begin(), features.end(), 0);
    return best_split_on(samples, idx, features);
}

DecisionTree fit_tree_on(std::span<const FeatureVector> samples,
                         const std::vector<std::size_t>& indices, std::vector<EdgeId> feature_order,
                         TreeParams params, const FeatureSampler& sampler) {
    if (indices.empty()) throw Error("cannot fit a tree on an empty sample set");
    if (params.max_depth < 0) throw Error("max_depth must be >= 0");
    check_dimensions(samples, feature_order.size());
    for (std::size_t k : indices) {
        if (k >= samples.size()) throw Error("sample index out of range");
    }
    TreeBuilder builder(samples, params, feature_order.size(), sampler);
    return DecisionTree(builder.build(indices), params, std::move(feature_order));
}

DecisionTree fit_tree(std::span<const FeatureVector> samples, std::vector<EdgeId> feature_order,
                      TreeParams params) {
    if (samples.empty()) throw Error("cannot fit a tree on an empty sample set");
    std::vector<std::size_t> idx(samples.size());
    std::iota(idx.begin(), idx.end(), 0);
    return fit_tree_on(samples, idx, std::move(feature_order), params, FeatureSampler{});
}

Label predict_tree(const DecisionTree& tree, const FeatureVector& x) {
    return tree.predict(x.values);
}

ImportanceRanking tree_importance(const DecisionTree& tree) {
    std::vector<double> raw(tree.feature_order().size(), 0.0);
    const double n_root = static_cast<double>(tree.root().n_samples);
    for (const auto& node : tree.nodes()) {
        if (node.is_leaf) continue;
        raw[static_cast<std::size_t>(node.feature)] +=
            static_cast<double>(node.n_samples) / n_root * node.impurity_decrease;
    }
    const double total = std::accumulate(raw.begin(), raw.end(), 0.0);
    ImportanceRanking ranking;
    for (std::size_t f = 0; f < raw.size(); ++f) {
        ranking.scores[tree.feature_order()[f]] = total > 0.0 ? raw[f] / total : 0.0;
    }
    return ranking;
}

std::int64_t tree_atom_count(const DecisionTree& tree) {
    std::int64_t atoms = 0;
    std::function<void(int, std::int64_t)> walk = [&](int k, std::int64_t conditions) {
        const TreeNode& n = tree.nodes()[static_cast<std::size_t>(k)];
        if (n.is_leaf) {
            atoms += conditions + 1;
            return;
        }
        walk(n.left, conditions + 1);
        walk(n.right, conditions + 1);
    };
    walk(0, 0);
    return atoms;
}

double training_accuracy(const DecisionTree& tree, std::span<const FeatureVector> samples) {
    if (samples.empty()) throw Error("accuracy of an empty sample set");
    std::size_t correct = 0;
    for (const auto& s : samples) correct += tree.predict(s.values) == s.label ? 1 : 0;
    return static_cast<double>(correct) / static_cast<double>(samples.size());
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

namespace {

json node_to_json(const DecisionTree& tree, int k) {
    const TreeNode& n = tree.nodes()[static_cast<std::size_t>(k)];
    json out;
    out["counts"] = {n.counts.n_ad, n.counts.n_cn};
    if (n.is_leaf) {
        out["prediction"] = std::string(label_name(n.prediction));
        return out;
    }
    const EdgeId e = tree.feature_order()[static_cast<std::size_t>(n.feature)];
    out["feature"] = {e.i, e.j};
    out["threshold"] = n.threshold;
    out["impurity_decrease"] = n.impurity_decrease;
    out["left"] = node_to_json(tree, n.left);
    out["right"] = node_to_json(tree, n.right);
    return out;
}

int node_from_json(const json& doc, const std::map<EdgeId, int>& feature_index,
                   std::vector<TreeNode>& nodes) {
    const int id = static_cast<int>(nodes.size());
    nodes.emplace_back();
    TreeNode node;
    node.counts = {doc.at("counts").at(0).get<std::int64_t>(), doc.at("counts").at(1).get<std::int64_t>()};
    node.n_samples = node.counts.total();
    node.prediction = node.counts.majority();
    if (doc.contains("feature")) {
        const EdgeId e = make_edge(doc.at("feature").at(0).get<int>(), doc.at("feature").at(1).get<int>());
        auto it = feature_index.find(e);
        if (it == feature_index.end()) throw Error("tree splits on an edge outside feature_order");
        node.is_leaf = false;
        node.feature = it->second;
        node.threshold = doc.at("threshold").get<double>();
        node.impurity_decrease = doc.at("impurity_decrease").get<double>();
        nodes[static_cast<std::size_t>(id)] = node;
        const int l = node_from_json(doc.at("left"), feature_index, nodes);
        const int r = node_from_json(doc.at("right"), feature_index, nodes);
        nodes[static_cast<std::size_t>(id)].left = l;
        nodes[static_cast<std::size_t>(id)].right = r;
    } else {
        node.prediction = parse_label(doc.at("prediction").get<std::string>());
        nodes[static_cast<std::size_t>(id)] = node;
    }
    return id;
}

}  // namespace

json tree_to_json(const DecisionTree& tree) {
    json features = json::array();
    for (EdgeId e : tree.feature_order()) features.push_back({e.i, e.j});
    return {{"params",
             {{"max_depth", tree.params().max_depth},
              {"min_samples_split", tree.params().min_samples_split},
              {"criterion", "gini"}}},
            {"feature_order", features},
            {"root", node_to_json(tree, 0)}};
}

DecisionTree tree_from_json(const json& doc) {
    try {
        TreeParams params{doc.at("params").at("max_depth").get<int>(),
                          doc.at("params").at("min_samples_split").get<int>()};
        std::vector<EdgeId> order;
        std::map<EdgeId, int> index;
        for (const auto& p : doc.at("feature_order")) {
            order.push_back(make_edge(p.at(0).get<int>(), p.at(1).get<int>()));
            index.emplace(order.back(), static_cast<int>(order.size() - 1));
        }
        std::vector<TreeNode> nodes;
        node_from_json(doc.at("root"), index, nodes);
        return DecisionTree(std::move(nodes), params, std::move(order));
    } catch (const json::exception& e) {
        throw Error(std::string("malformed tree JSON: ") + e.what());
    }
}

}  // namespace learnad
