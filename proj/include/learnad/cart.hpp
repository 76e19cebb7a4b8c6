#pragma once
// Binary CART decision trees with Gini-impurity splits.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "learnad/common.hpp"
#include "learnad/data_model.hpp"

namespace learnad {

struct ClassCounts {
    std::int64_t n_ad = 0;
    std::int64_t n_cn = 0;

    std::int64_t total() const { return n_ad + n_cn; }
    // Majority class; ties go to CN.
    Label majority() const { return n_ad > n_cn ? Label::AD : Label::CN; }
    void add(Label l) { (l == Label::AD ? n_ad : n_cn) += 1; }

    bool operator==(const ClassCounts&) const = default;
};

// 1 - p_AD^2 - p_CN^2. Throws on an empty node.
double gini(ClassCounts counts);

struct TreeParams {
    int max_depth = 8;
    int min_samples_split = 2;

    bool operator==(const TreeParams&) const = default;
};

// Internal nodes route value <= threshold to `left`.
struct TreeNode {
    bool is_leaf = true;
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double impurity_decrease = 0.0;
    std::int64_t n_samples = 0;
    ClassCounts counts;
    Label prediction = Label::CN;

    bool operator==(const TreeNode&) const = default;
};

struct Split {
    std::size_t feature = 0;
    double threshold = 0.0;
    double impurity_decrease = 0.0;
};

class DecisionTree {
  public:
    DecisionTree(std::vector<TreeNode> nodes, TreeParams params, std::vector<EdgeId> feature_order);

    const std::vector<TreeNode>& nodes() const { return nodes_; }
    const TreeNode& root() const { return nodes_.front(); }
    const TreeParams& params() const { return params_; }
    const std::vector<EdgeId>& feature_order() const { return feature_order_; }
    int depth() const;

    Label predict(std::span<const double> x) const;

    bool operator==(const DecisionTree&) const = default;

  private:
    std::vector<TreeNode> nodes_;  // nodes_[0] is the root
    TreeParams params_;
    std::vector<EdgeId> feature_order_;
};

struct ImportanceRanking {
    std::map<EdgeId, double> scores;  // every feature, zero when unused
};

// Returns the split maximizing the Gini decrease over every feature and every
// midpoint between consecutive distinct values; ties go to the lower feature
// index, then the lower threshold. nullopt when no split has positive gain.
std::optional<Split> best_split(std::span<const FeatureVector> samples);

// Per-node feature restriction used by the forest; receives the node's
// preorder ordinal and the feature count.
using FeatureSampler = std::function<std::vector<std::size_t>(std::size_t node, std::size_t n_features)>;

DecisionTree fit_tree(std::span<const FeatureVector> samples, std::vector<EdgeId> feature_order,
                      TreeParams params = {});

// Fits on samples[indices[k]] (indices may repeat, as in a bootstrap).
DecisionTree fit_tree_on(std::span<const FeatureVector> samples,
                         const std::vector<std::size_t>& indices,
                         std::vector<EdgeId> feature_order, TreeParams params,
                         const FeatureSampler& sampler);

Label predict_tree(const DecisionTree& tree, const FeatureVector& x);

ImportanceRanking tree_importance(const DecisionTree& tree);

// Rule-set rendering size: per root-to-leaf path, one atom per condition plus
// one for the leaf label.
std::int64_t tree_atom_count(const DecisionTree& tree);

double training_accuracy(const DecisionTree& tree, std::span<const FeatureVector> samples);

nlohmann::json tree_to_json(const DecisionTree& tree);
DecisionTree tree_from_json(const nlohmann::json& doc);

}  // namespace learnad
