#pragma once
// Random forests: bootstrap-aggregated CART trees with per-node feature
// subsampling.

#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

#include "learnad/cart.hpp"

namespace learnad {

struct ForestParams {
    int n_estimators = 100;
    int max_depth = 8;
    int min_samples_split = 2;
    // Features considered per node; 0 means floor(sqrt(F)).
    int max_features = 0;
    // Test hook: fit every tree on the full training set.
    bool bootstrap = true;

    bool operator==(const ForestParams&) const = default;
};

class Forest {
  public:
    Forest(std::vector<DecisionTree> trees, ForestParams params, std::uint64_t seed);

    const std::vector<DecisionTree>& trees() const { return trees_; }
    const ForestParams& params() const { return params_; }
    std::uint64_t seed() const { return seed_; }

    // Number of trees voting AD for x.
    int ad_votes(std::span<const double> x) const;

    bool operator==(const Forest&) const = default;

  private:
    std::vector<DecisionTree> trees_;
    ForestParams params_;
    std::uint64_t seed_;
};

// Tree t uses a bootstrap drawn with derive_seed(seed, t) and a node-local
// seed for its feature draws, so the result is independent of scheduling.
Forest fit_forest(std::span<const FeatureVector> samples, std::vector<EdgeId> feature_order,
                  const ForestParams& params, std::uint64_t seed, unsigned threads = 0);

// Hard majority vote; a tie predicts CN.
Label predict_forest(const Forest& forest, const FeatureVector& x);

ImportanceRanking forest_importance(const Forest& forest);

std::int64_t forest_atom_count(const Forest& forest);

double forest_accuracy(const Forest& forest, std::span<const FeatureVector> samples);

nlohmann::json forest_to_json(const Forest& forest);
Forest forest_from_json(const nlohmann::json& doc);

}  // namespace learnad
