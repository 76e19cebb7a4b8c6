#include "learnad/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace learnad {

using nlohmann::json;

Forest::Forest(std::vector<DecisionTree> trees, ForestParams params, std::uint64_t seed)
    : trees_(std::move(trees)), params_(params), seed_(seed) {
    if (trees_.empty()) throw Error("forest without trees");
}

int Forest::ad_votes(std::span<const double> x) const {
    int votes = 0;
    for (const auto& t : trees_) votes += t.predict(x) == Label::AD ? 1 : 0;
    return votes;
}

Forest fit_forest(std::span<const FeatureVector> samples, std::vector<EdgeId> feature_order,
                  const ForestParams& params, std::uint64_t seed, unsigned threads) {
    if (samples.empty()) throw Error("cannot fit a forest on an empty sample set");
    if (params.n_estimators < 1) throw Error("n_estimators must be >= 1");
    const std::size_t n_features = feature_order.size();
    if (n_features == 0) throw Error("empty feature space");

    std::size_t per_node = params.max_features > 0
                               ? static_cast<std::size_t>(params.max_features)
                               : static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n_features))));
    per_node = std::clamp<std::size_t>(per_node, 1, n_features);

    const TreeParams tree_params{params.max_depth, params.min_samples_split};
    const auto n_trees = static_cast<std::size_t>(params.n_estimators);
    std::vector<std::optional<DecisionTree>> fitted(n_trees);

    parallel_for(
        n_trees,
        [&](std::size_t t) {
            const std::uint64_t tree_seed = derive_seed(seed, t);
            std::vector<std::size_t> indices(samples.size());
            if (params.bootstrap) {
                Rng rng(tree_seed);
                for (auto& k : indices) k = rng.below(samples.size());
            } else {
                std::iota(indices.begin(), indices.end(), 0);
            }
            FeatureSampler sampler;
            if (per_node < n_features) {
                sampler = [tree_seed, per_node](std::size_t node, std::size_t nf) {
                    Rng rng(derive_seed(tree_seed, 0x6e6f6465ULL, node));
                    std::vector<std::size_t> all(nf);
                    std::iota(all.begin(), all.end(), 0);
                    // Partial Fisher-Yates: the first per_node slots are the draw.
                    for (std::size_t k = 0; k < per_node; ++k) {
                        std::swap(all[k], all[k + rng.below(nf - k)]);
                    }
                    all.resize(per_node);
                    std::sort(all.begin(), all.end());
                    return all;
                };
            }
            fitted[t] = fit_tree_on(samples, indices, feature_order, tree_params, sampler);
        },
        threads);

    std::vector<DecisionTree> trees;
    trees.reserve(n_trees);
    for (auto& t : fitted) trees.push_back(std::move(*t));
    return Forest(std::move(trees), params, seed);
}

Label predict_forest(const Forest& forest, const FeatureVector& x) {
    const int ad = forest.ad_votes(x.values);
    const int cn = static_cast<int>(forest.trees().size()) - ad;
    return ad > cn ? Label::AD : Label::CN;
}

ImportanceRanking forest_importance(const Forest& forest) {
    ImportanceRanking out;
    for (const auto& tree : forest.trees()) {
        for (const auto& [edge, score] : tree_importance(tree).scores) out.scores[edge] += score;
    }
    double total = 0.0;
    for (const auto& [edge, score] : out.scores) total += score;
    if (total > 0.0) {
        for (auto& [edge, score] : out.scores) score /= total;
    }
    return out;
}

std::int64_t forest_atom_count(const Forest& forest) {
    if (forest.trees().empty()) throw Error("forest without trees");
    std::int64_t atoms = 0;
    for (const auto& t : forest.trees()) atoms += tree_atom_count(t);
    return atoms;
}

double forest_accuracy(const Forest& forest, std::span<const FeatureVector> samples) {
    if (samples.empty()) throw Error("accuracy of an empty sample set");
    std::size_t correct = 0;
    for (const auto& s : samples) correct += predict_forest(forest, s) == s.label ? 1 : 0;
    return static_cast<double>(correct) / static_cast<double>(samples.size());
}

json forest_to_json(const Forest& forest) {
    json trees = json::array();
    for (const auto& t : forest.trees()) trees.push_back(tree_to_json(t));
    const auto& p = forest.params();
    return {{"params",
             {{"n_estimators", p.n_estimators},
              {"max_depth", p.max_depth},
              {"min_samples_split", p.min_samples_split},
              {"max_features", p.max_features},
              {"bootstrap", p.bootstrap}}},
            {"seed", forest.seed()},
            {"trees", trees}};
}

Forest forest_from_json(const json& doc) {
    try {
        const auto& p = doc.at("params");
        ForestParams params{p.at("n_estimators").get<int>(), p.at("max_depth").get<int>(),
                            p.at("min_samples_split").get<int>(), p.at("max_features").get<int>(),
                            p.at("bootstrap").get<bool>()};
        std::vector<DecisionTree> trees;
        for (const auto& t : doc.at("trees")) trees.push_back(tree_from_json(t));
        return Forest(std::move(trees), params, doc.at("seed").get<std::uint64_t>());
    } catch (const json::exception& e) {
        throw Error(std::string("malformed forest JSON: ") + e.what());
    }
}

}  // namespace learnad
