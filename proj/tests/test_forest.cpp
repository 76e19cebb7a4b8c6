#include <gtest/gtest.h>

#include "learnad/forest.hpp"
#include "support.hpp"

using namespace learnad;

namespace {

FeatureVector fv(std::vector<double> values, Label label) { return FeatureVector{"", std::move(values), label}; }

std::vector<EdgeId> order(std::size_t f) {
    std::vector<EdgeId> out;
    for (std::size_t k = 0; k < f; ++k) out.push_back(make_edge(0, static_cast<int>(k) + 1));
    return out;
}

std::vector<FeatureVector> random_dataset(Rng& rng, std::size_t n, std::size_t f) {
    std::vector<FeatureVector> out;
    for (std::size_t k = 0; k < n; ++k) {
        std::vector<double> v;
        for (std::size_t j = 0; j < f; ++j) v.push_back(rng.uniform01());
        // Label mostly follows feature 0.
        const bool ad = v[0] < 0.5 ? rng.uniform01() < 0.9 : rng.uniform01() < 0.1;
        out.push_back(fv(v, ad ? Label::AD : Label::CN));
    }
    return out;
}

// Stump on feature `f`: value <= t -> left_label.
DecisionTree stump(std::size_t f, double t, Label left_label, std::size_t n_features) {
    TreeNode root;
    root.is_leaf = false;
    root.feature = static_cast<int>(f);
    root.threshold = t;
    root.left = 1;
    root.right = 2;
    root.impurity_decrease = 0.5;
    root.n_samples = 4;
    root.counts = {2, 2};
    TreeNode l;
    l.n_samples = 2;
    l.prediction = left_label;
    l.counts = left_label == Label::AD ? ClassCounts{2, 0} : ClassCounts{0, 2};
    TreeNode r;
    r.n_samples = 2;
    r.prediction = left_label == Label::AD ? Label::CN : Label::AD;
    r.counts = left_label == Label::AD ? ClassCounts{0, 2} : ClassCounts{2, 0};
    return DecisionTree({root, l, r}, TreeParams{}, order(n_features));
}

}  // namespace

TEST(Forest, SameSeedSameForest) {
    Rng rng(1);
    const auto data = random_dataset(rng, 60, 9);
    ForestParams p;
    p.n_estimators = 15;
    const Forest a = fit_forest(data, order(9), p, 99, 1);
    const Forest b = fit_forest(data, order(9), p, 99, 4);
    EXPECT_EQ(a, b);
    const Forest c = fit_forest(data, order(9), p, 100, 1);
    EXPECT_NE(a, c);
}

TEST(Forest, ReducesToCartWithoutRandomness) {
    Rng rng(2);
    for (int trial = 0; trial < 10; ++trial) {
        const auto data = random_dataset(rng, 40, 5);
        ForestParams p;
        p.n_estimators = 1;
        p.bootstrap = false;
        p.max_features = 5;
        p.max_depth = 4;
        const Forest f = fit_forest(data, order(5), p, 7);
        const DecisionTree t = fit_tree(data, order(5), TreeParams{4, 2});
        EXPECT_EQ(f.trees().front().nodes(), t.nodes());
        Rng probe(trial);
        for (int k = 0; k < 50; ++k) {
            std::vector<double> x;
            for (int j = 0; j < 5; ++j) x.push_back(probe.uniform01());
            EXPECT_EQ(predict_forest(f, fv(x, Label::CN)), t.predict(x));
        }
    }
}

TEST(Forest, MajorityVoteAndTies) {
    const auto ad_low = stump(0, 0.5, Label::AD, 1);
    const auto cn_low = stump(0, 0.5, Label::CN, 1);
    const FeatureVector x = fv({0.2}, Label::CN);
    EXPECT_EQ(predict_forest(Forest({ad_low, ad_low, cn_low}, {}, 0), x), Label::AD);
    EXPECT_EQ(predict_forest(Forest({ad_low, cn_low}, {}, 0), x), Label::CN);
    std::vector<DecisionTree> many(100, ad_low);
    const Forest hundred(many, {}, 0);
    for (double v : {0.1, 0.5, 0.9}) {
        EXPECT_EQ(predict_forest(hundred, fv({v}, Label::CN)), ad_low.predict(std::vector<double>{v}));
    }
    EXPECT_THROW(predict_forest(hundred, fv({0.1, 0.2}, Label::CN)), Error);
}

TEST(Forest, ImportanceAveraging) {
    const auto t0 = stump(0, 0.5, Label::AD, 2);
    const auto t1 = stump(1, 0.5, Label::AD, 2);
    const auto same = forest_importance(Forest({t0, t0, t0}, {}, 0));
    EXPECT_EQ(same.scores, tree_importance(t0).scores);
    const auto split = forest_importance(Forest({t0, t1}, {}, 0));
    EXPECT_DOUBLE_EQ(split.scores.at(make_edge(0, 1)), 0.5);
    EXPECT_DOUBLE_EQ(split.scores.at(make_edge(0, 2)), 0.5);
    const auto unused = forest_importance(Forest({t0}, {}, 0));
    EXPECT_EQ(unused.scores.at(make_edge(0, 2)), 0.0);
}

TEST(Forest, AtomCounts) {
    TreeNode leaf;
    leaf.n_samples = 1;
    leaf.counts = {0, 1};
    const DecisionTree single({leaf}, TreeParams{}, order(1));
    EXPECT_EQ(forest_atom_count(Forest({single}, {}, 0)), 1);
    const auto t0 = stump(0, 0.5, Label::AD, 1);
    EXPECT_EQ(forest_atom_count(Forest({t0, t0}, {}, 0)), 8);
    EXPECT_THROW(forest_atom_count(Forest({}, {}, 0)), Error);
}

TEST(Forest, EmptySamples) {
    EXPECT_THROW(fit_forest(std::vector<FeatureVector>{}, order(1), {}, 0), Error);
}

TEST(Forest, HeldOutAccuracyComparableToTree) {
    SyntheticSpec spec;
    spec.seed = 7;
    spec.n_per_class = 60;
    spec.planted = {parse_planted("3,17,2.0,lt")};
    const Cohort cohort = generate_synthetic(spec);
    // A narrow mask keeps the forest's per-node draws relevant.
    const EdgeMask mask = compute_mask(cohort, 0.003);
    const auto vecs = apply_mask(cohort, mask);
    std::vector<FeatureVector> train;
    std::vector<FeatureVector> test;
    for (std::size_t k = 0; k < vecs.size(); ++k) (k % 2 ? test : train).push_back(vecs[k]);
    const DecisionTree tree = fit_tree(train, mask.kept);
    ForestParams p;
    p.n_estimators = 50;
    const Forest forest = fit_forest(train, mask.kept, p, 11);
    EXPECT_GE(forest_accuracy(forest, test), training_accuracy(tree, test) - 0.05);
}

TEST(Forest, JsonRoundTrip) {
    Rng rng(4);
    const auto data = random_dataset(rng, 30, 4);
    ForestParams p;
    p.n_estimators = 5;
    const Forest f = fit_forest(data, order(4), p, 3);
    EXPECT_EQ(forest_from_json(nlohmann::json::parse(forest_to_json(f).dump())), f);
}
