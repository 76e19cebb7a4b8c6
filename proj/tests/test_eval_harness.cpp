#include <gtest/gtest.h>

#include <map>
#include <set>

#include "learnad/eval_harness.hpp"
#include "support.hpp"

using namespace learnad;
using namespace testsupport;

namespace {

Cohort strata_cohort(int n_ad, int n_cn) {
    std::vector<Subject> subs;
    for (int k = 0; k < n_ad; ++k) subs.push_back(toy_subject("A" + std::to_string(k), Label::AD, 4, {}));
    for (int k = 0; k < n_cn; ++k) subs.push_back(toy_subject("C" + std::to_string(k), Label::CN, 4, {}));
    return Cohort(toy_atlas(4), subs);
}

CVConfig small_config() {
    CVConfig c;
    c.n_repeats = 1;
    c.n_folds = 2;
    c.subsample_fraction = 1.0;
    c.fit_baselines = false;
    c.selector.k_global = 2;
    c.n_ad_subsets = 2;
    SyntheticSpec s;
    s.seed = 3;
    s.n_per_class = 16;
    s.planted = {parse_planted("3,17,2.0,lt")};
    c.synthetic = s;
    return c;
}

std::size_t count_label(const Cohort& c, Label l) {
    std::size_t n = 0;
    for (const auto& s : c.subjects()) n += s.diagnosis == l;
    return n;
}

}  // namespace

TEST(Subsample, StratumCounts) {
    const Cohort c = strata_cohort(8, 12);
    const Cohort s = stratified_subsample(c, 0.9, 1);
    EXPECT_EQ(count_label(s, Label::AD), 7u);
    EXPECT_EQ(count_label(s, Label::CN), 11u);
    // Cohort order kept.
    std::map<std::string, std::size_t> pos;
    for (std::size_t k = 0; k < c.size(); ++k) pos[c.subjects()[k].id] = k;
    for (std::size_t k = 1; k < s.size(); ++k) EXPECT_LT(pos[s.subjects()[k - 1].id], pos[s.subjects()[k].id]);
    EXPECT_EQ(stratified_subsample(c, 1.0, 5), c);
    EXPECT_EQ(count_label(stratified_subsample(strata_cohort(1, 1), 0.1, 0), Label::AD), 1u);
    EXPECT_THROW(stratified_subsample(c, 0.0, 1), Error);
    EXPECT_EQ(stratified_subsample(c, 0.9, 1), stratified_subsample(c, 0.9, 1));
}

TEST(Subsample, SeparatesSexAndManufacturer) {
    std::vector<Subject> subs;
    for (int k = 0; k < 10; ++k) subs.push_back(toy_subject("F" + std::to_string(k), Label::CN, 4, {}, Sex::F, "X"));
    for (int k = 0; k < 10; ++k) subs.push_back(toy_subject("M" + std::to_string(k), Label::CN, 4, {}, Sex::M, "Y"));
    const Cohort s = stratified_subsample(Cohort(toy_atlas(4), subs), 0.5, 2);
    int f = 0;
    for (const auto& x : s.subjects()) f += x.sex == Sex::F;
    EXPECT_EQ(f, 5);
    EXPECT_EQ(s.size(), 10u);
}

TEST(Folds, BalancedPartition) {
    for (auto [n_ad, n_cn, k] : std::vector<std::tuple<int, int, int>>{{8, 12, 5}, {7, 11, 2}, {3, 3, 6}, {10, 10, 3}}) {
        const Cohort c = strata_cohort(n_ad, n_cn);
        const auto folds = stratified_folds(c, k, 9);
        ASSERT_EQ(folds.size(), c.size());
        std::vector<int> sizes(static_cast<std::size_t>(k));
        std::vector<int> ad(static_cast<std::size_t>(k));
        for (std::size_t s = 0; s < c.size(); ++s) {
            ASSERT_GE(folds[s], 0);
            ASSERT_LT(folds[s], k);
            ++sizes[static_cast<std::size_t>(folds[s])];
            ad[static_cast<std::size_t>(folds[s])] += c.subjects()[s].diagnosis == Label::AD;
        }
        EXPECT_LE(*std::max_element(sizes.begin(), sizes.end()) - *std::min_element(sizes.begin(), sizes.end()), 1);
        EXPECT_LE(*std::max_element(ad.begin(), ad.end()) - *std::min_element(ad.begin(), ad.end()), 1);
        EXPECT_EQ(folds, stratified_folds(c, k, 9));
    }
    // 8 AD + 12 CN in 5 folds: every fold holds 1-2 AD and 2-3 CN.
    const auto f = stratified_folds(strata_cohort(8, 12), 5, 0);
    std::vector<int> cnt(5);
    for (int x : f) ++cnt[static_cast<std::size_t>(x)];
    for (int x : cnt) EXPECT_EQ(x, 4);
    EXPECT_THROW(stratified_folds(strata_cohort(1, 1), 1, 0), Error);
    EXPECT_THROW(stratified_folds(strata_cohort(1, 1), 3, 0), Error);
}

TEST(Config, JsonRoundTrip) {
    CVConfig c = small_config();
    c.pipeline = PipelineKind::rf;
    c.selector.mode = SelectorMode::frequency_count;
    c.learner.max_nodes = 77;
    const auto j = cv_config_to_json(c);
    EXPECT_EQ(cv_config_to_json(cv_config_from_json(j)).dump(), j.dump());
}

TEST(Config, Validation) {
    auto j = cv_config_to_json(small_config());
    auto bad = j;
    bad["n_folds"] = 1;
    EXPECT_THROW(cv_config_from_json(bad), Error);
    bad = j;
    bad["surprise"] = 1;
    EXPECT_THROW(cv_config_from_json(bad), Error);
    bad = j;
    bad["cohort"] = "x.json";
    EXPECT_THROW(cv_config_from_json(bad), Error);
    bad = j;
    bad.erase("synthetic");
    EXPECT_THROW(cv_config_from_json(bad), Error);
    bad = j;
    bad["pipeline"] = "svm";
    EXPECT_THROW(cv_config_from_json(bad), Error);
    bad = j;
    bad["selector"]["mode"] = "random";
    EXPECT_THROW(cv_config_from_json(bad), Error);
    bad = j;
    bad["keep_ratio"] = "lots";
    EXPECT_THROW(cv_config_from_json(bad), Error);
    bad = j;
    bad["pipeline"] = "external_explanations";
    EXPECT_THROW(cv_config_from_json(bad), Error);

    nlohmann::json rel = {{"cohort", "data/manifest.json"}};
    EXPECT_EQ(cv_config_from_json(rel, "/tmp/run").cohort, "/tmp/run/data/manifest.json");
}

TEST(Summary, MeanAndSampleStd) {
    const auto s = summarize({20, 24});
    EXPECT_DOUBLE_EQ(s.mean, 22.0);
    EXPECT_NEAR(s.std, 2.8284271247461903, 1e-12);
    EXPECT_DOUBLE_EQ(summarize({5}).std, 0.0);
}

TEST(Pipeline, SmallSyntheticRun) {
    const CVConfig c = small_config();
    const Cohort cohort = load_config_cohort(c);
    const RunReport r = run_pipeline(c, cohort);
    ASSERT_EQ(r.folds.size(), 2u);
    for (const auto& f : r.folds) {
        EXPECT_EQ(f.n_train + f.n_validation, cohort.size());
        EXPECT_EQ(f.selected.edges.size(), 2u);
        EXPECT_EQ(f.train.total(), static_cast<std::int64_t>(f.n_train));
        EXPECT_EQ(f.validation.total(), static_cast<std::int64_t>(f.n_validation));
        EXPECT_FALSE(f.baselines.has_value());
        for (const auto& rule : f.hypothesis.rules) {
            for (const auto& lit : rule.body) {
                EXPECT_NE(std::find(f.selected.edges.begin(), f.selected.edges.end(), lit.edge), f.selected.edges.end());
            }
        }
    }
    EXPECT_EQ(r.folds[0].n_validation + r.folds[1].n_validation, cohort.size());
    EXPECT_THROW(report_interpretability(r), Error);

    const auto j = report_to_json(r);
    for (const char* key : {"config", "folds", "summary", "edge_stability"}) EXPECT_TRUE(j.contains(key)) << key;
    EXPECT_EQ(j.dump(), report_to_json(run_pipeline(c, cohort)).dump());
}

TEST(Pipeline, StabilityCounts) {
    CVConfig c = small_config();
    c.n_repeats = 2;
    c.subsample_fraction = 0.9;
    const RunReport r = run_pipeline(c, load_config_cohort(c));
    ASSERT_EQ(r.folds.size(), 4u);
    std::map<EdgeId, std::pair<int, int>> expect;
    for (int rep = 0; rep < 2; ++rep) {
        std::map<EdgeId, int> in;
        for (const auto& f : r.folds) {
            if (f.repeat != rep) continue;
            for (EdgeId e : f.selected.edges) ++in[e];
        }
        for (auto [e, n] : in) {
            expect[e].first += n == 2;
            expect[e].second += 1;
        }
    }
    ASSERT_EQ(r.edge_stability.size(), expect.size());
    for (const auto& [e, s] : r.edge_stability) {
        EXPECT_EQ(s.repeats_all_folds, expect[e].first);
        EXPECT_EQ(s.repeats_any_fold, expect[e].second);
    }
}

TEST(Pipeline, ValidationDataDoesNotLeak) {
    // Rewriting validation connectomes keeps strata, hence folds, unchanged;
    // everything learned on the training side must stay the same.
    const CVConfig c = small_config();
    const Cohort cohort = load_config_cohort(c);
    const auto folds = stratified_folds(cohort, c.n_folds, derive_seed(c.base_seed, 2));
    std::vector<Subject> subs = cohort.subjects();
    Rng rng(1);
    for (std::size_t s = 0; s < subs.size(); ++s) {
        if (folds[s] != 0) continue;
        std::vector<double> w = subs[s].connectome.data();
        const int n = subs[s].connectome.size();
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                const double v = rng.uniform(0.0, 5.0);
                w[static_cast<std::size_t>(i * n + j)] = v;
                w[static_cast<std::size_t>(j * n + i)] = v;
            }
        }
        subs[s].connectome = Connectome(n, w);
    }
    const Cohort altered(cohort.atlas(), subs);
    const RunReport a = run_pipeline(c, cohort);
    const RunReport b = run_pipeline(c, altered);
    ASSERT_EQ(a.folds[0].fold, 0);
    EXPECT_EQ(a.folds[0].n_masked_features, b.folds[0].n_masked_features);
    EXPECT_EQ(a.folds[0].selected, b.folds[0].selected);
    EXPECT_EQ(a.folds[0].hypothesis, b.folds[0].hypothesis);
    EXPECT_EQ(a.folds[0].train.tp, b.folds[0].train.tp);
    EXPECT_EQ(a.folds[0].train.tn, b.folds[0].train.tn);
}

TEST(Pipeline, BaselinesAndInterpretability) {
    CVConfig c = small_config();
    c.fit_baselines = true;
    c.forest.n_estimators = 10;
    const RunReport r = run_pipeline(c, load_config_cohort(c));
    std::vector<double> h;
    std::vector<double> dt;
    for (const auto& f : r.folds) {
        ASSERT_TRUE(f.baselines.has_value());
        EXPECT_GT(f.baselines->rf.atoms, 0);
        h.push_back(static_cast<double>(f.hypothesis.atom_count()));
        dt.push_back(static_cast<double>(f.baselines->dt.atoms));
    }
    const Interpretability in = report_interpretability(r);
    EXPECT_DOUBLE_EQ(in.hypothesis_atoms.mean, mean_of(h));
    EXPECT_DOUBLE_EQ(in.dt_atoms.mean, mean_of(dt));
    EXPECT_DOUBLE_EQ(in.dt_atoms.std, sample_std(dt));

    const auto j = report_to_json(r);
    const std::string md = render_markdown({j});
    EXPECT_NE(md.find('|'), std::string::npos);
    EXPECT_TRUE(render_tables({j}).is_object() || render_tables({j}).is_array());
    EXPECT_THROW(render_markdown({}), Error);
}

TEST(Pipeline, ExternalNeedsExplanations) {
    CVConfig c = small_config();
    c.pipeline = PipelineKind::external_explanations;
    EXPECT_THROW(run_pipeline(c, load_config_cohort(c)), Error);
}
