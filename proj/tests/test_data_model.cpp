#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "learnad/cart.hpp"
#include "learnad/data_model.hpp"
#include "learnad/format.hpp"
#include "support.hpp"

using namespace learnad;
using namespace testsupport;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("learnad_dm_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

void expect_error_containing(const std::function<void()>& fn, const std::string& needle) {
    try {
        fn();
        ADD_FAILURE() << "expected error containing '" << needle << "'";
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
    }
}

}  // namespace

TEST(Atlas, DesikanKilliany) {
    const auto atlas = RegionAtlas::desikan_killiany();
    EXPECT_EQ(atlas.size(), 84);
    std::set<std::string> unique(atlas.names().begin(), atlas.names().end());
    EXPECT_EQ(unique.size(), 84u);
    for (int k = 0; k < 84; ++k) EXPECT_EQ(atlas.index_of(atlas.name(k)), k);
    EXPECT_FALSE(atlas.index_of("nowhere").has_value());
}

TEST(Atlas, RejectsDuplicates) { EXPECT_THROW(RegionAtlas({"a", "a"}), Error); }

TEST(Connectome, Validation) {
    expect_error_containing([] { Connectome(2, {0, 1, 2, 0}); }, "asymmetric");
    expect_error_containing([] { Connectome(2, {0, -1, -1, 0}); }, "negative weight");
    expect_error_containing([] { Connectome(2, {0.5, 1, 1, 0}); }, "nonzero diagonal");
    EXPECT_THROW(Connectome(2, {0, NAN, NAN, 0}), Error);
    EXPECT_THROW(Connectome(2, {0, 1, 1}), Error);
    const Connectome c(2, {1e-13, 1, 1, 0});
    EXPECT_EQ(c.weight(0, 0), 0.0);
}

TEST(Cohort, DuplicateIds) {
    const int n = 3;
    std::vector<Subject> subs = {toy_subject("a", Label::AD, n, {}), toy_subject("a", Label::CN, n, {})};
    expect_error_containing([&] { Cohort(toy_atlas(n), subs); }, "duplicate subject id");
}

TEST(Cohort, SaveLoadRoundTrip) {
    const auto dir = scratch("roundtrip");
    const int n = 4;
    Cohort c(toy_atlas(n), {toy_subject("s1", Label::AD, n, {{make_edge(0, 1), 0.1}, {make_edge(2, 3), 1.0 / 3.0}}),
                            toy_subject("s2", Label::CN, n, {{make_edge(1, 2), 2.5}}, Sex::M, "MfrB")});
    save_cohort(c, dir);
    const Cohort back = load_cohort(dir / "manifest.json");
    EXPECT_EQ(back, c);
}

TEST(Cohort, LoadErrors) {
    const auto dir = scratch("errors");
    expect_error_containing([&] { load_cohort(dir / "absent.json"); }, "missing file");

    // 3x4 matrix in a 4-region atlas.
    write_text_file(dir / "bad.csv", "0,1,1,1\n1,0,1,1\n1,1,0,1\n");
    expect_error_containing([&] { read_matrix_csv(dir / "bad.csv", 4); }, "non-square matrix");
    write_text_file(dir / "diag.csv", "0,1,1\n1,0.5,1\n1,1,0\n");
    expect_error_containing([&] { read_matrix_csv(dir / "diag.csv", 3); }, "nonzero diagonal");
}

TEST(Mask, OccurrenceRanking) {
    // 3-region atlas; occurrences 1.0, 0.6, 0.2 across five subjects.
    const int n = 3;
    const EdgeId a = make_edge(0, 1);
    const EdgeId b = make_edge(0, 2);
    const EdgeId c = make_edge(1, 2);
    std::vector<Subject> subs;
    for (int k = 0; k < 5; ++k) {
        std::map<EdgeId, double> w{{a, 1.0}};
        if (k < 3) w[b] = 1.0;
        if (k < 1) w[c] = 9.0;
        subs.push_back(toy_subject("s" + std::to_string(k), k % 2 ? Label::AD : Label::CN, n, w));
    }
    const Cohort cohort(toy_atlas(n), subs);
    const EdgeMask mask = compute_mask(cohort, 0.34);
    EXPECT_EQ(mask.kept, (std::vector<EdgeId>{a, b}));
    EXPECT_EQ(compute_mask(cohort, 1.0).kept.size(), 3u);
}

TEST(Mask, MeanWeightBreaksOccurrenceTies) {
    const int n = 3;
    const EdgeId a = make_edge(0, 1);
    const EdgeId b = make_edge(0, 2);
    std::vector<Subject> subs = {toy_subject("s0", Label::AD, n, {{a, 1.0}, {b, 2.0}}),
                                 toy_subject("s1", Label::CN, n, {})};
    const EdgeMask mask = compute_mask(Cohort(toy_atlas(n), subs), 0.2);
    EXPECT_EQ(mask.kept, (std::vector<EdgeId>{b}));
}

TEST(Mask, FullAtlasIdentity) {
    SyntheticSpec spec;
    spec.n_per_class = 2;
    const Cohort c = generate_synthetic(spec);
    EXPECT_EQ(compute_mask(c, 1.0).kept.size(), 3486u);
}

TEST(Mask, MatchesBruteForceRanking) {
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 6;
        std::vector<Subject> subs;
        for (int s = 0; s < 7; ++s) {
            std::map<EdgeId, double> w;
            for (EdgeId e : all_edges(n)) {
                if (rng.uniform01() < 0.5) w[e] = static_cast<double>(rng.below(3));
            }
            subs.push_back(toy_subject("s" + std::to_string(s), Label::CN, n, w));
        }
        const Cohort cohort(toy_atlas(n), subs);
        const double ratio = rng.uniform(0.05, 1.0);
        // Reference: sort by (count desc, sum desc, edge asc).
        std::vector<std::tuple<int, double, EdgeId>> rows;
        for (EdgeId e : all_edges(n)) {
            int count = 0;
            double sum = 0.0;
            for (const auto& s : subs) {
                count += s.connectome.weight(e) > 0.0 ? 1 : 0;
                sum += s.connectome.weight(e);
            }
            rows.emplace_back(count, sum, e);
        }
        std::sort(rows.begin(), rows.end(), [](const auto& x, const auto& y) {
            if (std::get<0>(x) != std::get<0>(y)) return std::get<0>(x) > std::get<0>(y);
            if (std::get<1>(x) != std::get<1>(y)) return std::get<1>(x) > std::get<1>(y);
            return std::get<2>(x) < std::get<2>(y);
        });
        const auto k = static_cast<std::size_t>(std::max(1.0, std::ceil(ratio * 15.0 - 1e-9)));
        std::vector<EdgeId> expect;
        for (std::size_t r = 0; r < k; ++r) expect.push_back(std::get<2>(rows[r]));
        std::sort(expect.begin(), expect.end());
        EXPECT_EQ(compute_mask(cohort, ratio).kept, expect);
    }
}

TEST(Mask, ApplyShapeAndValues) {
    const int n = 4;
    std::vector<Subject> subs;
    for (int k = 0; k < 10; ++k) {
        subs.push_back(toy_subject("s" + std::to_string(k), Label::CN, n, {{make_edge(0, 1), 1.0 + k}}));
    }
    const Cohort cohort(toy_atlas(n), subs);
    EdgeMask mask;
    mask.kept = {make_edge(0, 1), make_edge(0, 2), make_edge(0, 3), make_edge(1, 2), make_edge(2, 3)};
    const auto vecs = apply_mask(cohort, mask);
    ASSERT_EQ(vecs.size(), 10u);
    for (std::size_t k = 0; k < vecs.size(); ++k) {
        ASSERT_EQ(vecs[k].values.size(), 5u);
        EXPECT_EQ(vecs[k].values[0], 1.0 + static_cast<double>(k));
        EXPECT_EQ(vecs[k].values[1], 0.0);
    }
    expect_error_containing([&] { apply_mask(cohort, EdgeMask{}); }, "empty feature space");
}

TEST(Mask, SaveLoad) {
    const auto dir = scratch("mask");
    EdgeMask mask;
    mask.kept = {make_edge(0, 1), make_edge(5, 9)};
    save_mask(mask, dir / "mask.json");
    EXPECT_EQ(load_mask(dir / "mask.json").kept, mask.kept);
}

TEST(Synthetic, PlantedEdgeSeparatesClasses) {
    SyntheticSpec spec;
    spec.seed = 7;
    spec.n_per_class = 50;
    spec.planted = {parse_planted("3,17,2.0,lt")};
    const Cohort c = generate_synthetic(spec);
    ASSERT_EQ(c.size(), 100u);
    EdgeMask mask;
    mask.kept = {make_edge(3, 17)};
    const auto vecs = apply_mask(c, mask);
    const auto split = best_split(vecs);
    ASSERT_TRUE(split.has_value());
    const DecisionTree tree = fit_tree(vecs, mask.kept, TreeParams{1, 2});
    EXPECT_EQ(training_accuracy(tree, vecs), 1.0);
    for (const auto& s : c.subjects()) {
        const double w = s.connectome.weight(3, 17);
        if (s.diagnosis == Label::AD) EXPECT_LT(w, 2.0);
        else EXPECT_GT(w, 2.0);
    }
}

TEST(Synthetic, DeterministicAndBalanced) {
    SyntheticSpec spec;
    spec.seed = 7;
    spec.n_per_class = 12;
    spec.planted = {parse_planted("3,17,2.0,lt")};
    spec.noise_rate = 0.0;
    EXPECT_EQ(generate_synthetic(spec), generate_synthetic(spec));
    const Cohort c = generate_synthetic(spec);
    int ad = 0;
    std::map<std::pair<Sex, std::string>, int> cells;
    for (const auto& s : c.subjects()) {
        ad += s.diagnosis == Label::AD ? 1 : 0;
        ++cells[{s.sex, s.manufacturer}];
    }
    EXPECT_EQ(ad, 12);
    EXPECT_EQ(cells.size(), 4u);

    spec.n_per_class = 1;
    const Cohort tiny = generate_synthetic(spec);
    ASSERT_EQ(tiny.size(), 2u);
    EXPECT_NE(tiny.subjects()[0].diagnosis, tiny.subjects()[1].diagnosis);
}

TEST(Synthetic, Errors) {
    SyntheticSpec spec;
    spec.planted = {parse_planted("3,17,2.0,lt"), parse_planted("17,3,1.0,gt")};
    EXPECT_THROW(generate_synthetic(spec), Error);
    EXPECT_THROW(parse_planted("3,17,2.0"), Error);
    EXPECT_THROW(parse_planted("3,17,2.0,sideways"), Error);
    EXPECT_EQ(parse_planted("1,2,0.5,>").direction, PlantDirection::ad_above);
}
