#include <gtest/gtest.h>

#include "learnad/feature_select.hpp"
#include "support.hpp"

using namespace learnad;
using nlohmann::json;

namespace {

const EdgeId e1 = make_edge(0, 1);
const EdgeId e2 = make_edge(0, 2);
const EdgeId e3 = make_edge(1, 2);

std::string error_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(SelectGlobal, TopK) {
    ImportanceRanking r;
    r.scores = {{e1, 0.6}, {e2, 0.3}, {e3, 0.1}};
    EXPECT_EQ(select_global(r, 2).edges, (std::vector<EdgeId>{e1, e2}));
    EXPECT_EQ(select_global(r, 3).edges, (std::vector<EdgeId>{e1, e2, e3}));
    EXPECT_THROW(select_global(r, 4), Error);
    EXPECT_THROW(select_global(r, 0), Error);
}

TEST(SelectGlobal, TieGoesToLowerEdge) {
    ImportanceRanking r;
    r.scores = {{e1, 0.4}, {e3, 0.3}, {e2, 0.3}};
    EXPECT_EQ(select_global(r, 2).edges, (std::vector<EdgeId>{e1, e2}));
}

TEST(SelectGlobal, NestedInK) {
    Rng rng(5);
    ImportanceRanking r;
    for (EdgeId e : all_edges(8)) r.scores[e] = static_cast<double>(rng.below(5));
    for (int k = 1; k < 28; ++k) {
        const auto a = select_global(r, k).edges;
        const auto b = select_global(r, k + 1).edges;
        EXPECT_TRUE(std::equal(a.begin(), a.end(), b.begin()));
    }
}

TEST(AggregateFrequency, Counting) {
    const std::vector<InstanceExplanation> ex = {{"a", {e1, e2}}, {"b", {e1, e3}}, {"c", {e1, e2}}};
    EXPECT_EQ(aggregate_frequency(ex, 2).edges, (std::vector<EdgeId>{e1, e2}));
    EXPECT_EQ(aggregate_frequency(ex, 2).provenance, Provenance::external);
    EXPECT_THROW(aggregate_frequency(ex, 4), Error);
    EXPECT_THROW(aggregate_frequency({}, 1), Error);
}

TEST(AggregateFrequency, SingleExplanationSorted) {
    const std::vector<InstanceExplanation> ex = {{"a", {e3, e1, e2}}};
    EXPECT_EQ(aggregate_frequency(ex, 3).edges, (std::vector<EdgeId>{e1, e2, e3}));
}

TEST(AggregateFrequency, TieAtBoundary) {
    const std::vector<InstanceExplanation> ex = {{"a", {e1, e3}}, {"b", {e1, e2}}, {"c", {e3, e2}}, {"d", {e1, e2}}};
    // e1: 3, e2: 3, e3: 2.
    EXPECT_EQ(aggregate_frequency(ex, 2).edges, (std::vector<EdgeId>{e1, e2}));
    const std::vector<InstanceExplanation> tie = {{"a", {e1, e3}}, {"b", {e1, e2}}, {"c", {e3, e2}}};
    EXPECT_EQ(aggregate_frequency(tie, 2).edges, (std::vector<EdgeId>{e1, e2}));
}

TEST(AggregateFrequency, PermutationInvariant) {
    std::vector<InstanceExplanation> ex = {{"a", {e1, e2}}, {"b", {e3, e2}}, {"c", {e1, e3}}, {"d", {e2, e1}}};
    const auto want = aggregate_frequency(ex, 3);
    Rng rng(9);
    for (int k = 0; k < 10; ++k) {
        rng.shuffle(ex);
        EXPECT_EQ(aggregate_frequency(ex, 3), want);
    }
}

TEST(Explanations, Parse) {
    const json ok = json::parse(R"({"k_instance": 2, "explanations": [
        {"subject_id": "a", "edges": [[0,1],[2,1]]},
        {"subject_id": "b", "edges": [[5,6],[7,8]]},
        {"subject_id": "c", "edges": [[0,1],[3,4]]}]})");
    const auto ex = parse_explanations(ok);
    ASSERT_EQ(ex.size(), 3u);
    EXPECT_EQ(ex[0].edges[1], make_edge(1, 2));

    auto with_edges = [](const std::string& edges) {
        return json::parse(R"({"k_instance": 2, "explanations": [{"subject_id": "a", "edges": )" + edges + "}]}");
    };
    EXPECT_NE(error_of([&] { parse_explanations(with_edges("[[7,7],[1,2]]")); }).find("self-edge"), std::string::npos);
    EXPECT_NE(error_of([&] { parse_explanations(with_edges("[[90,2],[1,2]]")); }).find("region index out of range"),
              std::string::npos);
    EXPECT_NE(error_of([&] { parse_explanations(with_edges("[[1,2],[2,1]]")); }).find("duplicate"), std::string::npos);
    EXPECT_NE(error_of([&] { parse_explanations(with_edges("[[1,2,3],[2,1]]")); }).find("malformed"), std::string::npos);
    EXPECT_NE(error_of([&] { parse_explanations(with_edges("[[1,2]]")); }).find("k_instance"), std::string::npos);
}

TEST(Explanations, UnknownSubject) {
    const int n = 3;
    const Cohort c(testsupport::toy_atlas(n), {testsupport::toy_subject("a", Label::AD, n, {})});
    const json doc = json::parse(R"({"k_instance": 1, "explanations": [{"subject_id": "zz", "edges": [[0,1]]}]})");
    EXPECT_NE(error_of([&] { parse_explanations(doc, &c); }).find("unknown subject"), std::string::npos);
    const json bad_range = json::parse(R"({"k_instance": 1, "explanations": [{"subject_id": "a", "edges": [[0,5]]}]})");
    EXPECT_THROW(parse_explanations(bad_range, &c), Error);
}

TEST(Selected, JsonRoundTrip) {
    const SelectedEdges s{{e3, e1}, Provenance::rf};
    EXPECT_EQ(selected_from_json(selected_to_json(s)), s);
    EXPECT_THROW(selected_from_json(json::parse(R"({"provenance":"dt","edges":[]})")), Error);
    EXPECT_THROW(selected_from_json(json::parse(R"({"provenance":"dt","edges":[[0,1],[1,0]]})")), Error);
}
