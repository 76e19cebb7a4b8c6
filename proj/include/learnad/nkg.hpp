#pragma once
// Network-to-knowledge generation: compiles selected edges and labelled
// feature vectors into learning tasks of weighted context-dependent examples
// over a comparator-threshold hypothesis space.

#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "learnad/data_model.hpp"
#include "learnad/feature_select.hpp"

namespace learnad {

// Connection strength in integer milli-units.
using ScaledStrength = std::int64_t;

// round-half-even to 4 decimals, x1000, round-half-even to an integer. The
// rounding works on the shortest decimal form of `raw`, so 0.12345 -> 123 and
// 0.12355 -> 124 regardless of binary representation error.
ScaledStrength scale_strength(double raw);

enum class Comparator { ge, gt, lt, le };

inline constexpr Comparator kComparators[] = {Comparator::ge, Comparator::gt, Comparator::lt,
                                              Comparator::le};

std::string_view comparator_symbol(Comparator c);
Comparator parse_comparator(std::string_view text);

constexpr bool holds(Comparator c, ScaledStrength value, ScaledStrength threshold) {
    switch (c) {
        case Comparator::ge: return value >= threshold;
        case Comparator::gt: return value > threshold;
        case Comparator::lt: return value < threshold;
        case Comparator::le: return value <= threshold;
    }
    return false;
}

struct ContextFact {
    EdgeId edge;
    ScaledStrength strength = 0;

    auto operator<=>(const ContextFact&) const = default;
};

// Inclusions/exclusions follow from the label: AD examples include {ad} and
// exclude {cn}; CN examples the reverse.
struct Example {
    std::string id;
    std::int64_t penalty = 1;
    Label label = Label::CN;
    std::vector<ContextFact> context;  // sorted by edge
    std::string subject_id;

    Label inclusion() const { return label; }
    Label exclusion() const { return label == Label::AD ? Label::CN : Label::AD; }
    // nullptr when the edge is absent from the context.
    const ContextFact* find(EdgeId e) const;

    bool operator==(const Example&) const = default;
};

struct HypothesisSpace {
    std::vector<EdgeId> edges;  // selection order
    int max_body_edges = 2;
    std::map<EdgeId, std::vector<ScaledStrength>> threshold_domain;  // sorted, distinct

    // Rule templates ignoring thresholds: sum over body sizes s of C(E, s) * 4^s.
    std::uint64_t template_count() const;
    bool contains_edge(EdgeId e) const;

    bool operator==(const HypothesisSpace&) const = default;
};

struct LearningTask {
    std::vector<std::string> background;  // always empty here
    HypothesisSpace space;
    std::vector<Example> examples;

    bool operator==(const LearningTask&) const = default;
};

struct TaskPartition {
    std::vector<LearningTask> tasks;
    int n_ad_subsets = 1;
};

// One example per vector; `feature_order` names the edge behind each vector
// position. Ids are ad_NNN / cn_NNN numbered per class in input order.
std::vector<Example> build_examples(const std::vector<FeatureVector>& vectors,
                                    const std::vector<EdgeId>& feature_order,
                                    const SelectedEdges& selected, std::int64_t base_pen);

// Contexts for `cohort` restricted to the selected edges.
std::vector<Example> build_examples(const Cohort& cohort, const SelectedEdges& selected,
                                    std::int64_t base_pen);

// Threshold domain per edge: observed scaled strengths plus the sentinels
// max+1 and (when nonnegative) min-1.
HypothesisSpace build_space(const SelectedEdges& selected, const std::vector<Example>& examples,
                            int max_body_edges);

// AD penalty per task: max(1, round(base_pen * |CN| / |AD_task|)).
std::int64_t rescaled_ad_penalty(std::int64_t base_pen, std::size_t n_cn, std::size_t n_ad_task);

TaskPartition partition_tasks(const std::vector<Example>& examples, const HypothesisSpace& space,
                              int n_ad_subsets, std::int64_t base_pen, std::uint64_t seed);

nlohmann::json task_to_json(const LearningTask& task);
LearningTask task_from_json(const nlohmann::json& doc);

}  // namespace learnad
