#pragma once
// Exact learner for AD-headed threshold rules: minimizes hypothesis length
// (in atoms) plus the penalties of uncovered examples.

#include <compare>
#include <cstdint>
#include <vector>

#include <json.hpp>

#include "learnad/nkg.hpp"

namespace learnad {

struct BodyLiteral {
    EdgeId edge;
    Comparator comparator = Comparator::lt;
    ScaledStrength threshold = 0;

    auto operator<=>(const BodyLiteral&) const = default;
};

// Head is always `ad`. Body literals are over distinct edges, sorted by edge.
struct Rule {
    std::vector<BodyLiteral> body;

    // 1 for the head plus, per edge, the connection atom and the comparison.
    std::int64_t atom_count() const { return 1 + 2 * static_cast<std::int64_t>(body.size()); }

    auto operator<=>(const Rule&) const = default;
};

// Builds a rule with its body sorted; rejects empty bodies and repeated edges.
Rule make_rule(std::vector<BodyLiteral> body);

struct Hypothesis {
    std::vector<Rule> rules;  // canonical: sorted, unique

    std::int64_t atom_count() const;
    bool operator==(const Hypothesis&) const = default;
};

Hypothesis make_hypothesis(std::vector<Rule> rules);

struct Score {
    std::int64_t length = 0;
    std::int64_t penalty_sum = 0;
    std::int64_t total = 0;

    bool operator==(const Score&) const = default;
};

// A body edge missing from the context leaves the body unsatisfied.
bool rule_fires(const Rule& rule, const std::vector<ContextFact>& context);

// AD examples are covered when some rule fires, CN examples when none does.
bool covers(const Hypothesis& hypothesis, const Example& example);

// Throws when a rule lies outside task.space.
Score score(const Hypothesis& hypothesis, const LearningTask& task);
void check_in_space(const Rule& rule, const HypothesisSpace& space);

// Moves every threshold onto the edge's threshold domain without changing
// which domain values satisfy the literal (the comparator may change).
Rule snap_to_domain(const Rule& rule, const HypothesisSpace& space);

struct LearnerConfig {
    std::uint64_t max_nodes = 2'000'000;      // branch-and-bound node budget
    std::uint64_t max_candidates = 2'000'000; // candidate rules before deduplication
};

struct LearnResult {
    Hypothesis hypothesis;
    Score score;
    bool optimal = true;  // false when a budget cut the search short
    std::uint64_t candidates = 0;  // after deduplication and dominance pruning
    std::uint64_t nodes = 0;
};

// Candidate rules for `task` with thresholds reduced to class-boundary points,
// deduplicated by coverage and with dominated rules removed.
std::vector<Rule> candidate_rules(const LearningTask& task);

LearnResult learn(const LearningTask& task, const LearnerConfig& config = {});

// Greedy weighted set cover: the branch-and-bound's initial incumbent.
Hypothesis greedy_learn(const LearningTask& task);

struct BruteForceLimits {
    std::size_t max_rules = 300;       // after coverage deduplication
    std::size_t max_hypothesis_rules = 3;
    std::uint64_t max_enumerated = 5'000'000;
};

// Exhaustive search over every rule of the space; test oracle for learn.
Hypothesis brute_force_learn(const LearningTask& task, const BruteForceLimits& limits = {});

Hypothesis union_hypotheses(const std::vector<Hypothesis>& per_task);

nlohmann::json hypothesis_to_json(const Hypothesis& hypothesis);
Hypothesis hypothesis_from_json(const nlohmann::json& doc);
nlohmann::json score_to_json(const Score& s);

}  // namespace learnad
