#pragma once
// Helpers shared by the test binaries: tiny cohorts, random tasks, and
// independent reference implementations used as oracles.

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "learnad/data_model.hpp"
#include "learnad/nkg.hpp"
#include "learnad/rule_learner.hpp"

namespace testsupport {

using namespace learnad;

inline RegionAtlas toy_atlas(int n) {
    std::vector<std::string> names;
    for (int k = 0; k < n; ++k) names.push_back("R" + std::to_string(k));
    return RegionAtlas(names);
}

// Symmetric matrix from an upper-triangle edge -> weight map.
inline Connectome toy_connectome(int n, const std::map<EdgeId, double>& w) {
    std::vector<double> m(static_cast<std::size_t>(n * n), 0.0);
    for (const auto& [e, v] : w) {
        m[static_cast<std::size_t>(e.i * n + e.j)] = v;
        m[static_cast<std::size_t>(e.j * n + e.i)] = v;
    }
    return Connectome(n, m);
}

inline Subject toy_subject(const std::string& id, Label label, int n, const std::map<EdgeId, double>& w,
                           Sex sex = Sex::F, const std::string& maker = "MfrA") {
    return Subject{id, toy_connectome(n, w), label, sex, maker};
}

inline Example example(const std::string& id, Label label, std::int64_t pen,
                       std::vector<ContextFact> ctx) {
    Example ex;
    ex.id = id;
    ex.label = label;
    ex.penalty = pen;
    std::sort(ctx.begin(), ctx.end());
    ex.context = std::move(ctx);
    return ex;
}

// Space over `edges` whose domain follows the usual construction rule.
inline HypothesisSpace space_for(const std::vector<EdgeId>& edges, const std::vector<Example>& examples,
                                 int max_body) {
    SelectedEdges sel{edges, Provenance::dt};
    return build_space(sel, examples, max_body);
}

struct RandomTaskSpec {
    int n_edges_max = 3;
    int n_ad_max = 5;
    int n_cn_max = 8;
    int value_range = 12;     // strengths drawn from [0, value_range)
    int max_body_max = 2;
    std::int64_t ad_pen_max = 4;
    std::int64_t ad_pen_total_max = 12;  // keeps the 3-rule oracle cap exact
    double missing_rate = 0.0;           // chance a context fact is dropped
};

inline LearningTask random_task(Rng& rng, const RandomTaskSpec& s) {
    const int n_edges = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(s.n_edges_max)));
    std::vector<EdgeId> edges;
    std::set<EdgeId> seen;
    while (static_cast<int>(edges.size()) < n_edges) {
        const int a = static_cast<int>(rng.below(10));
        const int b = static_cast<int>(rng.below(10));
        if (a == b) continue;
        const EdgeId e = make_edge(a, b);
        if (seen.insert(e).second) edges.push_back(e);
    }
    const int n_ad = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(s.n_ad_max)));
    const int n_cn = static_cast<int>(rng.below(static_cast<std::uint64_t>(s.n_cn_max + 1)));
    std::int64_t budget = s.ad_pen_total_max;
    std::vector<Example> examples;
    for (int k = 0; k < n_ad + n_cn; ++k) {
        const bool ad = k < n_ad;
        std::vector<ContextFact> ctx;
        for (EdgeId e : edges) {
            if (rng.uniform01() < s.missing_rate) continue;
            ctx.push_back({e, static_cast<ScaledStrength>(rng.below(static_cast<std::uint64_t>(s.value_range)))});
        }
        std::int64_t pen = 1;
        if (ad) {
            const std::int64_t left = n_ad - k - 1;  // AD examples still to come need 1 each
            const std::int64_t cap = std::min<std::int64_t>(s.ad_pen_max, budget - left);
            pen = 1 + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(std::max<std::int64_t>(cap, 1))));
            budget -= pen;
        } else {
            pen = 1 + static_cast<std::int64_t>(rng.below(2));
        }
        examples.push_back(example((ad ? "ad_" : "cn_") + std::to_string(k), ad ? Label::AD : Label::CN, pen, ctx));
    }
    LearningTask task;
    const int max_body = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(s.max_body_max)));
    task.space = space_for(edges, examples, max_body);
    task.examples = std::move(examples);
    return task;
}

// Literal evaluation written out directly, without the library's lookup.
inline bool ref_fires(const Rule& rule, const Example& ex) {
    for (const auto& lit : rule.body) {
        bool found = false;
        for (const auto& f : ex.context) {
            if (f.edge.i == lit.edge.i && f.edge.j == lit.edge.j) {
                found = true;
                const auto v = f.strength;
                const auto t = lit.threshold;
                bool ok = false;
                switch (lit.comparator) {
                    case Comparator::ge: ok = v >= t; break;
                    case Comparator::gt: ok = v > t; break;
                    case Comparator::lt: ok = v < t; break;
                    case Comparator::le: ok = v <= t; break;
                }
                if (!ok) return false;
            }
        }
        if (!found) return false;
    }
    return true;
}

inline std::int64_t ref_total(const std::vector<Rule>& rules, const LearningTask& task) {
    std::int64_t total = 0;
    for (const auto& r : rules) total += 1 + 2 * static_cast<std::int64_t>(r.body.size());
    for (const auto& ex : task.examples) {
        bool any = false;
        for (const auto& r : rules) any = any || ref_fires(r, ex);
        const bool covered = ex.label == Label::AD ? any : !any;
        if (!covered) total += ex.penalty;
    }
    return total;
}

// Every rule of a single-edge space with max_body 1.
inline std::vector<Rule> ref_single_edge_rules(const HypothesisSpace& space) {
    std::vector<Rule> out;
    for (EdgeId e : space.edges) {
        for (Comparator c : {Comparator::ge, Comparator::gt, Comparator::lt, Comparator::le}) {
            for (auto t : space.threshold_domain.at(e)) out.push_back(Rule{{BodyLiteral{e, c, t}}});
        }
    }
    return out;
}

// Minimum total over all hypotheses of at most two single-literal rules.
inline std::int64_t ref_min_total_two_rules(const LearningTask& task) {
    const auto rules = ref_single_edge_rules(task.space);
    std::int64_t best = ref_total({}, task);
    for (std::size_t a = 0; a < rules.size(); ++a) {
        best = std::min(best, ref_total({rules[a]}, task));
        for (std::size_t b = a + 1; b < rules.size(); ++b) best = std::min(best, ref_total({rules[a], rules[b]}, task));
    }
    return best;
}

}  // namespace testsupport
