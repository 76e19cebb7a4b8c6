#include "learnad/rule_learner.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>

namespace learnad {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Rules, hypotheses, coverage
// ---------------------------------------------------------------------------

Rule make_rule(std::vector<BodyLiteral> body) {
    if (body.empty()) throw Error("rule body must not be empty");
    std::sort(body.begin(), body.end());
    for (std::size_t k = 1; k < body.size(); ++k) {
        if (body[k].edge == body[k - 1].edge) {
            throw Error("rule body repeats edge " + edge_to_string(body[k].edge));
        }
    }
    return Rule{std::move(body)};
}

std::int64_t Hypothesis::atom_count() const {
    std::int64_t atoms = 0;
    for (const auto& r : rules) atoms += r.atom_count();
    return atoms;
}

Hypothesis make_hypothesis(std::vector<Rule> rules) {
    std::sort(rules.begin(), rules.end());
    rules.erase(std::unique(rules.begin(), rules.end()), rules.end());
    return Hypothesis{std::move(rules)};
}

bool rule_fires(const Rule& rule, const std::vector<ContextFact>& context) {
    for (const auto& lit : rule.body) {
        auto it = std::lower_bound(context.begin(), context.end(), lit.edge,
                                   [](const ContextFact& f, EdgeId key) { return f.edge < key; });
        if (it == context.end() || it->edge != lit.edge) return false;
        if (!holds(lit.comparator, it->strength, lit.threshold)) return false;
    }
    return true;
}

bool covers(const Hypothesis& hypothesis, const Example& example) {
    bool fired = false;
    for (const auto& r : hypothesis.rules) {
        if (rule_fires(r, example.context)) {
            fired = true;
            break;
        }
    }
    return example.label == Label::AD ? fired : !fired;
}

void check_in_space(const Rule& rule, const HypothesisSpace& space) {
    if (rule.body.empty()) throw Error("rule outside the space: empty body");
    if (rule.body.size() > static_cast<std::size_t>(space.max_body_edges)) {
        throw Error("rule outside the space: body exceeds max_body_edges");
    }
    for (std::size_t k = 0; k < rule.body.size(); ++k) {
        const auto& lit = rule.body[k];
        if (k > 0 && rule.body[k - 1].edge == lit.edge) {
            throw Error("rule outside the space: repeated edge");
        }
        auto dom = space.threshold_domain.find(lit.edge);
        if (!space.contains_edge(lit.edge) || dom == space.threshold_domain.end()) {
            throw Error("rule outside the space: edge " + edge_to_string(lit.edge) + " not selected");
        }
        if (!std::binary_search(dom->second.begin(), dom->second.end(), lit.threshold)) {
            throw Error("rule outside the space: threshold " + std::to_string(lit.threshold) +
                        " not in the domain of " + edge_to_string(lit.edge));
        }
    }
}

Score score(const Hypothesis& hypothesis, const LearningTask& task) {
    Score s;
    for (const auto& r : hypothesis.rules) check_in_space(r, task.space);
    s.length = hypothesis.atom_count();
    for (const auto& ex : task.examples) {
        if (!covers(hypothesis, ex)) s.penalty_sum += ex.penalty;
    }
    s.total = s.length + s.penalty_sum;
    return s;
}

Rule snap_to_domain(const Rule& rule, const HypothesisSpace& space) {
    std::vector<BodyLiteral> body;
    for (const auto& lit : rule.body) {
        auto dom_it = space.threshold_domain.find(lit.edge);
        if (dom_it == space.threshold_domain.end() || dom_it->second.empty()) {
            throw Error("no threshold domain for edge " + edge_to_string(lit.edge));
        }
        const auto& dom = dom_it->second;
        auto first_ge = std::lower_bound(dom.begin(), dom.end(), lit.threshold);
        auto first_gt = std::upper_bound(dom.begin(), dom.end(), lit.threshold);
        BodyLiteral out = lit;
        switch (lit.comparator) {
            case Comparator::lt:
                // {v < t} = {v < d} for the first domain value d >= t.
                if (first_ge != dom.end()) out.threshold = *first_ge;
                else out = {lit.edge, Comparator::le, dom.back()};
                break;
            case Comparator::ge:
                if (first_ge != dom.end()) out.threshold = *first_ge;
                else out = {lit.edge, Comparator::gt, dom.back()};
                break;
            case Comparator::le:
                // {v <= t} = {v <= d} for the last domain value d <= t.
                if (first_gt != dom.begin()) out.threshold = *std::prev(first_gt);
                else out = {lit.edge, Comparator::lt, dom.front()};
                break;
            case Comparator::gt:
                if (first_gt != dom.begin()) out.threshold = *std::prev(first_gt);
                else out = {lit.edge, Comparator::ge, dom.front()};
                break;
        }
        body.push_back(out);
    }
    return make_rule(std::move(body));
}

Hypothesis union_hypotheses(const std::vector<Hypothesis>& per_task) {
    if (per_task.empty()) throw Error("no hypotheses to unite");
    std::vector<Rule> all;
    for (const auto& h : per_task) all.insert(all.end(), h.rules.begin(), h.rules.end());
    return make_hypothesis(std::move(all));
}

// ---------------------------------------------------------------------------
// Bitsets over examples
// ---------------------------------------------------------------------------

namespace {

struct Bits {
    std::vector<std::uint64_t> w;

    Bits() = default;
    explicit Bits(std::size_t n) : w((n + 63) / 64, 0) {}

    void set(std::size_t k) { w[k / 64] |= std::uint64_t{1} << (k % 64); }
    void reset(std::size_t k) { w[k / 64] &= ~(std::uint64_t{1} << (k % 64)); }
    bool test(std::size_t k) const { return (w[k / 64] >> (k % 64)) & 1u; }
    bool any() const {
        return std::any_of(w.begin(), w.end(), [](std::uint64_t x) { return x != 0; });
    }
    std::size_t count() const {
        std::size_t c = 0;
        for (auto x : w) c += static_cast<std::size_t>(std::popcount(x));
        return c;
    }
    Bits operator&(const Bits& o) const {
        Bits r = *this;
        for (std::size_t k = 0; k < w.size(); ++k) r.w[k] &= o.w[k];
        return r;
    }
    Bits& operator|=(const Bits& o) {
        for (std::size_t k = 0; k < w.size(); ++k) w[k] |= o.w[k];
        return *this;
    }
    Bits minus(const Bits& o) const {
        Bits r = *this;
        for (std::size_t k = 0; k < w.size(); ++k) r.w[k] &= ~o.w[k];
        return r;
    }
    bool subset_of(const Bits& o) const {
        for (std::size_t k = 0; k < w.size(); ++k) {
            if (w[k] & ~o.w[k]) return false;
        }
        return true;
    }
    template <typename Fn>
    void for_each(Fn&& fn) const {
        for (std::size_t k = 0; k < w.size(); ++k) {
            std::uint64_t x = w[k];
            while (x) {
                const int b = std::countr_zero(x);
                fn(k * 64 + static_cast<std::size_t>(b));
                x &= x - 1;
            }
        }
    }
    bool operator==(const Bits&) const = default;
    auto operator<=>(const Bits&) const = default;
};

// Examples split by class; AD and CN coverage are tracked separately.
struct Problem {
    std::vector<std::size_t> ad;  // indices into task.examples
    std::vector<std::size_t> cn;
    std::vector<std::int64_t> ad_pen;
    std::vector<std::int64_t> cn_pen;

    explicit Problem(const LearningTask& task) {
        for (std::size_t k = 0; k < task.examples.size(); ++k) {
            const auto& ex = task.examples[k];
            if (ex.penalty < 1) throw Error("example '" + ex.id + "' has a non-positive penalty");
            if (ex.label == Label::AD) {
                ad.push_back(k);
                ad_pen.push_back(ex.penalty);
            } else {
                cn.push_back(k);
                cn_pen.push_back(ex.penalty);
            }
        }
        detect_uniform();
    }

    // Partition tasks give every example of a class the same penalty.
    std::int64_t ad_uniform = 0;  // 0 when penalties differ
    std::int64_t cn_uniform = 0;

    void detect_uniform() {
        auto uniform = [](const std::vector<std::int64_t>& v) -> std::int64_t {
            if (v.empty()) return 0;
            return std::all_of(v.begin(), v.end(), [&](std::int64_t x) { return x == v.front(); }) ? v.front() : 0;
        };
        ad_uniform = uniform(ad_pen);
        cn_uniform = uniform(cn_pen);
    }

    // Weight of a & b (AD) and of a \ b (CN) without building the set.
    std::int64_t ad_weight_and(const Bits& a, const Bits& b) const {
        if (ad_uniform) {
            std::int64_t c = 0;
            for (std::size_t k = 0; k < a.w.size(); ++k) c += std::popcount(a.w[k] & b.w[k]);
            return c * ad_uniform;
        }
        return ad_weight(a & b);
    }
    std::int64_t cn_weight_minus(const Bits& a, const Bits& b) const {
        if (cn_uniform) {
            std::int64_t c = 0;
            for (std::size_t k = 0; k < a.w.size(); ++k) c += std::popcount(a.w[k] & ~b.w[k]);
            return c * cn_uniform;
        }
        return cn_weight(a.minus(b));
    }

    std::int64_t ad_weight(const Bits& b) const {
        std::int64_t s = 0;
        b.for_each([&](std::size_t x) { s += ad_pen[x]; });
        return s;
    }
    std::int64_t cn_weight(const Bits& b) const {
        std::int64_t s = 0;
        b.for_each([&](std::size_t y) { s += cn_pen[y]; });
        return s;
    }
};

struct Candidate {
    Rule rule;
    std::int64_t atoms = 0;
    Bits ad;  // AD examples on which the rule fires
    Bits cn;  // CN examples on which the rule fires
};

struct LiteralOption {
    BodyLiteral literal;
    Bits ad;
    Bits cn;
    bool trivial = false;  // satisfied by every example carrying the edge
};

// Literals on one edge with thresholds at class-boundary points. A literal
// whose last included value level holds no AD example, or whose next
// excluded level holds no CN example, is dominated by a neighbour and skipped.
std::vector<LiteralOption> literal_options(const LearningTask& task, const Problem& p, EdgeId edge) {
    const auto dom_it = task.space.threshold_domain.find(edge);
    if (dom_it == task.space.threshold_domain.end()) return {};
    const auto& dom = dom_it->second;

    std::vector<std::optional<ScaledStrength>> ad_v(p.ad.size());
    std::vector<std::optional<ScaledStrength>> cn_v(p.cn.size());
    std::map<ScaledStrength, std::pair<bool, bool>> level_flags;  // value -> (has AD, has CN)
    for (std::size_t x = 0; x < p.ad.size(); ++x) {
        if (const ContextFact* f = task.examples[p.ad[x]].find(edge)) {
            ad_v[x] = f->strength;
            level_flags[f->strength].first = true;
        }
    }
    for (std::size_t y = 0; y < p.cn.size(); ++y) {
        if (const ContextFact* f = task.examples[p.cn[y]].find(edge)) {
            cn_v[y] = f->strength;
            level_flags[f->strength].second = true;
        }
    }
    std::vector<ScaledStrength> lv;
    std::vector<bool> has_ad;
    std::vector<bool> has_cn;
    for (const auto& [v, flags] : level_flags) {
        lv.push_back(v);
        has_ad.push_back(flags.first);
        has_cn.push_back(flags.second);
    }
    const std::size_t m = lv.size();

    auto first_above = [&](ScaledStrength v) -> std::optional<ScaledStrength> {
        auto it = std::upper_bound(dom.begin(), dom.end(), v);
        if (it == dom.end()) return std::nullopt;
        return *it;
    };
    auto last_below = [&](ScaledStrength v) -> std::optional<ScaledStrength> {
        auto it = std::lower_bound(dom.begin(), dom.end(), v);
        if (it == dom.begin()) return std::nullopt;
        return *std::prev(it);
    };
    auto make_option = [&](BodyLiteral lit, bool trivial) {
        LiteralOption opt{lit, Bits(p.ad.size()), Bits(p.cn.size()), trivial};
        for (std::size_t x = 0; x < ad_v.size(); ++x) {
            if (ad_v[x] && holds(lit.comparator, *ad_v[x], lit.threshold)) opt.ad.set(x);
        }
        for (std::size_t y = 0; y < cn_v.size(); ++y) {
            if (cn_v[y] && holds(lit.comparator, *cn_v[y], lit.threshold)) opt.cn.set(y);
        }
        return opt;
    };

    std::vector<LiteralOption> out;
    // Sentinels stand in for the missing neighbour level at either end.
    constexpr ScaledStrength kLow = std::numeric_limits<ScaledStrength>::min();
    constexpr ScaledStrength kHigh = std::numeric_limits<ScaledStrength>::max();
    // Lower-bound literals: levels k..m-1 satisfied.
    for (std::size_t k = 0; k < m; ++k) {
        if (!has_ad[k] || (k > 0 && !has_cn[k - 1])) continue;
        const ScaledStrength prev = k > 0 ? lv[k - 1] : kLow;
        std::optional<BodyLiteral> lit;
        if (auto t = first_above(prev); t && *t <= lv[k]) {
            lit = BodyLiteral{edge, Comparator::ge, *t};
        } else if (auto d = last_below(lv[k]); d && *d >= prev) {
            lit = BodyLiteral{edge, Comparator::gt, *d};
        }
        if (lit) out.push_back(make_option(*lit, k == 0));
    }
    // Upper-bound literals: levels 0..k satisfied.
    for (std::size_t k = 0; k < m; ++k) {
        if (!has_ad[k] || (k + 1 < m && !has_cn[k + 1])) continue;
        const ScaledStrength next = k + 1 < m ? lv[k + 1] : kHigh;
        std::optional<BodyLiteral> lit;
        if (auto t = first_above(lv[k]); t && *t <= next) {
            lit = BodyLiteral{edge, Comparator::lt, *t};
        } else if (auto d = last_below(next); d && *d >= lv[k]) {
            lit = BodyLiteral{edge, Comparator::le, *d};
        }
        if (lit) out.push_back(make_option(*lit, k + 1 == m));
    }
    return out;
}

struct CandidateSet {
    std::vector<Candidate> candidates;
    bool truncated = false;
};

CandidateSet build_candidates(const LearningTask& task, const Problem& p, std::uint64_t max_candidates) {
    std::vector<EdgeId> edges = task.space.edges;
    std::sort(edges.begin(), edges.end());
    std::vector<std::vector<LiteralOption>> options;
    for (EdgeId e : edges) options.push_back(literal_options(task, p, e));

    const int max_body = std::min<int>(task.space.max_body_edges, static_cast<int>(edges.size()));

    // Count candidates per body size to respect the budget.
    std::vector<std::uint64_t> per_size(static_cast<std::size_t>(max_body) + 1, 0);
    {
        std::vector<std::uint64_t> nontrivial;
        for (const auto& opts : options) {
            nontrivial.push_back(static_cast<std::uint64_t>(
                std::count_if(opts.begin(), opts.end(), [](const auto& o) { return !o.trivial; })));
        }
        for (const auto& opts : options) per_size[1] += opts.size();
        // Elementary symmetric sums of the nontrivial option counts.
        std::vector<long double> esum(static_cast<std::size_t>(max_body) + 1, 0.0L);
        esum[0] = 1.0L;
        for (auto c : nontrivial) {
            for (int s = max_body; s >= 1; --s) esum[static_cast<std::size_t>(s)] += esum[static_cast<std::size_t>(s - 1)] * c;
        }
        for (int s = 2; s <= max_body; ++s) {
            per_size[static_cast<std::size_t>(s)] = static_cast<std::uint64_t>(
                std::min<long double>(esum[static_cast<std::size_t>(s)], 1e18L));
        }
    }
    int body_limit = max_body;
    std::uint64_t running = 0;
    CandidateSet out;
    for (int s = 1; s <= max_body; ++s) {
        running += per_size[static_cast<std::size_t>(s)];
        if (running > max_candidates && s > 1) {
            body_limit = s - 1;
            out.truncated = true;
            break;
        }
    }

    std::map<std::pair<Bits, Bits>, Candidate> by_signature;
    auto consider = [&](Rule rule, const Bits& ad, const Bits& cn) {
        if (!ad.any()) return;
        Candidate c{std::move(rule), 0, ad, cn};
        c.atoms = c.rule.atom_count();
        auto key = std::make_pair(ad, cn);
        auto it = by_signature.find(key);
        if (it == by_signature.end()) {
            by_signature.emplace(std::move(key), std::move(c));
        } else if (std::tie(c.atoms, c.rule) < std::tie(it->second.atoms, it->second.rule)) {
            it->second = std::move(c);
        }
    };

    std::vector<BodyLiteral> body;
    std::function<void(std::size_t, const Bits&, const Bits&)> extend =
        [&](std::size_t from, const Bits& ad, const Bits& cn) {
            if (static_cast<int>(body.size()) >= body_limit) return;
            for (std::size_t e = from; e < options.size(); ++e) {
                for (const auto& opt : options[e]) {
                    if (!body.empty() && opt.trivial) continue;
                    const Bits ad2 = body.empty() ? opt.ad : ad & opt.ad;
                    if (!ad2.any()) continue;
                    const Bits cn2 = body.empty() ? opt.cn : cn & opt.cn;
                    body.push_back(opt.literal);
                    consider(Rule{body}, ad2, cn2);
                    if (!opt.trivial) extend(e + 1, ad2, cn2);
                    body.pop_back();
                }
            }
        };
    extend(0, Bits(p.ad.size()), Bits(p.cn.size()));

    std::vector<Candidate> cands;
    cands.reserve(by_signature.size());
    for (auto& [key, c] : by_signature) cands.push_back(std::move(c));
    std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
        return std::tie(a.atoms, a.rule) < std::tie(b.atoms, b.rule);
    });

    // Drop rules dominated by one with no more atoms, a superset of AD
    // coverage and a subset of CN firings. Signatures are distinct here, so
    // domination is strict and some dominator always survives.
    std::vector<std::size_t> ad_count(cands.size());
    std::vector<std::size_t> cn_count(cands.size());
    for (std::size_t k = 0; k < cands.size(); ++k) {
        ad_count[k] = cands[k].ad.count();
        cn_count[k] = cands[k].cn.count();
    }
    std::vector<bool> dominated(cands.size(), false);
    for (std::size_t r = 0; r < cands.size(); ++r) {
        for (std::size_t s = 0; s < cands.size(); ++s) {
            if (s == r || cands[s].atoms > cands[r].atoms) continue;
            if (ad_count[s] < ad_count[r] || cn_count[s] > cn_count[r]) continue;
            if (cands[r].ad.subset_of(cands[s].ad) && cands[s].cn.subset_of(cands[r].cn)) {
                dominated[r] = true;
                break;
            }
        }
    }
    for (std::size_t k = 0; k < cands.size(); ++k) {
        if (!dominated[k]) out.candidates.push_back(std::move(cands[k]));
    }
    return out;
}

std::vector<std::size_t> greedy_cover(const std::vector<Candidate>& cands, const Problem& p) {
    Bits covered(p.ad.size());
    Bits fired(p.cn.size());
    std::vector<bool> used(cands.size(), false);
    std::vector<std::size_t> chosen;
    while (true) {
        std::int64_t best_gain = 0;
        std::optional<std::size_t> best;
        for (std::size_t r = 0; r < cands.size(); ++r) {
            if (used[r]) continue;
            const std::int64_t gain = p.ad_weight(cands[r].ad.minus(covered)) - cands[r].atoms -
                                      p.cn_weight(cands[r].cn.minus(fired));
            if (gain > best_gain) {
                best_gain = gain;
                best = r;
            }
        }
        if (!best) break;
        used[*best] = true;
        chosen.push_back(*best);
        covered |= cands[*best].ad;
        fired |= cands[*best].cn;
    }
    return chosen;
}

class BranchAndBound {
  public:
    BranchAndBound(const std::vector<Candidate>& cands, const Problem& p, std::uint64_t max_nodes)
        : cands_(cands), p_(p), max_nodes_(max_nodes), cover_lists_(p.ad.size()) {
        for (std::size_t r = 0; r < cands.size(); ++r) {
            cands[r].ad.for_each([&](std::size_t x) { cover_lists_[x].push_back(r); });
        }
    }

    void offer(std::vector<std::size_t> chosen) {
        Bits covered(p_.ad.size());
        Bits fired(p_.cn.size());
        std::int64_t atoms = 0;
        for (std::size_t r : chosen) {
            covered |= cands_[r].ad;
            fired |= cands_[r].cn;
            atoms += cands_[r].atoms;
        }
        Bits all_ad(p_.ad.size());
        for (std::size_t x = 0; x < p_.ad.size(); ++x) all_ad.set(x);
        const std::int64_t total = atoms + p_.ad_weight(all_ad.minus(covered)) + p_.cn_weight(fired);
        offer(chosen, total, atoms);
    }

    void run() {
        Node root{Bits(p_.ad.size()), Bits(p_.ad.size()), Bits(p_.cn.size()), Bits(cands_.size()),
                  0, 0, 0, {}};
        for (std::size_t r = 0; r < cands_.size(); ++r) root.allowed.set(r);
        visit(root);
    }

    bool exhausted() const { return exhausted_; }
    std::uint64_t nodes() const { return nodes_; }
    const std::vector<std::size_t>& best() const { return best_chosen_; }
    std::int64_t best_total() const { return best_total_; }

  private:
    struct Node {
        Bits covered;
        Bits abandoned;  // AD examples decided to stay uncovered
        Bits fired;
        Bits allowed;    // candidates still selectable
        std::int64_t atoms;
        std::int64_t cn_cost;
        std::int64_t abandon_cost;
        std::vector<std::size_t> chosen;
    };

    std::vector<Rule> sorted_rules(const std::vector<std::size_t>& chosen) const {
        std::vector<Rule> rules;
        for (std::size_t r : chosen) rules.push_back(cands_[r].rule);
        std::sort(rules.begin(), rules.end());
        return rules;
    }

    void offer(const std::vector<std::size_t>& chosen, std::int64_t total, std::int64_t atoms) {
        bool better = !has_best_ || total < best_total_ || (total == best_total_ && atoms < best_atoms_);
        if (!better && has_best_ && total == best_total_ && atoms == best_atoms_) {
            better = sorted_rules(chosen) < sorted_rules(best_chosen_);
        }
        if (!better) return;
        has_best_ = true;
        best_total_ = total;
        best_atoms_ = atoms;
        best_chosen_ = chosen;
    }

    void visit(Node& node) {
        if (++nodes_ > max_nodes_) {
            exhausted_ = true;
            return;
        }
        const std::size_t n_ad = p_.ad.size();
        Bits open(n_ad);
        for (std::size_t x = 0; x < n_ad; ++x) {
            if (!node.covered.test(x) && !node.abandoned.test(x)) open.set(x);
        }

        // A rule of an optimal hypothesis covers, on its own, more AD weight
        // than its atom count; fresh coverage only shrinks further down, so
        // rules failing that now stay useless in the whole subtree.
        // At most k_max more rules fit under the incumbent, each costing >= 3
        // atoms, so a rule's new CN weight divided by k_max never exceeds its
        // share of the CN cost of any completion worth finding.
        const std::int64_t base = node.atoms + node.cn_cost + node.abandon_cost;
        const std::int64_t k_max = std::max<std::int64_t>(1, (best_total_ - base) / 3);
        std::vector<double> share(n_ad, std::numeric_limits<double>::infinity());
        // Atoms alone per covered example: stays a lower bound in every child,
        // whose allowed set only shrinks.
        std::vector<double> atom_share(n_ad, std::numeric_limits<double>::infinity());
        std::vector<std::size_t> n_cover(n_ad, 0);
        std::vector<std::size_t> useless;
        node.allowed.for_each([&](std::size_t r) {
            const Bits& ad = cands_[r].ad;
            if (p_.ad_weight_and(ad, open) <= cands_[r].atoms) {
                useless.push_back(r);
                return;
            }
            std::size_t n_fresh = 0;
            for (std::size_t k = 0; k < ad.w.size(); ++k) {
                n_fresh += static_cast<std::size_t>(std::popcount(ad.w[k] & open.w[k]));
            }
            const double cost = static_cast<double>(cands_[r].atoms) +
                                static_cast<double>(p_.cn_weight_minus(cands_[r].cn, node.fired)) /
                                    static_cast<double>(k_max);
            const double s = cost / static_cast<double>(n_fresh);
            const double sa = static_cast<double>(cands_[r].atoms) / static_cast<double>(n_fresh);
            for (std::size_t k = 0; k < ad.w.size(); ++k) {
                std::uint64_t x = ad.w[k] & open.w[k];
                while (x) {
                    const std::size_t e = k * 64 + static_cast<std::size_t>(std::countr_zero(x));
                    share[e] = std::min(share[e], s);
                    atom_share[e] = std::min(atom_share[e], sa);
                    ++n_cover[e];
                    x &= x - 1;
                }
            }
        });
        for (std::size_t r : useless) node.allowed.reset(r);

        // Examples no remaining rule can cover stay uncovered.
        open.for_each([&](std::size_t x) {
            if (n_cover[x] == 0) {
                node.abandoned.set(x);
                node.abandon_cost += p_.ad_pen[x];
            }
        });
        const std::int64_t cost = node.atoms + node.cn_cost + node.abandon_cost;
        double bound = static_cast<double>(cost);
        std::int64_t leave_all = cost;
        std::optional<std::size_t> pick;
        open.for_each([&](std::size_t x) {
            if (n_cover[x] == 0) return;
            bound += std::min(static_cast<double>(p_.ad_pen[x]), share[x]);
            leave_all += p_.ad_pen[x];
            if (!pick || n_cover[x] < n_cover[*pick]) pick = x;
        });

        offer(node.chosen, leave_all, node.atoms);
        if (!pick) return;
        constexpr double eps = 1e-9;
        if (bound > static_cast<double>(best_total_) + eps) return;
        // Descendants can at best tie on total and only add atoms.
        if (bound >= static_cast<double>(best_total_) - eps && node.atoms >= best_atoms_) return;

        const std::size_t x = *pick;
        std::vector<std::size_t> branch;
        for (std::size_t r : cover_lists_[x]) {
            if (node.allowed.test(r)) branch.push_back(r);
        }
        // Drop branch rules dominated at this node: another rule covers every
        // open AD example they cover, fires on no new CN example they spare,
        // and has no more atoms. Both conditions survive deeper in the tree.
        {
            std::vector<Bits> fresh;
            std::vector<Bits> new_cn;
            for (std::size_t r : branch) {
                fresh.push_back(cands_[r].ad & open);
                new_cn.push_back(cands_[r].cn.minus(node.fired));
            }
            std::vector<bool> gone(branch.size(), false);
            for (std::size_t a = 0; a < branch.size(); ++a) {
                for (std::size_t b = 0; b < branch.size() && !gone[a]; ++b) {
                    if (a == b || gone[b]) continue;
                    const auto& ra = cands_[branch[a]];
                    const auto& rb = cands_[branch[b]];
                    if (rb.atoms > ra.atoms || !fresh[a].subset_of(fresh[b]) || !new_cn[b].subset_of(new_cn[a])) continue;
                    // Equal profiles: keep the lower index.
                    const bool equal = rb.atoms == ra.atoms && fresh[a] == fresh[b] && new_cn[a] == new_cn[b];
                    if (!equal || branch[b] < branch[a]) gone[a] = true;
                }
            }
            std::vector<std::size_t> kept;
            for (std::size_t a = 0; a < branch.size(); ++a) {
                if (gone[a]) {
                    node.allowed.reset(branch[a]);
                } else {
                    kept.push_back(branch[a]);
                }
            }
            branch = std::move(kept);
        }
        std::vector<std::int64_t> gain(cands_.size(), 0);
        for (std::size_t r : branch) {
            gain[r] = p_.ad_weight_and(cands_[r].ad, open) - cands_[r].atoms -
                      p_.cn_weight_minus(cands_[r].cn, node.fired);
        }
        std::stable_sort(branch.begin(), branch.end(),
                         [&](std::size_t a, std::size_t b) { return gain[a] > gain[b]; });

        Bits allowed = node.allowed;
        for (std::size_t r : branch) {
            allowed.reset(r);
            {
                const std::int64_t child_atoms = node.atoms + cands_[r].atoms;
                double quick = static_cast<double>(child_atoms + node.cn_cost + node.abandon_cost +
                                                   p_.cn_weight_minus(cands_[r].cn, node.fired));
                open.for_each([&](std::size_t e) {
                    if (n_cover[e] > 0 && !cands_[r].ad.test(e)) {
                        quick += std::min(static_cast<double>(p_.ad_pen[e]), atom_share[e]);
                    }
                });
                if (quick > static_cast<double>(best_total_) + eps) continue;
                if (quick >= static_cast<double>(best_total_) - eps && child_atoms >= best_atoms_) continue;
            }
            Node child{node.covered, node.abandoned, node.fired, allowed,
                       node.atoms + cands_[r].atoms, node.cn_cost, node.abandon_cost, node.chosen};
            child.covered |= cands_[r].ad;
            child.cn_cost += p_.cn_weight(cands_[r].cn.minus(node.fired));
            child.fired |= cands_[r].cn;
            child.chosen.push_back(r);
            visit(child);
            if (exhausted_) return;
        }
        Node leave{node.covered, node.abandoned, node.fired, allowed,
                   node.atoms, node.cn_cost, node.abandon_cost + p_.ad_pen[x], node.chosen};
        leave.abandoned.set(x);
        visit(leave);
    }

    const std::vector<Candidate>& cands_;
    const Problem& p_;
    std::uint64_t max_nodes_;
    std::vector<std::vector<std::size_t>> cover_lists_;
    std::uint64_t nodes_ = 0;
    bool exhausted_ = false;
    bool has_best_ = false;
    std::int64_t best_total_ = 0;
    std::int64_t best_atoms_ = 0;
    std::vector<std::size_t> best_chosen_;
};

}  // namespace

std::vector<Rule> candidate_rules(const LearningTask& task) {
    const Problem p(task);
    std::vector<Rule> out;
    for (auto& c : build_candidates(task, p, std::numeric_limits<std::uint64_t>::max()).candidates) {
        out.push_back(std::move(c.rule));
    }
    return out;
}

Hypothesis greedy_learn(const LearningTask& task) {
    const Problem p(task);
    const auto set = build_candidates(task, p, LearnerConfig{}.max_candidates);
    std::vector<Rule> rules;
    for (std::size_t r : greedy_cover(set.candidates, p)) rules.push_back(set.candidates[r].rule);
    return make_hypothesis(std::move(rules));
}

LearnResult learn(const LearningTask& task, const LearnerConfig& config) {
    if (task.examples.empty()) throw Error("task has no examples");
    const Problem p(task);
    const CandidateSet set = build_candidates(task, p, config.max_candidates);

    BranchAndBound search(set.candidates, p, config.max_nodes);
    search.offer(greedy_cover(set.candidates, p));
    search.run();

    LearnResult result;
    std::vector<Rule> rules;
    for (std::size_t r : search.best()) rules.push_back(set.candidates[r].rule);
    result.hypothesis = make_hypothesis(std::move(rules));
    result.score = score(result.hypothesis, task);
    if (result.score.total != search.best_total()) {
        throw Error("internal error: learner score mismatch");
    }
    result.optimal = !search.exhausted() && !set.truncated;
    result.candidates = set.candidates.size();
    result.nodes = search.nodes();
    return result;
}

// ---------------------------------------------------------------------------
// Brute-force oracle
// ---------------------------------------------------------------------------

Hypothesis brute_force_learn(const LearningTask& task, const BruteForceLimits& limits) {
    std::vector<EdgeId> edges = task.space.edges;
    std::sort(edges.begin(), edges.end());
    const int max_body = std::min<int>(task.space.max_body_edges, static_cast<int>(edges.size()));

    // Size of the full rule space.
    {
        long double total = 0.0L;
        std::function<void(std::size_t, int, long double)> count = [&](std::size_t from, int depth,
                                                                       long double acc) {
            for (std::size_t e = from; e < edges.size(); ++e) {
                const auto it = task.space.threshold_domain.find(edges[e]);
                const std::size_t dom = it == task.space.threshold_domain.end() ? 0 : it->second.size();
                const long double here = acc * 4.0L * static_cast<long double>(dom);
                total += here;
                if (depth + 1 < max_body) count(e + 1, depth + 1, here);
            }
        };
        count(0, 0, 1.0L);
        if (total > static_cast<long double>(limits.max_enumerated)) {
            throw Error("instance too large for brute force");
        }
    }

    const std::size_t n = task.examples.size();
    std::map<std::vector<bool>, Rule> reps;
    std::vector<BodyLiteral> body;
    std::function<void(std::size_t)> enumerate = [&](std::size_t from) {
        for (std::size_t e = from; e < edges.size(); ++e) {
            const auto it = task.space.threshold_domain.find(edges[e]);
            if (it == task.space.threshold_domain.end()) continue;
            for (Comparator c : kComparators) {
                for (ScaledStrength t : it->second) {
                    body.push_back({edges[e], c, t});
                    Rule rule{body};
                    std::vector<bool> fires(n);
                    for (std::size_t k = 0; k < n; ++k) fires[k] = rule_fires(rule, task.examples[k].context);
                    auto found = reps.find(fires);
                    if (found == reps.end()) {
                        reps.emplace(std::move(fires), rule);
                    } else if (std::make_pair(rule.atom_count(), rule) <
                               std::make_pair(found->second.atom_count(), found->second)) {
                        found->second = rule;
                    }
                    if (static_cast<int>(body.size()) < max_body) enumerate(e + 1);
                    body.pop_back();
                }
            }
        }
    };
    enumerate(0);
    if (reps.size() > limits.max_rules) throw Error("instance too large for brute force");

    struct Rep {
        Rule rule;
        std::int64_t atoms;
        std::vector<bool> fires;
    };
    std::vector<Rep> rules;
    for (auto& [fires, rule] : reps) rules.push_back({rule, rule.atom_count(), fires});
    std::sort(rules.begin(), rules.end(), [](const Rep& a, const Rep& b) { return a.rule < b.rule; });

    std::vector<std::int64_t> pen(n);
    std::vector<bool> is_ad(n);
    for (std::size_t k = 0; k < n; ++k) {
        pen[k] = task.examples[k].penalty;
        is_ad[k] = task.examples[k].label == Label::AD;
    }

    std::vector<std::size_t> best_set;
    std::int64_t best_total = 0;
    std::int64_t best_atoms = 0;
    bool have_best = false;
    std::vector<std::size_t> current;
    std::vector<bool> fired(n, false);

    auto evaluate = [&](std::int64_t atoms) {
        std::int64_t total = atoms;
        for (std::size_t k = 0; k < n; ++k) {
            bool f = false;
            for (std::size_t r : current) f = f || rules[r].fires[k];
            if (is_ad[k] != f) total += pen[k];
        }
        bool better = !have_best || total < best_total || (total == best_total && atoms < best_atoms);
        if (!better && total == best_total && atoms == best_atoms) {
            std::vector<Rule> a;
            std::vector<Rule> b;
            for (std::size_t r : current) a.push_back(rules[r].rule);
            for (std::size_t r : best_set) b.push_back(rules[r].rule);
            better = a < b;
        }
        if (better) {
            have_best = true;
            best_total = total;
            best_atoms = atoms;
            best_set = current;
        }
    };

    std::function<void(std::size_t, std::int64_t)> subsets = [&](std::size_t from, std::int64_t atoms) {
        evaluate(atoms);
        if (current.size() >= limits.max_hypothesis_rules) return;
        for (std::size_t r = from; r < rules.size(); ++r) {
            // total >= atoms, so a superset at or above the best total cannot win.
            if (have_best && atoms + rules[r].atoms > best_total) continue;
            current.push_back(r);
            subsets(r + 1, atoms + rules[r].atoms);
            current.pop_back();
        }
    };
    subsets(0, 0);

    std::vector<Rule> out;
    for (std::size_t r : best_set) out.push_back(rules[r].rule);
    return make_hypothesis(std::move(out));
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

json hypothesis_to_json(const Hypothesis& hypothesis) {
    json rules = json::array();
    for (const auto& r : hypothesis.rules) {
        json body = json::array();
        for (const auto& lit : r.body) {
            body.push_back({{"edge", {lit.edge.i, lit.edge.j}},
                            {"cmp", std::string(comparator_symbol(lit.comparator))},
                            {"threshold", lit.threshold}});
        }
        rules.push_back({{"head", "ad"}, {"body", body}});
    }
    return {{"rules", rules}, {"atoms", hypothesis.atom_count()}};
}

Hypothesis hypothesis_from_json(const json& doc) {
    try {
        std::vector<Rule> rules;
        for (const auto& r : doc.at("rules")) {
            std::vector<BodyLiteral> body;
            for (const auto& lit : r.at("body")) {
                body.push_back({make_edge(lit.at("edge").at(0).get<int>(), lit.at("edge").at(1).get<int>()),
                                parse_comparator(lit.at("cmp").get<std::string>()),
                                lit.at("threshold").get<ScaledStrength>()});
            }
            rules.push_back(make_rule(std::move(body)));
        }
        return make_hypothesis(std::move(rules));
    } catch (const json::exception& e) {
        throw Error(std::string("malformed hypothesis JSON: ") + e.what());
    }
}

json score_to_json(const Score& s) {
    return {{"length", s.length}, {"penalty_sum", s.penalty_sum}, {"total", s.total}};
}

}  // namespace learnad
