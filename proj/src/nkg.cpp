#include "learnad/nkg.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>

namespace learnad {

using nlohmann::json;

namespace {

// Round the decimal digit string `digits` (value = digits * 10^-scale) to
// `keep` fractional digits, ties to even. Returns the integer in units of
// 10^-keep.
std::int64_t round_decimal_half_even(const std::string& int_part, const std::string& frac_part,
                                     std::size_t keep) {
    std::string kept = int_part + frac_part.substr(0, std::min(keep, frac_part.size()));
    kept.append(keep > frac_part.size() ? keep - frac_part.size() : 0, '0');
    std::int64_t q = 0;
    for (char c : kept) {
        if (q > (std::numeric_limits<std::int64_t>::max() - 9) / 10) throw Error("strength too large to scale");
        q = q * 10 + (c - '0');
    }
    if (frac_part.size() > keep) {
        const char first = frac_part[keep];
        const bool rest_nonzero =
            frac_part.find_first_not_of('0', keep + 1) != std::string::npos;
        if (first > '5' || (first == '5' && (rest_nonzero || (q % 2 != 0)))) ++q;
    }
    return q;
}

}  // namespace

ScaledStrength scale_strength(double raw) {
    if (!std::isfinite(raw)) throw Error("cannot scale a non-finite strength");
    if (raw < 0.0) throw Error("cannot scale a negative strength");

    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, raw, std::chars_format::fixed);
    if (ec != std::errc()) throw Error("cannot format strength");
    const std::string text(buf, ptr);
    const std::size_t dot = text.find('.');
    const std::string int_part = dot == std::string::npos ? text : text.substr(0, dot);
    const std::string frac_part = dot == std::string::npos ? "" : text.substr(dot + 1);

    // Units of 1e-4, then x1000 leaves units of 0.1: one more half-even step.
    const std::int64_t q = round_decimal_half_even(int_part, frac_part, 4);
    std::int64_t scaled = q / 10;
    const std::int64_t rem = q % 10;
    if (rem > 5 || (rem == 5 && scaled % 2 != 0)) ++scaled;
    return scaled;
}

std::string_view comparator_symbol(Comparator c) {
    switch (c) {
        case Comparator::ge: return ">=";
        case Comparator::gt: return ">";
        case Comparator::lt: return "<";
        case Comparator::le: return "<=";
    }
    return "?";
}

Comparator parse_comparator(std::string_view text) {
    if (text == ">=") return Comparator::ge;
    if (text == ">") return Comparator::gt;
    if (text == "<") return Comparator::lt;
    if (text == "<=") return Comparator::le;
    throw Error("unknown comparator '" + std::string(text) + "'");
}

const ContextFact* Example::find(EdgeId e) const {
    auto it = std::lower_bound(context.begin(), context.end(), e,
                               [](const ContextFact& f, EdgeId key) { return f.edge < key; });
    if (it == context.end() || it->edge != e) return nullptr;
    return &*it;
}

std::uint64_t HypothesisSpace::template_count() const {
    const auto n = static_cast<std::uint64_t>(edges.size());
    std::uint64_t total = 0;
    std::uint64_t choose = 1;  // C(n, s)
    std::uint64_t pow4 = 1;
    for (int s = 1; s <= max_body_edges && static_cast<std::uint64_t>(s) <= n; ++s) {
        choose = choose * (n - static_cast<std::uint64_t>(s) + 1) / static_cast<std::uint64_t>(s);
        pow4 *= 4;
        total += choose * pow4;
    }
    return total;
}

bool HypothesisSpace::contains_edge(EdgeId e) const {
    return std::find(edges.begin(), edges.end(), e) != edges.end();
}

std::vector<Example> build_examples(const std::vector<FeatureVector>& vectors,
                                    const std::vector<EdgeId>& feature_order,
                                    const SelectedEdges& selected, std::int64_t base_pen) {
    if (selected.edges.empty()) throw Error("no selected edges");
    if (base_pen < 1) throw Error("base penalty must be >= 1");

    std::vector<std::size_t> positions;
    for (EdgeId e : selected.edges) {
        auto it = std::find(feature_order.begin(), feature_order.end(), e);
        if (it == feature_order.end()) {
            throw Error("selected edge " + edge_to_string(e) + " missing from the feature vectors");
        }
        positions.push_back(static_cast<std::size_t>(it - feature_order.begin()));
    }

    std::vector<Example> out;
    out.reserve(vectors.size());
    int n_ad = 0;
    int n_cn = 0;
    for (const auto& v : vectors) {
        if (v.values.size() != feature_order.size()) {
            throw Error("subject '" + v.subject_id + "' is missing selected edge values");
        }
        Example ex;
        char id[32];
        if (v.label == Label::AD) {
            std::snprintf(id, sizeof id, "ad_%03d", n_ad++);
        } else {
            std::snprintf(id, sizeof id, "cn_%03d", n_cn++);
        }
        ex.id = id;
        ex.penalty = base_pen;
        ex.label = v.label;
        ex.subject_id = v.subject_id;
        for (std::size_t k = 0; k < positions.size(); ++k) {
            ex.context.push_back({selected.edges[k], scale_strength(v.values[positions[k]])});
        }
        std::sort(ex.context.begin(), ex.context.end());
        out.push_back(std::move(ex));
    }
    return out;
}

std::vector<Example> build_examples(const Cohort& cohort, const SelectedEdges& selected,
                                    std::int64_t base_pen) {
    EdgeMask mask;
    mask.kept = selected.edges;
    std::sort(mask.kept.begin(), mask.kept.end());
    return build_examples(apply_mask(cohort, mask), mask.kept, selected, base_pen);
}

HypothesisSpace build_space(const SelectedEdges& selected, const std::vector<Example>& examples,
                            int max_body_edges) {
    if (max_body_edges < 1) throw Error("max_body_edges must be >= 1");
    HypothesisSpace space;
    space.edges = selected.edges;
    space.max_body_edges = max_body_edges;
    for (EdgeId e : selected.edges) {
        std::set<ScaledStrength> observed;
        for (const auto& ex : examples) {
            if (const ContextFact* f = ex.find(e)) observed.insert(f->strength);
        }
        if (!observed.empty()) {
            const ScaledStrength lo = *observed.begin();
            const ScaledStrength hi = *observed.rbegin();
            if (lo >= 1) observed.insert(lo - 1);
            observed.insert(hi + 1);
        }
        space.threshold_domain[e] = std::vector<ScaledStrength>(observed.begin(), observed.end());
    }
    return space;
}

std::int64_t rescaled_ad_penalty(std::int64_t base_pen, std::size_t n_cn, std::size_t n_ad_task) {
    if (n_ad_task == 0) throw Error("task without AD examples");
    const auto num = static_cast<std::int64_t>(n_cn) * base_pen;
    const auto den = static_cast<std::int64_t>(n_ad_task);
    const std::int64_t rounded = (2 * num + den) / (2 * den);  // half away from zero
    return std::max<std::int64_t>(1, rounded);
}

TaskPartition partition_tasks(const std::vector<Example>& examples, const HypothesisSpace& space,
                              int n_ad_subsets, std::int64_t base_pen, std::uint64_t seed) {
    if (base_pen < 1) throw Error("base penalty must be >= 1");
    std::vector<std::size_t> ad;
    std::vector<std::size_t> cn;
    for (std::size_t k = 0; k < examples.size(); ++k) {
        (examples[k].label == Label::AD ? ad : cn).push_back(k);
    }
    if (n_ad_subsets < 1) throw Error("n_ad_subsets must be >= 1");
    if (static_cast<std::size_t>(n_ad_subsets) > ad.size()) {
        throw Error("n_ad_subsets " + std::to_string(n_ad_subsets) + " exceeds AD example count " +
                    std::to_string(ad.size()));
    }

    Rng rng(seed);
    rng.shuffle(ad);

    TaskPartition partition;
    partition.n_ad_subsets = n_ad_subsets;
    const std::size_t n_sub = static_cast<std::size_t>(n_ad_subsets);
    const std::size_t base_size = ad.size() / n_sub;
    const std::size_t extra = ad.size() % n_sub;
    std::size_t cursor = 0;
    for (std::size_t t = 0; t < n_sub; ++t) {
        const std::size_t size = base_size + (t < extra ? 1 : 0);
        std::vector<std::size_t> chunk(ad.begin() + static_cast<std::ptrdiff_t>(cursor),
                                       ad.begin() + static_cast<std::ptrdiff_t>(cursor + size));
        cursor += size;
        std::sort(chunk.begin(), chunk.end());

        LearningTask task;
        task.space = space;
        const std::int64_t ad_pen = rescaled_ad_penalty(base_pen, cn.size(), chunk.size());
        for (std::size_t k : chunk) {
            task.examples.push_back(examples[k]);
            task.examples.back().penalty = ad_pen;
        }
        for (std::size_t k : cn) {
            task.examples.push_back(examples[k]);
            task.examples.back().penalty = base_pen;
        }
        partition.tasks.push_back(std::move(task));
    }
    return partition;
}

json task_to_json(const LearningTask& task) {
    json edges = json::array();
    json domain = json::array();
    for (EdgeId e : task.space.edges) {
        edges.push_back({e.i, e.j});
        auto it = task.space.threshold_domain.find(e);
        domain.push_back({{"edge", {e.i, e.j}},
                          {"values", it == task.space.threshold_domain.end()
                                         ? std::vector<ScaledStrength>{}
                                         : it->second}});
    }
    json examples = json::array();
    for (const auto& ex : task.examples) {
        json ctx = json::array();
        for (const auto& f : ex.context) ctx.push_back({f.edge.i, f.edge.j, f.strength});
        examples.push_back({{"id", ex.id},
                            {"subject_id", ex.subject_id},
                            {"penalty", ex.penalty},
                            {"label", std::string(label_name(ex.label))},
                            {"context", ctx}});
    }
    return {{"background", task.background},
            {"space",
             {{"edges", edges}, {"max_body_edges", task.space.max_body_edges}, {"threshold_domain", domain}}},
            {"examples", examples}};
}

LearningTask task_from_json(const json& doc) {
    try {
        LearningTask task;
        task.background = doc.at("background").get<std::vector<std::string>>();
        const auto& sp = doc.at("space");
        task.space.max_body_edges = sp.at("max_body_edges").get<int>();
        for (const auto& p : sp.at("edges")) {
            task.space.edges.push_back(make_edge(p.at(0).get<int>(), p.at(1).get<int>()));
        }
        for (const auto& d : sp.at("threshold_domain")) {
            const EdgeId e = make_edge(d.at("edge").at(0).get<int>(), d.at("edge").at(1).get<int>());
            task.space.threshold_domain[e] = d.at("values").get<std::vector<ScaledStrength>>();
        }
        for (const auto& e : doc.at("examples")) {
            Example ex;
            ex.id = e.at("id").get<std::string>();
            ex.subject_id = e.at("subject_id").get<std::string>();
            ex.penalty = e.at("penalty").get<std::int64_t>();
            ex.label = parse_label(e.at("label").get<std::string>());
            for (const auto& f : e.at("context")) {
                ex.context.push_back({make_edge(f.at(0).get<int>(), f.at(1).get<int>()),
                                      f.at(2).get<ScaledStrength>()});
            }
            std::sort(ex.context.begin(), ex.context.end());
            if (ex.penalty < 1) throw Error("example '" + ex.id + "' has a non-positive penalty");
            task.examples.push_back(std::move(ex));
        }
        return task;
    } catch (const json::exception& e) {
        throw Error(std::string("malformed task JSON: ") + e.what());
    }
}

}  // namespace learnad
