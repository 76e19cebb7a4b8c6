#include "learnad/feature_select.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "learnad/format.hpp"

namespace learnad {

using nlohmann::json;

std::string_view provenance_name(Provenance p) {
    switch (p) {
        case Provenance::dt: return "dt";
        case Provenance::rf: return "rf";
        case Provenance::external: return "external";
    }
    return "external";
}

Provenance parse_provenance(std::string_view text) {
    if (text == "dt") return Provenance::dt;
    if (text == "rf") return Provenance::rf;
    if (text == "external") return Provenance::external;
    throw Error("unknown provenance '" + std::string(text) + "'");
}

namespace {

template <typename Score>
std::vector<EdgeId> top_k(std::vector<std::pair<EdgeId, Score>> scored, std::size_t k) {
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    std::vector<EdgeId> out;
    out.reserve(k);
    for (std::size_t r = 0; r < k; ++r) out.push_back(scored[r].first);
    return out;
}

}  // namespace

SelectedEdges select_global(const ImportanceRanking& ranking, int k_global, Provenance provenance) {
    if (k_global < 1) throw Error("k_global must be >= 1");
    if (static_cast<std::size_t>(k_global) > ranking.scores.size()) {
        throw Error("k_global " + std::to_string(k_global) + " exceeds feature count " +
                    std::to_string(ranking.scores.size()));
    }
    std::vector<std::pair<EdgeId, double>> scored(ranking.scores.begin(), ranking.scores.end());
    return {top_k(std::move(scored), static_cast<std::size_t>(k_global)), provenance};
}

SelectedEdges aggregate_frequency(const std::vector<InstanceExplanation>& explanations, int k_total) {
    if (explanations.empty()) throw Error("no explanations to aggregate");
    if (k_total < 1) throw Error("k_total must be >= 1");
    std::map<EdgeId, long> counts;
    for (const auto& ex : explanations) {
        const std::set<EdgeId> unique(ex.edges.begin(), ex.edges.end());
        for (EdgeId e : unique) ++counts[e];
    }
    if (static_cast<std::size_t>(k_total) > counts.size()) {
        throw Error("k_total " + std::to_string(k_total) + " exceeds distinct edge count " +
                    std::to_string(counts.size()));
    }
    std::vector<std::pair<EdgeId, long>> scored(counts.begin(), counts.end());
    return {top_k(std::move(scored), static_cast<std::size_t>(k_total)), Provenance::external};
}

std::vector<InstanceExplanation> parse_explanations(const json& doc, const Cohort* cohort) {
    const int n_regions = cohort ? cohort->n_regions() : kRegionCount;
    std::set<std::string> known;
    if (cohort) {
        for (const auto& s : cohort->subjects()) known.insert(s.id);
    }
    std::vector<InstanceExplanation> out;
    try {
        const int k_instance = doc.at("k_instance").get<int>();
        if (k_instance < 1) throw Error("k_instance must be >= 1");
        for (const auto& entry : doc.at("explanations")) {
            InstanceExplanation ex;
            ex.subject_id = entry.at("subject_id").get<std::string>();
            if (cohort && !known.count(ex.subject_id)) {
                throw Error("explanation for unknown subject '" + ex.subject_id + "'");
            }
            std::set<EdgeId> seen;
            for (const auto& pair : entry.at("edges")) {
                if (!pair.is_array() || pair.size() != 2) {
                    throw Error("malformed edge pair in explanation for '" + ex.subject_id + "'");
                }
                const EdgeId e = make_edge(pair[0].get<int>(), pair[1].get<int>(), n_regions);
                if (!seen.insert(e).second) {
                    throw Error("duplicate edge " + edge_to_string(e) + " in explanation for '" +
                                ex.subject_id + "'");
                }
                ex.edges.push_back(e);
            }
            if (ex.edges.size() != static_cast<std::size_t>(k_instance)) {
                throw Error("explanation for '" + ex.subject_id + "' has " +
                            std::to_string(ex.edges.size()) + " edges, expected k_instance=" +
                            std::to_string(k_instance));
            }
            out.push_back(std::move(ex));
        }
    } catch (const json::exception& e) {
        throw Error(std::string("malformed explanations file: ") + e.what());
    }
    return out;
}

std::vector<InstanceExplanation> load_explanations(const std::filesystem::path& path,
                                                   const Cohort* cohort) {
    return parse_explanations(read_json_file(path), cohort);
}

json selected_to_json(const SelectedEdges& selected) {
    json edges = json::array();
    for (EdgeId e : selected.edges) edges.push_back({e.i, e.j});
    return {{"provenance", std::string(provenance_name(selected.provenance))}, {"edges", edges}};
}

SelectedEdges selected_from_json(const json& doc) {
    try {
        SelectedEdges out;
        out.provenance = parse_provenance(doc.at("provenance").get<std::string>());
        std::set<EdgeId> seen;
        for (const auto& p : doc.at("edges")) {
            out.edges.push_back(make_edge(p.at(0).get<int>(), p.at(1).get<int>()));
            if (!seen.insert(out.edges.back()).second) throw Error("duplicate selected edge");
        }
        if (out.edges.empty()) throw Error("selected edge list is empty");
        return out;
    } catch (const json::exception& e) {
        throw Error(std::string("malformed selected-edges JSON: ") + e.what());
    }
}

json ranking_to_json(const ImportanceRanking& ranking) {
    json out = json::array();
    for (const auto& [e, score] : ranking.scores) {
        if (score > 0.0) out.push_back({{"edge", {e.i, e.j}}, {"score", score}});
    }
    return out;
}

}  // namespace learnad
