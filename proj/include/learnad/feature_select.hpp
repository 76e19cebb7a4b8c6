#pragma once
// Reduces the feature space to a handful of edges, either from model-level
// Gini importance or by counting edges across per-instance explanations.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "learnad/cart.hpp"
#include "learnad/data_model.hpp"

namespace learnad {

enum class SelectorMode { global_importance, frequency_count };
enum class Provenance { dt, rf, external };

std::string_view provenance_name(Provenance p);
Provenance parse_provenance(std::string_view text);

struct SelectorConfig {
    SelectorMode mode = SelectorMode::global_importance;
    int k_global = 3;
    int k_instance = 10;
    int k_total = 4;
};

struct SelectedEdges {
    std::vector<EdgeId> edges;  // rank order
    Provenance provenance = Provenance::dt;

    bool operator==(const SelectedEdges&) const = default;
};

struct InstanceExplanation {
    std::string subject_id;
    std::vector<EdgeId> edges;
};

// Top k by (score desc, EdgeId asc).
SelectedEdges select_global(const ImportanceRanking& ranking, int k_global,
                            Provenance provenance = Provenance::dt);

// Count of explanations containing each edge; top k by (count desc, EdgeId asc).
SelectedEdges aggregate_frequency(const std::vector<InstanceExplanation>& explanations, int k_total);

// Validates edge pairs (range, self-edges, duplicates, length k_instance).
// When `cohort` is given every subject id must belong to it.
std::vector<InstanceExplanation> load_explanations(const std::filesystem::path& path,
                                                   const Cohort* cohort = nullptr);
std::vector<InstanceExplanation> parse_explanations(const nlohmann::json& doc,
                                                    const Cohort* cohort = nullptr);

nlohmann::json selected_to_json(const SelectedEdges& selected);
SelectedEdges selected_from_json(const nlohmann::json& doc);

nlohmann::json ranking_to_json(const ImportanceRanking& ranking);

}  // namespace learnad
