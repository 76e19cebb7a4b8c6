#pragma once
// Repeated stratified cross-validation over the full pipeline:
// mask -> tree model -> edge selection -> task construction -> rule learning.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "learnad/cart.hpp"
#include "learnad/data_model.hpp"
#include "learnad/feature_select.hpp"
#include "learnad/forest.hpp"
#include "learnad/inference.hpp"
#include "learnad/rule_learner.hpp"

namespace learnad {

enum class PipelineKind { dt, rf, external_explanations };

std::string_view pipeline_name(PipelineKind p);
PipelineKind parse_pipeline(std::string_view text);

struct CVConfig {
    int n_repeats = 10;
    double subsample_fraction = 0.9;
    int n_folds = 5;
    std::uint64_t base_seed = 0;
    PipelineKind pipeline = PipelineKind::dt;
    SelectorConfig selector;
    int n_ad_subsets = 3;
    double keep_ratio = 0.30;
    int max_body_edges = 2;
    std::int64_t base_pen = 1;
    std::string explanations;  // explanations file, external pipeline only
    LearnerConfig learner;
    bool fit_baselines = true;
    TreeParams tree;
    ForestParams forest;
    std::string cohort;  // manifest path; alternative to `synthetic`
    std::optional<SyntheticSpec> synthetic;
    unsigned threads = 0;  // 0 = hardware concurrency; never affects results
};

// Relative paths are resolved against `base_dir`. Unknown keys are rejected.
CVConfig cv_config_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
nlohmann::json cv_config_to_json(const CVConfig& config);
void validate(const CVConfig& config);

// Cohort named by the config: the manifest, or the synthetic generator.
Cohort load_config_cohort(const CVConfig& config);

// Strata are diagnosis x sex x manufacturer. Keeps round(fraction * size),
// at least 1, per stratum; subjects stay in cohort order.
Cohort stratified_subsample(const Cohort& cohort, double fraction, std::uint64_t seed);

// Fold index per subject. Each stratum is shuffled and dealt round-robin; the
// dealing position carries over between strata so fold sizes stay balanced.
std::vector<int> stratified_folds(const Cohort& cohort, int n_folds, std::uint64_t seed);

struct ModelScores {
    double train_accuracy = 0.0;
    double validation_accuracy = 0.0;
    std::int64_t atoms = 0;
};

struct Baselines {
    ModelScores dt;       // all masked features
    ModelScores rf;
    ModelScores dt_star;  // selected edges only
    ModelScores rf_star;
};

struct FoldResult {
    int repeat = 0;
    int fold = 0;
    std::size_t n_train = 0;
    std::size_t n_validation = 0;
    std::size_t n_masked_features = 0;
    SelectedEdges selected;
    Hypothesis hypothesis;
    Metrics train;
    Metrics validation;
    bool optimal = true;
    std::uint64_t search_nodes = 0;
    std::optional<Baselines> baselines;
};

struct SummaryStat {
    double mean = 0.0;
    double std = 0.0;  // sample std; 0 for a single value
};

SummaryStat summarize(const std::vector<double>& values);

struct EdgeStability {
    int repeats_all_folds = 0;  // repeats selecting the edge in every fold
    int repeats_any_fold = 0;
};

struct RunReport {
    CVConfig config;
    std::vector<FoldResult> folds;  // sorted by (repeat, fold)
    std::map<EdgeId, EdgeStability> edge_stability;
};

// `explanations` is required for the external pipeline.
RunReport run_pipeline(const CVConfig& config, const Cohort& cohort,
                       const std::vector<InstanceExplanation>* explanations = nullptr);

struct Interpretability {
    SummaryStat hypothesis_atoms;
    SummaryStat dt_atoms;
    SummaryStat rf_atoms;
};

// Throws when the report has no baseline models.
Interpretability report_interpretability(const RunReport& report);

nlohmann::json report_to_json(const RunReport& report);

// Markdown and JSON tables from one or more report.json documents: baseline
// classifier accuracies, then rule-learning results next to the selected-edge
// tree models, then model sizes.
std::string render_markdown(const std::vector<nlohmann::json>& reports);
nlohmann::json render_tables(const std::vector<nlohmann::json>& reports);

}  // namespace learnad
