#include "learnad/eval_harness.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

#include "learnad/format.hpp"
#include "learnad/nkg.hpp"

namespace learnad {

using nlohmann::json;
namespace fs = std::filesystem;

std::string_view pipeline_name(PipelineKind p) {
    switch (p) {
        case PipelineKind::dt: return "dt";
        case PipelineKind::rf: return "rf";
        case PipelineKind::external_explanations: return "external_explanations";
    }
    return "dt";
}

PipelineKind parse_pipeline(std::string_view text) {
    if (text == "dt") return PipelineKind::dt;
    if (text == "rf") return PipelineKind::rf;
    if (text == "external_explanations" || text == "external") return PipelineKind::external_explanations;
    throw Error("unknown pipeline '" + std::string(text) + "'");
}

// ---------------------------------------------------------------------------
// Config
// ---------------------------------------------------------------------------

namespace {

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!obj.is_object()) throw Error(where + " must be a JSON object");
    for (const auto& [key, _] : obj.items()) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
            throw Error("unknown key '" + key + "' in " + where);
        }
    }
}

std::string planted_text(const PlantedEdge& p) {
    return std::to_string(p.edge.i) + "," + std::to_string(p.edge.j) + "," + format_double(p.threshold) + "," +
           (p.direction == PlantDirection::ad_below ? "lt" : "gt");
}

std::string resolve(const std::string& path, const fs::path& base_dir) {
    if (path.empty() || base_dir.empty() || fs::path(path).is_absolute()) return path;
    return (base_dir / path).lexically_normal().string();
}

}  // namespace

CVConfig cv_config_from_json(const json& doc, const fs::path& base_dir) {
    CVConfig c;
    try {
        reject_unknown(doc,
                       {"n_repeats", "subsample_fraction", "n_folds", "base_seed", "pipeline", "selector",
                        "n_ad_subsets", "keep_ratio", "max_body_edges", "base_pen", "explanations", "learner",
                        "fit_baselines", "tree", "forest", "cohort", "synthetic", "threads"},
                       "cv config");
        c.n_repeats = doc.value("n_repeats", c.n_repeats);
        c.subsample_fraction = doc.value("subsample_fraction", c.subsample_fraction);
        c.n_folds = doc.value("n_folds", c.n_folds);
        c.base_seed = doc.value("base_seed", c.base_seed);
        c.pipeline = parse_pipeline(doc.value("pipeline", std::string("dt")));
        if (doc.contains("selector")) {
            const auto& s = doc.at("selector");
            reject_unknown(s, {"mode", "k_global", "k_instance", "k_total"}, "selector");
            const std::string mode = s.value("mode", std::string("global"));
            if (mode == "global") c.selector.mode = SelectorMode::global_importance;
            else if (mode == "frequency") c.selector.mode = SelectorMode::frequency_count;
            else throw Error("unknown selector mode '" + mode + "'");
            c.selector.k_global = s.value("k_global", c.selector.k_global);
            c.selector.k_instance = s.value("k_instance", c.selector.k_instance);
            c.selector.k_total = s.value("k_total", c.selector.k_total);
        }
        c.n_ad_subsets = doc.value("n_ad_subsets", c.n_ad_subsets);
        c.keep_ratio = doc.value("keep_ratio", c.keep_ratio);
        c.max_body_edges = doc.value("max_body_edges", c.max_body_edges);
        c.base_pen = doc.value("base_pen", c.base_pen);
        c.explanations = resolve(doc.value("explanations", std::string()), base_dir);
        if (doc.contains("learner")) {
            const auto& l = doc.at("learner");
            reject_unknown(l, {"max_nodes", "max_candidates"}, "learner");
            c.learner.max_nodes = l.value("max_nodes", c.learner.max_nodes);
            c.learner.max_candidates = l.value("max_candidates", c.learner.max_candidates);
        }
        c.fit_baselines = doc.value("fit_baselines", c.fit_baselines);
        if (doc.contains("tree")) {
            const auto& t = doc.at("tree");
            reject_unknown(t, {"max_depth", "min_samples_split"}, "tree");
            c.tree.max_depth = t.value("max_depth", c.tree.max_depth);
            c.tree.min_samples_split = t.value("min_samples_split", c.tree.min_samples_split);
        }
        if (doc.contains("forest")) {
            const auto& f = doc.at("forest");
            reject_unknown(f, {"n_estimators", "max_depth", "min_samples_split", "max_features"}, "forest");
            c.forest.n_estimators = f.value("n_estimators", c.forest.n_estimators);
            c.forest.max_depth = f.value("max_depth", c.forest.max_depth);
            c.forest.min_samples_split = f.value("min_samples_split", c.forest.min_samples_split);
            c.forest.max_features = f.value("max_features", c.forest.max_features);
        }
        c.cohort = resolve(doc.value("cohort", std::string()), base_dir);
        if (doc.contains("synthetic")) {
            const auto& s = doc.at("synthetic");
            reject_unknown(s, {"seed", "n_per_class", "planted", "noise"}, "synthetic");
            SyntheticSpec spec;
            spec.seed = s.value("seed", spec.seed);
            spec.n_per_class = s.value("n_per_class", spec.n_per_class);
            spec.noise_rate = s.value("noise", spec.noise_rate);
            for (const auto& p : s.value("planted", json::array())) {
                spec.planted.push_back(parse_planted(p.get<std::string>()));
            }
            c.synthetic = spec;
        }
        c.threads = doc.value("threads", c.threads);
    } catch (const json::exception& e) {
        throw Error(std::string("malformed cv config: ") + e.what());
    }
    validate(c);
    return c;
}

json cv_config_to_json(const CVConfig& c) {
    json doc = {
        {"n_repeats", c.n_repeats},
        {"subsample_fraction", c.subsample_fraction},
        {"n_folds", c.n_folds},
        {"base_seed", c.base_seed},
        {"pipeline", std::string(pipeline_name(c.pipeline))},
        {"selector",
         {{"mode", c.selector.mode == SelectorMode::global_importance ? "global" : "frequency"},
          {"k_global", c.selector.k_global},
          {"k_instance", c.selector.k_instance},
          {"k_total", c.selector.k_total}}},
        {"n_ad_subsets", c.n_ad_subsets},
        {"keep_ratio", c.keep_ratio},
        {"max_body_edges", c.max_body_edges},
        {"base_pen", c.base_pen},
        {"learner", {{"max_nodes", c.learner.max_nodes}, {"max_candidates", c.learner.max_candidates}}},
        {"fit_baselines", c.fit_baselines},
        {"tree", {{"max_depth", c.tree.max_depth}, {"min_samples_split", c.tree.min_samples_split}}},
        {"forest",
         {{"n_estimators", c.forest.n_estimators},
          {"max_depth", c.forest.max_depth},
          {"min_samples_split", c.forest.min_samples_split},
          {"max_features", c.forest.max_features}}},
    };
    if (!c.explanations.empty()) doc["explanations"] = c.explanations;
    if (!c.cohort.empty()) doc["cohort"] = c.cohort;
    if (c.synthetic) {
        json planted = json::array();
        for (const auto& p : c.synthetic->planted) planted.push_back(planted_text(p));
        doc["synthetic"] = {{"seed", c.synthetic->seed},
                            {"n_per_class", c.synthetic->n_per_class},
                            {"planted", planted},
                            {"noise", c.synthetic->noise_rate}};
    }
    return doc;
}

void validate(const CVConfig& c) {
    if (c.n_repeats < 1) throw Error("n_repeats must be >= 1");
    if (!(c.subsample_fraction > 0.0 && c.subsample_fraction <= 1.0)) {
        throw Error("subsample_fraction must lie in (0, 1]");
    }
    if (c.n_folds < 2) throw Error("n_folds must be >= 2");
    if (c.n_ad_subsets < 1) throw Error("n_ad_subsets must be >= 1");
    if (!(c.keep_ratio > 0.0 && c.keep_ratio <= 1.0)) throw Error("keep_ratio must lie in (0, 1]");
    if (c.max_body_edges < 1) throw Error("max_body_edges must be >= 1");
    if (c.base_pen < 1) throw Error("base_pen must be >= 1");
    if (c.selector.k_global < 1 || c.selector.k_instance < 1 || c.selector.k_total < 1) {
        throw Error("selector k values must be >= 1");
    }
    if (c.pipeline == PipelineKind::external_explanations && c.explanations.empty()) {
        throw Error("the external_explanations pipeline needs an explanations file");
    }
    if (c.cohort.empty() == !c.synthetic) throw Error("config needs exactly one of cohort or synthetic");
}

Cohort load_config_cohort(const CVConfig& config) {
    if (config.synthetic) return generate_synthetic(*config.synthetic);
    return load_cohort(config.cohort);
}

// ---------------------------------------------------------------------------
// Stratification
// ---------------------------------------------------------------------------

namespace {

using StratumKey = std::tuple<Label, Sex, std::string>;

std::map<StratumKey, std::vector<std::size_t>> strata(const Cohort& cohort) {
    std::map<StratumKey, std::vector<std::size_t>> cells;
    for (std::size_t k = 0; k < cohort.size(); ++k) {
        const auto& s = cohort.subjects()[k];
        cells[{s.diagnosis, s.sex, s.manufacturer}].push_back(k);
    }
    return cells;
}

}  // namespace

Cohort stratified_subsample(const Cohort& cohort, double fraction, std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction <= 1.0)) throw Error("subsample fraction must lie in (0, 1]");
    Rng rng(seed);
    std::vector<std::size_t> keep;
    for (auto& [key, members] : strata(cohort)) {
        const auto n = static_cast<double>(members.size());
        const auto take = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(fraction * n)));
        rng.shuffle(members);
        keep.insert(keep.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(take));
    }
    std::sort(keep.begin(), keep.end());
    return cohort.subset(keep);
}

std::vector<int> stratified_folds(const Cohort& cohort, int n_folds, std::uint64_t seed) {
    if (n_folds < 2) throw Error("n_folds must be >= 2");
    if (static_cast<std::size_t>(n_folds) > cohort.size()) {
        throw Error("n_folds " + std::to_string(n_folds) + " exceeds cohort size " + std::to_string(cohort.size()));
    }
    Rng rng(seed);
    std::vector<int> fold(cohort.size(), 0);
    std::size_t dealt = 0;
    for (auto& [key, members] : strata(cohort)) {
        rng.shuffle(members);
        for (std::size_t m : members) fold[m] = static_cast<int>(dealt++ % static_cast<std::size_t>(n_folds));
    }
    return fold;
}

// ---------------------------------------------------------------------------
// Pipeline
// ---------------------------------------------------------------------------

SummaryStat summarize(const std::vector<double>& values) {
    if (values.empty()) return {};
    return {mean_of(values), sample_std(values)};
}

namespace {

std::vector<FeatureVector> restrict_to(const Cohort& cohort, const std::vector<EdgeId>& edges) {
    EdgeMask mask;
    mask.kept = edges;
    return apply_mask(cohort, mask);
}

ModelScores tree_scores(const DecisionTree& tree, const std::vector<FeatureVector>& train,
                        const std::vector<FeatureVector>& val) {
    return {training_accuracy(tree, train), training_accuracy(tree, val), tree_atom_count(tree)};
}

ModelScores forest_scores(const Forest& forest, const std::vector<FeatureVector>& train,
                          const std::vector<FeatureVector>& val) {
    return {forest_accuracy(forest, train), forest_accuracy(forest, val), forest_atom_count(forest)};
}

FoldResult run_fold(const CVConfig& config, const Cohort& train, const Cohort& val, std::uint64_t repeat_seed,
                    int fold, const std::vector<InstanceExplanation>* explanations) {
    FoldResult out;
    out.fold = fold;
    out.n_train = train.size();
    out.n_validation = val.size();

    const EdgeMask mask = compute_mask(train, config.keep_ratio);
    out.n_masked_features = mask.kept.size();
    const std::vector<FeatureVector> train_vec = apply_mask(train, mask);
    const std::vector<FeatureVector> val_vec = apply_mask(val, mask);
    const std::uint64_t forest_seed = derive_seed(repeat_seed, 3, static_cast<std::uint64_t>(fold));

    std::optional<DecisionTree> tree;
    std::optional<Forest> forest;
    auto need_tree = [&]() -> const DecisionTree& {
        if (!tree) tree = fit_tree(train_vec, mask.kept, config.tree);
        return *tree;
    };
    auto need_forest = [&]() -> const Forest& {
        if (!forest) forest = fit_forest(train_vec, mask.kept, config.forest, forest_seed, config.threads);
        return *forest;
    };

    switch (config.pipeline) {
        case PipelineKind::dt:
            out.selected = select_global(tree_importance(need_tree()), config.selector.k_global, Provenance::dt);
            break;
        case PipelineKind::rf:
            out.selected =
                select_global(forest_importance(need_forest()), config.selector.k_global, Provenance::rf);
            break;
        case PipelineKind::external_explanations: {
            if (!explanations) throw Error("the external_explanations pipeline needs explanations");
            std::set<std::string> ids;
            for (const auto& s : train.subjects()) ids.insert(s.id);
            std::vector<InstanceExplanation> own;
            for (const auto& e : *explanations) {
                if (ids.count(e.subject_id)) own.push_back(e);
            }
            out.selected = aggregate_frequency(own, config.selector.k_total);
            break;
        }
    }

    const std::vector<Example> train_ex = build_examples(train, out.selected, config.base_pen);
    const std::vector<Example> val_ex = build_examples(val, out.selected, config.base_pen);
    const HypothesisSpace space = build_space(out.selected, train_ex, config.max_body_edges);
    const TaskPartition partition = partition_tasks(train_ex, space, config.n_ad_subsets, config.base_pen,
                                                    derive_seed(repeat_seed, 4, static_cast<std::uint64_t>(fold)));

    std::vector<LearnResult> results(partition.tasks.size());
    parallel_for(
        partition.tasks.size(), [&](std::size_t t) { results[t] = learn(partition.tasks[t], config.learner); },
        config.threads);
    std::vector<Hypothesis> per_task;
    for (const auto& r : results) {
        per_task.push_back(r.hypothesis);
        out.optimal = out.optimal && r.optimal;
        out.search_nodes += r.nodes;
    }
    out.hypothesis = union_hypotheses(per_task);
    out.train = evaluate(out.hypothesis, train_ex);
    out.validation = evaluate(out.hypothesis, val_ex);

    if (config.fit_baselines) {
        Baselines b;
        b.dt = tree_scores(need_tree(), train_vec, val_vec);
        b.rf = forest_scores(need_forest(), train_vec, val_vec);
        std::vector<EdgeId> sel = out.selected.edges;
        std::sort(sel.begin(), sel.end());
        const auto train_sel = restrict_to(train, sel);
        const auto val_sel = restrict_to(val, sel);
        b.dt_star = tree_scores(fit_tree(train_sel, sel, config.tree), train_sel, val_sel);
        b.rf_star = forest_scores(fit_forest(train_sel, sel, config.forest, forest_seed, config.threads), train_sel,
                                  val_sel);
        out.baselines = b;
    }
    return out;
}

}  // namespace

RunReport run_pipeline(const CVConfig& config, const Cohort& cohort,
                       const std::vector<InstanceExplanation>* explanations) {
    validate(config);
    RunReport report;
    report.config = config;
    for (int r = 0; r < config.n_repeats; ++r) {
        const std::uint64_t repeat_seed = config.base_seed + static_cast<std::uint64_t>(r);
        const Cohort sub = stratified_subsample(cohort, config.subsample_fraction, derive_seed(repeat_seed, 1));
        const std::vector<int> folds = stratified_folds(sub, config.n_folds, derive_seed(repeat_seed, 2));

        std::map<EdgeId, int> fold_hits;
        for (int f = 0; f < config.n_folds; ++f) {
            std::vector<std::size_t> train_idx;
            std::vector<std::size_t> val_idx;
            for (std::size_t k = 0; k < sub.size(); ++k) (folds[k] == f ? val_idx : train_idx).push_back(k);
            FoldResult res = run_fold(config, sub.subset(train_idx), sub.subset(val_idx), repeat_seed, f, explanations);
            res.repeat = r;
            for (EdgeId e : res.selected.edges) ++fold_hits[e];
            report.folds.push_back(std::move(res));
        }
        for (const auto& [e, hits] : fold_hits) {
            auto& s = report.edge_stability[e];
            ++s.repeats_any_fold;
            if (hits == config.n_folds) ++s.repeats_all_folds;
        }
    }
    return report;
}

Interpretability report_interpretability(const RunReport& report) {
    std::vector<double> h;
    std::vector<double> dt;
    std::vector<double> rf;
    for (const auto& f : report.folds) {
        if (!f.baselines) throw Error("report has no fitted baseline models");
        h.push_back(static_cast<double>(f.hypothesis.atom_count()));
        dt.push_back(static_cast<double>(f.baselines->dt.atoms));
        rf.push_back(static_cast<double>(f.baselines->rf.atoms));
    }
    if (h.empty()) throw Error("report has no folds");
    return {summarize(h), summarize(dt), summarize(rf)};
}

// ---------------------------------------------------------------------------
// Report JSON
// ---------------------------------------------------------------------------

namespace {

json stat_json(const SummaryStat& s) { return {{"mean", s.mean}, {"std", s.std}}; }

json scores_json(const ModelScores& s) {
    return {{"train_accuracy", s.train_accuracy}, {"validation_accuracy", s.validation_accuracy}, {"atoms", s.atoms}};
}

template <typename Get>
json summary_of(const std::vector<FoldResult>& folds, Get get) {
    std::vector<double> xs;
    for (const auto& f : folds) xs.push_back(get(f));
    return stat_json(summarize(xs));
}

}  // namespace

json report_to_json(const RunReport& report) {
    json folds = json::array();
    for (const auto& f : report.folds) {
        json entry = {{"repeat", f.repeat},
                      {"fold", f.fold},
                      {"n_train", f.n_train},
                      {"n_validation", f.n_validation},
                      {"n_masked_features", f.n_masked_features},
                      {"selected", selected_to_json(f.selected)},
                      {"hypothesis", hypothesis_to_json(f.hypothesis)},
                      {"train", metrics_to_json(f.train)},
                      {"validation", metrics_to_json(f.validation)},
                      {"optimal", f.optimal},
                      {"search_nodes", f.search_nodes}};
        if (f.baselines) {
            entry["baselines"] = {{"dt", scores_json(f.baselines->dt)},
                                  {"rf", scores_json(f.baselines->rf)},
                                  {"dt_star", scores_json(f.baselines->dt_star)},
                                  {"rf_star", scores_json(f.baselines->rf_star)}};
        }
        folds.push_back(std::move(entry));
    }

    const auto& fs_ = report.folds;
    json summary;
    for (const char* split : {"train", "validation"}) {
        const bool is_train = std::string(split) == "train";
        auto pick = [is_train](const FoldResult& f) -> const Metrics& { return is_train ? f.train : f.validation; };
        summary[split] = {{"accuracy", summary_of(fs_, [&](const FoldResult& f) { return pick(f).accuracy; })},
                          {"sensitivity", summary_of(fs_, [&](const FoldResult& f) { return pick(f).sensitivity; })},
                          {"specificity", summary_of(fs_, [&](const FoldResult& f) { return pick(f).specificity; })}};
    }
    summary["hypothesis_atoms"] =
        summary_of(fs_, [](const FoldResult& f) { return static_cast<double>(f.hypothesis.atom_count()); });
    summary["nonoptimal_folds"] = std::count_if(fs_.begin(), fs_.end(), [](const FoldResult& f) { return !f.optimal; });
    const bool have_baselines =
        !fs_.empty() && std::all_of(fs_.begin(), fs_.end(), [](const FoldResult& f) { return f.baselines.has_value(); });
    if (have_baselines) {
        json base;
        const std::pair<const char*, ModelScores Baselines::*> models[] = {
            {"dt", &Baselines::dt}, {"rf", &Baselines::rf}, {"dt_star", &Baselines::dt_star}, {"rf_star", &Baselines::rf_star}};
        for (const auto& [name, member] : models) {
            base[name] = {
                {"train_accuracy", summary_of(fs_, [&](const FoldResult& f) { return ((*f.baselines).*member).train_accuracy; })},
                {"validation_accuracy",
                 summary_of(fs_, [&](const FoldResult& f) { return ((*f.baselines).*member).validation_accuracy; })},
                {"atoms", summary_of(fs_, [&](const FoldResult& f) {
                     return static_cast<double>(((*f.baselines).*member).atoms);
                 })}};
        }
        summary["baselines"] = base;
    }

    json stability = json::array();
    for (const auto& [e, s] : report.edge_stability) {
        stability.push_back(
            {{"edge", {e.i, e.j}}, {"repeats_all_folds", s.repeats_all_folds}, {"repeats_any_fold", s.repeats_any_fold}});
    }
    return {{"config", cv_config_to_json(report.config)},
            {"folds", folds},
            {"summary", summary},
            {"edge_stability", stability}};
}

// ---------------------------------------------------------------------------
// Tables
// ---------------------------------------------------------------------------

namespace {

std::string pct(const json& stat) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f ± %.2f", 100.0 * stat.at("mean").get<double>(),
                  100.0 * stat.at("std").get<double>());
    return buf;
}

std::string num(const json& stat) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f ± %.2f", stat.at("mean").get<double>(), stat.at("std").get<double>());
    return buf;
}

std::string model_label(const json& report) {
    const std::string p = report.at("config").at("pipeline").get<std::string>();
    if (p == "dt") return "LearnAD(DT)";
    if (p == "rf") return "LearnAD(RF)";
    return "LearnAD(external)";
}

}  // namespace

json render_tables(const std::vector<json>& reports) {
    if (reports.empty()) throw Error("no reports to tabulate");
    try {
        json baselines = json::array();
        json learned = json::array();
        json sizes = json::array();
        bool baselines_done = false;
        for (const auto& rep : reports) {
            const auto& s = rep.at("summary");
            learned.push_back({{"model", model_label(rep)},
                               {"train_accuracy", s.at("train").at("accuracy")},
                               {"validation_accuracy", s.at("validation").at("accuracy")},
                               {"atoms", s.at("hypothesis_atoms")}});
            if (!s.contains("baselines")) continue;
            const auto& b = s.at("baselines");
            const std::string prov = rep.at("config").at("pipeline").get<std::string>();
            for (const char* m : {"dt_star", "rf_star"}) {
                learned.push_back({{"model", std::string(m == std::string("dt_star") ? "DT*" : "RF*") + " (" + prov + " edges)"},
                                   {"train_accuracy", b.at(m).at("train_accuracy")},
                                   {"validation_accuracy", b.at(m).at("validation_accuracy")},
                                   {"atoms", b.at(m).at("atoms")}});
            }
            if (!baselines_done) {
                for (const char* m : {"dt", "rf"}) {
                    baselines.push_back({{"model", m == std::string("dt") ? "DT" : "RF"},
                                         {"train_accuracy", b.at(m).at("train_accuracy")},
                                         {"validation_accuracy", b.at(m).at("validation_accuracy")}});
                }
                sizes.push_back({{"model", model_label(rep)}, {"atoms", s.at("hypothesis_atoms")}});
                sizes.push_back({{"model", "DT"}, {"atoms", b.at("dt").at("atoms")}});
                sizes.push_back({{"model", "RF"}, {"atoms", b.at("rf").at("atoms")}});
                baselines_done = true;
            } else {
                sizes.push_back({{"model", model_label(rep)}, {"atoms", s.at("hypothesis_atoms")}});
            }
        }
        return {{"baselines", baselines}, {"rule_learning", learned}, {"model_size", sizes}};
    } catch (const json::exception& e) {
        throw Error(std::string("malformed report: ") + e.what());
    }
}

std::string render_markdown(const std::vector<json>& reports) {
    const json tables = render_tables(reports);
    std::string out = "# Cross-validation results\n\n";
    out += "## Baseline classifiers (all masked edges)\n\n| Model | Train ACC (%) | Validation ACC (%) |\n|---|---|---|\n";
    for (const auto& row : tables.at("baselines")) {
        out += "| " + row.at("model").get<std::string>() + " | " + pct(row.at("train_accuracy")) + " | " +
               pct(row.at("validation_accuracy")) + " |\n";
    }
    out += "\n## Rule learning vs. selected-edge models\n\n| Model | Train ACC (%) | Validation ACC (%) | Atoms |\n|---|---|---|---|\n";
    for (const auto& row : tables.at("rule_learning")) {
        out += "| " + row.at("model").get<std::string>() + " | " + pct(row.at("train_accuracy")) + " | " +
               pct(row.at("validation_accuracy")) + " | " + num(row.at("atoms")) + " |\n";
    }
    out += "\n## Model size\n\n| Model | Atoms |\n|---|---|\n";
    for (const auto& row : tables.at("model_size")) {
        out += "| " + row.at("model").get<std::string>() + " | " + num(row.at("atoms")) + " |\n";
    }
    return out;
}

}  // namespace learnad
