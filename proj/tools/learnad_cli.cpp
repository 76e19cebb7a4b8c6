// learnad command-line driver. Exit codes: 0 ok, 2 invalid input, 3 search
// budget exceeded (outputs are still written), 1 anything else.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <set>

#include <CLI11.hpp>

#include "learnad/cart.hpp"
#include "learnad/data_model.hpp"
#include "learnad/eval_harness.hpp"
#include "learnad/feature_select.hpp"
#include "learnad/forest.hpp"
#include "learnad/format.hpp"
#include "learnad/inference.hpp"
#include "learnad/las_format.hpp"
#include "learnad/nkg.hpp"
#include "learnad/rule_learner.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace learnad;

namespace {

constexpr int kBudgetExceeded = 3;

void write_json(const fs::path& path, const json& doc) { write_text_file(path, doc.dump(2) + "\n"); }

std::vector<FeatureVector> masked_vectors(const Cohort& cohort, const std::string& mask_path) {
    if (mask_path.empty()) return apply_mask(cohort, EdgeMask{all_edges(cohort.n_regions()), 1.0});
    return apply_mask(cohort, load_mask(mask_path, cohort.n_regions()));
}

std::vector<EdgeId> masked_order(const Cohort& cohort, const std::string& mask_path) {
    if (mask_path.empty()) return all_edges(cohort.n_regions());
    return load_mask(mask_path, cohort.n_regions()).kept;
}

ImportanceRanking model_importance(const json& doc) {
    const std::string kind = doc.at("model").get<std::string>();
    if (kind == "dt") return tree_importance(tree_from_json(doc.at("tree")));
    if (kind == "rf") return forest_importance(forest_from_json(doc.at("forest")));
    throw Error("unknown model kind '" + kind + "'");
}

LearningTask load_task(const fs::path& path) {
    if (path.extension() == ".las") return parse_task_text(read_text_file(path));
    return task_from_json(read_json_file(path));
}

Hypothesis load_hypothesis(const fs::path& path) {
    if (path.extension() == ".json") return hypothesis_from_json(read_json_file(path));
    return parse_hypothesis_text(read_text_file(path));
}

// Contexts over the hypothesis edges; works for an empty hypothesis too.
std::vector<Example> hypothesis_examples(const Cohort& cohort, const Hypothesis& h) {
    std::set<EdgeId> edges;
    for (const auto& r : h.rules) {
        for (const auto& lit : r.body) {
            if (lit.edge.j >= cohort.n_regions()) throw Error("hypothesis edge outside the cohort atlas");
            edges.insert(lit.edge);
        }
    }
    std::vector<Example> out;
    for (const auto& s : cohort.subjects()) {
        Example ex;
        ex.id = s.id;
        ex.subject_id = s.id;
        ex.label = s.diagnosis;
        for (EdgeId e : edges) ex.context.push_back({e, scale_strength(s.connectome.weight(e))});
        out.push_back(std::move(ex));
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"learnad: rule learning over brain-connectome edges"};
    app.require_subcommand(1);
    int status = 0;

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic cohort");
    SyntheticSpec spec;
    std::vector<std::string> planted;
    std::string synth_out;
    synth->add_option("--seed", spec.seed, "random seed");
    synth->add_option("--n-per-class", spec.n_per_class, "subjects per class");
    synth->add_option("--planted", planted, "planted edge i,j,threshold,lt|gt (repeatable)");
    synth->add_option("--noise", spec.noise_rate, "fraction of subjects drawn from the other class's side");
    synth->add_option("--out", synth_out, "output directory")->required();
    synth->callback([&] {
        for (const auto& p : planted) spec.planted.push_back(parse_planted(p));
        const Cohort cohort = generate_synthetic(spec);
        save_cohort(cohort, synth_out);
        std::cout << "wrote " << cohort.size() << " subjects to " << synth_out << "\n";
    });

    // mask
    auto* mask_cmd = app.add_subcommand("mask", "proportional-threshold edge mask");
    std::string mask_cohort;
    std::string mask_out;
    double keep_ratio = 0.30;
    mask_cmd->add_option("--cohort", mask_cohort, "cohort manifest")->required();
    mask_cmd->add_option("--keep-ratio", keep_ratio, "fraction of edges kept");
    mask_cmd->add_option("--out", mask_out, "mask JSON")->required();
    mask_cmd->callback([&] {
        const EdgeMask mask = compute_mask(load_cohort(mask_cohort), keep_ratio);
        save_mask(mask, mask_out);
        std::cout << "kept " << mask.kept.size() << " edges\n";
    });

    // train
    auto* train = app.add_subcommand("train", "fit a decision tree or random forest");
    std::string train_cohort;
    std::string train_mask;
    std::string train_model = "dt";
    std::string train_out;
    std::string train_importance;
    std::uint64_t train_seed = 0;
    TreeParams tree_params;
    ForestParams forest_params;
    train->add_option("--cohort", train_cohort, "cohort manifest")->required();
    train->add_option("--mask", train_mask, "mask JSON (default: all edges)");
    train->add_option("--model", train_model, "dt or rf")->check(CLI::IsMember({"dt", "rf"}));
    train->add_option("--seed", train_seed, "forest seed");
    train->add_option("--max-depth", tree_params.max_depth, "maximum depth");
    train->add_option("--min-samples-split", tree_params.min_samples_split, "minimum node size to split");
    train->add_option("--n-estimators", forest_params.n_estimators, "trees in the forest");
    train->add_option("--max-features", forest_params.max_features, "features per node (0 = sqrt)");
    train->add_option("--out", train_out, "model JSON")->required();
    train->add_option("--importance", train_importance, "importance ranking JSON");
    train->callback([&] {
        const Cohort cohort = load_cohort(train_cohort);
        const auto vectors = masked_vectors(cohort, train_mask);
        const auto order = masked_order(cohort, train_mask);
        json doc;
        ImportanceRanking ranking;
        double acc = 0.0;
        std::int64_t atoms = 0;
        if (train_model == "dt") {
            const DecisionTree tree = fit_tree(vectors, order, tree_params);
            doc = {{"model", "dt"}, {"tree", tree_to_json(tree)}};
            ranking = tree_importance(tree);
            acc = training_accuracy(tree, vectors);
            atoms = tree_atom_count(tree);
        } else {
            forest_params.max_depth = tree_params.max_depth;
            forest_params.min_samples_split = tree_params.min_samples_split;
            const Forest forest = fit_forest(vectors, order, forest_params, train_seed);
            doc = {{"model", "rf"}, {"forest", forest_to_json(forest)}};
            ranking = forest_importance(forest);
            acc = forest_accuracy(forest, vectors);
            atoms = forest_atom_count(forest);
        }
        write_json(train_out, doc);
        if (!train_importance.empty()) write_json(train_importance, ranking_to_json(ranking));
        std::cout << "training accuracy " << acc << ", " << atoms << " atoms\n";
    });

    // select
    auto* select = app.add_subcommand("select", "select edges");
    std::string select_mode = "global";
    int select_k = 3;
    std::string select_model;
    std::string select_expl;
    std::string select_cohort;
    std::string select_out;
    select->add_option("--mode", select_mode, "global or frequency")->check(CLI::IsMember({"global", "frequency"}));
    select->add_option("--k", select_k, "edges to keep (k_global or k_total)");
    select->add_option("--model", select_model, "model JSON (global mode)");
    select->add_option("--explanations", select_expl, "explanations JSON (frequency mode)");
    select->add_option("--cohort", select_cohort, "cohort manifest to check explanation subject ids against");
    select->add_option("--out", select_out, "selected edges JSON")->required();
    select->callback([&] {
        SelectedEdges selected;
        if (select_mode == "global") {
            if (select_model.empty()) throw Error("global selection needs --model");
            const json doc = read_json_file(select_model);
            selected = select_global(model_importance(doc), select_k,
                                     parse_provenance(doc.at("model").get<std::string>()));
        } else {
            if (select_expl.empty()) throw Error("frequency selection needs --explanations");
            std::optional<Cohort> cohort;
            if (!select_cohort.empty()) cohort = load_cohort(select_cohort);
            selected = aggregate_frequency(load_explanations(select_expl, cohort ? &*cohort : nullptr), select_k);
        }
        write_json(select_out, selected_to_json(selected));
        for (EdgeId e : selected.edges) std::cout << edge_to_string(e) << "\n";
    });

    // build-task
    auto* build = app.add_subcommand("build-task", "compile a learning task");
    std::string build_cohort;
    std::string build_selected;
    std::string build_out;
    int ad_subsets = 3;
    std::int64_t base_pen = 1;
    int max_body_edges = 2;
    std::uint64_t build_seed = 0;
    build->add_option("--cohort", build_cohort, "cohort manifest")->required();
    build->add_option("--selected", build_selected, "selected edges JSON")->required();
    build->add_option("--ad-subsets", ad_subsets, "number of disjoint AD subsets");
    build->add_option("--base-pen", base_pen, "base example penalty");
    build->add_option("--max-body-edges", max_body_edges, "maximum edges per rule");
    build->add_option("--seed", build_seed, "AD shuffling seed");
    build->add_option("--out-dir", build_out, "output directory")->required();
    build->callback([&] {
        const Cohort cohort = load_cohort(build_cohort);
        const SelectedEdges selected = selected_from_json(read_json_file(build_selected));
        const auto examples = build_examples(cohort, selected, base_pen);
        const auto space = build_space(selected, examples, max_body_edges);
        const auto partition = partition_tasks(examples, space, ad_subsets, base_pen, build_seed);
        for (std::size_t t = 0; t < partition.tasks.size(); ++t) {
            const fs::path stem = fs::path(build_out) / ("task_" + std::to_string(t));
            write_task_file(partition.tasks[t], stem.string() + ".las");
            write_json(stem.string() + ".json", task_to_json(partition.tasks[t]));
        }
        std::cout << "wrote " << partition.tasks.size() << " tasks to " << build_out << "\n";
    });

    // learn
    auto* learn_cmd = app.add_subcommand("learn", "learn and unite hypotheses");
    std::vector<std::string> task_paths;
    std::string learn_out;
    std::string learn_text;
    std::string learn_atlas_cohort;
    LearnerConfig learner;
    learn_cmd->add_option("--task", task_paths, "task file, .las or .json (repeatable)")->required();
    learn_cmd->add_option("--budget", learner.max_nodes, "branch-and-bound node budget per task");
    learn_cmd->add_option("--max-candidates", learner.max_candidates, "candidate rule budget per task");
    learn_cmd->add_option("--out", learn_out, "hypothesis JSON")->required();
    learn_cmd->add_option("--text", learn_text, "hypothesis as ASP rules");
    learn_cmd->add_option("--cohort", learn_atlas_cohort, "cohort manifest whose atlas names the regions");
    learn_cmd->callback([&] {
        std::vector<Hypothesis> per_task;
        bool optimal = true;
        for (const auto& p : task_paths) {
            const LearnResult r = learn(load_task(p), learner);
            std::cout << p << ": score " << r.score.total << " (" << r.score.length << " atoms + "
                      << r.score.penalty_sum << " penalty), " << r.candidates << " candidates, " << r.nodes
                      << " nodes" << (r.optimal ? "" : " [budget exceeded]") << "\n";
            optimal = optimal && r.optimal;
            per_task.push_back(r.hypothesis);
        }
        const Hypothesis h = union_hypotheses(per_task);
        write_json(learn_out, hypothesis_to_json(h));
        if (!learn_text.empty()) {
            std::optional<Cohort> cohort;
            if (!learn_atlas_cohort.empty()) cohort = load_cohort(learn_atlas_cohort);
            write_text_file(learn_text, hypothesis_to_text(h, cohort ? &cohort->atlas() : nullptr));
        }
        if (!optimal) status = kBudgetExceeded;
    });

    // infer
    auto* infer = app.add_subcommand("infer", "apply a hypothesis to a cohort");
    std::string infer_h;
    std::string infer_cohort;
    std::string infer_out;
    std::string infer_metrics;
    infer->add_option("--hypothesis", infer_h, "hypothesis, .json or ASP text")->required();
    infer->add_option("--cohort", infer_cohort, "cohort manifest")->required();
    infer->add_option("--out", infer_out, "predictions CSV")->required();
    infer->add_option("--metrics", infer_metrics, "metrics JSON");
    infer->callback([&] {
        const Hypothesis h = load_hypothesis(infer_h);
        const auto preds = predict_all(h, hypothesis_examples(load_cohort(infer_cohort), h));
        write_text_file(infer_out, predictions_csv(preds));
        const Metrics m = metrics_from(preds);
        if (!infer_metrics.empty()) write_json(infer_metrics, metrics_to_json(m));
        std::cout << "accuracy " << m.accuracy << " sensitivity " << m.sensitivity << " specificity "
                  << m.specificity << "\n";
    });

    // cv
    auto* cv = app.add_subcommand("cv", "repeated stratified cross-validation");
    std::string cv_config;
    std::string cv_out;
    cv->add_option("--config", cv_config, "config JSON")->required();
    cv->add_option("--out-dir", cv_out, "run directory")->required();
    cv->callback([&] {
        const CVConfig config = cv_config_from_json(read_json_file(cv_config), fs::path(cv_config).parent_path());
        const Cohort cohort = load_config_cohort(config);
        std::optional<std::vector<InstanceExplanation>> expl;
        if (config.pipeline == PipelineKind::external_explanations) {
            expl = load_explanations(config.explanations, &cohort);
        }
        const RunReport report = run_pipeline(config, cohort, expl ? &*expl : nullptr);
        const json doc = report_to_json(report);
        write_json(fs::path(cv_out) / "report.json", doc);
        const auto& s = doc.at("summary");
        std::printf("validation accuracy %.4f +/- %.4f, hypothesis atoms %.2f +/- %.2f\n",
                    s["validation"]["accuracy"]["mean"].get<double>(), s["validation"]["accuracy"]["std"].get<double>(),
                    s["hypothesis_atoms"]["mean"].get<double>(), s["hypothesis_atoms"]["std"].get<double>());
        if (s.at("nonoptimal_folds").get<int>() > 0) {
            std::cout << s.at("nonoptimal_folds").get<int>() << " fold(s) hit the search budget\n";
        }
    });

    // report
    auto* rep = app.add_subcommand("report", "tabulate cv runs");
    std::vector<std::string> run_dirs;
    std::string rep_out;
    rep->add_option("--run-dir", run_dirs, "run directory holding report.json (repeatable)")->required();
    rep->add_option("--out-dir", rep_out, "where to write tables.md and tables.json");
    rep->callback([&] {
        std::vector<json> reports;
        for (const auto& d : run_dirs) reports.push_back(read_json_file(fs::path(d) / "report.json"));
        const std::string md = render_markdown(reports);
        const fs::path out = rep_out.empty() ? fs::path(run_dirs.front()) : fs::path(rep_out);
        write_text_file(out / "tables.md", md);
        write_json(out / "tables.json", render_tables(reports));
        std::cout << md;
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "fatal: " << e.what() << "\n";
        return 1;
    }
    return status;
}
