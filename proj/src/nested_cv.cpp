#include "retiomics/nested_cv.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

#include "retiomics/preprocess.hpp"
#include "retiomics/rng.hpp"

namespace retiomics::engine {

using cohort::DesignMatrix;
using models::ModelKind;
using models::ModelSpec;

std::string CellSpec::id() const {
    std::string out = "task" + std::to_string(cohort::task_number(task)) + "_" +
                      combination.name + "_" + models::to_string(model) + "_" + eyes;
    if (!combination.modalities.empty()) {
        out += "_mod";
        for (const auto& m : combination.modalities) out += "-" + m;
    }
    return out;
}

std::uint64_t cell_seed(std::uint64_t master_seed, const CellSpec& cell) {
    std::string filter;
    for (const auto& m : cell.combination.modalities) {
        if (!filter.empty()) filter += ",";
        filter += m;
    }
    return derive_seed(master_seed, "cell", static_cast<std::uint64_t>(cohort::task_number(cell.task)),
                       cell.combination.name, models::to_string(cell.model), cell.eyes, filter);
}

std::uint64_t fold_plan_seed(std::uint64_t master_seed, cohort::Task task,
                             const std::string& eyes) {
    return derive_seed(master_seed, "folds", static_cast<std::uint64_t>(cohort::task_number(task)),
                       eyes);
}

namespace {

selection::Grid grid_for(const EngineOptions& options, ModelKind kind, std::size_t p) {
    auto it = options.grid_overrides.find(kind);
    if (it != options.grid_overrides.end()) return it->second;
    return selection::default_grid(kind, p);
}

std::vector<int> effective_labels(const DesignMatrix& dm, const CellSpec& cell,
                                  const EngineOptions& options) {
    std::vector<int> labels = dm.labels;
    if (!options.permute_labels) return labels;
    // Patient-level permutation: shuffle the patient -> label map so both
    // eyes keep a consistent (random) label. Seeded per (task, eye mode) so
    // every cell of one comparison sees the same null labels.
    std::map<std::string, int> patient_label;
    for (std::size_t r = 0; r < dm.rows(); ++r) patient_label[dm.patients[r]] = dm.labels[r];
    std::vector<int> values;
    values.reserve(patient_label.size());
    for (const auto& [id, lab] : patient_label) values.push_back(lab);
    Rng rng(derive_seed(options.master_seed, "permute",
                        static_cast<std::uint64_t>(cohort::task_number(cell.task)), cell.eyes));
    rng.shuffle(values);
    std::size_t i = 0;
    for (auto& [id, lab] : patient_label) lab = values[i++];
    for (std::size_t r = 0; r < dm.rows(); ++r) labels[r] = patient_label.at(dm.patients[r]);
    return labels;
}

nlohmann::ordered_json trace_to_json(const selection::SelectionTrace& trace) {
    nlohmann::ordered_json j;
    nlohmann::ordered_json steps = nlohmann::ordered_json::array();
    for (const auto& s : trace.steps) {
        steps.push_back({{"removed", s.removed},
                         {"auc_before", s.auc_before},
                         {"auc_after", s.auc_after}});
    }
    j["steps"] = std::move(steps);
    j["final"] = trace.final_features;
    j["stopping_reason"] = trace.stopping_reason;
    return j;
}

selection::SelectionTrace trace_from_json(const nlohmann::ordered_json& j) {
    selection::SelectionTrace trace;
    for (const auto& s : j.at("steps")) {
        trace.steps.push_back({s.at("removed").get<std::string>(),
                               s.at("auc_before").get<double>(),
                               s.at("auc_after").get<double>()});
    }
    trace.final_features = j.at("final").get<std::vector<std::string>>();
    trace.stopping_reason = j.at("stopping_reason").get<std::string>();
    return trace;
}

}  // namespace

RunResult run_nested_cv(const DesignMatrix& dm, const evaluation::FoldPlan& plan,
                        const CellSpec& cell, const EngineOptions& options,
                        const PresetFeatures* rf_union) {
    if (dm.rows() == 0) throw DataError("nested CV received an empty cohort");
    if (plan.k != options.k || plan.m != options.m) {
        throw UsageError("fold plan does not match the engine's k/m settings");
    }
    if (rf_union != nullptr && rf_union->size() != static_cast<std::size_t>(plan.k)) {
        throw UsageError("RF feature-union presets must supply one list per outer fold");
    }

    RunResult result;
    result.cell = cell;
    result.k = options.k;
    result.m = options.m;
    result.seed = cell_seed(options.master_seed, cell);
    result.fold_seed = plan.seed;

    const std::vector<int> labels = effective_labels(dm, cell, options);
    std::map<std::string, int> patient_label;
    for (std::size_t r = 0; r < dm.rows(); ++r) {
        if (plan.outer.find(dm.patients[r]) == plan.outer.end()) {
            throw UsageError("fold plan does not cover patient " + dm.patients[r]);
        }
        patient_label[dm.patients[r]] = labels[r];
    }
    result.n_patients = patient_label.size();
    result.n_rows = dm.rows();
    for (int lab : labels) (lab == 1 ? result.n_pos : result.n_neg) += 1;

    std::size_t pat0 = 0, pat1 = 0;
    for (const auto& [id, lab] : patient_label) (lab == 1 ? pat1 : pat0) += 1;
    if (pat0 < static_cast<std::size_t>(options.k) || pat1 < static_cast<std::size_t>(options.k)) {
        throw DataError("each class needs at least k=" + std::to_string(options.k) +
                        " patients; have " + std::to_string(pat0) + " negative and " +
                        std::to_string(pat1) + " positive");
    }

    for (const auto& w : dm.warnings) result.warnings.push_back(w);

    std::vector<std::string> all_sources = dm.columns;
    std::sort(all_sources.begin(), all_sources.end());

    std::set<std::string> modes_used;
    std::map<std::string, double> shap_acc;
    std::size_t shap_rows_total = 0;
    std::vector<double> fold_aucs;
    bool warned_fallback = false, warned_sampled = false;

    for (int f = 0; f < options.k; ++f) {
        std::vector<std::size_t> train_rows, test_rows;
        for (std::size_t r = 0; r < dm.rows(); ++r) {
            (plan.outer.at(dm.patients[r]) == f ? test_rows : train_rows).push_back(r);
        }
        auto has_both = [&](const std::vector<std::size_t>& rows) {
            bool c0 = false, c1 = false;
            for (std::size_t r : rows) (labels[r] == 1 ? c1 : c0) = true;
            return c0 && c1;
        };
        if (!has_both(test_rows) || !has_both(train_rows)) {
            throw DataError("outer fold " + std::to_string(f) +
                            " lacks a class in its train or test split; use a different master "
                            "seed or enable stratified grouping");
        }

        const auto prep = preprocess::fit_preprocessor(dm, train_rows);
        const Matrix X_train = preprocess::apply_preprocessor(prep, dm, train_rows);
        const Matrix X_test = preprocess::apply_preprocessor(prep, dm, test_rows);
        std::vector<int> y_train, y_test;
        y_train.reserve(train_rows.size());
        for (std::size_t r : train_rows) y_train.push_back(labels[r]);
        y_test.reserve(test_rows.size());
        for (std::size_t r : test_rows) y_test.push_back(labels[r]);

        const auto& inner_map = plan.inner[static_cast<std::size_t>(f)];
        std::vector<int> inner_fold;
        inner_fold.reserve(train_rows.size());
        for (std::size_t r : train_rows) inner_fold.push_back(inner_map.at(dm.patients[r]));

        selection::InnerSplit split;
        split.X = &X_train;
        split.y = &y_train;
        split.inner_fold = &inner_fold;
        split.m = options.m;
        split.prep = &prep;
        split.class_weights = options.class_weights;
        split.seed = derive_seed(result.seed, "fold", static_cast<std::uint64_t>(f));

        FoldOutcome outcome;
        outcome.fold = f;
        outcome.test_rows = test_rows.size();

        const selection::Grid initial_grid =
            grid_for(options, cell.model, prep.expanded_names.size());
        const auto initial = selection::grid_search(split, initial_grid, all_sources);
        outcome.initial_setting = initial.best;

        if (!options.selection) {
            outcome.selected_features = all_sources;
            outcome.selection_source = "all_features";
            outcome.final_setting = initial.best;
        } else {
            if (cell.model == ModelKind::RF) {
                const std::vector<std::string>* preset = nullptr;
                if (rf_union != nullptr && !(*rf_union)[static_cast<std::size_t>(f)].empty()) {
                    preset = &(*rf_union)[static_cast<std::size_t>(f)];
                }
                if (preset != nullptr) {
                    outcome.selected_features = *preset;
                    std::sort(outcome.selected_features.begin(), outcome.selected_features.end());
                    outcome.selection_source = "rf_union";
                } else {
                    auto two = selection::two_stage_select(split, initial.best, options.epsilon);
                    outcome.selected_features = two.final_features;
                    outcome.stage1 = std::move(two.stage1);
                    outcome.stage2 = std::move(two.stage2);
                    outcome.selection_source = "rf_fallback";
                    if (!warned_fallback) {
                        result.warnings.push_back(
                            "RF ran its own two-stage elimination because no sibling-model "
                            "feature unions were provided");
                        warned_fallback = true;
                    }
                }
            } else {
                auto two = selection::two_stage_select(split, initial.best, options.epsilon);
                outcome.selected_features = two.final_features;
                outcome.stage1 = std::move(two.stage1);
                outcome.stage2 = std::move(two.stage2);
                outcome.selection_source = "two_stage";
            }
            const std::size_t p_final =
                prep.expanded_for_sources(outcome.selected_features).size();
            const selection::Grid regrid = grid_for(options, cell.model, p_final);
            outcome.final_setting =
                selection::grid_search(split, regrid, outcome.selected_features).best;

            const std::size_t n_sel = outcome.selected_features.size();
            if (n_sel < 5 || n_sel > 20) {
                result.warnings.push_back("fold " + std::to_string(f) + " selected " +
                                          std::to_string(n_sel) +
                                          " features, outside the typical 5-20 range");
            }
        }

        const std::vector<std::size_t> cols =
            prep.expanded_for_sources(outcome.selected_features);
        const Matrix X_train_sel = subset_columns(X_train, cols);
        const Matrix X_test_sel = subset_columns(X_test, cols);

        ModelSpec final_spec = outcome.final_setting;
        if (final_spec.kind == ModelKind::RF) {
            final_spec.seed = derive_seed(result.seed, "final_rf", static_cast<std::uint64_t>(f));
            outcome.final_setting = final_spec;
        }
        std::vector<double> weights;
        if (options.class_weights &&
            (final_spec.kind == ModelKind::LR || final_spec.kind == ModelKind::SvcLinear ||
             final_spec.kind == ModelKind::SvcRbf)) {
            weights = models::inverse_frequency_weights(y_train);
        }
        const models::TrainedModel model = models::train(X_train_sel, y_train, final_spec, weights);
        const std::vector<double> scores = model.score(X_test_sel);

        outcome.auc = evaluation::auc(scores, y_test);
        fold_aucs.push_back(outcome.auc);
        for (std::size_t i = 0; i < test_rows.size(); ++i) {
            const std::size_t r = test_rows[i];
            result.pooled.push_back({dm.patients[r], dm.eyes[r], f, labels[r], scores[i]});
        }

        if (options.shap.enabled) {
            const bool exact = cols.size() <= 15;
            if (!exact && !warned_sampled) {
                result.warnings.push_back(
                    "feature set exceeds 15 columns; Shapley values use sampled permutations");
                warned_sampled = true;
            }
            modes_used.insert(exact ? "exact" : "sampled");
            const Matrix background = options.shap.full_background
                                          ? X_train_sel
                                          : attribution::median_background(X_train_sel);
            std::size_t n_expl = X_test_sel.rows;
            if (options.shap.max_rows > 0 && options.shap.max_rows < n_expl) {
                n_expl = options.shap.max_rows;
            }
            for (std::size_t r = 0; r < n_expl; ++r) {
                const auto a = attribution::shap_explain(
                    model, X_test_sel.row(r), background, exact,
                    derive_seed(result.seed, "shap", static_cast<std::uint64_t>(f), r),
                    options.shap.permutations);
                for (std::size_t i = 0; i < cols.size(); ++i) {
                    shap_acc[prep.expanded_names[cols[i]]] += std::abs(a.values[i]);
                }
            }
            shap_rows_total += n_expl;
        }

        result.folds.push_back(std::move(outcome));
    }

    double mean = 0.0;
    for (double a : fold_aucs) mean += a;
    mean /= static_cast<double>(fold_aucs.size());
    double ss = 0.0;
    for (double a : fold_aucs) ss += (a - mean) * (a - mean);
    result.mean_auc = mean;
    result.sd_auc = fold_aucs.size() > 1
                        ? std::sqrt(ss / static_cast<double>(fold_aucs.size() - 1))
                        : 0.0;

    if (!options.shap.enabled) {
        result.shap_mode = "off";
    } else if (modes_used.size() == 1) {
        result.shap_mode = *modes_used.begin();
    } else {
        result.shap_mode = "mixed";
    }
    result.shap_rows = shap_rows_total;
    if (shap_rows_total > 0) {
        for (const auto& [name, total] : shap_acc) {
            result.shap.push_back({name, total / static_cast<double>(shap_rows_total)});
        }
        std::sort(result.shap.begin(), result.shap.end(),
                  [](const attribution::RankedFeature& a, const attribution::RankedFeature& b) {
                      if (a.mean_abs != b.mean_abs) return a.mean_abs > b.mean_abs;
                      return a.name < b.name;
                  });
    }
    return result;
}

nlohmann::ordered_json manifest_to_json(const RunResult& result, const std::string& config_echo) {
    nlohmann::ordered_json j;
    j["schema"] = "retiomics.run/1";
    j["cell"] = {{"id", result.cell.id()},
                 {"task", cohort::task_number(result.cell.task)},
                 {"combination", result.cell.combination.name},
                 {"modalities", result.cell.combination.modalities},
                 {"model", models::to_string(result.cell.model)},
                 {"eyes", result.cell.eyes}};
    j["k"] = result.k;
    j["m"] = result.m;
    j["seed"] = result.seed;
    j["fold_seed"] = result.fold_seed;
    j["cohort"] = {{"patients", result.n_patients},
                   {"rows", result.n_rows},
                   {"positives", result.n_pos},
                   {"negatives", result.n_neg}};
    nlohmann::ordered_json folds = nlohmann::ordered_json::array();
    for (const auto& fo : result.folds) {
        nlohmann::ordered_json jf;
        jf["fold"] = fo.fold;
        jf["auc"] = fo.auc;
        jf["initial_setting"] = models::spec_to_json(fo.initial_setting);
        jf["final_setting"] = models::spec_to_json(fo.final_setting);
        jf["selected_features"] = fo.selected_features;
        jf["selection_source"] = fo.selection_source;
        jf["stage1"] = trace_to_json(fo.stage1);
        jf["stage2"] = trace_to_json(fo.stage2);
        jf["test_rows"] = fo.test_rows;
        folds.push_back(std::move(jf));
    }
    j["folds"] = std::move(folds);
    j["mean_auc"] = result.mean_auc;
    j["sd_auc"] = result.sd_auc;
    nlohmann::ordered_json pooled = nlohmann::ordered_json::array();
    for (const auto& p : result.pooled) {
        pooled.push_back({{"patient", p.patient},
                          {"eye", p.eye},
                          {"fold", p.fold},
                          {"label", p.label},
                          {"score", p.score}});
    }
    j["pooled_scores"] = std::move(pooled);
    nlohmann::ordered_json shap;
    shap["mode"] = result.shap_mode;
    shap["rows"] = result.shap_rows;
    nlohmann::ordered_json ranking = nlohmann::ordered_json::array();
    for (const auto& r : result.shap) {
        ranking.push_back({{"feature", r.name}, {"mean_abs_shap", r.mean_abs}});
    }
    shap["ranking"] = std::move(ranking);
    j["shap"] = std::move(shap);
    j["warnings"] = result.warnings;
    j["config_echo"] = config_echo;
    return j;
}

RunResult manifest_from_json(const nlohmann::ordered_json& j) {
    if (j.at("schema").get<std::string>() != "retiomics.run/1") {
        throw DataError("unsupported run-manifest schema: " +
                        j.at("schema").get<std::string>());
    }
    RunResult result;
    const auto& cell = j.at("cell");
    result.cell.task = cohort::parse_task(cell.at("task").get<int>());
    result.cell.combination = cohort::DataCombination::parse(
        cell.at("combination").get<std::string>(),
        cell.at("modalities").get<std::vector<std::string>>());
    result.cell.model = models::parse_model_kind(cell.at("model").get<std::string>());
    result.cell.eyes = cell.at("eyes").get<std::string>();
    result.k = j.at("k").get<int>();
    result.m = j.at("m").get<int>();
    result.seed = j.at("seed").get<std::uint64_t>();
    result.fold_seed = j.at("fold_seed").get<std::uint64_t>();
    const auto& cohort_j = j.at("cohort");
    result.n_patients = cohort_j.at("patients").get<std::size_t>();
    result.n_rows = cohort_j.at("rows").get<std::size_t>();
    result.n_pos = cohort_j.at("positives").get<std::size_t>();
    result.n_neg = cohort_j.at("negatives").get<std::size_t>();
    for (const auto& jf : j.at("folds")) {
        FoldOutcome fo;
        fo.fold = jf.at("fold").get<int>();
        fo.auc = jf.at("auc").get<double>();
        fo.initial_setting = models::spec_from_json(jf.at("initial_setting"));
        fo.final_setting = models::spec_from_json(jf.at("final_setting"));
        fo.selected_features = jf.at("selected_features").get<std::vector<std::string>>();
        fo.selection_source = jf.at("selection_source").get<std::string>();
        fo.stage1 = trace_from_json(jf.at("stage1"));
        fo.stage2 = trace_from_json(jf.at("stage2"));
        fo.test_rows = jf.at("test_rows").get<std::size_t>();
        result.folds.push_back(std::move(fo));
    }
    result.mean_auc = j.at("mean_auc").get<double>();
    result.sd_auc = j.at("sd_auc").get<double>();
    for (const auto& jp : j.at("pooled_scores")) {
        result.pooled.push_back({jp.at("patient").get<std::string>(),
                                 jp.at("eye").get<std::string>(), jp.at("fold").get<int>(),
                                 jp.at("label").get<int>(), jp.at("score").get<double>()});
    }
    const auto& shap = j.at("shap");
    result.shap_mode = shap.at("mode").get<std::string>();
    result.shap_rows = shap.at("rows").get<std::size_t>();
    for (const auto& jr : shap.at("ranking")) {
        result.shap.push_back(
            {jr.at("feature").get<std::string>(), jr.at("mean_abs_shap").get<double>()});
    }
    result.warnings = j.at("warnings").get<std::vector<std::string>>();
    return result;
}

}  // namespace retiomics::engine
