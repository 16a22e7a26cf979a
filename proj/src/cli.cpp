#include "retiomics/cli.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include <nlohmann/json.hpp>

#include "retiomics/csv.hpp"
#include "retiomics/evaluation.hpp"
#include "retiomics/imaging.hpp"
#include "retiomics/report.hpp"
#include "retiomics/rng.hpp"
#include "retiomics/selection.hpp"
#include "retiomics/synth.hpp"

namespace retiomics::cli {

namespace fs = std::filesystem;
using models::ModelKind;

namespace {

double parse_double_strict(const std::string& text, const std::string& what) {
    double value = 0.0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end) {
        throw UsageError("invalid number for " + what + ": '" + text + "'");
    }
    return value;
}

std::int64_t parse_int_strict(const std::string& text, const std::string& what) {
    std::int64_t value = 0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end) {
        throw UsageError("invalid integer for " + what + ": '" + text + "'");
    }
    return value;
}

std::vector<double> parse_double_list(const IniConfig& ini, const std::string& section,
                                      const std::string& key) {
    std::vector<double> out;
    for (const auto& item : ini.get_list(section, key)) {
        out.push_back(parse_double_strict(item, section + "." + key));
    }
    if (out.empty()) throw UsageError("grid section [" + section + "] needs key '" + key + "'");
    return out;
}

std::vector<int> parse_int_list(const IniConfig& ini, const std::string& section,
                                const std::string& key, std::vector<int> fallback) {
    if (!ini.has(section, key)) return fallback;
    std::vector<int> out;
    for (const auto& item : ini.get_list(section, key)) {
        out.push_back(static_cast<int>(parse_int_strict(item, section + "." + key)));
    }
    if (out.empty()) throw UsageError("grid section [" + section + "] key '" + key + "' is empty");
    return out;
}

selection::Grid grid_from_ini(const IniConfig& ini, ModelKind kind) {
    const std::string section = "grid." + models::to_string(kind);
    selection::Grid grid;
    grid.kind = kind;
    auto add = [&](auto&& tweak) {
        models::ModelSpec spec;
        spec.kind = kind;
        tweak(spec);
        grid.settings.push_back(spec);
    };
    switch (kind) {
        case ModelKind::LR:
            for (double lambda : parse_double_list(ini, section, "lambda")) {
                add([&](models::ModelSpec& s) { s.lambda = lambda; });
            }
            break;
        case ModelKind::LDA:
            for (double g : parse_double_list(ini, section, "shrinkage")) {
                add([&](models::ModelSpec& s) { s.shrinkage = g; });
            }
            break;
        case ModelKind::SvcLinear:
            for (double c : parse_double_list(ini, section, "C")) {
                add([&](models::ModelSpec& s) { s.C = c; });
            }
            break;
        case ModelKind::SvcRbf:
            for (double c : parse_double_list(ini, section, "C")) {
                for (double g : parse_double_list(ini, section, "gamma")) {
                    add([&](models::ModelSpec& s) {
                        s.C = c;
                        s.gamma = g;
                    });
                }
            }
            break;
        case ModelKind::RF:
            for (int trees : parse_int_list(ini, section, "trees", {100, 300})) {
                for (int depth : parse_int_list(ini, section, "depth", {-1, 8})) {
                    for (int leaf : parse_int_list(ini, section, "min_leaf", {1, 5})) {
                        add([&](models::ModelSpec& s) {
                            s.n_trees = trees;
                            s.max_depth = depth;
                            s.min_leaf = leaf;
                        });
                    }
                }
            }
            break;
    }
    for (const auto& spec : grid.settings) spec.validate();
    return grid;
}

/// Deterministic worker pool: grabs cell indices in order, first error wins.
void run_pool(std::size_t n_items, int jobs, const std::function<void(std::size_t)>& work) {
    if (n_items == 0) return;
    const int n_threads = std::max(1, std::min<int>(jobs, static_cast<int>(n_items)));
    if (n_threads == 1) {
        for (std::size_t i = 0; i < n_items; ++i) work(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto body = [&] {
        while (!failed.load()) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n_items) break;
            try {
                work(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                failed.store(true);
                break;
            }
        }
    };
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) threads.emplace_back(body);
    for (auto& t : threads) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace

void ExperimentConfig::validate() const {
    if (tasks.empty()) throw UsageError("experiment defines no tasks");
    if (combinations.empty()) throw UsageError("experiment defines no data combinations");
    if (model_kinds.empty()) throw UsageError("experiment defines no models");
    if (eye_modes.empty()) throw UsageError("experiment defines no eye modes");
    for (const auto& mode : eye_modes) {
        if (mode != "both" && mode != "single") {
            throw UsageError("eye mode must be 'both' or 'single', got '" + mode + "'");
        }
    }
    if (options.k < 2 || options.m < 2) throw UsageError("k and m must both be >= 2");
    if (options.epsilon < 0.0) throw UsageError("epsilon must be >= 0");
    if (jobs < 1) throw UsageError("jobs must be >= 1");
    if (!modalities.empty() && !ablation_modalities.empty()) {
        throw UsageError("set either a global modality filter or ablation_modalities, not both");
    }
    if (features_csv.empty() || clinical_csv.empty()) {
        throw UsageError("[data] must name both the features and the clinical CSV");
    }
    std::set<std::string> combo_seen;
    for (const auto& name : combinations) {
        cohort::DataCombination::parse(name);  // throws on unknown names
        if (!combo_seen.insert(name).second) {
            throw UsageError("duplicate data combination '" + name + "'");
        }
    }
    for (const auto& m : modalities) imaging::parse_modality(m);
    for (const auto& m : ablation_modalities) imaging::parse_modality(m);
}

ExperimentConfig experiment_from_ini(const IniConfig& ini) {
    ExperimentConfig config;

    for (const auto& t : ini.get_list("experiment", "task")) {
        config.tasks.push_back(
            cohort::parse_task(static_cast<int>(parse_int_strict(t, "experiment.task"))));
    }
    if (config.tasks.empty()) {
        config.tasks = {cohort::Task::Task1, cohort::Task::Task2};
    }

    config.combinations = ini.get_list("experiment", "combinations");
    if (config.combinations.empty()) config.combinations = cohort::DataCombination::all_names();

    // LDA is available but not a default: the publication discarded it after
    // the initial tuning round.
    std::vector<std::string> model_names = ini.get_list("experiment", "models");
    if (model_names.empty()) model_names = {"LR", "SVC-linear", "SVC-rbf", "RF"};
    for (const auto& name : model_names) {
        config.model_kinds.push_back(models::parse_model_kind(name));
    }

    config.eye_modes = ini.get_list("experiment", "eyes");
    if (config.eye_modes.empty()) config.eye_modes = {"both", "single"};

    config.modalities = ini.get_list("experiment", "modalities");
    config.ablation_modalities = ini.get_list("experiment", "ablation_modalities");

    auto& opt = config.options;
    opt.k = static_cast<int>(ini.get_int("experiment", "k", 5));
    opt.m = static_cast<int>(ini.get_int("experiment", "m", 4));
    opt.master_seed = static_cast<std::uint64_t>(ini.get_int("experiment", "seed", 0));
    opt.selection = ini.get_bool("experiment", "selection", true);
    opt.epsilon = ini.get_double("experiment", "epsilon", 0.001);
    opt.stratified = ini.get_bool("experiment", "stratified", false);
    opt.class_weights = ini.get_bool("experiment", "class_weights", false);
    opt.permute_labels = ini.get_bool("experiment", "permute_labels", false);
    config.jobs = static_cast<int>(ini.get_int("experiment", "jobs", 1));

    opt.shap.enabled = ini.get_bool("shap", "enabled", true);
    opt.shap.max_rows = static_cast<std::size_t>(ini.get_int("shap", "max_rows", 0));
    opt.shap.permutations = static_cast<std::size_t>(ini.get_int("shap", "permutations", 200));
    opt.shap.full_background = ini.get_bool("shap", "full_background", false);

    for (ModelKind kind : {ModelKind::LR, ModelKind::LDA, ModelKind::SvcLinear, ModelKind::SvcRbf,
                           ModelKind::RF}) {
        if (ini.has_section("grid." + models::to_string(kind))) {
            opt.grid_overrides[kind] = grid_from_ini(ini, kind);
        }
    }

    config.features.entropy = ini.get_bool("features", "entropy", false);
    config.features.uniformity = ini.get_bool("features", "uniformity", false);
    config.features.bin_width = ini.get_double("features", "bin_width", 25.0);

    config.features_csv = ini.get_or("data", "features", "");
    config.clinical_csv = ini.get_or("data", "clinical", "");
    config.out_dir = ini.get_or("data", "out", "runs");
    return config;
}

ExperimentConfig load_experiment(const fs::path& config_path, const RunOverrides& overrides) {
    IniConfig ini = IniConfig::parse_file(config_path);
    if (overrides.seed) ini.set("experiment", "seed", std::to_string(*overrides.seed));
    if (overrides.eyes) ini.set("experiment", "eyes", *overrides.eyes);
    if (overrides.modalities) ini.set("experiment", "modalities", *overrides.modalities);
    if (overrides.task) ini.set("experiment", "task", std::to_string(*overrides.task));
    if (overrides.data) ini.set("experiment", "combinations", *overrides.data);
    if (overrides.model) ini.set("experiment", "models", *overrides.model);

    ExperimentConfig config = experiment_from_ini(ini);
    // The echo records everything that shapes the results. Worker count and
    // output destination deliberately stay out of it so the same experiment
    // yields byte-identical manifests regardless of --jobs or --out.
    config.echo = ini.dump();
    if (overrides.jobs) config.jobs = *overrides.jobs;
    if (overrides.out) config.out_dir = *overrides.out;

    const fs::path base = config_path.parent_path();
    auto resolve = [&](fs::path& p) {
        if (!p.empty() && p.is_relative()) p = base / p;
    };
    resolve(config.features_csv);
    resolve(config.clinical_csv);
    if (!overrides.out) resolve(config.out_dir);
    config.validate();
    return config;
}

void cmd_extract(const fs::path& manifest_csv, const fs::path& out_csv,
                 const radiomics::FeatureConfig& features) {
    const CsvTable table = read_csv(manifest_csv);
    const int col_patient = table.column("patient_id");
    const int col_eye = table.column("eye");
    const int col_modality = table.column("modality");
    const int col_path = table.column("path");
    if (col_patient < 0 || col_eye < 0 || col_modality < 0 || col_path < 0) {
        throw DataError("image manifest must have columns patient_id, eye, modality, path");
    }
    const int col_sx = table.column("spacing_x");
    const int col_sy = table.column("spacing_y");
    if (table.rows.empty()) {
        throw DataError("image manifest " + manifest_csv.string() + " lists no images");
    }

    using Key = std::pair<std::string, std::string>;
    std::map<Key,
             std::vector<std::pair<imaging::Modality,
                                   std::pair<imaging::GrayImage, imaging::RoiMask>>>>
        eyes;
    std::vector<std::string> errors;
    const fs::path base = manifest_csv.parent_path();
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const std::string where = manifest_csv.string() + " row " + std::to_string(r + 2);
        try {
            const imaging::Modality modality =
                imaging::parse_modality(row[static_cast<std::size_t>(col_modality)]);
            fs::path img_path = row[static_cast<std::size_t>(col_path)];
            if (img_path.is_relative()) img_path = base / img_path;
            imaging::GrayImage image = imaging::load_pgm(img_path);
            if (col_sx >= 0 && !row[static_cast<std::size_t>(col_sx)].empty()) {
                image.spacing_x =
                    parse_double_strict(row[static_cast<std::size_t>(col_sx)], "spacing_x");
            }
            if (col_sy >= 0 && !row[static_cast<std::size_t>(col_sy)].empty()) {
                image.spacing_y =
                    parse_double_strict(row[static_cast<std::size_t>(col_sy)], "spacing_y");
            }
            image.validate();
            const imaging::RoiMask mask = imaging::full_mask(image);
            eyes[{row[static_cast<std::size_t>(col_patient)],
                  row[static_cast<std::size_t>(col_eye)]}]
                .push_back({modality, {std::move(image), mask}});
        } catch (const std::exception& e) {
            errors.push_back(where + ": " + e.what());
        }
    }

    cohort::Cohort out;
    for (const auto& [key, images] : eyes) {
        try {
            const auto row = radiomics::build_eye_feature_row(key.first, key.second, images,
                                                              features);
            cohort::EyeRecord rec;
            rec.patient_id = row.patient_id;
            rec.eye = row.eye;
            for (const auto& [name, value] : row.values) {
                rec.radiomics[name] = cohort::CellValue::num(value);
            }
            out.records.push_back(std::move(rec));
        } catch (const std::exception& e) {
            errors.push_back("eye " + key.first + "/" + key.second + ": " + e.what());
        }
    }
    if (!errors.empty()) {
        std::string message = "feature extraction failed for " + std::to_string(errors.size()) +
                              " input(s):";
        for (const auto& e : errors) message += "\n  " + e;
        throw DataError(message);
    }
    cohort::write_features_csv(out, out_csv);
}

void cmd_synth(const std::optional<fs::path>& config_path, std::uint64_t seed,
               const fs::path& out_dir) {
    synth::SynthConfig config;
    if (config_path) {
        config = synth::synth_config_from_ini(IniConfig::parse_file(*config_path));
    } else {
        config = synth::default_synth_config();
    }
    config.validate();
    const cohort::Cohort cohort = synth::generate_synthetic(config, seed);
    fs::create_directories(out_dir);
    cohort::write_features_csv(cohort, out_dir / "features.csv");
    cohort::write_clinical_csv(cohort, out_dir / "clinical.csv");
    IniConfig echo = synth::synth_config_to_ini(config);
    echo.set("provenance", "seed", std::to_string(seed));
    atomic_write_file(out_dir / "synth_config.ini", echo.dump());
}

namespace {

struct PlanKey {
    int task;
    std::string eyes;
    bool operator<(const PlanKey& o) const {
        return task != o.task ? task < o.task : eyes < o.eyes;
    }
};

/// Patients retained by the task, with their binary labels.
std::pair<std::vector<std::string>, std::map<std::string, int>> task_patients(
    const cohort::Cohort& cohort, cohort::Task task) {
    std::map<std::string, int> labels;
    for (const auto& rec : cohort.records) {
        const int cls = cohort::risk_class_index(rec.risk_label);
        if (task == cohort::Task::Task2 && cls == 0) continue;
        const int label = task == cohort::Task::Task1 ? (cls == 0 ? 0 : 1) : (cls == 1 ? 0 : 1);
        labels[rec.patient_id] = label;
    }
    std::vector<std::string> patients;
    patients.reserve(labels.size());
    for (const auto& [id, lab] : labels) patients.push_back(id);
    return {patients, labels};
}

}  // namespace

void cmd_run(const ExperimentConfig& config) {
    config.validate();
    const cohort::Cohort full = cohort::load_cohort(config.features_csv, config.clinical_csv);

    std::map<std::string, cohort::Cohort> cohorts;
    for (const auto& mode : config.eye_modes) {
        if (mode == "both") {
            cohorts.emplace("both", full);
        } else {
            cohorts.emplace("single", cohort::select_single_eye(
                                          full, derive_seed(config.options.master_seed,
                                                            "single_eye")));
        }
    }

    // Fold plans are shared across models and combinations of one
    // (task, eye mode) so the RF feature union consumes aligned folds.
    std::map<PlanKey, evaluation::FoldPlan> plans;
    for (const auto& task : config.tasks) {
        for (const auto& mode : config.eye_modes) {
            const auto [patients, labels] = task_patients(cohorts.at(mode), task);
            plans.emplace(PlanKey{cohort::task_number(task), mode},
                          evaluation::grouped_kfold(
                              patients, config.options.k, config.options.m,
                              engine::fold_plan_seed(config.options.master_seed, task, mode),
                              config.options.stratified, labels));
        }
    }

    std::vector<engine::CellSpec> cells;
    for (const auto& task : config.tasks) {
        for (const auto& mode : config.eye_modes) {
            for (const auto& comb_name : config.combinations) {
                std::vector<std::vector<std::string>> filters;
                filters.push_back(config.modalities);
                for (const auto& am : config.ablation_modalities) filters.push_back({am});
                for (const auto& filter : filters) {
                    for (ModelKind kind : config.model_kinds) {
                        engine::CellSpec cell;
                        cell.task = task;
                        cell.combination = cohort::DataCombination::parse(comb_name, filter);
                        cell.model = kind;
                        cell.eyes = mode;
                        cells.push_back(std::move(cell));
                    }
                }
            }
        }
    }

    const fs::path manifest_dir = config.out_dir / "manifests";
    fs::create_directories(manifest_dir);

    std::vector<std::optional<engine::RunResult>> results(cells.size());
    auto run_cell = [&](std::size_t i, const engine::PresetFeatures* preset) {
        const engine::CellSpec& cell = cells[i];
        const cohort::DesignMatrix dm =
            cohort::assemble(cohorts.at(cell.eyes), cell.combination, cell.task);
        const auto& plan = plans.at(PlanKey{cohort::task_number(cell.task), cell.eyes});
        engine::RunResult result =
            engine::run_nested_cv(dm, plan, cell, config.options, preset);
        const auto j = engine::manifest_to_json(result, config.echo);
        atomic_write_file(manifest_dir / (cell.id() + ".json"), j.dump(2) + "\n");
        results[i] = std::move(result);
    };

    // Phase 1: every non-RF cell.
    std::vector<std::size_t> phase1, phase2;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        (cells[i].model == ModelKind::RF ? phase2 : phase1).push_back(i);
    }
    run_pool(phase1.size(), config.jobs,
             [&](std::size_t j) { run_cell(phase1[j], nullptr); });

    // Phase 2: RF cells consume the per-fold unions of LR and both SVCs on
    // the same (task, combination, filter, eye mode).
    std::vector<engine::PresetFeatures> presets(phase2.size());
    run_pool(phase2.size(), config.jobs, [&](std::size_t j) {
        const std::size_t i = phase2[j];
        const engine::CellSpec& rf_cell = cells[i];
        std::vector<const engine::RunResult*> sources;
        for (std::size_t s : phase1) {
            const engine::CellSpec& other = cells[s];
            const bool union_model = other.model == ModelKind::LR ||
                                     other.model == ModelKind::SvcLinear ||
                                     other.model == ModelKind::SvcRbf;
            if (union_model && other.task == rf_cell.task && other.eyes == rf_cell.eyes &&
                other.combination.name == rf_cell.combination.name &&
                other.combination.modalities == rf_cell.combination.modalities) {
                sources.push_back(&*results[s]);
            }
        }
        const engine::PresetFeatures* preset = nullptr;
        if (config.options.selection && !sources.empty()) {
            auto& lists = presets[j];
            lists.resize(static_cast<std::size_t>(config.options.k));
            for (int f = 0; f < config.options.k; ++f) {
                std::vector<std::vector<std::string>> per_model;
                for (const auto* src : sources) {
                    per_model.push_back(
                        src->folds[static_cast<std::size_t>(f)].selected_features);
                }
                lists[static_cast<std::size_t>(f)] = selection::rf_feature_union(per_model);
            }
            preset = &lists;
        }
        run_cell(i, preset);
    });

    nlohmann::ordered_json index;
    index["schema"] = "retiomics.index/1";
    index["master_seed"] = config.options.master_seed;
    index["k"] = config.options.k;
    index["m"] = config.options.m;
    std::vector<std::string> manifest_paths;
    manifest_paths.reserve(cells.size());
    for (const auto& cell : cells) manifest_paths.push_back("manifests/" + cell.id() + ".json");
    std::sort(manifest_paths.begin(), manifest_paths.end());
    index["manifests"] = manifest_paths;
    index["config_echo"] = config.echo;
    atomic_write_file(config.out_dir / "index.json", index.dump(2) + "\n");
}

namespace {

engine::RunResult load_manifest(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open run manifest " + path.string());
    nlohmann::ordered_json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw DataError("malformed run manifest " + path.string() + ": " + e.what());
    }
    return engine::manifest_from_json(j);
}

}  // namespace

void cmd_compare(const std::vector<fs::path>& manifest_paths, const fs::path& out_dir) {
    if (manifest_paths.size() < 2) {
        throw UsageError("compare needs at least two run manifests");
    }
    std::vector<engine::RunResult> runs;
    runs.reserve(manifest_paths.size());
    for (const auto& p : manifest_paths) runs.push_back(load_manifest(p));

    fs::create_directories(out_dir);
    std::vector<std::string> warnings;
    bool wrote = false;

    std::set<ModelKind> model_set;
    std::map<ModelKind, std::set<std::string>> combos_per_model;
    for (const auto& r : runs) {
        model_set.insert(r.cell.model);
        combos_per_model[r.cell.model].insert(r.cell.combination.name);
    }
    if (model_set.size() >= 2) {
        atomic_write_file(out_dir / "compare_models.csv",
                          report::compare_models_csv(runs, warnings));
        wrote = true;
    }
    for (const auto& [kind, combos] : combos_per_model) {
        if (combos.size() >= 2) {
            atomic_write_file(out_dir / ("compare_combinations_" + models::to_string(kind) +
                                         ".csv"),
                              report::compare_combinations_csv(runs, kind, warnings));
            wrote = true;
        }
    }
    if (!wrote) {
        throw UsageError(
            "nothing to compare: need at least two models or two data combinations");
    }
    for (const auto& w : warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
}

void cmd_report(const fs::path& index_path, const fs::path& out_dir) {
    std::ifstream in(index_path, std::ios::binary);
    if (!in) throw DataError("cannot open index " + index_path.string());
    nlohmann::ordered_json index;
    try {
        in >> index;
    } catch (const std::exception& e) {
        throw DataError("malformed index " + index_path.string() + ": " + e.what());
    }
    if (index.at("schema").get<std::string>() != "retiomics.index/1") {
        throw DataError("unsupported index schema: " + index.at("schema").get<std::string>());
    }

    std::vector<std::string> warnings;
    std::vector<engine::RunResult> runs;
    const fs::path base = index_path.parent_path();
    for (const auto& entry : index.at("manifests")) {
        fs::path p = entry.get<std::string>();
        if (p.is_relative()) p = base / p;
        try {
            runs.push_back(load_manifest(p));
        } catch (const std::exception& e) {
            warnings.push_back(e.what());
        }
    }

    fs::create_directories(out_dir);
    std::set<int> tasks;
    for (const auto& r : runs) tasks.insert(cohort::task_number(r.cell.task));
    for (int task : tasks) {
        bool any_plain = false;
        for (const auto& r : runs) {
            if (cohort::task_number(r.cell.task) == task &&
                r.cell.combination.modalities.empty()) {
                any_plain = true;
                break;
            }
        }
        if (any_plain) {
            atomic_write_file(out_dir / ("table2_task" + std::to_string(task) + ".csv"),
                              report::table2_csv(runs, task, warnings));
        }
        const std::string ablation = report::ablation_csv(runs, task, warnings);
        if (!ablation.empty()) {
            atomic_write_file(out_dir / ("ablation_task" + std::to_string(task) + ".csv"),
                              ablation);
        }
    }
    for (const auto& r : runs) {
        atomic_write_file(out_dir / ("roc_" + r.cell.id() + ".csv"), report::roc_csv(r));
        atomic_write_file(out_dir / ("roc_" + r.cell.id() + ".svg"), report::roc_svg(r));
        if (!r.shap.empty()) {
            atomic_write_file(out_dir / ("shap_" + r.cell.id() + ".csv"), report::shap_csv(r));
        }
    }
    std::string warn_text;
    for (const auto& w : warnings) warn_text += w + "\n";
    atomic_write_file(out_dir / "warnings.txt", warn_text);
}

}  // namespace retiomics::cli
