#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "doctest.h"

#include "retiomics/cli.hpp"
#include "retiomics/csv.hpp"
#include "retiomics/imaging.hpp"
#include "retiomics/nested_cv.hpp"
#include "retiomics/radiomics.hpp"

using namespace retiomics;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("retiomics_test_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE_MESSAGE(in.good(), "missing file: ", path.string());
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

nlohmann::ordered_json read_json(const fs::path& path) {
    return nlohmann::ordered_json::parse(slurp(path));
}

/// 22-patient synthetic cohort written under dir/cohort.
fs::path small_cohort(const fs::path& dir) {
    const fs::path ini_path = dir / "synth.ini";
    atomic_write_file(ini_path,
                      "[cohort]\npatients = 6, 8, 8\nbilateral = 3, 4, 4\n");
    cli::cmd_synth(ini_path, 11, dir / "cohort");
    return dir / "cohort";
}

fs::path write_experiment(const fs::path& dir, const std::string& body) {
    const fs::path path = dir / "experiment.ini";
    atomic_write_file(path, body);
    return path;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("experiment config: defaults, overrides, and validation") {
    const fs::path dir = temp_dir("config");
    atomic_write_file(dir / "f.csv", "patient_id,eye,OCT_mean\nP1,OD,1\n");
    atomic_write_file(dir / "c.csv", "patient_id,eye,risk_label\nP1,OD,High\n");
    const fs::path config =
        write_experiment(dir, "[data]\nfeatures = f.csv\nclinical = c.csv\n");

    const cli::ExperimentConfig defaults = cli::load_experiment(config, {});
    CHECK(defaults.tasks.size() == 2);
    CHECK(defaults.combinations == cohort::DataCombination::all_names());
    CHECK(defaults.model_kinds ==
          std::vector<models::ModelKind>{models::ModelKind::LR, models::ModelKind::SvcLinear,
                                         models::ModelKind::SvcRbf, models::ModelKind::RF});
    CHECK(defaults.eye_modes == std::vector<std::string>{"both", "single"});
    CHECK(defaults.options.k == 5);
    CHECK(defaults.options.m == 4);
    CHECK(defaults.options.selection);
    CHECK(defaults.options.epsilon == 0.001);
    CHECK(defaults.options.shap.enabled);
    CHECK(defaults.features_csv == dir / "f.csv");  // resolved against the config dir
    CHECK_FALSE(defaults.echo.empty());

    cli::RunOverrides overrides;
    overrides.seed = 99;
    overrides.task = 2;
    overrides.data = "R+D,ALL";
    overrides.model = "LR";
    overrides.eyes = "both";
    overrides.jobs = 3;
    overrides.out = (dir / "elsewhere").string();
    const cli::ExperimentConfig tuned = cli::load_experiment(config, overrides);
    CHECK(tuned.options.master_seed == 99);
    CHECK(tuned.tasks == std::vector<cohort::Task>{cohort::Task::Task2});
    CHECK(tuned.combinations == std::vector<std::string>{"R+D", "ALL"});
    CHECK(tuned.model_kinds == std::vector<models::ModelKind>{models::ModelKind::LR});
    CHECK(tuned.eye_modes == std::vector<std::string>{"both"});
    CHECK(tuned.jobs == 3);
    CHECK(tuned.out_dir == dir / "elsewhere");
    // scheduling and destination never enter the provenance echo
    CHECK(tuned.echo.find("jobs") == std::string::npos);
    CHECK(tuned.echo.find("elsewhere") == std::string::npos);
    CHECK(tuned.echo.find("seed = 99") != std::string::npos);

    SUBCASE("bad values are usage errors") {
        cli::RunOverrides bad;
        bad.task = 3;
        CHECK_THROWS_AS(cli::load_experiment(config, bad), UsageError);
        bad = {};
        bad.eyes = "left";
        CHECK_THROWS_AS(cli::load_experiment(config, bad), UsageError);
        bad = {};
        bad.data = "R+B";
        CHECK_THROWS_AS(cli::load_experiment(config, bad), UsageError);
        bad = {};
        bad.model = "MLP";
        CHECK_THROWS_AS(cli::load_experiment(config, bad), UsageError);

        const fs::path k1 = write_experiment(
            dir, "[experiment]\nk = 1\n[data]\nfeatures = f.csv\nclinical = c.csv\n");
        CHECK_THROWS_AS(cli::load_experiment(k1, {}), UsageError);
        const fs::path both = write_experiment(
            dir,
            "[experiment]\nmodalities = OCT\nablation_modalities = FR\n"
            "[data]\nfeatures = f.csv\nclinical = c.csv\n");
        CHECK_THROWS_AS(cli::load_experiment(both, {}), UsageError);
        const fs::path nodata = write_experiment(dir, "[experiment]\nk = 5\n");
        CHECK_THROWS_AS(cli::load_experiment(nodata, {}), UsageError);
    }
    fs::remove_all(dir);
}

TEST_CASE("cmd_synth writes the cohort artifacts with a provenance seed") {
    const fs::path dir = temp_dir("synth");
    cli::cmd_synth(std::nullopt, 42, dir / "out");
    CHECK(fs::exists(dir / "out" / "features.csv"));
    CHECK(fs::exists(dir / "out" / "clinical.csv"));
    const std::string echo = slurp(dir / "out" / "synth_config.ini");
    CHECK(echo.find("[provenance]") != std::string::npos);
    CHECK(echo.find("seed = 42") != std::string::npos);

    const cohort::Cohort cohort =
        cohort::load_cohort(dir / "out" / "features.csv", dir / "out" / "clinical.csv");
    CHECK(cohort.records.size() == 597);
    fs::remove_all(dir);
}

TEST_CASE("cmd_extract: one row per eye, manifest-relative paths, spacing override") {
    const fs::path dir = temp_dir("extract");
    fs::create_directories(dir / "images");
    imaging::GrayImage img;
    img.width = 2;
    img.height = 2;
    img.max_value = 255;
    img.pixels = {1, 2, 3, 4};
    imaging::save_pgm(img, dir / "images" / "oct.pgm", true);
    img.pixels = {10, 20, 30, 40};
    imaging::save_pgm(img, dir / "images" / "fr.pgm", false);

    atomic_write_file(dir / "manifest.csv",
                      "patient_id,eye,modality,path,spacing_x,spacing_y\n"
                      "P1,OD,OCT,images/oct.pgm,2.0,2.0\n"
                      "P1,OD,FR,images/fr.pgm,,\n");
    cli::cmd_extract(dir / "manifest.csv", dir / "features.csv", {});

    const CsvTable t = read_csv(dir / "features.csv");
    REQUIRE(t.rows.size() == 1);
    CHECK(t.header.size() == 2 + 2 * 16);
    CHECK(t.header[0] == "patient_id");
    CHECK(t.header[1] == "eye");
    CHECK(t.header[2] == "FR_energy");  // byte-lexicographic radiomic block
    const int energy = t.column("OCT_energy");
    const int total = t.column("OCT_total_energy");
    REQUIRE(energy >= 0);
    REQUIRE(total >= 0);
    // spacing 2x2 multiplies total_energy by 4
    CHECK(std::stod(t.rows[0][static_cast<std::size_t>(total)]) ==
          doctest::Approx(4.0 * std::stod(t.rows[0][static_cast<std::size_t>(energy)])));

    SUBCASE("per-row failures are accumulated into one error") {
        atomic_write_file(dir / "bad.csv",
                          "patient_id,eye,modality,path\n"
                          "P1,OD,OCT,images/oct.pgm\n"
                          "P1,OD,XYZ,images/oct.pgm\n"
                          "P2,OS,FR,images/missing.pgm\n");
        try {
            cli::cmd_extract(dir / "bad.csv", dir / "f2.csv", {});
            FAIL("expected DataError");
        } catch (const DataError& e) {
            const std::string msg = e.what();
            CHECK(msg.find("row 3") != std::string::npos);
            CHECK(msg.find("row 4") != std::string::npos);
            CHECK(msg.find("2 input(s)") != std::string::npos);
        }
        CHECK_FALSE(fs::exists(dir / "f2.csv"));
    }
    SUBCASE("an empty manifest is an error") {
        atomic_write_file(dir / "empty.csv", "patient_id,eye,modality,path\n");
        CHECK_THROWS_AS(cli::cmd_extract(dir / "empty.csv", dir / "f3.csv", {}), DataError);
    }
    fs::remove_all(dir);
}

TEST_CASE("cmd_run writes one manifest per cell plus a sorted index, deterministically") {
    const fs::path dir = temp_dir("run");
    const fs::path cohort_dir = small_cohort(dir);
    const fs::path config = write_experiment(
        dir,
        "[experiment]\n"
        "task = 1\ncombinations = R+D\nmodels = LR\neyes = both\n"
        "k = 3\nm = 2\nseed = 5\nselection = false\nstratified = true\n"
        "[shap]\nenabled = false\n"
        "[data]\nfeatures = cohort/features.csv\nclinical = cohort/clinical.csv\n");

    cli::RunOverrides o1;
    o1.out = (dir / "out1").string();
    cli::cmd_run(cli::load_experiment(config, o1));

    const fs::path manifest_path = dir / "out1" / "manifests" / "task1_R+D_LR_both.json";
    REQUIRE(fs::exists(manifest_path));
    const auto index = read_json(dir / "out1" / "index.json");
    CHECK(index.at("schema") == "retiomics.index/1");
    CHECK(index.at("manifests") ==
          nlohmann::ordered_json::array({"manifests/task1_R+D_LR_both.json"}));

    const auto j = read_json(manifest_path);
    CHECK(j.at("schema") == "retiomics.run/1");
    const engine::RunResult run = engine::manifest_from_json(j);
    CHECK(run.k == 3);
    CHECK(run.folds.size() == 3);
    CHECK(run.cell.id() == "task1_R+D_LR_both");
    CHECK(run.n_rows == 33);  // 22 patients, 11 bilateral
    CHECK(run.pooled.size() == run.n_rows);
    CHECK(run.shap_mode == "off");
    for (const auto& fold : run.folds) {
        CHECK(fold.selection_source == "all_features");
        CHECK(fold.auc >= 0.0);
        CHECK(fold.auc <= 1.0);
    }

    // byte-identical across output directories and worker counts
    cli::RunOverrides o2;
    o2.out = (dir / "out2").string();
    o2.jobs = 4;
    cli::cmd_run(cli::load_experiment(config, o2));
    CHECK(slurp(dir / "out2" / "manifests" / "task1_R+D_LR_both.json") == slurp(manifest_path));
    CHECK(slurp(dir / "out2" / "index.json") == slurp(dir / "out1" / "index.json"));
    fs::remove_all(dir);
}

TEST_CASE("RF cells consume the union of the phase-1 selections") {
    const fs::path dir = temp_dir("rf_union");
    const fs::path cohort_dir = small_cohort(dir);
    const fs::path config = write_experiment(
        dir,
        "[experiment]\n"
        "task = 1\ncombinations = R\nmodels = LR, RF\neyes = both\n"
        "k = 3\nm = 2\nseed = 7\nselection = true\nstratified = true\n"
        "modalities = OCT\n"
        "[shap]\nenabled = false\n"
        "[data]\nfeatures = cohort/features.csv\nclinical = cohort/clinical.csv\n"
        "out = runs\n");
    cli::cmd_run(cli::load_experiment(config, {}));

    const engine::RunResult lr = engine::manifest_from_json(
        read_json(dir / "runs" / "manifests" / "task1_R_LR_both_mod-OCT.json"));
    const engine::RunResult rf = engine::manifest_from_json(
        read_json(dir / "runs" / "manifests" / "task1_R_RF_both_mod-OCT.json"));
    REQUIRE(lr.folds.size() == 3);
    REQUIRE(rf.folds.size() == 3);
    for (std::size_t f = 0; f < 3; ++f) {
        CHECK(rf.folds[f].selection_source == "rf_union");
        // union over {LR} alone is LR's selection, sorted
        std::vector<std::string> expect = lr.folds[f].selected_features;
        std::sort(expect.begin(), expect.end());
        CHECK(rf.folds[f].selected_features == expect);
        CHECK_FALSE(lr.folds[f].selected_features.empty());
        CHECK(lr.folds[f].selected_features.size() <= 16);  // OCT filter caps the pool
    }
    fs::remove_all(dir);
}

TEST_CASE("cmd_report renders tables, curves, and shap rankings from an index") {
    const fs::path dir = temp_dir("report");
    const fs::path cohort_dir = small_cohort(dir);
    const fs::path config = write_experiment(
        dir,
        "[experiment]\n"
        "task = 1\ncombinations = R+D, R\nmodels = LR\neyes = both\n"
        "k = 3\nm = 2\nseed = 5\nselection = false\nstratified = true\n"
        "modalities = OCT\n"
        "[shap]\nenabled = true\nmax_rows = 1\n"
        "[data]\nfeatures = cohort/features.csv\nclinical = cohort/clinical.csv\nout = runs\n");
    cli::cmd_run(cli::load_experiment(config, {}));
    cli::cmd_report(dir / "runs" / "index.json", dir / "report");

    CHECK(fs::exists(dir / "report" / "warnings.txt"));
    // the whole grid is modality-filtered, so the main table is replaced by
    // the ablation matrix
    CHECK(fs::exists(dir / "report" / "ablation_task1.csv"));
    CHECK(fs::exists(dir / "report" / "roc_task1_R+D_LR_both_mod-OCT.csv"));
    CHECK(fs::exists(dir / "report" / "roc_task1_R+D_LR_both_mod-OCT.svg"));
    CHECK(fs::exists(dir / "report" / "shap_task1_R+D_LR_both_mod-OCT.csv"));

    const std::string roc = slurp(dir / "report" / "roc_task1_R+D_LR_both_mod-OCT.csv");
    CHECK(roc.rfind("fold,fpr,tpr,threshold\n", 0) == 0);
    CHECK(roc.find("\nmean,") != std::string::npos);
    const std::string svg = slurp(dir / "report" / "roc_task1_R+D_LR_both_mod-OCT.svg");
    CHECK(svg.rfind("<svg", 0) == 0);
    const std::string shap = slurp(dir / "report" / "shap_task1_R+D_LR_both_mod-OCT.csv");
    CHECK(shap.rfind("feature,mean_abs_shap\n", 0) == 0);
    CHECK(shap.size() > std::string("feature,mean_abs_shap\n").size());

    CHECK_THROWS_AS(cli::cmd_report(dir / "nope" / "index.json", dir / "r2"), DataError);
    fs::remove_all(dir);
}

TEST_CASE("cmd_compare emits pairwise DeLong matrices") {
    const fs::path dir = temp_dir("compare");
    const fs::path cohort_dir = small_cohort(dir);
    const fs::path config = write_experiment(
        dir,
        "[experiment]\n"
        "task = 1\ncombinations = R+D\nmodels = LR, SVC-linear\neyes = both\n"
        "k = 3\nm = 2\nseed = 5\nselection = false\nstratified = true\n"
        "[shap]\nenabled = false\n"
        "[data]\nfeatures = cohort/features.csv\nclinical = cohort/clinical.csv\nout = runs\n");
    cli::cmd_run(cli::load_experiment(config, {}));

    const std::vector<fs::path> manifests = {
        dir / "runs" / "manifests" / "task1_R+D_LR_both.json",
        dir / "runs" / "manifests" / "task1_R+D_SVC-linear_both.json"};
    cli::cmd_compare(manifests, dir / "cmp");
    const std::string models_csv = slurp(dir / "cmp" / "compare_models.csv");
    CHECK(models_csv.find("LR-SVClinear") != std::string::npos);
    CHECK(models_csv.find("R+D") != std::string::npos);

    CHECK_THROWS_AS(cli::cmd_compare({manifests[0]}, dir / "cmp2"), UsageError);
    fs::remove_all(dir);
}

}  // TEST_SUITE
