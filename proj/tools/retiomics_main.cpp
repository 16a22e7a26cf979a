// retiomics — command-line driver.
//
// Subcommands: extract, synth, run, compare, report.
// Exit codes: 0 success, 1 usage/config error, 2 data error, 3 internal error.

#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "retiomics/cli.hpp"
#include "retiomics/common.hpp"
#include "retiomics/config.hpp"
#include "retiomics/radiomics.hpp"

namespace {

retiomics::radiomics::FeatureConfig features_from_file(const std::string& path) {
    retiomics::radiomics::FeatureConfig features;
    const retiomics::IniConfig ini = retiomics::IniConfig::parse_file(path);
    features.entropy = ini.get_bool("features", "entropy", false);
    features.uniformity = ini.get_bool("features", "uniformity", false);
    features.bin_width = ini.get_double("features", "bin_width", 25.0);
    if (!(features.bin_width > 0)) {
        throw retiomics::UsageError("features.bin_width must be positive");
    }
    return features;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"retiomics — first-order retinal radiomics and cardiovascular-risk experiments"};
    app.require_subcommand(1);

    // ---- extract ----------------------------------------------------------
    std::string extract_manifest;
    std::string extract_out = "features.csv";
    std::string extract_config;
    CLI::App* extract = app.add_subcommand(
        "extract", "Extract first-order radiomic features from a PGM image manifest");
    extract->add_option("manifest", extract_manifest, "Image manifest CSV")->required();
    extract->add_option("--out", extract_out, "Output features CSV")
        ->capture_default_str();
    extract->add_option("--config", extract_config,
                        "INI file with an optional [features] section");

    // ---- synth ------------------------------------------------------------
    std::string synth_config;
    std::uint64_t synth_seed = 20240101;
    std::string synth_out = "synth";
    CLI::App* synth = app.add_subcommand(
        "synth", "Generate a synthetic cohort (features.csv + clinical.csv)");
    synth->add_option("--config", synth_config, "Generator INI (defaults to built-in cohort)");
    synth->add_option("--seed", synth_seed, "Master seed")->capture_default_str();
    synth->add_option("--out", synth_out, "Output directory")->capture_default_str();

    // ---- run --------------------------------------------------------------
    std::string run_config;
    retiomics::cli::RunOverrides overrides;
    std::uint64_t run_seed = 0;
    int run_jobs = 0;
    int run_task = 0;
    std::string run_out, run_eyes, run_modalities, run_data, run_model;
    CLI::App* run = app.add_subcommand(
        "run", "Execute the experiment grid described by a config file");
    run->add_option("--config", run_config, "Experiment INI")->required();
    CLI::Option* opt_seed = run->add_option("--seed", run_seed, "Override the master seed");
    CLI::Option* opt_jobs = run->add_option("--jobs", run_jobs, "Concurrent experiment cells");
    CLI::Option* opt_out = run->add_option("--out", run_out, "Output directory");
    CLI::Option* opt_eyes =
        run->add_option("--eyes", run_eyes, "Eye modes: comma list of both|single");
    CLI::Option* opt_modalities =
        run->add_option("--modalities", run_modalities, "Restrict radiomic columns to modalities");
    CLI::Option* opt_task = run->add_option("--task", run_task, "Restrict to one task (1 or 2)");
    CLI::Option* opt_data = run->add_option("--data", run_data, "Comma list of data combinations");
    CLI::Option* opt_model = run->add_option("--model", run_model, "Comma list of models");

    // ---- compare ----------------------------------------------------------
    std::vector<std::string> compare_manifests;
    std::string compare_out = "compare";
    CLI::App* compare = app.add_subcommand(
        "compare", "Pairwise DeLong tests over run manifests");
    compare->add_option("manifests", compare_manifests, "Run-manifest JSON paths")->required();
    compare->add_option("--out", compare_out, "Output directory")->capture_default_str();

    // ---- report -----------------------------------------------------------
    std::string report_index;
    std::string report_out = "report";
    CLI::App* report = app.add_subcommand(
        "report", "Emit table/ROC/ablation/SHAP report files from an index");
    report->add_option("index", report_index, "index.json produced by `run`")->required();
    report->add_option("--out", report_out, "Output directory")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (*extract) {
            retiomics::radiomics::FeatureConfig features;
            if (!extract_config.empty()) {
                features = features_from_file(extract_config);
            }
            retiomics::cli::cmd_extract(extract_manifest, extract_out, features);
        } else if (*synth) {
            std::optional<std::filesystem::path> config_path;
            if (!synth_config.empty()) {
                config_path = synth_config;
            }
            retiomics::cli::cmd_synth(config_path, synth_seed, synth_out);
        } else if (*run) {
            if (*opt_seed) overrides.seed = run_seed;
            if (*opt_jobs) overrides.jobs = run_jobs;
            if (*opt_out) overrides.out = run_out;
            if (*opt_eyes) overrides.eyes = run_eyes;
            if (*opt_modalities) overrides.modalities = run_modalities;
            if (*opt_task) overrides.task = run_task;
            if (*opt_data) overrides.data = run_data;
            if (*opt_model) overrides.model = run_model;
            const retiomics::cli::ExperimentConfig config =
                retiomics::cli::load_experiment(run_config, overrides);
            retiomics::cli::cmd_run(config);
        } else if (*compare) {
            std::vector<std::filesystem::path> paths(compare_manifests.begin(),
                                                     compare_manifests.end());
            retiomics::cli::cmd_compare(paths, compare_out);
        } else if (*report) {
            retiomics::cli::cmd_report(report_index, report_out);
        }
    } catch (const retiomics::UsageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const retiomics::DataError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 3;
    }
    return 0;
}
