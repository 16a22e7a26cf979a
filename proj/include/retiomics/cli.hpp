#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "retiomics/cohort.hpp"
#include "retiomics/config.hpp"
#include "retiomics/nested_cv.hpp"
#include "retiomics/radiomics.hpp"

namespace retiomics::cli {

/// The full experiment grid of one `run` invocation.
struct ExperimentConfig {
    std::vector<cohort::Task> tasks;
    std::vector<std::string> combinations;         // canonical names
    std::vector<models::ModelKind> model_kinds;
    std::vector<std::string> eye_modes;            // subset of {"both", "single"}
    std::vector<std::string> modalities;           // global radiomic filter (empty = all)
    std::vector<std::string> ablation_modalities;  // adds one filtered cell set per entry
    engine::EngineOptions options;
    radiomics::FeatureConfig features;  // provenance echo; extraction-time setting
    std::filesystem::path features_csv;
    std::filesystem::path clinical_csv;
    std::filesystem::path out_dir = "runs";
    int jobs = 1;
    std::string echo;  // canonical INI dump embedded into every manifest

    void validate() const;
};

/// Command-line overrides layered on top of the config file.
struct RunOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<int> jobs;
    std::optional<std::string> out;
    std::optional<std::string> eyes;
    std::optional<std::string> modalities;
    std::optional<int> task;
    std::optional<std::string> data;   // combination list
    std::optional<std::string> model;  // model list
};

ExperimentConfig experiment_from_ini(const IniConfig& ini);

/// Parse the config file, apply overrides, resolve [data] paths relative to
/// the config file's directory, and validate.
ExperimentConfig load_experiment(const std::filesystem::path& config_path,
                                 const RunOverrides& overrides);

/// Extract first-order radiomics for every image listed in the manifest CSV
/// (patient_id,eye,modality,path[,spacing_x,spacing_y]); one output row per
/// (patient, eye).
void cmd_extract(const std::filesystem::path& manifest_csv, const std::filesystem::path& out_csv,
                 const radiomics::FeatureConfig& features);

/// Generate a synthetic cohort; writes features.csv, clinical.csv, and the
/// fully echoed generator configuration.
void cmd_synth(const std::optional<std::filesystem::path>& config_path, std::uint64_t seed,
               const std::filesystem::path& out_dir);

/// Execute every experiment cell; one run-manifest JSON per cell plus
/// index.json. Non-RF cells run first so RF cells can consume their per-fold
/// feature unions.
void cmd_run(const ExperimentConfig& config);

/// Pairwise DeLong matrices over the given run manifests.
void cmd_compare(const std::vector<std::filesystem::path>& manifests,
                 const std::filesystem::path& out_dir);

/// Emit the report files for an index of run manifests.
void cmd_report(const std::filesystem::path& index_path, const std::filesystem::path& out_dir);

}  // namespace retiomics::cli
