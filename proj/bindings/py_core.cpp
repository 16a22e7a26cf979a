// pybind11 bindings for the retiomics core: image decoding, first-order
// radiomics, AUC/ROC/DeLong metrics, model training/scoring, Shapley
// attribution, and the CLI-level pipeline commands.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "retiomics/attribution.hpp"
#include "retiomics/cli.hpp"
#include "retiomics/common.hpp"
#include "retiomics/evaluation.hpp"
#include "retiomics/imaging.hpp"
#include "retiomics/models.hpp"
#include "retiomics/radiomics.hpp"

namespace py = pybind11;
using namespace retiomics;

namespace {

Matrix to_matrix(const std::vector<std::vector<double>>& rows) {
    Matrix m(rows.size(), rows.empty() ? 0 : rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != m.cols) {
            throw UsageError("all matrix rows must have the same length");
        }
        for (std::size_t c = 0; c < m.cols; ++c) m(r, c) = rows[r][c];
    }
    return m;
}

radiomics::FeatureConfig make_feature_config(bool entropy, bool uniformity, double bin_width) {
    radiomics::FeatureConfig config;
    config.entropy = entropy;
    config.uniformity = uniformity;
    config.bin_width = bin_width;
    if (!(config.bin_width > 0)) throw UsageError("bin_width must be positive");
    return config;
}

py::dict features_to_dict(const radiomics::FirstOrderFeatures& f) {
    py::dict out;
    for (const auto& [name, value] : f.to_pairs()) out[py::str(name)] = value;
    return out;
}

models::TrainedModel model_from_string(const std::string& model_json) {
    return models::model_from_json(nlohmann::ordered_json::parse(model_json));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "First-order retinal radiomics and cardiovascular-risk experiment engine";
    m.attr("__version__") = "1.0.0";

    py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);
    py::register_exception<DataError>(m, "DataError", PyExc_ValueError);

    // ---- imaging / radiomics ---------------------------------------------
    m.def(
        "load_pgm",
        [](const std::string& path) {
            const imaging::GrayImage img = imaging::load_pgm(path);
            py::dict out;
            out["width"] = img.width;
            out["height"] = img.height;
            out["max_value"] = img.max_value;
            out["spacing_x"] = img.spacing_x;
            out["spacing_y"] = img.spacing_y;
            out["pixels"] = std::vector<int>(img.pixels.begin(), img.pixels.end());
            return out;
        },
        py::arg("path"), "Decode a P2/P5 PGM file into a dict of header fields and pixels.");

    m.def(
        "percentile",
        [](std::vector<double> sample, double p) { return radiomics::percentile(sample, p); },
        py::arg("sample"), py::arg("p"),
        "Linear-interpolation percentile (h = (N-1)p/100) of an unsorted sample.");

    m.def(
        "first_order_features",
        [](std::vector<double> sample, double spacing_x, double spacing_y, bool entropy,
           bool uniformity, double bin_width) {
            const auto config = make_feature_config(entropy, uniformity, bin_width);
            return features_to_dict(
                radiomics::extract_first_order(sample, spacing_x, spacing_y, config));
        },
        py::arg("sample"), py::arg("spacing_x") = 1.0, py::arg("spacing_y") = 1.0,
        py::arg("entropy") = false, py::arg("uniformity") = false, py::arg("bin_width") = 25.0,
        "All first-order features of an intensity sample as an ordered dict.");

    m.def(
        "extract_image_features",
        [](const std::string& path, bool entropy, bool uniformity, double bin_width) {
            const auto config = make_feature_config(entropy, uniformity, bin_width);
            const imaging::GrayImage img = imaging::load_pgm(path);
            const auto sample = imaging::sample_intensities(img, imaging::full_mask(img));
            return features_to_dict(
                radiomics::extract_first_order(sample, img.spacing_x, img.spacing_y, config));
        },
        py::arg("path"), py::arg("entropy") = false, py::arg("uniformity") = false,
        py::arg("bin_width") = 25.0, "First-order features of one PGM image (full-image ROI).");

    m.def(
        "feature_names",
        [](bool entropy, bool uniformity) {
            return radiomics::feature_names(make_feature_config(entropy, uniformity, 25.0));
        },
        py::arg("entropy") = false, py::arg("uniformity") = false);

    // ---- evaluation --------------------------------------------------------
    m.def(
        "auc",
        [](std::vector<double> scores, std::vector<int> labels) {
            return evaluation::auc(scores, labels);
        },
        py::arg("scores"), py::arg("labels"),
        "Area under the ROC curve (ties counted 1/2) for 0/1 labels.");

    m.def(
        "roc_curve",
        [](std::vector<double> scores, std::vector<int> labels) {
            const evaluation::RocCurve curve = evaluation::roc_curve(scores, labels);
            py::dict out;
            out["fpr"] = curve.fpr;
            out["tpr"] = curve.tpr;
            out["thresholds"] = curve.threshold;
            out["area"] = curve.area();
            return out;
        },
        py::arg("scores"), py::arg("labels"));

    m.def(
        "delong_test",
        [](std::vector<double> scores_a, std::vector<double> scores_b, std::vector<int> labels) {
            const evaluation::DeLongResult r = evaluation::delong_paired(scores_a, scores_b, labels);
            py::dict out;
            out["auc_a"] = r.auc_a;
            out["auc_b"] = r.auc_b;
            out["var_diff"] = r.var_diff;
            out["z"] = r.z;
            out["p"] = r.p;
            return out;
        },
        py::arg("scores_a"), py::arg("scores_b"), py::arg("labels"),
        "Paired DeLong test of two score vectors over the same eyes.");

    m.def(
        "grouped_folds",
        [](std::vector<std::string> patients, int k, int m_inner, std::uint64_t seed,
           bool stratified, std::map<std::string, int> labels) {
            const evaluation::FoldPlan plan =
                evaluation::grouped_kfold(patients, k, m_inner, seed, stratified, labels);
            py::dict out;
            out["outer"] = plan.outer;
            out["inner"] = plan.inner;
            return out;
        },
        py::arg("patients"), py::arg("k"), py::arg("m"), py::arg("seed"),
        py::arg("stratified") = false, py::arg("labels") = std::map<std::string, int>{},
        "Patient-grouped nested k x m fold assignment.");

    // ---- models ------------------------------------------------------------
    m.def(
        "train_model",
        [](const std::string& kind, const std::vector<std::vector<double>>& X,
           std::vector<int> y, const std::string& hyperparameters_json) {
            // Partial hyperparameter dicts overlay the kind's defaults.
            models::ModelSpec defaults;
            defaults.kind = models::parse_model_kind(kind);
            nlohmann::ordered_json spec_json = models::spec_to_json(defaults);
            if (!hyperparameters_json.empty()) {
                spec_json["hyperparameters"].update(
                    nlohmann::ordered_json::parse(hyperparameters_json));
            }
            models::ModelSpec spec = models::spec_from_json(spec_json);
            const models::TrainedModel model = models::train(to_matrix(X), y, spec);
            return models::model_to_json(model).dump();
        },
        py::arg("kind"), py::arg("X"), py::arg("y"), py::arg("hyperparameters") = std::string{},
        "Train LR | LDA | SVC-linear | SVC-rbf | RF; returns the model as JSON.");

    m.def(
        "score_model",
        [](const std::string& model_json, const std::vector<std::vector<double>>& X) {
            return model_from_string(model_json).score(to_matrix(X));
        },
        py::arg("model"), py::arg("X"), "Decision scores of a JSON-serialized model.");

    // ---- attribution -------------------------------------------------------
    m.def(
        "shap_values",
        [](const std::string& model_json, std::vector<double> row,
           const std::vector<std::vector<double>>& background, bool exact, std::uint64_t seed,
           std::size_t permutations) {
            const models::TrainedModel model = model_from_string(model_json);
            const attribution::Attribution a =
                attribution::shap_explain(model, row, to_matrix(background), exact, seed,
                                          permutations);
            py::dict out;
            out["values"] = a.values;
            out["base"] = a.base;
            out["mode"] = a.mode;
            return out;
        },
        py::arg("model"), py::arg("row"), py::arg("background"), py::arg("exact") = true,
        py::arg("seed") = 0, py::arg("permutations") = 2000,
        "Shapley attribution of one row against a background set.");

    // ---- pipeline commands --------------------------------------------------
    m.def(
        "extract",
        [](const std::string& manifest_csv, const std::string& out_csv, bool entropy,
           bool uniformity, double bin_width) {
            cli::cmd_extract(manifest_csv, out_csv,
                             make_feature_config(entropy, uniformity, bin_width));
        },
        py::arg("manifest"), py::arg("out"), py::arg("entropy") = false,
        py::arg("uniformity") = false, py::arg("bin_width") = 25.0,
        "Extract per-eye radiomic features for every image in a manifest CSV.");

    m.def(
        "synth",
        [](const std::string& out_dir, std::uint64_t seed,
           const std::optional<std::string>& config) {
            std::optional<std::filesystem::path> config_path;
            if (config) config_path = *config;
            cli::cmd_synth(config_path, seed, out_dir);
        },
        py::arg("out"), py::arg("seed") = static_cast<std::uint64_t>(20240101),
        py::arg("config") = std::nullopt,
        "Generate a synthetic cohort (features.csv, clinical.csv, synth_config.ini).");

    m.def(
        "run",
        [](const std::string& config_path, const std::optional<std::uint64_t>& seed,
           const std::optional<int>& jobs, const std::optional<std::string>& out,
           const std::optional<std::string>& eyes, const std::optional<std::string>& modalities,
           const std::optional<int>& task, const std::optional<std::string>& data,
           const std::optional<std::string>& model) {
            cli::RunOverrides overrides;
            overrides.seed = seed;
            overrides.jobs = jobs;
            overrides.out = out;
            overrides.eyes = eyes;
            overrides.modalities = modalities;
            overrides.task = task;
            overrides.data = data;
            overrides.model = model;
            cli::cmd_run(cli::load_experiment(config_path, overrides));
        },
        py::arg("config"), py::arg("seed") = std::nullopt, py::arg("jobs") = std::nullopt,
        py::arg("out") = std::nullopt, py::arg("eyes") = std::nullopt,
        py::arg("modalities") = std::nullopt, py::arg("task") = std::nullopt,
        py::arg("data") = std::nullopt, py::arg("model") = std::nullopt,
        "Execute an experiment config; writes one run manifest per cell plus index.json.");

    m.def(
        "compare",
        [](const std::vector<std::string>& manifests, const std::string& out_dir) {
            std::vector<std::filesystem::path> paths(manifests.begin(), manifests.end());
            cli::cmd_compare(paths, out_dir);
        },
        py::arg("manifests"), py::arg("out"),
        "Pairwise DeLong matrices over a set of run manifests.");

    m.def(
        "report",
        [](const std::string& index_path, const std::string& out_dir) {
            cli::cmd_report(index_path, out_dir);
        },
        py::arg("index"), py::arg("out"),
        "Emit table / ROC / ablation / SHAP report files from an index.json.");
}
