#include "retiomics/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <tuple>

#include "retiomics/csv.hpp"

namespace retiomics::report {

using engine::RunResult;
using models::ModelKind;

namespace {

const std::vector<ModelKind> kModelOrder = {ModelKind::LR, ModelKind::LDA, ModelKind::SvcLinear,
                                            ModelKind::SvcRbf, ModelKind::RF};

std::string fmt(const char* pattern, double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), pattern, v);
    return buf;
}

std::string mean_sd_label(double mean, double sd) {
    return fmt("%.2f", mean) + " ± " + fmt("%.2f", sd);
}

std::string p_label(double p) {
    std::string out = fmt("%.3f", p);
    if (p < 0.05) out += "*";
    return out;
}

/// Paper-style pair label: model names with inner hyphens stripped.
std::string pair_label(ModelKind a, ModelKind b) {
    auto strip = [](const std::string& s) {
        std::string out;
        for (char c : s) {
            if (c != '-') out += c;
        }
        return out;
    };
    return strip(models::to_string(a)) + "-" + strip(models::to_string(b));
}

/// Data-combination label; modality-filtered runs get a "[...]" suffix.
std::string data_label(const RunResult& run) {
    std::string out = run.cell.combination.name;
    if (!run.cell.combination.modalities.empty()) {
        out += " [";
        for (std::size_t i = 0; i < run.cell.combination.modalities.size(); ++i) {
            if (i > 0) out += "+";
            out += run.cell.combination.modalities[i];
        }
        out += "]";
    }
    return out;
}

int combination_rank(const std::string& name) {
    const auto& names = cohort::DataCombination::all_names();
    auto it = std::find(names.begin(), names.end(), name);
    return it == names.end() ? static_cast<int>(names.size())
                             : static_cast<int>(it - names.begin());
}

void check_same_task_eyes(const std::vector<RunResult>& runs) {
    for (std::size_t i = 1; i < runs.size(); ++i) {
        if (runs[i].cell.task != runs[0].cell.task || runs[i].cell.eyes != runs[0].cell.eyes) {
            throw DataError("compared runs must share the task and eye mode; '" +
                            runs[i].cell.id() + "' differs from '" + runs[0].cell.id() + "'");
        }
    }
}

std::map<std::pair<std::string, std::string>, std::pair<int, double>> score_map(
    const RunResult& run) {
    std::map<std::pair<std::string, std::string>, std::pair<int, double>> out;
    for (const auto& p : run.pooled) {
        out[{p.patient, p.eye}] = {p.label, p.score};
    }
    return out;
}

std::vector<evaluation::RocCurve> fold_curves(const RunResult& run) {
    std::vector<evaluation::RocCurve> curves;
    for (int f = 0; f < run.k; ++f) {
        std::vector<double> scores;
        std::vector<int> labels;
        for (const auto& p : run.pooled) {
            if (p.fold == f) {
                scores.push_back(p.score);
                labels.push_back(p.label);
            }
        }
        if (scores.empty()) continue;
        curves.push_back(evaluation::roc_curve(scores, labels));
    }
    return curves;
}

}  // namespace

std::string table2_csv(const std::vector<RunResult>& runs, int task,
                       std::vector<std::string>& warnings) {
    std::vector<const RunResult*> cells;
    for (const auto& r : runs) {
        if (cohort::task_number(r.cell.task) == task && r.cell.combination.modalities.empty()) {
            cells.push_back(&r);
        }
    }

    std::set<std::string> modes_present;
    std::set<ModelKind> models_present;
    std::set<std::string> combos_present;
    std::map<std::tuple<std::string, ModelKind, std::string>, const RunResult*> lookup;
    for (const auto* r : cells) {
        modes_present.insert(r->cell.eyes);
        models_present.insert(r->cell.model);
        combos_present.insert(r->cell.combination.name);
        auto key = std::make_tuple(r->cell.combination.name, r->cell.model, r->cell.eyes);
        if (!lookup.emplace(key, r).second) {
            warnings.push_back("duplicate manifest for cell " + r->cell.id() +
                               "; keeping the first");
        }
    }

    std::vector<std::pair<ModelKind, std::string>> columns;
    for (ModelKind kind : kModelOrder) {
        if (!models_present.count(kind)) continue;
        if (modes_present.count("single")) columns.push_back({kind, "single"});
        if (modes_present.count("both")) columns.push_back({kind, "both"});
    }

    std::string out;
    std::vector<std::string> header = {"task", "data"};
    for (const auto& [kind, mode] : columns) {
        header.push_back(models::to_string(kind) + (mode == "single" ? " 1 Eye" : " 2 Eyes"));
    }
    out += csv_line(header);
    for (const auto& name : cohort::DataCombination::all_names()) {
        if (!combos_present.count(name)) continue;
        std::vector<std::string> row = {std::to_string(task), name};
        for (const auto& [kind, mode] : columns) {
            auto it = lookup.find(std::make_tuple(name, kind, mode));
            if (it == lookup.end()) {
                row.push_back("");
                warnings.push_back("missing manifest: task " + std::to_string(task) + ", " +
                                   name + ", " + models::to_string(kind) + ", " +
                                   (mode == "single" ? "1 eye" : "2 eyes"));
            } else {
                row.push_back(mean_sd_label(it->second->mean_auc, it->second->sd_auc));
            }
        }
        out += csv_line(row);
    }
    return out;
}

std::string roc_csv(const RunResult& run) {
    std::string out = csv_line({"fold", "fpr", "tpr", "threshold"});
    const auto curves = fold_curves(run);
    for (std::size_t c = 0; c < curves.size(); ++c) {
        for (std::size_t i = 0; i < curves[c].fpr.size(); ++i) {
            out += csv_line({std::to_string(c), format_double(curves[c].fpr[i]),
                             format_double(curves[c].tpr[i]),
                             format_double(curves[c].threshold[i])});
        }
    }
    if (!curves.empty()) {
        const auto mean = evaluation::mean_roc(curves);
        for (std::size_t i = 0; i < mean.fpr.size(); ++i) {
            out += csv_line(
                {"mean", format_double(mean.fpr[i]), format_double(mean.tpr[i]), ""});
        }
    }
    return out;
}

std::string roc_svg(const RunResult& run) {
    // Plot geometry: 480x480 axis box with a 80/40 px margin.
    const double x0 = 80.0, y0 = 520.0, size = 480.0;
    auto px = [&](double fpr) { return fmt("%.2f", x0 + fpr * size); };
    auto py = [&](double tpr) { return fmt("%.2f", y0 - tpr * size); };
    auto polyline = [&](const evaluation::RocCurve& c, const char* stroke, const char* width) {
        std::string pts;
        for (std::size_t i = 0; i < c.fpr.size(); ++i) {
            if (i > 0) pts += " ";
            pts += px(c.fpr[i]) + "," + py(c.tpr[i]);
        }
        return std::string("  <polyline fill=\"none\" stroke=\"") + stroke +
               "\" stroke-width=\"" + width + "\" points=\"" + pts + "\"/>\n";
    };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"620\" height=\"600\" "
           "viewBox=\"0 0 620 600\">\n";
    svg += "  <rect width=\"620\" height=\"600\" fill=\"white\"/>\n";
    svg += "  <text x=\"310\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"16\">" + run.cell.id() + " (mean AUC " + fmt("%.3f", run.mean_auc) +
           " ± " + fmt("%.3f", run.sd_auc) + ")</text>\n";
    svg += "  <rect x=\"80\" y=\"40\" width=\"480\" height=\"480\" fill=\"none\" "
           "stroke=\"black\"/>\n";
    svg += "  <line x1=\"80\" y1=\"520\" x2=\"560\" y2=\"40\" stroke=\"#bbbbbb\" "
           "stroke-dasharray=\"6,4\"/>\n";
    for (int t = 0; t <= 4; ++t) {
        const double v = t / 4.0;
        svg += "  <text x=\"" + px(v) + "\" y=\"540\" text-anchor=\"middle\" "
               "font-family=\"sans-serif\" font-size=\"12\">" + fmt("%.2f", v) + "</text>\n";
        svg += "  <text x=\"70\" y=\"" + py(v) + "\" text-anchor=\"end\" dominant-baseline=\""
               "middle\" font-family=\"sans-serif\" font-size=\"12\">" + fmt("%.2f", v) +
               "</text>\n";
    }
    svg += "  <text x=\"310\" y=\"575\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"14\">False positive rate</text>\n";
    svg += "  <text x=\"24\" y=\"280\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"14\" transform=\"rotate(-90 24 280)\">True positive rate</text>\n";

    const auto curves = fold_curves(run);
    for (const auto& c : curves) svg += polyline(c, "#9ecae1", "1");
    if (!curves.empty()) svg += polyline(evaluation::mean_roc(curves), "#08519c", "2.5");
    svg += "</svg>\n";
    return svg;
}

std::string ablation_csv(const std::vector<RunResult>& runs, int task,
                         std::vector<std::string>& warnings) {
    std::vector<const RunResult*> cells;
    for (const auto& r : runs) {
        if (cohort::task_number(r.cell.task) == task && !r.cell.combination.modalities.empty()) {
            cells.push_back(&r);
        }
    }
    if (cells.empty()) return "";

    auto modality_label = [](const RunResult& r) {
        std::string out;
        for (const auto& m : r.cell.combination.modalities) {
            if (!out.empty()) out += "+";
            out += m;
        }
        return out;
    };

    std::set<ModelKind> models_present;
    std::set<std::string> eyes_present;
    std::map<std::tuple<std::string, std::string, ModelKind>, const RunResult*> lookup;
    std::set<std::pair<std::string, std::string>> row_keys;
    for (const auto* r : cells) {
        models_present.insert(r->cell.model);
        eyes_present.insert(r->cell.eyes);
        const std::string mod = modality_label(*r);
        row_keys.insert({r->cell.combination.name, mod});
        auto key = std::make_tuple(r->cell.combination.name, mod, r->cell.model);
        if (!lookup.emplace(key, r).second) {
            warnings.push_back("duplicate ablation manifest for cell " + r->cell.id() +
                               "; keeping the first");
        }
    }
    if (eyes_present.size() > 1) {
        warnings.push_back("ablation matrix for task " + std::to_string(task) +
                           " mixes eye modes");
    }

    std::vector<std::pair<std::string, std::string>> rows(row_keys.begin(), row_keys.end());
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
        const int ra = combination_rank(a.first), rb = combination_rank(b.first);
        if (ra != rb) return ra < rb;
        return a.second < b.second;
    });

    std::string out;
    std::vector<std::string> header = {"task", "data", "modality"};
    for (ModelKind kind : kModelOrder) {
        if (models_present.count(kind)) header.push_back(models::to_string(kind));
    }
    out += csv_line(header);
    for (const auto& [comb, mod] : rows) {
        std::vector<std::string> row = {std::to_string(task), comb, mod};
        for (ModelKind kind : kModelOrder) {
            if (!models_present.count(kind)) continue;
            auto it = lookup.find(std::make_tuple(comb, mod, kind));
            if (it == lookup.end()) {
                row.push_back("");
                warnings.push_back("missing ablation manifest: task " + std::to_string(task) +
                                   ", " + comb + " [" + mod + "], " + models::to_string(kind));
            } else {
                row.push_back(fmt("%.3f", it->second->mean_auc));
            }
        }
        out += csv_line(row);
    }
    return out;
}

std::string shap_csv(const RunResult& run) {
    std::string out = csv_line({"feature", "mean_abs_shap"});
    for (const auto& r : run.shap) {
        out += csv_line({r.name, format_double(r.mean_abs)});
    }
    return out;
}

evaluation::DeLongResult delong_between(const RunResult& a, const RunResult& b) {
    const auto map_a = score_map(a);
    const auto map_b = score_map(b);

    std::vector<std::string> only_a, only_b;
    for (const auto& [key, v] : map_a) {
        if (!map_b.count(key)) only_a.push_back(key.first + "/" + key.second);
    }
    for (const auto& [key, v] : map_b) {
        if (!map_a.count(key)) only_b.push_back(key.first + "/" + key.second);
    }
    if (!only_a.empty() || !only_b.empty()) {
        auto preview = [](const std::vector<std::string>& v) {
            std::string out;
            for (std::size_t i = 0; i < v.size() && i < 5; ++i) {
                if (i > 0) out += ", ";
                out += v[i];
            }
            if (v.size() > 5) out += ", ...";
            return out;
        };
        throw DataError("pooled eye key sets differ between '" + a.cell.id() + "' and '" +
                        b.cell.id() + "'; only in first: [" + preview(only_a) +
                        "], only in second: [" + preview(only_b) + "]");
    }

    std::vector<double> scores_a, scores_b;
    std::vector<int> labels;
    for (const auto& [key, va] : map_a) {
        const auto& vb = map_b.at(key);
        if (va.first != vb.first) {
            throw DataError("label mismatch for eye " + key.first + "/" + key.second +
                            " between '" + a.cell.id() + "' and '" + b.cell.id() + "'");
        }
        scores_a.push_back(va.second);
        scores_b.push_back(vb.second);
        labels.push_back(va.first);
    }
    return evaluation::delong_paired(scores_a, scores_b, labels);
}

std::string compare_models_csv(const std::vector<RunResult>& runs,
                               std::vector<std::string>& warnings) {
    if (runs.empty()) throw UsageError("no manifests to compare");
    check_same_task_eyes(runs);

    std::set<ModelKind> models_present;
    std::set<std::string> data_present;
    std::map<std::pair<std::string, ModelKind>, const RunResult*> lookup;
    for (const auto& r : runs) {
        models_present.insert(r.cell.model);
        const std::string data = data_label(r);
        data_present.insert(data);
        if (!lookup.emplace(std::make_pair(data, r.cell.model), &r).second) {
            warnings.push_back("duplicate manifest for " + r.cell.id() + "; keeping the first");
        }
    }

    std::vector<ModelKind> order;
    for (ModelKind kind : kModelOrder) {
        if (models_present.count(kind)) order.push_back(kind);
    }
    std::vector<std::pair<ModelKind, ModelKind>> pairs;
    for (std::size_t i = 0; i < order.size(); ++i) {
        for (std::size_t j = i + 1; j < order.size(); ++j) {
            pairs.push_back({order[i], order[j]});
        }
    }
    if (pairs.empty()) throw UsageError("model comparison needs at least two models");

    std::vector<std::string> data_rows(data_present.begin(), data_present.end());
    std::sort(data_rows.begin(), data_rows.end(), [](const std::string& a, const std::string& b) {
        const int ra = combination_rank(a), rb = combination_rank(b);
        if (ra != rb) return ra < rb;
        return a < b;
    });

    std::string out;
    std::vector<std::string> header = {"task", "data"};
    for (const auto& [a, b] : pairs) header.push_back(pair_label(a, b));
    out += csv_line(header);
    for (const auto& data : data_rows) {
        std::vector<std::string> row = {
            std::to_string(cohort::task_number(runs[0].cell.task)), data};
        for (const auto& [ka, kb] : pairs) {
            auto ia = lookup.find({data, ka});
            auto ib = lookup.find({data, kb});
            if (ia == lookup.end() || ib == lookup.end()) {
                row.push_back("");
                warnings.push_back("missing manifest for " + data + " " +
                                   models::to_string(ia == lookup.end() ? ka : kb));
            } else {
                row.push_back(p_label(delong_between(*ia->second, *ib->second).p));
            }
        }
        out += csv_line(row);
    }
    return out;
}

std::string compare_combinations_csv(const std::vector<RunResult>& runs, ModelKind model,
                                     std::vector<std::string>& warnings) {
    if (runs.empty()) throw UsageError("no manifests to compare");
    check_same_task_eyes(runs);

    std::map<std::string, const RunResult*> lookup;
    for (const auto& r : runs) {
        if (r.cell.model != model) continue;
        if (!lookup.emplace(data_label(r), &r).second) {
            warnings.push_back("duplicate manifest for " + r.cell.id() + "; keeping the first");
        }
    }
    if (lookup.size() < 2) {
        throw UsageError("combination comparison for " + models::to_string(model) +
                         " needs at least two data combinations");
    }

    std::vector<std::string> data_rows;
    for (const auto& [data, run] : lookup) data_rows.push_back(data);
    std::sort(data_rows.begin(), data_rows.end(), [](const std::string& a, const std::string& b) {
        const int ra = combination_rank(a), rb = combination_rank(b);
        if (ra != rb) return ra < rb;
        return a < b;
    });

    std::string out;
    std::vector<std::string> header = {"task", "model", "data"};
    for (const auto& d : data_rows) header.push_back(d);
    out += csv_line(header);
    for (const auto& da : data_rows) {
        std::vector<std::string> row = {std::to_string(cohort::task_number(runs[0].cell.task)),
                                        models::to_string(model), da};
        for (const auto& db : data_rows) {
            if (da == db) {
                row.push_back("1.000");
            } else {
                row.push_back(p_label(delong_between(*lookup.at(da), *lookup.at(db)).p));
            }
        }
        out += csv_line(row);
    }
    return out;
}

}  // namespace retiomics::report
