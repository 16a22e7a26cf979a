#include "retiomics/cohort.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <set>

#include "retiomics/csv.hpp"
#include "retiomics/imaging.hpp"
#include "retiomics/rng.hpp"

namespace retiomics::cohort {

namespace {

const std::vector<std::string> kGroupNames = {"R", "S", "O", "D", "B"};
const std::vector<std::string> kRiskLabels = {"Moderate", "High", "VeryHigh"};

// Groups S/O/D/B. Group R columns come from the features CSV and are not
// enumerated here. Declaration order is the clinical CSV column order.
const std::vector<ColumnDef> kClinicalSchema = {
    // S: metrics exported by the device's commercial software.
    {"CRT", Group::S, ColumnKind::Numeric},
    {"retinal_volume", Group::S, ColumnKind::Numeric},
    {"NI", Group::S, ColumnKind::Numeric},
    {"NE", Group::S, ColumnKind::Numeric},
    {"SI", Group::S, ColumnKind::Numeric},
    {"SE", Group::S, ColumnKind::Numeric},
    {"II", Group::S, ColumnKind::Numeric},
    {"IE", Group::S, ColumnKind::Numeric},
    {"TI", Group::S, ColumnKind::Numeric},
    {"TE", Group::S, ColumnKind::Numeric},
    {"vascular_density_3x3", Group::S, ColumnKind::Numeric},
    {"vascular_density_6x6", Group::S, ColumnKind::Numeric},
    {"perfusion_density_3x3", Group::S, ColumnKind::Numeric},
    {"perfusion_density_6x6", Group::S, ColumnKind::Numeric},
    {"FAZ_area_3x3", Group::S, ColumnKind::Numeric},
    {"FAZ_perimeter_3x3", Group::S, ColumnKind::Numeric},
    {"FAZ_circularity_3x3", Group::S, ColumnKind::Numeric},
    {"FAZ_area_6x6", Group::S, ColumnKind::Numeric},
    {"FAZ_perimeter_6x6", Group::S, ColumnKind::Numeric},
    {"FAZ_circularity_6x6", Group::S, ColumnKind::Numeric},
    // O: ocular examination.
    {"dr_grade", Group::O, ColumnKind::Categorical},
    {"visual_acuity", Group::O, ColumnKind::Numeric},
    {"intraocular_pressure", Group::O, ColumnKind::Numeric},
    {"spherical_equivalent", Group::O, ColumnKind::Numeric},
    {"axial_length", Group::O, ColumnKind::Numeric},
    {"keratometry", Group::O, ColumnKind::Numeric},
    // D: demographics and systemics (patient-level).
    {"dm_duration", Group::D, ColumnKind::Numeric},
    {"age", Group::D, ColumnKind::Numeric},
    {"sex", Group::D, ColumnKind::Categorical},
    {"weight", Group::D, ColumnKind::Numeric},
    {"height", Group::D, ColumnKind::Numeric},
    {"bmi", Group::D, ColumnKind::Numeric},
    {"systolic_bp", Group::D, ColumnKind::Numeric},
    {"diastolic_bp", Group::D, ColumnKind::Numeric},
    {"heart_rate", Group::D, ColumnKind::Numeric},
    {"smoking", Group::D, ColumnKind::Categorical},
    {"hta", Group::D, ColumnKind::Numeric},
    // B: blood analysis (patient-level).
    {"glucose", Group::B, ColumnKind::Numeric},
    {"creatinine", Group::B, ColumnKind::Numeric},
    {"egfr", Group::B, ColumnKind::Numeric},
    {"uric_acid", Group::B, ColumnKind::Numeric},
    {"total_cholesterol", Group::B, ColumnKind::Numeric},
    {"triglycerides", Group::B, ColumnKind::Numeric},
    {"total_proteins", Group::B, ColumnKind::Numeric},
    {"sodium", Group::B, ColumnKind::Numeric},
    {"potassium", Group::B, ColumnKind::Numeric},
    {"urinary_albumin", Group::B, ColumnKind::Numeric},
    {"albumin", Group::B, ColumnKind::Numeric},
    {"hdl", Group::B, ColumnKind::Numeric},
    {"leukocytes", Group::B, ColumnKind::Numeric},
    {"red_blood_cells", Group::B, ColumnKind::Numeric},
    {"hemoglobin", Group::B, ColumnKind::Numeric},
    {"hematocrit", Group::B, ColumnKind::Numeric},
    {"platelets", Group::B, ColumnKind::Numeric},
    {"mean_cholesterol", Group::B, ColumnKind::Numeric},
    {"mean_ldl", Group::B, ColumnKind::Numeric},
    {"mean_hba1c", Group::B, ColumnKind::Numeric},
};

const std::vector<std::string> kCombinationNames = {"R",     "R+S",   "R+O",     "R+S+O",   "R+D",
                                                    "R+D+B", "R+D+O", "R+D+B+O", "ALL"};

bool is_radiomic_key(const std::string& name, std::string* modality_out = nullptr) {
    for (auto modality : imaging::kAllModalities) {
        const std::string prefix = imaging::to_string(modality) + "_";
        if (name.size() > prefix.size() && name.compare(0, prefix.size(), prefix) == 0) {
            if (modality_out) *modality_out = imaging::to_string(modality);
            return true;
        }
    }
    return false;
}

double parse_number(const std::string& text, const std::string& where) {
    const char* begin = text.data();
    const char* end = begin + text.size();
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end) {
        throw DataError(where + ": cannot parse '" + text + "' as a number");
    }
    return value;
}

void validate_eye(const std::string& eye, const std::string& where) {
    if (eye != "OD" && eye != "OS") {
        throw DataError(where + ": eye must be OD or OS, got '" + eye + "'");
    }
}

std::string cell_to_csv(const CellValue& cell) {
    switch (cell.state) {
        case CellValue::State::Missing: return "";
        case CellValue::State::Number: return format_double(cell.number);
        case CellValue::State::Category: return cell.category;
    }
    return "";
}

}  // namespace

const std::string& to_string(Group g) { return kGroupNames[static_cast<std::size_t>(g)]; }

const std::vector<ColumnDef>& clinical_schema() { return kClinicalSchema; }

const ColumnDef* find_clinical_column(const std::string& name) {
    for (const auto& def : kClinicalSchema) {
        if (def.name == name) return &def;
    }
    return nullptr;
}

int risk_class_index(const std::string& risk_label) {
    for (std::size_t i = 0; i < kRiskLabels.size(); ++i) {
        if (kRiskLabels[i] == risk_label) return static_cast<int>(i);
    }
    throw DataError("unknown risk label '" + risk_label +
                    "' (expected Moderate, High, or VeryHigh)");
}

const std::vector<std::string>& DataCombination::all_names() { return kCombinationNames; }

bool DataCombination::has_group(Group g) const {
    return std::find(groups.begin(), groups.end(), g) != groups.end();
}

DataCombination DataCombination::parse(const std::string& name,
                                       const std::vector<std::string>& modality_filter) {
    std::string upper = name;
    std::transform(upper.begin(), upper.end(), upper.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    DataCombination combo;
    if (upper == "ALL") {
        combo.name = "ALL";
        combo.groups = {Group::R, Group::S, Group::O, Group::D, Group::B};
    } else {
        if (std::find(kCombinationNames.begin(), kCombinationNames.end(), upper) ==
            kCombinationNames.end()) {
            throw UsageError("unknown data combination '" + name + "' (expected one of R, R+S, " +
                             "R+O, R+S+O, R+D, R+D+B, R+D+O, R+D+B+O, ALL)");
        }
        combo.name = upper;
        std::string token;
        for (char c : upper + "+") {
            if (c == '+') {
                if (token == "R") combo.groups.push_back(Group::R);
                else if (token == "S") combo.groups.push_back(Group::S);
                else if (token == "O") combo.groups.push_back(Group::O);
                else if (token == "D") combo.groups.push_back(Group::D);
                else if (token == "B") combo.groups.push_back(Group::B);
                token.clear();
            } else {
                token += c;
            }
        }
    }
    for (const auto& m : modality_filter) {
        imaging::parse_modality(m);  // validates
        combo.modalities.push_back(m);
    }
    std::sort(combo.modalities.begin(), combo.modalities.end());
    combo.modalities.erase(std::unique(combo.modalities.begin(), combo.modalities.end()),
                           combo.modalities.end());
    return combo;
}

Task parse_task(int number) {
    if (number == 1) return Task::Task1;
    if (number == 2) return Task::Task2;
    throw UsageError("task must be 1 or 2, got " + std::to_string(number));
}

int task_number(Task t) { return t == Task::Task1 ? 1 : 2; }

Cohort load_cohort(const std::filesystem::path& features_csv,
                   const std::filesystem::path& clinical_csv) {
    const CsvTable feat = read_csv(features_csv);
    const CsvTable clin = read_csv(clinical_csv);
    const std::string feat_origin = features_csv.string();
    const std::string clin_origin = clinical_csv.string();

    const int f_pid = feat.column("patient_id");
    const int f_eye = feat.column("eye");
    if (f_pid < 0 || f_eye < 0) {
        throw DataError(feat_origin + ": features CSV must have patient_id and eye columns");
    }
    for (std::size_t c = 0; c < feat.header.size(); ++c) {
        const auto& name = feat.header[c];
        if (name == "patient_id" || name == "eye") continue;
        if (!is_radiomic_key(name)) {
            throw DataError(feat_origin + ": column '" + name +
                            "' is not a {modality}_{feature} radiomic key");
        }
    }

    const int c_pid = clin.column("patient_id");
    const int c_eye = clin.column("eye");
    const int c_risk = clin.column("risk_label");
    if (c_pid < 0 || c_eye < 0 || c_risk < 0) {
        throw DataError(clin_origin +
                        ": clinical CSV must have patient_id, eye, and risk_label columns");
    }
    for (std::size_t c = 0; c < clin.header.size(); ++c) {
        const auto& name = clin.header[c];
        if (name == "patient_id" || name == "eye" || name == "risk_label") continue;
        if (!find_clinical_column(name)) {
            throw DataError(clin_origin + ": unknown clinical column '" + name + "'");
        }
    }

    // Index clinical rows by (patient, eye).
    std::map<std::pair<std::string, std::string>, std::size_t> clinical_index;
    for (std::size_t r = 0; r < clin.rows.size(); ++r) {
        const auto& row = clin.rows[r];
        const std::string where = clin_origin + ":" + std::to_string(r + 2);
        validate_eye(row[c_eye], where);
        auto key = std::make_pair(row[c_pid], row[c_eye]);
        if (!clinical_index.emplace(key, r).second) {
            throw DataError(where + ": duplicate clinical row for (" + key.first + ", " +
                            key.second + ")");
        }
    }

    Cohort cohort;
    cohort.provenance = "features=" + feat_origin + " clinical=" + clin_origin;
    std::set<std::pair<std::string, std::string>> seen;
    std::set<std::pair<std::string, std::string>> joined;
    for (std::size_t r = 0; r < feat.rows.size(); ++r) {
        const auto& row = feat.rows[r];
        const std::string where = feat_origin + ":" + std::to_string(r + 2);
        validate_eye(row[f_eye], where);
        auto key = std::make_pair(row[f_pid], row[f_eye]);
        if (!seen.insert(key).second) {
            throw DataError(where + ": duplicate features row for (" + key.first + ", " +
                            key.second + ")");
        }
        auto it = clinical_index.find(key);
        if (it == clinical_index.end()) {
            throw DataError(where + ": eye (" + key.first + ", " + key.second +
                            ") has no matching clinical row");
        }
        joined.insert(key);

        EyeRecord record;
        record.patient_id = key.first;
        record.eye = key.second;
        for (std::size_t c = 0; c < feat.header.size(); ++c) {
            if (static_cast<int>(c) == f_pid || static_cast<int>(c) == f_eye) continue;
            const auto& text = row[c];
            // Missing is represented by absence from the record map, so an
            // empty cell loads the same as a column absent from the header.
            if (text.empty()) continue;
            record.radiomics[feat.header[c]] = CellValue::num(
                parse_number(text, where + " column " + feat.header[c]));
        }

        const auto& crow = clin.rows[it->second];
        const std::string cwhere = clin_origin + ":" + std::to_string(it->second + 2);
        record.risk_label = crow[c_risk];
        risk_class_index(record.risk_label);  // validates
        for (std::size_t c = 0; c < clin.header.size(); ++c) {
            if (static_cast<int>(c) == c_pid || static_cast<int>(c) == c_eye ||
                static_cast<int>(c) == c_risk) {
                continue;
            }
            const ColumnDef* def = find_clinical_column(clin.header[c]);
            const auto& text = crow[c];
            if (text.empty()) {
                continue;  // missing == absent from the record map
            } else if (def->kind == ColumnKind::Numeric) {
                record.clinical[def->name] =
                    CellValue::num(parse_number(text, cwhere + " column " + def->name));
            } else {
                record.clinical[def->name] = CellValue::cat(text);
            }
        }
        cohort.records.push_back(std::move(record));
    }

    for (const auto& [key, r] : clinical_index) {
        if (!joined.count(key)) {
            throw DataError(clin_origin + ":" + std::to_string(r + 2) + ": clinical row (" +
                            key.first + ", " + key.second + ") has no matching features row");
        }
    }

    // Per-patient consistency: risk label and the patient-level D/B values
    // must agree across the two eyes.
    std::map<std::string, const EyeRecord*> first_eye;
    for (const auto& rec : cohort.records) {
        auto [it, inserted] = first_eye.emplace(rec.patient_id, &rec);
        if (inserted) continue;
        const EyeRecord& other = *it->second;
        if (other.risk_label != rec.risk_label) {
            throw DataError("patient " + rec.patient_id + " has conflicting risk labels (" +
                            other.risk_label + " vs " + rec.risk_label + ")");
        }
        for (const auto& def : kClinicalSchema) {
            if (def.group != Group::D && def.group != Group::B) continue;
            auto a = other.clinical.find(def.name);
            auto b = rec.clinical.find(def.name);
            const CellValue va = a == other.clinical.end() ? CellValue::missing() : a->second;
            const CellValue vb = b == rec.clinical.end() ? CellValue::missing() : b->second;
            if (!(va == vb)) {
                throw DataError("patient " + rec.patient_id + ": patient-level column " +
                                def.name + " differs between eyes");
            }
        }
    }
    return cohort;
}

DesignMatrix assemble(const Cohort& cohort, const DataCombination& combination, Task task) {
    if (cohort.records.empty()) throw DataError("cannot assemble from an empty cohort");

    DesignMatrix dm;
    if (combination.has_group(Group::R)) {
        std::set<std::string> keys;
        for (const auto& rec : cohort.records) {
            for (const auto& [name, value] : rec.radiomics) keys.insert(name);
        }
        for (const auto& name : keys) {  // std::set iterates lexicographically
            if (!combination.modalities.empty()) {
                std::string modality;
                is_radiomic_key(name, &modality);
                if (std::find(combination.modalities.begin(), combination.modalities.end(),
                              modality) == combination.modalities.end()) {
                    continue;
                }
            }
            dm.columns.push_back(name);
            dm.kinds.push_back(ColumnKind::Numeric);
            dm.groups.push_back(Group::R);
        }
    }
    for (Group g : {Group::S, Group::O, Group::D, Group::B}) {
        if (!combination.has_group(g)) continue;
        std::vector<const ColumnDef*> defs;
        for (const auto& def : kClinicalSchema) {
            if (def.group == g) defs.push_back(&def);
        }
        std::sort(defs.begin(), defs.end(),
                  [](const ColumnDef* a, const ColumnDef* b) { return a->name < b->name; });
        for (const ColumnDef* def : defs) {
            dm.columns.push_back(def->name);
            dm.kinds.push_back(def->kind);
            dm.groups.push_back(def->group);
        }
    }

    std::set<std::string> missing_clinical;
    for (const auto& rec : cohort.records) {
        const int risk = risk_class_index(rec.risk_label);
        int label;
        if (task == Task::Task1) {
            label = risk == 0 ? 0 : 1;
        } else {
            if (risk == 0) continue;  // Task 2 excludes Moderate rows
            label = risk == 2 ? 1 : 0;
        }
        std::vector<CellValue> cells;
        cells.reserve(dm.columns.size());
        for (std::size_t c = 0; c < dm.columns.size(); ++c) {
            const auto& source = dm.groups[c] == Group::R ? rec.radiomics : rec.clinical;
            auto it = source.find(dm.columns[c]);
            CellValue value = it == source.end() ? CellValue::missing() : it->second;
            if (value.is_missing() && dm.groups[c] != Group::R) {
                missing_clinical.insert(dm.columns[c]);
            }
            cells.push_back(std::move(value));
        }
        dm.cells.push_back(std::move(cells));
        dm.labels.push_back(label);
        dm.patients.push_back(rec.patient_id);
        dm.eyes.push_back(rec.eye);
    }
    if (dm.cells.empty()) {
        throw DataError("no rows remain after applying task " +
                        std::to_string(task_number(task)) + " to the cohort");
    }
    for (const auto& name : missing_clinical) {
        dm.warnings.push_back("clinical column " + name +
                              " has missing values; they will be median/mode-imputed");
    }
    return dm;
}

Cohort select_single_eye(const Cohort& cohort, std::uint64_t seed) {
    // Group record indices by patient, preserving record order.
    std::vector<std::string> order;
    std::map<std::string, std::vector<std::size_t>> by_patient;
    for (std::size_t i = 0; i < cohort.records.size(); ++i) {
        const auto& id = cohort.records[i].patient_id;
        if (!by_patient.count(id)) order.push_back(id);
        by_patient[id].push_back(i);
    }
    Cohort out;
    out.provenance = cohort.provenance + " (single eye, seed " + std::to_string(seed) + ")";
    for (const auto& id : order) {
        const auto& indices = by_patient[id];
        std::size_t pick = 0;
        if (indices.size() > 1) {
            Rng rng(derive_seed(seed, "single_eye", id));
            pick = rng.uniform_int(indices.size());
        }
        out.records.push_back(cohort.records[indices[pick]]);
    }
    return out;
}

void write_features_csv(const Cohort& cohort, const std::filesystem::path& path) {
    std::set<std::string> keys;
    for (const auto& rec : cohort.records) {
        for (const auto& [name, value] : rec.radiomics) keys.insert(name);
    }
    std::vector<std::string> header = {"patient_id", "eye"};
    header.insert(header.end(), keys.begin(), keys.end());
    std::vector<std::vector<std::string>> rows;
    for (const auto& rec : cohort.records) {
        std::vector<std::string> row = {rec.patient_id, rec.eye};
        for (const auto& key : keys) {
            auto it = rec.radiomics.find(key);
            row.push_back(it == rec.radiomics.end() ? "" : cell_to_csv(it->second));
        }
        rows.push_back(std::move(row));
    }
    write_csv(path, header, rows);
}

void write_clinical_csv(const Cohort& cohort, const std::filesystem::path& path) {
    std::vector<std::string> header = {"patient_id", "eye", "risk_label"};
    for (const auto& def : kClinicalSchema) header.push_back(def.name);
    std::vector<std::vector<std::string>> rows;
    for (const auto& rec : cohort.records) {
        std::vector<std::string> row = {rec.patient_id, rec.eye, rec.risk_label};
        for (const auto& def : kClinicalSchema) {
            auto it = rec.clinical.find(def.name);
            row.push_back(it == rec.clinical.end() ? "" : cell_to_csv(it->second));
        }
        rows.push_back(std::move(row));
    }
    write_csv(path, header, rows);
}

}  // namespace retiomics::cohort
