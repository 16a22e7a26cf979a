#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "retiomics/common.hpp"

namespace retiomics::cohort {

/// The paper's five attribute groups.
enum class Group { R, S, O, D, B };
const std::string& to_string(Group g);

enum class ColumnKind { Numeric, Categorical };

/// One table cell: a number, a category label, or missing.
struct CellValue {
    enum class State { Missing, Number, Category };
    State state = State::Missing;
    double number = 0.0;
    std::string category;

    static CellValue missing() { return {}; }
    static CellValue num(double v) { return {State::Number, v, {}}; }
    static CellValue cat(std::string v) { return {State::Category, 0.0, std::move(v)}; }
    bool is_missing() const { return state == State::Missing; }
    bool operator==(const CellValue&) const = default;
};

/// Fixed clinical schema (groups S, O, D, B). Radiomic columns (group R) are
/// open-ended "{modality}_{feature}" names carried by the features CSV.
struct ColumnDef {
    std::string name;
    Group group;
    ColumnKind kind;
};
const std::vector<ColumnDef>& clinical_schema();
const ColumnDef* find_clinical_column(const std::string& name);

struct EyeRecord {
    std::string patient_id;
    std::string eye;         // OD | OS
    std::string risk_label;  // Moderate | High | VeryHigh
    std::map<std::string, CellValue> radiomics;  // group R, numeric
    std::map<std::string, CellValue> clinical;   // groups S, O, D, B keyed by schema name
};

struct Cohort {
    std::vector<EyeRecord> records;
    std::string provenance;
};

int risk_class_index(const std::string& risk_label);  // Moderate=0, High=1, VeryHigh=2

/// One of the paper's nine attribute-group unions, with an optional modality
/// filter restricting which radiomic columns participate.
struct DataCombination {
    std::string name;                     // canonical: R, R+S, ..., R+D+B+O, ALL
    std::vector<Group> groups;            // always contains R
    std::vector<std::string> modalities;  // empty = all six

    static DataCombination parse(const std::string& name,
                                 const std::vector<std::string>& modality_filter = {});
    static const std::vector<std::string>& all_names();
    bool has_group(Group g) const;
};

enum class Task { Task1, Task2 };  // 1: Moderate vs High+VeryHigh; 2: High vs VeryHigh
Task parse_task(int number);
int task_number(Task t);

struct DesignMatrix {
    std::vector<std::string> columns;
    std::vector<ColumnKind> kinds;
    std::vector<Group> groups;
    std::vector<std::vector<CellValue>> cells;  // row-major, cells[r][c]
    std::vector<int> labels;                    // 0/1 per row
    std::vector<std::string> patients;          // group id per row
    std::vector<std::string> eyes;              // OD/OS per row
    std::vector<std::string> warnings;          // e.g. imputable clinical gaps

    std::size_t rows() const { return cells.size(); }
    std::size_t cols() const { return columns.size(); }
};

/// Join the features CSV (group R) with the clinical CSV (S/O/D/B) on
/// (patient_id, eye). Unjoinable or malformed rows are hard errors.
Cohort load_cohort(const std::filesystem::path& features_csv,
                   const std::filesystem::path& clinical_csv);

/// Column order: group order R,S,O,D,B, byte-wise lexicographic within group.
DesignMatrix assemble(const Cohort& cohort, const DataCombination& combination, Task task);

/// Keep one uniformly chosen eye per patient; single-eye patients unchanged.
Cohort select_single_eye(const Cohort& cohort, std::uint64_t seed);

/// CSV export (schemas in docs/formats.md). Byte-deterministic.
void write_features_csv(const Cohort& cohort, const std::filesystem::path& path);
void write_clinical_csv(const Cohort& cohort, const std::filesystem::path& path);

}  // namespace retiomics::cohort
