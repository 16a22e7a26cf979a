#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"

#include "retiomics/cohort.hpp"
#include "retiomics/csv.hpp"
#include "retiomics/preprocess.hpp"

using namespace retiomics;
using namespace retiomics::cohort;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("retiomics_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path& path, const std::string& content) {
    atomic_write_file(path, content);
}

/// A four-eye cohort: P1 bilateral Moderate, P2 single High, P3 single VeryHigh.
fs::path standard_cohort(const std::string& name) {
    const fs::path dir = temp_dir(name);
    write_file(dir / "features.csv",
               "patient_id,eye,OCT_mean,FR_mean\n"
               "P1,OD,10,1\n"
               "P1,OS,11,2\n"
               "P2,OD,20,3\n"
               "P3,OS,30,4\n");
    write_file(dir / "clinical.csv",
               "patient_id,eye,risk_label,dm_duration,sex,glucose\n"
               "P1,OD,Moderate,5,male,100\n"
               "P1,OS,Moderate,5,male,100\n"
               "P2,OD,High,15,female,150\n"
               "P3,OS,VeryHigh,25,female,170\n");
    return dir;
}

}  // namespace

TEST_SUITE("cohort") {

TEST_CASE("load_cohort joins features and clinical rows on (patient, eye)") {
    const fs::path dir = standard_cohort("join");
    const Cohort cohort = load_cohort(dir / "features.csv", dir / "clinical.csv");
    REQUIRE(cohort.records.size() == 4);
    const EyeRecord& r0 = cohort.records[0];
    CHECK(r0.patient_id == "P1");
    CHECK(r0.risk_label == "Moderate");
    CHECK(r0.radiomics.at("OCT_mean") == CellValue::num(10));
    CHECK(r0.clinical.at("dm_duration") == CellValue::num(5));
    CHECK(r0.clinical.at("sex") == CellValue::cat("male"));
    // columns absent from the CSV are simply absent from the record
    CHECK(r0.clinical.count("age") == 0);
    fs::remove_all(dir);
}

TEST_CASE("join and schema violations are hard errors") {
    const fs::path dir = standard_cohort("join_errors");

    SUBCASE("feature eye without clinical row") {
        write_file(dir / "features.csv",
                   "patient_id,eye,OCT_mean\nP1,OD,1\nP9,OD,2\n");
        write_file(dir / "clinical.csv",
                   "patient_id,eye,risk_label\nP1,OD,Moderate\n");
        CHECK_THROWS_WITH_AS(load_cohort(dir / "features.csv", dir / "clinical.csv"),
                             doctest::Contains("no matching clinical row"), DataError);
    }
    SUBCASE("duplicate features row") {
        write_file(dir / "features.csv",
                   "patient_id,eye,OCT_mean\nP1,OD,1\nP1,OD,2\n");
        write_file(dir / "clinical.csv",
                   "patient_id,eye,risk_label\nP1,OD,Moderate\n");
        CHECK_THROWS_WITH_AS(load_cohort(dir / "features.csv", dir / "clinical.csv"),
                             doctest::Contains("duplicate"), DataError);
    }
    SUBCASE("unknown risk label") {
        write_file(dir / "features.csv", "patient_id,eye,OCT_mean\nP1,OD,1\n");
        write_file(dir / "clinical.csv",
                   "patient_id,eye,risk_label\nP1,OD,Extreme\n");
        CHECK_THROWS_WITH_AS(load_cohort(dir / "features.csv", dir / "clinical.csv"),
                             doctest::Contains("unknown risk label"), DataError);
    }
    SUBCASE("non-radiomic feature column") {
        write_file(dir / "features.csv", "patient_id,eye,bogus\nP1,OD,1\n");
        write_file(dir / "clinical.csv",
                   "patient_id,eye,risk_label\nP1,OD,High\n");
        CHECK_THROWS_WITH_AS(load_cohort(dir / "features.csv", dir / "clinical.csv"),
                             doctest::Contains("radiomic"), DataError);
    }
    SUBCASE("unknown clinical column") {
        write_file(dir / "features.csv", "patient_id,eye,OCT_mean\nP1,OD,1\n");
        write_file(dir / "clinical.csv",
                   "patient_id,eye,risk_label,shoe_size\nP1,OD,High,43\n");
        CHECK_THROWS_WITH_AS(load_cohort(dir / "features.csv", dir / "clinical.csv"),
                             doctest::Contains("shoe_size"), DataError);
    }
    SUBCASE("patient-level column differing between eyes") {
        write_file(dir / "features.csv",
                   "patient_id,eye,OCT_mean\nP1,OD,1\nP1,OS,2\n");
        write_file(dir / "clinical.csv",
                   "patient_id,eye,risk_label,glucose\n"
                   "P1,OD,High,100\nP1,OS,High,120\n");
        CHECK_THROWS_WITH_AS(load_cohort(dir / "features.csv", dir / "clinical.csv"),
                             doctest::Contains("differs between eyes"), DataError);
    }
    SUBCASE("conflicting risk labels for one patient") {
        write_file(dir / "features.csv",
                   "patient_id,eye,OCT_mean\nP1,OD,1\nP1,OS,2\n");
        write_file(dir / "clinical.csv",
                   "patient_id,eye,risk_label\nP1,OD,High\nP1,OS,VeryHigh\n");
        CHECK_THROWS_WITH_AS(load_cohort(dir / "features.csv", dir / "clinical.csv"),
                             doctest::Contains("conflicting risk labels"), DataError);
    }
    fs::remove_all(dir);
}

TEST_CASE("the nine data combinations parse canonically") {
    CHECK(DataCombination::all_names() ==
          std::vector<std::string>{"R", "R+S", "R+O", "R+S+O", "R+D", "R+D+B", "R+D+O",
                                   "R+D+B+O", "ALL"});
    const DataCombination rd = DataCombination::parse("r+d");
    CHECK(rd.name == "R+D");
    CHECK(rd.has_group(Group::R));
    CHECK(rd.has_group(Group::D));
    CHECK_FALSE(rd.has_group(Group::B));
    const DataCombination all = DataCombination::parse("ALL");
    for (Group g : {Group::R, Group::S, Group::O, Group::D, Group::B}) CHECK(all.has_group(g));
    CHECK_THROWS_AS(DataCombination::parse("R+B"), UsageError);
    CHECK_THROWS_AS(DataCombination::parse(""), UsageError);
}

TEST_CASE("assemble orders columns R,S,O,D,B with lexicographic ties") {
    const fs::path dir = standard_cohort("assemble");
    const Cohort cohort = load_cohort(dir / "features.csv", dir / "clinical.csv");

    const DesignMatrix dm = assemble(cohort, DataCombination::parse("ALL"), Task::Task1);
    // R block first (FR_mean < OCT_mean), then the clinical groups in order.
    REQUIRE(dm.columns.size() >= 5);
    CHECK(dm.columns[0] == "FR_mean");
    CHECK(dm.columns[1] == "OCT_mean");
    CHECK(dm.groups[0] == Group::R);
    // every group change follows R,S,O,D,B order
    std::vector<Group> seen;
    for (Group g : dm.groups) {
        if (seen.empty() || seen.back() != g) seen.push_back(g);
    }
    CHECK(seen == std::vector<Group>{Group::R, Group::S, Group::O, Group::D, Group::B});
    // sorted within each group
    for (std::size_t c = 1; c < dm.columns.size(); ++c) {
        if (dm.groups[c] == dm.groups[c - 1]) CHECK(dm.columns[c - 1] < dm.columns[c]);
    }

    // Task 1: Moderate=0, High and VeryHigh=1
    CHECK(dm.labels == std::vector<int>{0, 0, 1, 1});

    // Task 2 drops Moderate rows: High=0, VeryHigh=1
    const DesignMatrix dm2 = assemble(cohort, DataCombination::parse("R"), Task::Task2);
    CHECK(dm2.labels == std::vector<int>{0, 1});
    CHECK(dm2.patients == std::vector<std::string>{"P2", "P3"});

    // R-only: no clinical columns at all
    const DesignMatrix dmr = assemble(cohort, DataCombination::parse("R"), Task::Task1);
    CHECK(dmr.columns == std::vector<std::string>{"FR_mean", "OCT_mean"});
    fs::remove_all(dir);
}

TEST_CASE("modality filter restricts radiomic columns only") {
    const fs::path dir = standard_cohort("modality_filter");
    const Cohort cohort = load_cohort(dir / "features.csv", dir / "clinical.csv");
    const DataCombination filtered = DataCombination::parse("R+D", {"OCT"});
    const DesignMatrix dm = assemble(cohort, filtered, Task::Task1);
    CHECK(dm.columns.front() == "OCT_mean");
    std::size_t r_cols = 0, d_cols = 0;
    for (std::size_t c = 0; c < dm.columns.size(); ++c) {
        if (dm.groups[c] == Group::R) ++r_cols;
        if (dm.groups[c] == Group::D) ++d_cols;
    }
    CHECK(r_cols == 1);   // FR_mean filtered out
    CHECK(d_cols == 11);  // full D schema untouched by the filter
    fs::remove_all(dir);
}

TEST_CASE("select_single_eye keeps exactly one eye per patient, deterministically") {
    const fs::path dir = standard_cohort("single_eye");
    const Cohort cohort = load_cohort(dir / "features.csv", dir / "clinical.csv");
    const Cohort one = select_single_eye(cohort, 99);
    REQUIRE(one.records.size() == 3);
    std::set<std::string> patients;
    for (const auto& rec : one.records) patients.insert(rec.patient_id);
    CHECK(patients == std::set<std::string>{"P1", "P2", "P3"});
    // single-eye patients pass through unchanged
    for (const auto& rec : one.records) {
        if (rec.patient_id == "P2") CHECK(rec.eye == "OD");
        if (rec.patient_id == "P3") CHECK(rec.eye == "OS");
    }
    const Cohort again = select_single_eye(cohort, 99);
    for (std::size_t i = 0; i < one.records.size(); ++i) {
        CHECK(one.records[i].patient_id == again.records[i].patient_id);
        CHECK(one.records[i].eye == again.records[i].eye);
    }
    fs::remove_all(dir);
}

TEST_CASE("features/clinical CSV export reloads identically") {
    const fs::path dir = standard_cohort("round_trip");
    const Cohort cohort = load_cohort(dir / "features.csv", dir / "clinical.csv");
    write_features_csv(cohort, dir / "f2.csv");
    write_clinical_csv(cohort, dir / "c2.csv");
    const Cohort back = load_cohort(dir / "f2.csv", dir / "c2.csv");
    REQUIRE(back.records.size() == cohort.records.size());
    for (std::size_t i = 0; i < back.records.size(); ++i) {
        CHECK(back.records[i].patient_id == cohort.records[i].patient_id);
        CHECK(back.records[i].eye == cohort.records[i].eye);
        CHECK(back.records[i].risk_label == cohort.records[i].risk_label);
        CHECK(back.records[i].radiomics == cohort.records[i].radiomics);
        CHECK(back.records[i].clinical == cohort.records[i].clinical);
    }
    fs::remove_all(dir);
}

TEST_CASE("preprocessor imputes, scales, and one-hot encodes from train rows only") {
    DesignMatrix dm;
    dm.columns = {"OCT_mean", "sex"};
    dm.kinds = {ColumnKind::Numeric, ColumnKind::Categorical};
    dm.groups = {Group::R, Group::D};
    dm.cells = {
        {CellValue::num(1), CellValue::cat("b")},
        {CellValue::num(2), CellValue::cat("a")},
        {CellValue::num(3), CellValue::cat("b")},
        {CellValue::missing(), CellValue::missing()},
        {CellValue::num(100), CellValue::cat("z")},  // test-only row with an unseen level
    };
    dm.labels = {0, 0, 1, 1, 1};
    dm.patients = {"P1", "P2", "P3", "P4", "P5"};
    dm.eyes = {"OD", "OD", "OD", "OD", "OD"};

    const std::vector<std::size_t> train = {0, 1, 2, 3};
    const preprocess::Preprocessor pre = preprocess::fit_preprocessor(dm, train);

    CHECK(pre.expanded_names ==
          std::vector<std::string>{"OCT_mean", "sex=a", "sex=b", "sex=unseen"});
    CHECK(pre.expanded_is_indicator ==
          std::vector<bool>{false, true, true, true});
    CHECK(pre.expanded_source == std::vector<std::size_t>{0, 1, 1, 1});

    // median of {1,2,3} = 2; imputed train column {1,2,3,2}: mean 2, sd sqrt(0.5)
    const Matrix X = preprocess::apply_preprocessor(pre, dm, train);
    const double sd = std::sqrt(0.5);
    CHECK(X(0, 0) == doctest::Approx((1 - 2) / sd));
    CHECK(X(1, 0) == doctest::Approx(0.0));
    CHECK(X(3, 0) == doctest::Approx(0.0));  // missing -> median -> centered to 0

    // categorical: mode of {b,a,b} is "b"; the missing cell takes it
    CHECK(X(0, 2) == 1.0);  // sex=b
    CHECK(X(1, 1) == 1.0);  // sex=a
    CHECK(X(3, 2) == 1.0);  // imputed to mode
    CHECK(X(3, 1) == 0.0);
    CHECK(X(3, 3) == 0.0);

    // unseen level at apply time -> the reserved indicator
    const std::vector<std::size_t> test = {4};
    const Matrix T = preprocess::apply_preprocessor(pre, dm, test);
    CHECK(T(0, 1) == 0.0);
    CHECK(T(0, 2) == 0.0);
    CHECK(T(0, 3) == 1.0);

    // expanded_for_sources maps source names to expanded indices in order
    const std::vector<std::string> want = {"sex"};
    CHECK(pre.expanded_for_sources(want) == std::vector<std::size_t>{1, 2, 3});
    const std::vector<std::string> both = {"sex", "OCT_mean"};
    CHECK(pre.expanded_for_sources(both) == std::vector<std::size_t>{0, 1, 2, 3});
    const std::vector<std::string> unknown = {"nope"};
    CHECK_THROWS_AS(pre.expanded_for_sources(unknown), DataError);
}

TEST_CASE("constant numeric columns scale by 1 and mode ties break lexicographically") {
    DesignMatrix dm;
    dm.columns = {"OCT_mean", "smoking"};
    dm.kinds = {ColumnKind::Numeric, ColumnKind::Categorical};
    dm.groups = {Group::R, Group::D};
    dm.cells = {
        {CellValue::num(4), CellValue::cat("non")},
        {CellValue::num(4), CellValue::cat("ex")},
        {CellValue::num(4), CellValue::missing()},
    };
    dm.labels = {0, 1, 1};
    dm.patients = {"P1", "P2", "P3"};
    dm.eyes = {"OD", "OD", "OD"};
    const std::vector<std::size_t> train = {0, 1, 2};
    const preprocess::Preprocessor pre = preprocess::fit_preprocessor(dm, train);
    const Matrix X = preprocess::apply_preprocessor(pre, dm, train);
    CHECK(X(0, 0) == 0.0);  // (4-4)/1
    // tie between "ex" and "non" resolves to the lexicographically first
    const int ex_col = pre.expanded_index("smoking=ex");
    REQUIRE(ex_col >= 0);
    CHECK(X(2, static_cast<std::size_t>(ex_col)) == 1.0);
}

}  // TEST_SUITE
