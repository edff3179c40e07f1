#include "coxplain/data_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "coxplain/datagen.hpp"
#include "doctest.h"

using namespace coxplain;

namespace {

const std::string kDataDir = COXPLAIN_DATA_DIR;

std::string temp_path(const std::string& name) {
  return std::string("/tmp/coxplain_test_") + name;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

}  // namespace

TEST_SUITE_BEGIN("data_io");

TEST_CASE("veteran loads with the documented shape") {
  const LoadResult r = load_csv(kDataDir + "/veteran.csv", veteran_schema());
  CHECK(r.dataset.size() == 137);
  CHECK(r.dataset.dim() == 9);
  CHECK(r.dropped_rows == 0);
  CHECK(r.dataset.event_count() == 128);  // nine censored subjects
  // Expanded names are deterministic: sorted category order.
  const auto& names = r.dataset.feature_names();
  CHECK(names[0] == "trt");
  CHECK(names[1] == "celltype=adeno");
  CHECK(names[2] == "celltype=large");
  CHECK(names[3] == "celltype=smallcell");
  CHECK(names[4] == "celltype=squamous");
  // Loading twice yields identical layout.
  const LoadResult again = load_csv(kDataDir + "/veteran.csv", veteran_schema());
  CHECK(again.dataset.feature_names() == names);
}

TEST_CASE("lung loads with one-hot expansion and drops incomplete rows") {
  const LoadResult r = load_csv(kDataDir + "/lung.csv", lung_schema());
  CHECK(r.dataset.dim() == 11);
  CHECK(r.dropped_rows > 0);
  CHECK(r.dataset.size() + r.dropped_rows == 228);
  // Censored count over the full file: 63 subjects with event = 0.
  std::ifstream in(kDataDir + "/lung.csv");
  std::string line;
  std::getline(in, line);  // header: inst,time,status,...
  int censored = 0, rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++rows;
    std::stringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');  // inst
    std::getline(ss, cell, ',');  // time
    std::getline(ss, cell, ',');  // status
    if (cell == "0") ++censored;
  }
  CHECK(rows == 228);
  CHECK(censored == 63);
}

TEST_CASE("single complete row loads as a one-sample dataset") {
  const std::string path = temp_path("one_row.csv");
  write_file(path, "a,b,time,event\n1.5,2.5,3.0,1\n");
  const LoadResult r = load_csv(
      path,
      {{"a", ColumnSpec::Kind::Numeric, {}, false},
       {"b", ColumnSpec::Kind::Numeric, {}, false},
       {"time", ColumnSpec::Kind::Time, {}, false},
       {"event", ColumnSpec::Kind::Event, {}, false}});
  CHECK(r.dataset.size() == 1);
  CHECK(r.dataset[0].features == std::vector<double>{1.5, 2.5});
  CHECK(r.dataset[0].event_time == 3.0);
  CHECK(r.dataset[0].event_observed);
  std::remove(path.c_str());
}

TEST_CASE("unknown categories and bad numbers are reported with location") {
  const std::string path = temp_path("bad.csv");
  write_file(path, "g,time,event\npurple,1.0,1\n");
  const std::vector<ColumnSpec> schema = {
      {"g", ColumnSpec::Kind::Categorical, {"red", "blue"}, false},
      {"time", ColumnSpec::Kind::Time, {}, false},
      {"event", ColumnSpec::Kind::Event, {}, false}};
  CHECK_THROWS_WITH_AS(static_cast<void>(load_csv(path, schema)),
                       "load_csv: unknown category 'purple' at row 1, column g",
                       std::runtime_error);
  write_file(path, "g,time,event\nred,oops,1\n");
  CHECK_THROWS_AS(static_cast<void>(load_csv(path, schema)), std::runtime_error);
  // Missing under the Error policy also throws.
  write_file(path, "g,time,event\nred,NA,1\n");
  CHECK_THROWS_AS(
      static_cast<void>(load_csv(path, schema, MissingPolicy::Error)),
      std::runtime_error);
  std::remove(path.c_str());
}

TEST_CASE("generated datasets round trip through csv exactly") {
  WeibullCoxGen gen;
  gen.coefficients = {0.25, -0.4};
  gen.seed = 88;
  const Dataset data = gen_dataset(40, {0.0, 0.0}, 3.0, gen);
  const std::string path = temp_path("roundtrip.csv");
  save_dataset_csv(data, path);
  const Dataset back = load_dataset_csv(path);
  REQUIRE(back.size() == data.size());
  CHECK(back.feature_names() == data.feature_names());
  for (std::size_t i = 0; i < data.size(); ++i) {
    CHECK(back[i].features == data[i].features);
    CHECK(back[i].event_time == data[i].event_time);
    CHECK(back[i].event_observed == data[i].event_observed);
  }
  std::remove(path.c_str());
}

TEST_CASE("reports round trip and sidecars honor the row-count contract") {
  ExperimentReport report;
  report.kind = "synthetic-cox";
  report.seed = 42;
  report.config_echo = "{}";
  report.rows.push_back({"0", {{"E1", 0.1}, {"E2", 0.2}, {"E3", 0.3}}});
  report.rows.push_back({"1", {{"E1", 0.15}, {"E2", 0.25}, {"E3", 0.35}}});
  report.aggregates.push_back({"MRSE", {{"E1", 0.125}, {"E2", 0.225}, {"E3", 0.325}}});
  report.sweep.push_back({0.1, 10.0, 0.5});
  const std::size_t m1 = 4;
  std::vector<SfPoint> pts;
  for (const char* series : {"model", "approx"}) {
    for (std::size_t j = 0; j < m1; ++j) {
      pts.push_back({static_cast<double>(j), 1.0 / (1.0 + static_cast<double>(j)), series});
    }
  }
  report.curves.emplace_back("sf_e1", pts);
  report.wall_clock_seconds = 12.5;

  const std::string path = temp_path("report.json");
  save_report(report, path);
  const ExperimentReport back = load_report(path);
  CHECK(back == report);

  // Sidecar: header plus (m+1) x series rows.
  std::ifstream csv(temp_path("report_sf_e1.csv"));
  REQUIRE(csv.good());
  std::string line;
  int rows = 0;
  std::getline(csv, line);
  CHECK(line == "time,value,series");
  while (std::getline(csv, line)) {
    if (!line.empty()) ++rows;
  }
  CHECK(rows == static_cast<int>(m1 * 2));

  std::remove(path.c_str());
  std::remove(temp_path("report_sf_e1.csv").c_str());
  std::remove(temp_path("report_meta.json").c_str());
}

TEST_CASE("empty metric tables stay valid") {
  ExperimentReport report;
  report.kind = "empty";
  const std::string path = temp_path("empty_report.json");
  save_report(report, path);
  const ExperimentReport back = load_report(path);
  CHECK(back == report);
  CHECK(back.rows.empty());
  std::remove(path.c_str());
  std::remove(temp_path("empty_report_meta.json").c_str());
}

TEST_SUITE_END();
