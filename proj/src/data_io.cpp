#include "coxplain/data_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace coxplain {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    // Trim surrounding whitespace and CR.
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) {
      cell.pop_back();
    }
    std::size_t start = 0;
    while (start < cell.size() && cell[start] == ' ') ++start;
    cells.push_back(cell.substr(start));
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

bool is_missing(const std::string& cell) {
  return cell.empty() || cell == "NA" || cell == "na" || cell == "NaN";
}

double parse_number(const std::string& cell, std::size_t row,
                    const std::string& column) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(cell, &pos);
    if (pos != cell.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("load_csv: non-numeric value '" + cell +
                             "' at row " + std::to_string(row) + ", column " +
                             column);
  }
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

LoadResult load_csv(const std::string& path,
                    const std::vector<ColumnSpec>& schema,
                    MissingPolicy policy) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_csv: cannot open " + path);

  std::string header_line;
  if (!std::getline(in, header_line)) {
    throw std::runtime_error("load_csv: empty file " + path);
  }
  const auto header = split_csv_line(header_line);

  // Schema column -> file column.
  std::vector<std::size_t> file_col(schema.size());
  int time_idx = -1, event_idx = -1;
  for (std::size_t s = 0; s < schema.size(); ++s) {
    const auto it = std::find(header.begin(), header.end(), schema[s].name);
    if (it == header.end()) {
      throw std::runtime_error("load_csv: column '" + schema[s].name +
                               "' not found in " + path);
    }
    file_col[s] = static_cast<std::size_t>(it - header.begin());
    if (schema[s].kind == ColumnSpec::Kind::Time) time_idx = static_cast<int>(s);
    if (schema[s].kind == ColumnSpec::Kind::Event) event_idx = static_cast<int>(s);
  }
  if (time_idx < 0 || event_idx < 0) {
    throw std::invalid_argument("load_csv: schema needs one time and one event column");
  }

  // Expanded feature names; sorted category order keeps the layout stable.
  std::vector<std::string> names;
  std::vector<std::vector<std::string>> sorted_cats(schema.size());
  for (std::size_t s = 0; s < schema.size(); ++s) {
    const auto& col = schema[s];
    if (col.kind == ColumnSpec::Kind::Numeric) {
      names.push_back(col.name);
    } else if (col.kind == ColumnSpec::Kind::Categorical) {
      if (col.categories.empty()) {
        throw std::invalid_argument("load_csv: categorical column '" + col.name +
                                    "' has no categories");
      }
      sorted_cats[s] = col.categories;
      std::sort(sorted_cats[s].begin(), sorted_cats[s].end());
      for (std::size_t c = col.drop_reference ? 1 : 0; c < sorted_cats[s].size(); ++c) {
        names.push_back(col.name + "=" + sorted_cats[s][c]);
      }
    }
  }

  std::vector<SurvivalSample> samples;
  std::size_t dropped = 0;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw std::runtime_error("load_csv: row " + std::to_string(row) +
                               " has " + std::to_string(cells.size()) +
                               " cells, expected " + std::to_string(header.size()));
    }
    bool missing = false;
    for (std::size_t s = 0; s < schema.size() && !missing; ++s) {
      missing = is_missing(cells[file_col[s]]);
    }
    if (missing) {
      if (policy == MissingPolicy::Error) {
        throw std::runtime_error("load_csv: missing value at row " +
                                 std::to_string(row));
      }
      ++dropped;
      continue;
    }

    SurvivalSample sample;
    sample.features.reserve(names.size());
    for (std::size_t s = 0; s < schema.size(); ++s) {
      const auto& col = schema[s];
      const std::string& cell = cells[file_col[s]];
      switch (col.kind) {
        case ColumnSpec::Kind::Numeric:
          sample.features.push_back(parse_number(cell, row, col.name));
          break;
        case ColumnSpec::Kind::Categorical: {
          const auto& cats = sorted_cats[s];
          const auto it = std::find(cats.begin(), cats.end(), cell);
          if (it == cats.end()) {
            throw std::runtime_error("load_csv: unknown category '" + cell +
                                     "' at row " + std::to_string(row) +
                                     ", column " + col.name);
          }
          for (std::size_t c = col.drop_reference ? 1 : 0; c < cats.size(); ++c) {
            sample.features.push_back(cats[c] == cell ? 1.0 : 0.0);
          }
          break;
        }
        case ColumnSpec::Kind::Time:
          sample.event_time = parse_number(cell, row, col.name);
          break;
        case ColumnSpec::Kind::Event: {
          const double v = parse_number(cell, row, col.name);
          if (v != 0.0 && v != 1.0) {
            throw std::runtime_error("load_csv: event flag must be 0 or 1 at row " +
                                     std::to_string(row));
          }
          sample.event_observed = v == 1.0;
          break;
        }
      }
    }
    samples.push_back(std::move(sample));
  }
  return LoadResult{Dataset(std::move(samples), std::move(names)), dropped};
}

void save_dataset_csv(const Dataset& dataset, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_dataset_csv: cannot open " + path);
  for (const auto& name : dataset.feature_names()) out << name << ",";
  out << "time,event\n";
  for (const auto& s : dataset.samples()) {
    for (const double v : s.features) out << format_double(v) << ",";
    out << format_double(s.event_time) << "," << (s.event_observed ? 1 : 0)
        << "\n";
  }
  if (!out) throw std::runtime_error("save_dataset_csv: write failed for " + path);
}

Dataset load_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_dataset_csv: cannot open " + path);
  std::string header_line;
  if (!std::getline(in, header_line)) {
    throw std::runtime_error("load_dataset_csv: empty file " + path);
  }
  const auto header = split_csv_line(header_line);
  if (header.size() < 2 || header[header.size() - 2] != "time" ||
      header.back() != "event") {
    throw std::runtime_error(
        "load_dataset_csv: expected trailing 'time,event' columns in " + path);
  }
  std::vector<std::string> names(header.begin(), header.end() - 2);
  std::vector<SurvivalSample> samples;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw std::runtime_error("load_dataset_csv: ragged row " + std::to_string(row));
    }
    SurvivalSample s;
    s.features.resize(names.size());
    for (std::size_t j = 0; j < names.size(); ++j) {
      s.features[j] = parse_number(cells[j], row, names[j]);
    }
    s.event_time = parse_number(cells[names.size()], row, "time");
    s.event_observed = parse_number(cells[names.size() + 1], row, "event") == 1.0;
    samples.push_back(std::move(s));
  }
  return Dataset(std::move(samples), std::move(names));
}

std::vector<ColumnSpec> veteran_schema() {
  using Kind = ColumnSpec::Kind;
  return {
      {"trt", Kind::Numeric, {}, false},
      {"celltype", Kind::Categorical, {"squamous", "smallcell", "adeno", "large"}, false},
      {"time", Kind::Time, {}, false},
      {"status", Kind::Event, {}, false},
      {"karno", Kind::Numeric, {}, false},
      {"diagtime", Kind::Numeric, {}, false},
      {"age", Kind::Numeric, {}, false},
      {"prior", Kind::Numeric, {}, false},
  };
}

std::vector<ColumnSpec> lung_schema() {
  using Kind = ColumnSpec::Kind;
  return {
      {"inst", Kind::Numeric, {}, false},
      {"time", Kind::Time, {}, false},
      {"status", Kind::Event, {}, false},
      {"age", Kind::Numeric, {}, false},
      {"sex", Kind::Numeric, {}, false},
      {"ph.ecog", Kind::Categorical, {"0", "1", "2", "3"}, false},
      {"ph.karno", Kind::Numeric, {}, false},
      {"pat.karno", Kind::Numeric, {}, false},
      {"meal.cal", Kind::Numeric, {}, false},
      {"wt.loss", Kind::Numeric, {}, false},
  };
}

namespace {

std::string report_stem(const std::string& path) {
  const auto dot = path.rfind(".json");
  return dot == std::string::npos ? path : path.substr(0, dot);
}

}  // namespace

void save_report(const ExperimentReport& report, const std::string& path) {
  nlohmann::ordered_json doc;
  doc["kind"] = report.kind;
  doc["seed"] = report.seed;
  doc["config"] = report.config_echo;
  doc["dropped_rows"] = report.dropped_rows;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"label", r.label}, {"metrics", r.metrics}});
  }
  doc["rows"] = std::move(rows);
  nlohmann::ordered_json aggregates = nlohmann::ordered_json::array();
  for (const auto& r : report.aggregates) {
    aggregates.push_back({{"label", r.label}, {"metrics", r.metrics}});
  }
  doc["aggregates"] = std::move(aggregates);
  nlohmann::ordered_json sweep = nlohmann::ordered_json::array();
  for (const auto& p : report.sweep) {
    sweep.push_back({{"gamma", p.gamma}, {"lambda", p.lambda}, {"mrse", p.mrse}});
  }
  doc["sweep"] = std::move(sweep);
  nlohmann::ordered_json curves = nlohmann::ordered_json::array();
  for (const auto& [figure, pts] : report.curves) {
    nlohmann::ordered_json fig;
    fig["figure"] = figure;
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& pt : pts) {
      arr.push_back({{"time", pt.time}, {"value", pt.value}, {"series", pt.series}});
    }
    fig["points"] = std::move(arr);
    curves.push_back(std::move(fig));
  }
  doc["curves"] = std::move(curves);

  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_report: cannot open " + path);
  out << doc.dump(2) << "\n";
  if (!out) throw std::runtime_error("save_report: write failed for " + path);

  const std::string stem = report_stem(path);
  for (const auto& [figure, pts] : report.curves) {
    const std::string sidecar = stem + "_" + figure + ".csv";
    std::ofstream csv(sidecar);
    if (!csv) throw std::runtime_error("save_report: cannot open " + sidecar);
    csv << "time,value,series\n";
    for (const auto& pt : pts) {
      csv << format_double(pt.time) << "," << format_double(pt.value) << ","
          << pt.series << "\n";
    }
  }
  std::ofstream meta(stem + "_meta.json");
  if (meta) {
    nlohmann::ordered_json m;
    m["wall_clock_seconds"] = report.wall_clock_seconds;
    meta << m.dump(2) << "\n";
  }
}

ExperimentReport load_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_report: cannot open " + path);
  nlohmann::json doc;
  in >> doc;

  ExperimentReport report;
  report.kind = doc.at("kind").get<std::string>();
  report.seed = doc.at("seed").get<std::uint64_t>();
  report.config_echo = doc.at("config").get<std::string>();
  report.dropped_rows = doc.at("dropped_rows").get<std::size_t>();
  for (const auto& r : doc.at("rows")) {
    ReportRow row;
    row.label = r.at("label").get<std::string>();
    row.metrics = r.at("metrics").get<std::map<std::string, double>>();
    report.rows.push_back(std::move(row));
  }
  for (const auto& r : doc.at("aggregates")) {
    ReportRow row;
    row.label = r.at("label").get<std::string>();
    row.metrics = r.at("metrics").get<std::map<std::string, double>>();
    report.aggregates.push_back(std::move(row));
  }
  for (const auto& p : doc.at("sweep")) {
    report.sweep.push_back(SweepPoint{p.at("gamma").get<double>(),
                                      p.at("lambda").get<double>(),
                                      p.at("mrse").get<double>()});
  }
  for (const auto& fig : doc.at("curves")) {
    std::vector<SfPoint> pts;
    for (const auto& pt : fig.at("points")) {
      pts.push_back(SfPoint{pt.at("time").get<double>(),
                            pt.at("value").get<double>(),
                            pt.at("series").get<std::string>()});
    }
    report.curves.emplace_back(fig.at("figure").get<std::string>(), std::move(pts));
  }
  return report;
}

}  // namespace coxplain
