#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "coxplain/survival.hpp"

namespace coxplain {

// Column roles for tabular survival files. Categorical columns expand to one
// indicator per category (sorted category order; optionally dropping the
// first as reference).
struct ColumnSpec {
  enum class Kind { Numeric, Categorical, Time, Event };
  std::string name;
  Kind kind = Kind::Numeric;
  std::vector<std::string> categories;  // categorical only
  bool drop_reference = false;          // k-1 indicators instead of k
};

enum class MissingPolicy { DropRow, Error };

struct LoadResult {
  Dataset dataset;
  std::size_t dropped_rows = 0;
};

// Reads a headered CSV against the schema: expands categoricals, applies the
// missing-value policy ("NA" or empty cells), and returns the dataset plus
// the number of dropped rows. Unknown categories and non-numeric cells throw
// with the offending row and column named.
LoadResult load_csv(const std::string& path,
                    const std::vector<ColumnSpec>& schema,
                    MissingPolicy policy = MissingPolicy::DropRow);

// Writers/readers for the plain dataset schema: feature columns by name,
// then "time" and "event" (0/1). Values round-trip exactly.
void save_dataset_csv(const Dataset& dataset, const std::string& path);
Dataset load_dataset_csv(const std::string& path);

// Shipped schemas for the two benchmark files under data/.
std::vector<ColumnSpec> veteran_schema();
std::vector<ColumnSpec> lung_schema();

// ---------------------------------------------------------------------------
// Experiment reports.

struct ReportRow {
  std::string label;
  std::map<std::string, double> metrics;  // ordered keys, deterministic dump
  bool operator==(const ReportRow&) const = default;
};

struct SweepPoint {
  double gamma = 0.0;
  double lambda = 0.0;
  double mrse = 0.0;
  bool operator==(const SweepPoint&) const = default;
};

struct SfPoint {
  double time = 0.0;
  double value = 0.0;
  std::string series;
  bool operator==(const SfPoint&) const = default;
};

struct ExperimentReport {
  std::string kind;
  std::uint64_t seed = 0;
  std::string config_echo;  // JSON text of the config that produced the run
  std::vector<ReportRow> rows;
  std::vector<ReportRow> aggregates;
  std::vector<SweepPoint> sweep;
  std::size_t dropped_rows = 0;
  // Figure name -> long-format survival-curve rows, exported as CSV sidecars.
  std::vector<std::pair<std::string, std::vector<SfPoint>>> curves;
  // Not serialized: reports are byte-reproducible from (config, seed), so
  // timing lives in a separate metadata file.
  double wall_clock_seconds = 0.0;

  bool operator==(const ExperimentReport& other) const {
    return kind == other.kind && seed == other.seed &&
           config_echo == other.config_echo && rows == other.rows &&
           aggregates == other.aggregates && sweep == other.sweep &&
           dropped_rows == other.dropped_rows && curves == other.curves;
  }
};

// Writes <path> as canonical JSON, one CSV sidecar per figure next to it
// (<stem>_<figure>.csv with columns time,value,series), and <stem>_meta.json
// with the wall clock.
void save_report(const ExperimentReport& report, const std::string& path);
ExperimentReport load_report(const std::string& path);

}  // namespace coxplain
