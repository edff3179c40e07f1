#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "coxplain/data_io.hpp"
#include "coxplain/datagen.hpp"
#include "coxplain/explain.hpp"
#include "coxplain/rsf.hpp"

namespace coxplain {

// Config for the four experiment families. Serializes to/from JSON for the
// command line; unspecified fields keep these defaults.
struct ExperimentConfig {
  std::string kind = "synthetic-cox";  // synthetic-cox | synthetic-rsf |
                                       // contamination | real
  std::uint64_t seed = 0;

  // Training/testing sizes for the three-condition runs.
  int large_n = 200;
  int small_n = 20;
  int test_n = 10;

  // Contamination protocol sizes.
  int contam_large_n = 500;
  int contam_small_n = 20;
  int contam_test_n = 100;
  std::vector<std::string> families = {"cox", "rsf"};  // contamination only
  double contam_gamma = 0.005;  // the "with bounds" column

  // Band/regularization settings.
  std::vector<double> gamma_grid = {0.005, 0.01, 0.05, 0.1, 1.0};
  std::vector<double> lambda_grid;  // empty = 13 log-uniform points per family
  // Ridge used by the table runs, per black-box family: the forest surrogate
  // needs far stronger shrinkage than the Cox one (its sweep bottoms out
  // around 1e4), so the defaults differ by orders of magnitude.
  double lambda_explain_cox = 1.0;
  double lambda_explain_rsf = 1e4;
  double gamma_e3_cox = 0.1;
  double gamma_e3_rsf = 0.005;
  bool best_gamma_mode = false;  // pick E3's gamma per instance by lowest RSE

  // Sweep target.
  std::string sweep_model = "cox";  // cox | rsf
  std::string sweep_size = "large";

  // Synthetic generator (defaults mirror the clean-data protocol).
  std::vector<double> b_true = {-0.25, 1e-6, -0.1, 0.35, 1e-6};
  double gen_scale = 1e-5;
  double gen_shape = 2.0;
  double gen_truncation = 2000.0;
  double gen_censor_prob = 0.1;
  double data_radius = 8.0;

  // Real data.
  std::string dataset_path;
  std::string schema;  // veteran | lung
  bool standardize = true;

  // Explanation settings.
  int n_neighbors = 1000;
  double explain_radius = 0.1;
  double epsilon = kDefaultEpsilon;

  // Forest settings.
  RsfParams rsf;

  std::string to_json() const;
  static ExperimentConfig from_json(const std::string& text);
};

// Seeded subsample without replacement; the result is a sample-identical
// subset of the input (how small training sets are cut from large ones).
Dataset sample_subset(const Dataset& dataset, int count, std::uint64_t seed);

// z-score transform fitted on a training set; constant columns pass through.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> sigma;

  static Standardizer fit(const Dataset& dataset);
  Dataset apply(const Dataset& dataset) const;
  std::vector<double> apply_point(const std::vector<double>& x) const;
  // Coefficients found in standardized space, mapped back to raw units.
  std::vector<double> destandardize_coefficients(
      const std::vector<double>& b) const;
};

// Large/small training with and without bands: per test instance, E1 (large,
// no bands), E2 (small, no bands), E3 (small, with bands at the per-family
// fixed gamma or the best grid gamma). Emits per-instance rows plus an MRSE
// aggregate, and survival-curve sidecar data for the first instance.
ExperimentReport run_three_condition(const ExperimentConfig& config);

// Clean and contaminated training sets at both sizes for each model family;
// MRSE columns S1..S4 over the test examples.
ExperimentReport run_contamination(const ExperimentConfig& config);

// MRSE surface over gamma_grid x lambda_grid, one neighborhood per test
// point shared across the whole grid.
ExperimentReport run_sweep(const ExperimentConfig& config);

// Dispatch on config.kind.
ExperimentReport run_experiment(const ExperimentConfig& config);

// Plain-text rendering of a report's tables (for the `report` subcommand).
std::string render_report(const ExperimentReport& report);

}  // namespace coxplain
