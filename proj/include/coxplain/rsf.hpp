#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "coxplain/survival.hpp"

namespace coxplain {

struct RsfParams {
  int n_trees = 100;
  int min_leaf_size = 3;
  int features_per_split = 0;  // 0 means ceil(sqrt(d))
  bool bootstrap = true;
  std::uint64_t seed = 0;
};

// Flat node storage: feature < 0 marks a leaf holding the Nelson-Aalen values
// of its training samples on the forest's shared grid.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  std::vector<double> leaf_values;
};

class SurvivalTree {
 public:
  explicit SurvivalTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  const std::vector<double>& route(const std::vector<double>& x) const;

 private:
  std::vector<TreeNode> nodes_;
};

class RsfModel {
 public:
  RsfModel(RsfParams params, std::vector<SurvivalTree> trees, TimeGridPtr grid,
           double epsilon, std::size_t dim);

  const RsfParams& params() const { return params_; }
  const std::vector<SurvivalTree>& trees() const { return trees_; }
  const TimeGridPtr& grid() const { return grid_; }
  double epsilon() const { return epsilon_; }
  std::size_t dim() const { return dim_; }

  // Pointwise mean over trees of the routed leaf curves.
  ChfCurve predict_chf(const std::vector<double>& x) const;

 private:
  RsfParams params_;
  std::vector<SurvivalTree> trees_;
  TimeGridPtr grid_;
  double epsilon_;
  std::size_t dim_ = 0;
};

// Grows n_trees log-rank trees on bootstrap resamples. Candidate thresholds
// are midpoints between consecutive sorted unique feature values; trees with
// no valid root split degenerate to a single leaf. Deterministic per seed,
// with independent per-tree substreams.
RsfModel fit_rsf(const Dataset& dataset, const RsfParams& params,
                 double epsilon = kDefaultEpsilon);

// Two-group log-rank chi-square statistic for samples (times, events) with
// in_left marking group membership; returns a negative value when the
// statistic is undefined (no events or zero variance). Exposed for the
// splitter's oracle tests.
double log_rank_statistic(std::span<const double> times,
                          std::span<const char> events,
                          std::span<const char> in_left);

std::string rsf_to_json(const RsfModel& model);
RsfModel rsf_from_json(const std::string& text);

}  // namespace coxplain
