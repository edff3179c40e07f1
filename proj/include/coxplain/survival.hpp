#pragma once

#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace coxplain {

// Floor applied to every cumulative hazard value so logarithms stay defined.
inline constexpr double kDefaultEpsilon = 1e-5;

// One censored observation: covariates, time on study, and whether the event
// of interest was observed (false = right-censored).
struct SurvivalSample {
  std::vector<double> features;
  double event_time = 0.0;
  bool event_observed = false;
};

class Dataset {
 public:
  Dataset() = default;
  // Validates that every sample has dimension feature_names.size() and a
  // finite, non-negative time. An all-censored dataset is representable;
  // operations that need an event grid reject it instead.
  Dataset(std::vector<SurvivalSample> samples,
          std::vector<std::string> feature_names);

  std::size_t size() const { return samples_.size(); }
  std::size_t dim() const { return feature_names_.size(); }
  const SurvivalSample& operator[](std::size_t i) const { return samples_[i]; }
  const std::vector<SurvivalSample>& samples() const { return samples_; }
  const std::vector<std::string>& feature_names() const {
    return feature_names_;
  }
  std::size_t event_count() const;

 private:
  std::vector<SurvivalSample> samples_;
  std::vector<std::string> feature_names_;
};

// Distinct observed event times t_0 < ... < t_m plus a padded horizon
// T = t_m + pad. The grid induces m+1 half-open intervals; the last one is
// [t_m, T].
class TimeGrid {
 public:
  TimeGrid(std::vector<double> event_times, double horizon_pad);

  std::size_t interval_count() const { return times_.size(); }
  double time(std::size_t j) const { return times_[j]; }
  const std::vector<double>& times() const { return times_; }
  double horizon() const { return horizon_; }
  double horizon_pad() const { return horizon_pad_; }

  // Index of the interval containing t, clamped to [0, m] outside the span.
  std::size_t interval_of(double t) const;

  bool same_as(const TimeGrid& other) const;

 private:
  std::vector<double> times_;
  double horizon_pad_ = 0.0;
  double horizon_ = 0.0;
};

using TimeGridPtr = std::shared_ptr<const TimeGrid>;

// Piecewise-constant function on a grid: values[j] on interval j.
struct StepFunction {
  TimeGridPtr grid;
  std::vector<double> values;

  double value_at(double t) const { return values[grid->interval_of(t)]; }
};

// A step function restricted to cumulative hazards: values are >= epsilon
// and non-decreasing. Both properties are checked at construction; the floor
// is applied, monotonicity violations beyond rounding noise throw.
class ChfCurve {
 public:
  ChfCurve(TimeGridPtr grid, std::vector<double> values, double epsilon);

  const TimeGridPtr& grid() const { return step_.grid; }
  const std::vector<double>& values() const { return step_.values; }
  double epsilon() const { return epsilon_; }
  std::size_t interval_count() const { return step_.values.size(); }
  double value(std::size_t j) const { return step_.values[j]; }
  // Largest value; equals the last one by monotonicity.
  double max_value() const { return step_.values.back(); }
  double value_at(double t) const { return step_.value_at(t); }
  const StepFunction& step() const { return step_; }

 private:
  StepFunction step_;
  double epsilon_ = kDefaultEpsilon;
};

// Grid of distinct event times; horizon = max event time + horizon_pad.
// Throws if the dataset contains no observed events.
TimeGridPtr build_time_grid(const Dataset& dataset, double horizon_pad);

// Convenience overload with pad = 1e-3 * t_m.
TimeGridPtr build_time_grid(const Dataset& dataset);

// Nelson-Aalen estimate on the given grid: cumulative sum of events over
// at-risk counts, floored at epsilon.
ChfCurve nelson_aalen(const Dataset& dataset, TimeGridPtr grid,
                      double epsilon = kDefaultEpsilon);

// Same estimator restricted to a subset of sample indices (used by survival
// trees whose leaves share the full-dataset grid).
ChfCurve nelson_aalen_subset(const Dataset& dataset,
                             std::span<const int> indices, TimeGridPtr grid,
                             double epsilon = kDefaultEpsilon);

// S(t) = exp(-H(t)) pointwise.
StepFunction chf_to_sf(const ChfCurve& chf);

// Root square error between two curves on the same grid:
// sqrt(mean_j (a_j - b_j)^2). Throws on grid mismatch.
double rse(const ChfCurve& model_chf, const ChfCurve& approx_chf);

// Mean of rse over pairs; throws on an empty list.
double mrse(const std::vector<std::pair<ChfCurve, ChfCurve>>& pairs);

// Harrell's concordance index. A pair is comparable when the earlier time is
// an observed event and the times differ; score ties count 1/2. Higher score
// means higher risk. Throws when no pair is comparable.
double c_index(const std::vector<double>& risk_scores, const Dataset& dataset);

// Right-continuous re-evaluation of a curve on another grid (values clamped
// to the curve's own span at the ends).
ChfCurve resample(const ChfCurve& curve, TimeGridPtr target);

}  // namespace coxplain
