#include "coxplain/survival.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace coxplain {

Dataset::Dataset(std::vector<SurvivalSample> samples,
                 std::vector<std::string> feature_names)
    : samples_(std::move(samples)), feature_names_(std::move(feature_names)) {
  for (const auto& s : samples_) {
    if (s.features.size() != feature_names_.size()) {
      throw std::invalid_argument(
          "Dataset: sample dimension does not match feature_names");
    }
    if (!std::isfinite(s.event_time) || s.event_time < 0.0) {
      throw std::invalid_argument(
          "Dataset: event_time must be finite and non-negative");
    }
  }
}

std::size_t Dataset::event_count() const {
  return static_cast<std::size_t>(
      std::count_if(samples_.begin(), samples_.end(),
                    [](const SurvivalSample& s) { return s.event_observed; }));
}

TimeGrid::TimeGrid(std::vector<double> event_times, double horizon_pad)
    : times_(std::move(event_times)), horizon_pad_(horizon_pad) {
  if (times_.empty()) throw std::invalid_argument("TimeGrid: no event times");
  if (!(horizon_pad_ > 0.0)) {
    throw std::invalid_argument("TimeGrid: horizon_pad must be positive");
  }
  for (std::size_t j = 1; j < times_.size(); ++j) {
    if (!(times_[j] > times_[j - 1])) {
      throw std::invalid_argument("TimeGrid: times must be strictly increasing");
    }
  }
  horizon_ = times_.back() + horizon_pad_;
}

std::size_t TimeGrid::interval_of(double t) const {
  if (t <= times_.front()) return 0;
  // Largest j with times_[j] <= t.
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  return static_cast<std::size_t>(it - times_.begin()) - 1;
}

bool TimeGrid::same_as(const TimeGrid& other) const {
  return this == &other ||
         (times_ == other.times_ && horizon_ == other.horizon_);
}

ChfCurve::ChfCurve(TimeGridPtr grid, std::vector<double> values, double epsilon)
    : epsilon_(epsilon) {
  if (!grid) throw std::invalid_argument("ChfCurve: null grid");
  if (values.size() != grid->interval_count()) {
    throw std::invalid_argument("ChfCurve: values length != interval count");
  }
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("ChfCurve: epsilon must be positive");
  }
  for (auto& v : values) {
    if (!std::isfinite(v)) throw std::invalid_argument("ChfCurve: non-finite value");
    v = std::max(v, epsilon);
  }
  for (std::size_t j = 1; j < values.size(); ++j) {
    if (values[j] < values[j - 1] - 1e-12 * std::abs(values[j - 1])) {
      throw std::invalid_argument("ChfCurve: values must be non-decreasing");
    }
    values[j] = std::max(values[j], values[j - 1]);
  }
  step_ = StepFunction{std::move(grid), std::move(values)};
}

TimeGridPtr build_time_grid(const Dataset& dataset, double horizon_pad) {
  if (dataset.size() == 0) {
    throw std::invalid_argument("build_time_grid: empty dataset");
  }
  std::vector<double> times;
  for (const auto& s : dataset.samples()) {
    if (s.event_observed) times.push_back(s.event_time);
  }
  if (times.empty()) {
    throw std::invalid_argument("build_time_grid: no event times");
  }
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  return std::make_shared<TimeGrid>(std::move(times), horizon_pad);
}

TimeGridPtr build_time_grid(const Dataset& dataset) {
  double t_max = 0.0;
  for (const auto& s : dataset.samples()) {
    if (s.event_observed) t_max = std::max(t_max, s.event_time);
  }
  double pad = t_max > 0.0 ? 1e-3 * t_max : 1e-3;
  return build_time_grid(dataset, pad);
}

ChfCurve nelson_aalen_subset(const Dataset& dataset,
                             std::span<const int> indices, TimeGridPtr grid,
                             double epsilon) {
  const std::size_t m1 = grid->interval_count();

  // Sort subset sample indices by time so risk sets are suffix counts.
  std::vector<int> order(indices.begin(), indices.end());
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return dataset[static_cast<std::size_t>(a)].event_time <
           dataset[static_cast<std::size_t>(b)].event_time;
  });

  const std::size_t n = order.size();
  auto time_of = [&](std::size_t pos) {
    return dataset[static_cast<std::size_t>(order[pos])].event_time;
  };

  std::vector<double> values(m1, 0.0);
  double cum = 0.0;
  std::size_t i = 0;
  for (std::size_t j = 0; j < m1; ++j) {
    const double hi = (j + 1 < m1) ? grid->time(j + 1) : grid->horizon();
    // Consume whole tie groups; censored samples tied with an event time are
    // still at risk at that time, so groups are never split.
    while (i < n && (time_of(i) < hi || j + 1 == m1)) {
      const double tau = time_of(i);
      std::size_t events_here = 0;
      std::size_t k = i;
      while (k < n && time_of(k) == tau) {
        if (dataset[static_cast<std::size_t>(order[k])].event_observed) {
          ++events_here;
        }
        ++k;
      }
      const std::size_t at_risk = n - i;  // sorted: everyone from i has T >= tau
      if (events_here > 0) {
        cum += static_cast<double>(events_here) / static_cast<double>(at_risk);
      }
      i = k;
    }
    values[j] = cum;
  }
  return ChfCurve(std::move(grid), std::move(values), epsilon);
}

ChfCurve nelson_aalen(const Dataset& dataset, TimeGridPtr grid,
                      double epsilon) {
  std::vector<int> idx(dataset.size());
  std::iota(idx.begin(), idx.end(), 0);
  return nelson_aalen_subset(dataset, idx, std::move(grid), epsilon);
}

StepFunction chf_to_sf(const ChfCurve& chf) {
  std::vector<double> sf(chf.interval_count());
  for (std::size_t j = 0; j < sf.size(); ++j) {
    sf[j] = std::exp(-chf.value(j));
  }
  return StepFunction{chf.grid(), std::move(sf)};
}

double rse(const ChfCurve& model_chf, const ChfCurve& approx_chf) {
  if (!model_chf.grid()->same_as(*approx_chf.grid())) {
    throw std::invalid_argument("rse: curves live on different grids");
  }
  const std::size_t m1 = model_chf.interval_count();
  double sum = 0.0;
  for (std::size_t j = 0; j < m1; ++j) {
    const double d = model_chf.value(j) - approx_chf.value(j);
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(m1));
}

double mrse(const std::vector<std::pair<ChfCurve, ChfCurve>>& pairs) {
  if (pairs.empty()) throw std::invalid_argument("mrse: empty list");
  double sum = 0.0;
  for (const auto& [a, b] : pairs) sum += rse(a, b);
  return sum / static_cast<double>(pairs.size());
}

double c_index(const std::vector<double>& risk_scores, const Dataset& dataset) {
  if (risk_scores.size() != dataset.size()) {
    throw std::invalid_argument("c_index: one score per sample required");
  }
  const std::size_t n = dataset.size();
  double concordant = 0.0;
  std::size_t comparable = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto& a = dataset[i];
      const auto& b = dataset[j];
      if (a.event_time == b.event_time) continue;  // time ties not comparable
      const std::size_t early = a.event_time < b.event_time ? i : j;
      const std::size_t late = early == i ? j : i;
      if (!dataset[early].event_observed) continue;
      ++comparable;
      if (risk_scores[early] > risk_scores[late]) {
        concordant += 1.0;
      } else if (risk_scores[early] == risk_scores[late]) {
        concordant += 0.5;
      }
    }
  }
  if (comparable == 0) {
    throw std::invalid_argument("c_index: no comparable pairs");
  }
  return concordant / static_cast<double>(comparable);
}

ChfCurve resample(const ChfCurve& curve, TimeGridPtr target) {
  std::vector<double> values(target->interval_count());
  for (std::size_t j = 0; j < values.size(); ++j) {
    values[j] = curve.value_at(target->time(j));
  }
  return ChfCurve(std::move(target), std::move(values), curve.epsilon());
}

}  // namespace coxplain
