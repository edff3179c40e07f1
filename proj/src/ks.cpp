#include "coxplain/ks.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace coxplain {

namespace {

// CDF of the Kolmogorov distribution, alternating series.
double kolmogorov_cdf(double x) {
  if (x <= 0.0) return 0.0;
  double sum = 0.0;
  for (int i = 1; i <= 200; ++i) {
    const double term = std::exp(-2.0 * i * i * x * x);
    sum += (i % 2 == 1) ? term : -term;
    if (term < 1e-16 * (1.0 + sum)) break;
  }
  return 1.0 - 2.0 * sum;
}

}  // namespace

double ks_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("ks_quantile: p must lie in (0, 1)");
  }
  double lo = 0.0, hi = 4.0;
  while (kolmogorov_cdf(hi) < p) hi *= 2.0;
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double q = kolmogorov_cdf(mid);
    if (std::abs(q - p) <= 1e-10) return mid;
    (q < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double ks_band_halfwidth(int n, double gamma) {
  if (n < 1) throw std::invalid_argument("ks_band_halfwidth: n must be >= 1");
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("ks_band_halfwidth: gamma must lie in (0, 1)");
  }
  const double k = ks_quantile(1.0 - gamma);
  const double root_n = std::sqrt(static_cast<double>(n));
  if (n > 10) return k / root_n;
  return k / (root_n + 0.12 + 0.11 / root_n);
}

std::pair<std::vector<double>, std::vector<double>> cdf_bounds(
    const std::vector<double>& f, double halfwidth) {
  std::vector<double> lower(f.size()), upper(f.size());
  for (std::size_t j = 0; j < f.size(); ++j) {
    lower[j] = std::max(f[j] - halfwidth, 0.0);
    upper[j] = std::min(f[j] + halfwidth, 1.0);
  }
  return {std::move(lower), std::move(upper)};
}

double chf_delta(const ChfCurve& chf, double halfwidth, double epsilon) {
  return std::max(chf.max_value() - epsilon, 0.0) * halfwidth;
}

ThetaBand theta_band(const ChfCurve& chf_k, const ChfCurve& baseline,
                     double delta, double epsilon) {
  if (!chf_k.grid()->same_as(*baseline.grid())) {
    throw std::invalid_argument("theta_band: curves live on different grids");
  }
  if (delta < 0.0) throw std::invalid_argument("theta_band: delta must be >= 0");

  const std::size_t m1 = chf_k.interval_count();
  const double h_max = chf_k.max_value();
  ThetaBand band;
  band.lower.resize(m1);
  band.upper.resize(m1);
  for (std::size_t j = 0; j < m1; ++j) {
    const double h = chf_k.value(j);
    const double h0 = baseline.value(j);
    const double log_h0 = std::log(h0);
    band.lower[j] = std::log(std::max(h - delta, epsilon)) - log_h0;
    band.upper[j] = std::log(std::min(h + delta, h_max)) - log_h0;
  }
  band.q_upper = *std::max_element(band.upper.begin(), band.upper.end());
  band.r_lower = *std::min_element(band.lower.begin(), band.lower.end());
  return band;
}

}  // namespace coxplain
