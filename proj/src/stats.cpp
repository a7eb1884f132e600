#include "transit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "transit/common.hpp"
#include "transit/parallel.hpp"

namespace transit {

namespace {

struct BinLayout {
  std::vector<double> edges;
  double log_min = 0.0;
  double log_span = 0.0;
};

BinLayout make_layout(double w_min, double w_max, std::size_t n_bins) {
  BinLayout layout;
  layout.log_min = std::log(w_min);
  layout.log_span = std::log(w_max) - layout.log_min;
  layout.edges.resize(n_bins + 1);
  for (std::size_t i = 0; i <= n_bins; ++i) {
    layout.edges[i] =
        std::exp(layout.log_min + layout.log_span * static_cast<double>(i) /
                                      static_cast<double>(n_bins));
  }
  layout.edges.front() = w_min;
  layout.edges.back() = w_max;
  return layout;
}

std::size_t bin_index(const BinLayout& layout, double w, std::size_t n_bins) {
  double t = (std::log(w) - layout.log_min) / layout.log_span * static_cast<double>(n_bins);
  auto i = static_cast<std::size_t>(std::clamp(t, 0.0, static_cast<double>(n_bins - 1)));
  if (i >= n_bins) i = n_bins - 1;
  while (i > 0 && w < layout.edges[i]) --i;
  while (i + 1 < n_bins && w >= layout.edges[i + 1]) ++i;
  return i;
}

BinnedDistribution binned_from_counts(BinLayout layout, std::vector<std::size_t> counts,
                                      std::size_t n_positive, std::size_t zeros) {
  BinnedDistribution dist;
  dist.counts = std::move(counts);
  dist.n_positive = n_positive;
  dist.zeros_excluded = zeros;
  dist.densities.resize(dist.counts.size());
  for (std::size_t i = 0; i < dist.counts.size(); ++i) {
    double width = layout.edges[i + 1] - layout.edges[i];
    dist.densities[i] =
        static_cast<double>(dist.counts[i]) / (static_cast<double>(n_positive) * width);
  }
  dist.bin_edges = std::move(layout.edges);
  return dist;
}

struct Support {
  std::size_t zeros = 0;
  std::size_t positives = 0;
  double min = 0.0;
  double max = 0.0;
};

Support scan_support(std::span<const double> weights, std::size_t n_bins) {
  if (n_bins == 0) fail_input("n_bins must be positive");
  Support s;
  s.min = std::numeric_limits<double>::infinity();
  s.max = 0.0;
  for (double w : weights) {
    if (w < 0.0 || !std::isfinite(w)) fail_input("weights must be finite and non-negative");
    if (w == 0.0) {
      ++s.zeros;
      continue;
    }
    ++s.positives;
    s.min = std::min(s.min, w);
    s.max = std::max(s.max, w);
  }
  if (s.positives == 0) fail_degenerate("no positive support");
  if (s.min == s.max) fail_degenerate("degenerate support (all positive weights equal)");
  return s;
}

struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

LogLogFit ols(std::span<const double> x, std::span<const double> y) {
  const auto n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) fail_degenerate("regression abscissae are all equal");
  LogLogFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (syy == 0.0) {
    fit.r_squared = 1.0;
  } else {
    double ss_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - (fit.intercept + fit.slope * x[i]);
      ss_res += r * r;
    }
    fit.r_squared = std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
  }
  return fit;
}

void nonempty_log_points(const BinnedDistribution& dist, std::vector<double>& lx,
                         std::vector<double>& ly) {
  for (std::size_t i = 0; i < dist.n_bins(); ++i) {
    if (dist.counts[i] == 0) continue;
    lx.push_back(std::log(dist.center(i)));
    ly.push_back(std::log(dist.densities[i]));
  }
}

double quantile(const std::vector<double>& sorted, double p) {
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

template <bool Parallel>
SmoothedCurve smooth(std::span<const double> x, std::span<const double> y, double bandwidth,
                     std::span<const double> grid) {
  if (x.size() != y.size()) fail_input("x and y lengths differ");
  if (x.size() < 2) fail_degenerate("need at least 2 sample points to smooth");
  const double h = bandwidth > 0.0 ? bandwidth : silverman_bandwidth(x);

  SmoothedCurve curve;
  curve.grid.assign(grid.begin(), grid.end());
  const std::size_t m = grid.size();
  curve.mean.assign(m, 0.0);
  curve.ci_low.assign(m, 0.0);
  curve.ci_high.assign(m, 0.0);
  curve.defined.assign(m, 0);

  auto eval = [&](std::size_t gi) {
    const double g = grid[gi];
    double s0 = 0.0, s1 = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double u = (g - x[i]) / h;
      const double k = std::exp(-0.5 * u * u);
      s0 += k;
      s1 += k * y[i];
      s2 += k * k;
    }
    if (s0 <= 0.0) return;  // kernel mass underflowed, point stays undefined
    const double mean = s1 / s0;
    double wss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double u = (g - x[i]) / h;
      const double k = std::exp(-0.5 * u * u);
      const double r = y[i] - mean;
      wss += k * r * r;
    }
    const double variance = wss / s0;
    const double n_eff = s0 * s0 / s2;
    const double margin = 1.96 * std::sqrt(variance / n_eff);
    curve.mean[gi] = mean;
    curve.ci_low[gi] = mean - margin;
    curve.ci_high[gi] = mean + margin;
    curve.defined[gi] = 1;
  };

  if constexpr (Parallel) {
#pragma omp parallel for schedule(static)
    for (long long gi = 0; gi < static_cast<long long>(m); ++gi) {
      eval(static_cast<std::size_t>(gi));
    }
  } else {
    for (std::size_t gi = 0; gi < m; ++gi) eval(gi);
  }
  return curve;
}

}  // namespace

double BinnedDistribution::center(std::size_t bin) const {
  return std::sqrt(bin_edges[bin] * bin_edges[bin + 1]);
}

BinnedDistribution log_binned_density(std::span<const double> weights, std::size_t n_bins) {
  const Support s = scan_support(weights, n_bins);
  const BinLayout layout = make_layout(s.min, s.max, n_bins);
  std::vector<std::size_t> counts(n_bins, 0);
#pragma omp parallel
  {
    std::vector<std::size_t> local(n_bins, 0);
#pragma omp for schedule(static) nowait
    for (long long i = 0; i < static_cast<long long>(weights.size()); ++i) {
      const double w = weights[static_cast<std::size_t>(i)];
      if (w > 0.0) ++local[bin_index(layout, w, n_bins)];
    }
#pragma omp critical
    for (std::size_t b = 0; b < n_bins; ++b) counts[b] += local[b];
  }
  return binned_from_counts(layout, std::move(counts), s.positives, s.zeros);
}

BinnedDistribution log_binned_density_serial(std::span<const double> weights, std::size_t n_bins) {
  const Support s = scan_support(weights, n_bins);
  const BinLayout layout = make_layout(s.min, s.max, n_bins);
  std::vector<std::size_t> counts(n_bins, 0);
  for (double w : weights) {
    if (w > 0.0) ++counts[bin_index(layout, w, n_bins)];
  }
  return binned_from_counts(layout, std::move(counts), s.positives, s.zeros);
}

double PowerLawFit::density_at(double w) const { return std::exp(intercept + alpha * std::log(w)); }

PowerLawFit fit_power_law(const BinnedDistribution& dist) {
  std::vector<double> lx, ly;
  nonempty_log_points(dist, lx, ly);
  if (lx.size() < 3) fail_degenerate("insufficient support: need >= 3 non-empty bins");
  const LogLogFit fit = ols(lx, ly);
  return {fit.slope, fit.intercept, fit.r_squared};
}

PowerLawFit fit_power_law_mle(std::span<const double> weights, const BinnedDistribution& dist) {
  double x_min = std::numeric_limits<double>::infinity();
  for (double w : weights) {
    if (w > 0.0) x_min = std::min(x_min, w);
  }
  if (!std::isfinite(x_min)) fail_degenerate("no positive support");
  double log_sum = 0.0;
  std::size_t n = 0;
  for (double w : weights) {
    if (w > 0.0) {
      log_sum += std::log(w / x_min);
      ++n;
    }
  }
  if (n < 2 || log_sum <= 0.0) fail_degenerate("degenerate support (all positive weights equal)");
  const double exponent_hat = 1.0 + static_cast<double>(n) / log_sum;

  PowerLawFit fit;
  fit.alpha = -exponent_hat;
  // continuous power-law normalization on [x_min, inf)
  fit.intercept = std::log(exponent_hat - 1.0) + (exponent_hat - 1.0) * std::log(x_min);

  std::vector<double> lx, ly;
  nonempty_log_points(dist, lx, ly);
  if (lx.size() >= 3) {
    double my = 0.0;
    for (double v : ly) my += v;
    my /= static_cast<double>(ly.size());
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      const double r = ly[i] - (fit.intercept + fit.alpha * lx[i]);
      ss_res += r * r;
      ss_tot += (ly[i] - my) * (ly[i] - my);
    }
    fit.r_squared = ss_tot == 0.0 ? 1.0 : std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0);
  }
  return fit;
}

EmpiricalCdf::EmpiricalCdf(std::span<const double> weights)
    : sorted_(weights.begin(), weights.end()) {
  if (sorted_.empty()) fail_degenerate("empty input to empirical CDF");
  std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalCdf::operator()(double w) const {
  const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), w);
  return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

CdfCrossing cdf_crossing(const EmpiricalCdf& demand, const EmpiricalCdf& supply) {
  std::vector<double> points;
  points.reserve(demand.sorted().size() + supply.sorted().size());
  std::merge(demand.sorted().begin(), demand.sorted().end(), supply.sorted().begin(),
             supply.sorted().end(), std::back_inserter(points));
  points.erase(std::unique(points.begin(), points.end()), points.end());

  std::vector<double> diff(points.size());
  bool all_zero = true;
  for (std::size_t i = 0; i < points.size(); ++i) {
    diff[i] = demand(points[i]) - supply(points[i]);
    if (diff[i] != 0.0) all_zero = false;
  }
  if (all_zero) return {CdfCrossing::Kind::Coincident, 0.0};

  int prev_sign = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const int sign = diff[i] > 0.0 ? 1 : diff[i] < 0.0 ? -1 : 0;
    if (sign == 0) continue;
    if (prev_sign != 0 && sign != prev_sign) {
      // adjacent evaluation points bracketing the change; intermediate exact
      // zeros, if any, are the crossing itself
      std::size_t hi = i;
      std::size_t lo = i - 1;
      if (diff[lo] == 0.0) return {CdfCrossing::Kind::Crossing, points[lo]};
      const double t = diff[lo] / (diff[lo] - diff[hi]);
      return {CdfCrossing::Kind::Crossing, points[lo] + t * (points[hi] - points[lo])};
    }
    prev_sign = sign;
  }
  return {CdfCrossing::Kind::NoCrossing, 0.0};
}

double silverman_bandwidth(std::span<const double> x) {
  if (x.size() < 2) fail_input("need at least 2 points for bandwidth selection");
  const auto n = static_cast<double>(x.size());
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1.0));

  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());
  const double iqr = quantile(sorted, 0.75) - quantile(sorted, 0.25);

  double spread = sd;
  if (iqr > 0.0) spread = std::min(spread, iqr / 1.34);
  const double h = 0.9 * spread * std::pow(n, -0.2);
  if (!(h > 0.0)) fail_degenerate("auto bandwidth collapsed to zero (constant sample)");
  return h;
}

SmoothedCurve nadaraya_watson(std::span<const double> x, std::span<const double> y,
                              double bandwidth, std::span<const double> grid) {
  return smooth<true>(x, y, bandwidth, grid);
}

SmoothedCurve nadaraya_watson_serial(std::span<const double> x, std::span<const double> y,
                                     double bandwidth, std::span<const double> grid) {
  return smooth<false>(x, y, bandwidth, grid);
}

AllometricFit allometric_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) fail_input("x and y lengths differ");
  std::vector<double> lx, ly;
  lx.reserve(x.size());
  ly.reserve(x.size());
  std::size_t excluded = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > 0.0 && y[i] > 0.0) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    } else {
      ++excluded;
    }
  }
  if (lx.size() < 3) fail_degenerate("fewer than 3 positive pairs for the allometric fit");
  const LogLogFit fit = ols(lx, ly);
  AllometricFit out;
  out.beta = fit.slope;
  out.a = std::exp(fit.intercept);
  out.r_squared = fit.r_squared;
  out.excluded_pairs = excluded;
  return out;
}

}  // namespace transit
