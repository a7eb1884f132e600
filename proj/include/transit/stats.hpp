#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace transit {

/// Log-binned density estimate over the positive weights of one layer.
struct BinnedDistribution {
  std::vector<double> bin_edges;     // n_bins + 1, geometric progression
  std::vector<std::size_t> counts;   // per bin; last bin right-inclusive
  std::vector<double> densities;     // count / (n_positive * linear bin width)
  std::size_t n_positive = 0;
  std::size_t zeros_excluded = 0;

  std::size_t n_bins() const { return counts.size(); }
  /// Geometric mean of the bin's edges.
  double center(std::size_t bin) const;
};

BinnedDistribution log_binned_density(std::span<const double> weights, std::size_t n_bins = 50);

/// Serial reference for the binning kernel; same contract.
BinnedDistribution log_binned_density_serial(std::span<const double> weights,
                                             std::size_t n_bins = 50);

struct PowerLawFit {
  double alpha = 0.0;      // slope of log density vs log weight
  double intercept = 0.0;  // log density at log weight = 0 (natural log)
  double r_squared = 0.0;

  double density_at(double w) const;
};

/// Least squares on (log center, log density) over the non-empty bins.
PowerLawFit fit_power_law(const BinnedDistribution& dist);

/// Maximum-likelihood cross-check with x_min fixed to the smallest positive
/// weight; r_squared is measured against the binned points.
PowerLawFit fit_power_law_mle(std::span<const double> weights, const BinnedDistribution& dist);

/// Right-continuous empirical CDF.
class EmpiricalCdf {
 public:
  explicit EmpiricalCdf(std::span<const double> weights);

  double operator()(double w) const;  // fraction of weights <= w
  const std::vector<double>& sorted() const { return sorted_; }
  double min() const { return sorted_.front(); }
  double max() const { return sorted_.back(); }

 private:
  std::vector<double> sorted_;
};

inline EmpiricalCdf empirical_cdf(std::span<const double> weights) { return EmpiricalCdf(weights); }

struct CdfCrossing {
  enum class Kind { Crossing, NoCrossing, Coincident };
  Kind kind = Kind::NoCrossing;
  double weight = 0.0;  // meaningful only for Kind::Crossing
};

/// Smallest interior weight where F_demand - F_supply changes sign, found by
/// scanning the merged jump points and interpolating linearly between
/// adjacent evaluation points.
CdfCrossing cdf_crossing(const EmpiricalCdf& demand, const EmpiricalCdf& supply);

struct SmoothedCurve {
  std::vector<double> grid;
  std::vector<double> mean;
  std::vector<double> ci_low;
  std::vector<double> ci_high;
  std::vector<std::uint8_t> defined;  // 0 where all kernel weights underflowed
};

/// Silverman's rule of thumb on the given sample.
double silverman_bandwidth(std::span<const double> x);

/// Gaussian-kernel locally weighted mean with a pointwise 95% band. Pass
/// bandwidth <= 0 to auto-select via silverman_bandwidth.
SmoothedCurve nadaraya_watson(std::span<const double> x, std::span<const double> y,
                              double bandwidth, std::span<const double> grid);

/// Serial reference for the smoothing kernel; same contract.
SmoothedCurve nadaraya_watson_serial(std::span<const double> x, std::span<const double> y,
                                     double bandwidth, std::span<const double> grid);

struct AllometricFit {
  double a = 0.0;     // prefactor of y = a * x^beta
  double beta = 0.0;  // scaling exponent
  double r_squared = 0.0;
  std::size_t excluded_pairs = 0;  // pairs dropped for a non-positive value
};

/// Least squares on (ln x, ln y) over the strictly positive pairs.
AllometricFit allometric_fit(std::span<const double> x, std::span<const double> y);

}  // namespace transit
