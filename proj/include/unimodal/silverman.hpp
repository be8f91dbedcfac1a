#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "unimodal/rng.hpp"
#include "unimodal/sample.hpp"
#include "unimodal/table_types.hpp"

namespace unimodal {

inline constexpr int kDefaultGridSize = 512;
inline constexpr int kDefaultBootstrapReps = 999;
inline constexpr int kDefaultDigits = 6;
/// Adjusted p-values under this are reported as exactly 0.
inline constexpr double kAdjustedZeroBelow = 0.005;

/// Gaussian kernel density sampled on an equispaced grid spanning
/// [min - 3h, max + 3h].
struct KdeGrid {
  std::vector<double> points;
  std::vector<double> density;
  double bandwidth = 0.0;
};

KdeGrid kde_gaussian(std::span<const double> data, double h,
                     int grid_size = kDefaultGridSize);
inline KdeGrid kde_gaussian(const Sample& s, double h,
                            int grid_size = kDefaultGridSize) {
  return kde_gaussian(s.values(), h, grid_size);
}

/// Number of local maxima. A run of equal values counts once, and only when
/// both of its neighbours (if any) are strictly smaller.
int count_modes(std::span<const double> density);
inline int count_modes(const KdeGrid& g) { return count_modes(g.density); }

/// Modes of the KDE at bandwidth h, skipping the KdeGrid allocation.
int count_kde_modes(std::span<const double> data, double h,
                    int grid_size = kDefaultGridSize);

struct CriticalBandwidth {
  double h = 0.0;
  /// True when no tested bandwidth produced more than k modes; h is then the
  /// smallest bandwidth tried.
  bool boundary = false;
};

/// Smallest bandwidth whose KDE has at most k modes, to relative width
/// rel_tol. Throws degenerate_spread for zero standard deviation.
CriticalBandwidth critical_bandwidth(const Sample& s, int k, double rel_tol = 1e-6,
                                     int grid_size = kDefaultGridSize);
CriticalBandwidth critical_bandwidth(std::span<const double> data, int k,
                                     double rel_tol = 1e-6,
                                     int grid_size = kDefaultGridSize);

/// Variance-preserving smoothed bootstrap:
/// y_i = m + (x*_i - m + h e_i) / sqrt(1 + h^2 / sd^2), with x* a resample
/// of s, m its mean, e_i standard normal and sd = sample_sd(s).
std::vector<double> smoothed_bootstrap(const Sample& s, double h, Rng& rng);

struct SilvermanPValue {
  double h_crit = 0.0;
  double p = 1.0;
  bool boundary = false;
};

/// p = #{bootstrap KDEs at h_crit with more than k modes} / M.
/// Replication i draws from rng.substream(i).
SilvermanPValue silverman_pvalue(const Sample& s, int k, int M, const Rng& rng,
                                 unsigned workers = 0,
                                 int grid_size = kDefaultGridSize);

struct AdjustedPValue {
  double p = 0.0;
  bool zero_floor = false;    // adjusted p below 0.005, reported as 0
  bool passthrough = false;   // p above the curve's domain, returned as is
};

/// Maps an unadjusted k = 1 p-value through the calibration curve (monotone
/// piecewise-cubic), rounding to `digits` decimals.
AdjustedPValue hall_york_adjust_detail(double p, const CalibrationCurve& curve,
                                       int digits = kDefaultDigits);
inline double hall_york_adjust(double p, const CalibrationCurve& curve,
                               int digits = kDefaultDigits) {
  return hall_york_adjust_detail(p, curve, digits).p;
}

struct SilvermanOptions {
  int k = 1;
  int M = kDefaultBootstrapReps;
  bool adjust = false;
  int digits = kDefaultDigits;
  std::optional<std::uint64_t> seed;  // drawn from std::random_device if unset
  unsigned workers = 0;
  int grid_size = kDefaultGridSize;
};

struct SilvermanTestResult {
  int k = 1;
  double h_crit = 0.0;
  double p_value = 1.0;
  double unadjusted_p = 1.0;
  int M = kDefaultBootstrapReps;
  bool adjusted = false;
  int digits = kDefaultDigits;
  std::uint64_t seed = 0;
  bool boundary = false;
  std::vector<std::string> warnings;

  friend bool operator==(const SilvermanTestResult&,
                         const SilvermanTestResult&) = default;
};

std::string silverman_null_hypothesis(int k);

/// `curve` is only consulted when options.adjust is set and k = 1.
SilvermanTestResult silverman_test(const Sample& s, const SilvermanOptions& options,
                                   const CalibrationCurve* curve = nullptr);

struct ModeStep {
  int k = 0;
  double h_crit = 0.0;
  double p_value = 0.0;
  bool rejected = false;
};

struct ModeEstimate {
  int modes = 0;
  bool inconclusive = false;  // every k up to k_max was rejected
  std::uint64_t seed = 0;
  std::vector<ModeStep> trace;
};

/// Unadjusted Silverman tests for k = 1, 2, ... with the same seed; stops at
/// the first k with p >= alpha.
ModeEstimate estimate_num_modes(const Sample& s, double alpha, int k_max, int M,
                                std::optional<std::uint64_t> seed = std::nullopt,
                                unsigned workers = 0);

}  // namespace unimodal
