#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace unimodal {

/// Quantiles of the dip statistic under uniform(0,1) samples.
/// quantiles[i][j] is the probs[j]-quantile for sample size sizes[i].
struct DipQuantileTable {
  std::vector<int> sizes;
  std::vector<double> probs;
  std::vector<std::vector<double>> quantiles;
  std::uint64_t reps_used = 0;
  std::uint64_t seed_used = 0;

  /// Throws Error(corrupt_table) when the shape or an invariant is violated:
  /// increasing sizes and probs, rows nondecreasing, entries >= 1/(2 size).
  void validate() const;

  friend bool operator==(const DipQuantileTable&, const DipQuantileTable&) = default;
};

enum class CurveProvenance { simulated, user_supplied };

std::string_view to_string(CurveProvenance p) noexcept;

/// Monotone map from an unadjusted Silverman k = 1 p-value (nominal) to its
/// calibrated counterpart. Both knot sequences start with the anchor 0.
struct CalibrationCurve {
  std::vector<double> nominal_levels;
  std::vector<double> calibrated_levels;
  CurveProvenance provenance = CurveProvenance::simulated;
  std::uint64_t reps_used = 0;  // outer replications, simulated curves only
  std::uint64_t seed_used = 0;
  int sample_size = 0;           // n of the simulated null samples
  int bootstrap_reps = 0;        // M used per simulated test

  /// Throws Error(calibration_curve) unless both sequences have equal length
  /// >= 4, start at 0 and are strictly increasing after it.
  void validate() const;

  double domain_max() const { return nominal_levels.back(); }

  friend bool operator==(const CalibrationCurve&, const CalibrationCurve&) = default;
};

}  // namespace unimodal
