#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "unimodal/rng.hpp"
#include "unimodal/table_types.hpp"

namespace unimodal {

std::vector<int> default_table_sizes();
std::vector<double> default_table_probs();
inline constexpr std::uint64_t kDefaultTableReps = 100000;

/// Nominal levels at which the default calibration curve is pinned.
std::vector<double> default_alpha_grid();

/// Empirical quantile with linear interpolation between order statistics
/// (Hyndman-Fan type 7). `sorted` must be ascending and nonempty.
double empirical_quantile(std::span<const double> sorted, double prob);

/// Monte Carlo quantiles of the dip under uniform(0,1) samples. Size i,
/// replication r draws from rng.substream(i).substream(r), so the table does
/// not depend on the worker count.
DipQuantileTable generate_dip_table(const std::vector<int>& sizes,
                                    const std::vector<double>& probs,
                                    std::uint64_t reps, std::uint64_t seed,
                                    unsigned workers = 0);

/// Unadjusted Silverman k = 1 p-values of `outer_reps` standard normal
/// samples of size n, each with M bootstrap replications. Replication i
/// draws its data from rng.substream(i).substream(0) and its bootstrap from
/// rng.substream(i).substream(1).
std::vector<double> simulate_null_silverman_pvalues(int n, int M, std::uint64_t outer_reps,
                                                    const Rng& rng, unsigned workers = 0);

/// Knots (t(alpha), alpha) where t(alpha) is the empirical alpha-quantile of
/// the null p-values, anchored at (0, 0). Knots that would not be strictly
/// increasing are dropped. Throws calibration_curve when fewer than four
/// knots remain.
CalibrationCurve curve_from_null_pvalues(std::vector<double> null_pvalues,
                                         const std::vector<double>& alpha_grid);

CalibrationCurve derive_calibration_curve(const std::vector<double>& alpha_grid, int n,
                                          int M, std::uint64_t outer_reps,
                                          std::uint64_t seed, unsigned workers = 0);

/// Fraction of `reps` fresh standard-normal samples of size n whose
/// adjusted k = 1 p-value falls below alpha. Draws from Rng(seed) as in
/// simulate_null_silverman_pvalues, so use a seed the curve was not
/// derived from.
double calibration_holdout_level(const CalibrationCurve& curve, int n, int M,
                                 std::uint64_t reps, std::uint64_t seed, double alpha = 0.05,
                                 unsigned workers = 0);

// Persisted forms: comma-delimited text with a format/version line, header
// fields, the data, then a CRC-32 line over every preceding byte. Doubles are
// written in shortest round-trip form, so save -> load is exact.
void write_table(std::ostream& out, const DipQuantileTable& table);
DipQuantileTable read_table(std::istream& in);
void save_table(const std::filesystem::path& path, const DipQuantileTable& table);
DipQuantileTable load_table(const std::filesystem::path& path);

void write_curve(std::ostream& out, const CalibrationCurve& curve);
CalibrationCurve read_curve(std::istream& in);
void save_curve(const std::filesystem::path& path, const CalibrationCurve& curve);
CalibrationCurve load_curve(const std::filesystem::path& path);

/// Plain two-column "nominal,calibrated" constants (header optional, no
/// checksum), for users holding a published calibration table. The (0, 0)
/// anchor is added when absent.
CalibrationCurve read_calibration_constants(std::istream& in);

/// Saved curve file when it carries the curve header, constants otherwise.
CalibrationCurve load_curve_or_constants(const std::filesystem::path& path);

/// Directory holding the bundled data files; UNIMODAL_DATA_DIR overrides
/// the compiled-in location.
std::filesystem::path data_dir();
std::filesystem::path bundled_table_path();
std::filesystem::path bundled_curve_path();
std::filesystem::path bundled_iris_path();

}  // namespace unimodal
