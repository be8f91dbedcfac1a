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

inline constexpr int kDefaultDipReps = 2000;
inline constexpr std::string_view kDipAlternative =
    "non-unimodal, i.e., at least bimodal";

/// Dip statistic of sorted data: the smallest sup-distance between the
/// empirical CDF and a unimodal CDF. Ties are allowed; all-equal data gives
/// the floor value 1/(2n). Throws degenerate_sample for n < 2.
double dip_statistic(std::span<const double> sorted);
double dip_statistic(const Sample& s);

struct TablePValue {
  double p = 1.0;
  bool below_table = false;     // D under the smallest tabulated quantile
  bool at_floor = false;        // D beyond the largest tabulated quantile
  bool beyond_max_size = false; // n above the largest tabulated size
};

/// Interpolates the table on the sqrt(n) * D scale, linearly in n between
/// the bracketing sizes, then inverts the quantile curve at D.
/// Throws unsupported_size when n is below the smallest tabulated size or
/// below 4.
TablePValue dip_pvalue_table(double dip, int n, const DipQuantileTable& table);

/// (#{D_i >= D} + 1) / (reps + 1) over `reps` uniform samples of size n.
/// Replication i draws from rng.substream(i).
double dip_pvalue_mc(double dip, int n, int reps, const Rng& rng,
                     unsigned workers = 0);

enum class PValueMethod { table, monte_carlo };
std::string_view to_string(PValueMethod m) noexcept;

struct DipTestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  int n = 0;
  PValueMethod method = PValueMethod::table;
  int reps = 0;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> warnings;
};

struct DipOptions {
  bool simulate_pvalue = false;
  int reps = kDefaultDipReps;
  std::uint64_t seed = 0;  // Monte Carlo path only
  unsigned workers = 0;
};

/// Table path needs `table`; Monte Carlo path ignores it.
DipTestResult dip_test(const Sample& s, const DipOptions& options,
                       const DipQuantileTable* table);

}  // namespace unimodal
