#include "unimodal/dip.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "unimodal/error.hpp"
#include "unimodal/parallel.hpp"

namespace unimodal {

// Hartigan & Hartigan (1985) with the later Maechler and Lu corrections.
// Works on the ECDF scaled by n (point i sits at height i), so every distance
// below is in units of observations and the result is divided by 2n at the
// end. Index arrays are 1-based to keep the envelope recursions readable;
// slot 0 is unused.
double dip_statistic(std::span<const double> sorted) {
  const int n = static_cast<int>(sorted.size());
  if (n < 2) {
    throw Error(ErrorKind::degenerate_sample,
                "the dip statistic needs at least two observations");
  }
  if (!std::is_sorted(sorted.begin(), sorted.end())) {
    throw Error(ErrorKind::validation, "dip_statistic expects sorted data");
  }
  const double floor_dip = 1.0 / (2.0 * n);
  if (sorted.front() == sorted.back()) return floor_dip;

  auto x = [&](int i) { return sorted[static_cast<std::size_t>(i - 1)]; };

  // mn[j]: predecessor of j on the greatest convex minorant of points 1..j.
  std::vector<int> mn(n + 1);
  mn[1] = 1;
  for (int j = 2; j <= n; ++j) {
    mn[j] = j - 1;
    while (true) {
      const int a = mn[j];
      const int b = mn[a];
      if (a == 1 || (x(j) - x(a)) * (a - b) < (x(a) - x(b)) * (j - a)) break;
      mn[j] = b;
    }
  }

  // mj[k]: successor of k on the least concave majorant of points k..n.
  std::vector<int> mj(n + 1);
  mj[n] = n;
  for (int k = n - 1; k >= 1; --k) {
    mj[k] = k + 1;
    while (true) {
      const int a = mj[k];
      const int b = mj[a];
      if (a == n || (x(k) - x(a)) * (a - b) < (x(a) - x(b)) * (k - a)) break;
      mj[k] = b;
    }
  }

  std::vector<int> gcm(n + 2);
  std::vector<int> lcm(n + 2);
  int low = 1;
  int high = n;
  double dip = 1.0;  // scaled by 2n

  while (true) {
    // Change points of the minorant from high down to low.
    gcm[1] = high;
    int i = 1;
    for (; gcm[i] > low; ++i) gcm[i + 1] = mn[gcm[i]];
    const int n_gcm = i;
    int ig = n_gcm;
    int ix = ig - 1;

    // Change points of the majorant from low up to high.
    lcm[1] = low;
    i = 1;
    for (; lcm[i] < high; ++i) lcm[i + 1] = mj[lcm[i]];
    const int n_lcm = i;
    int ih = n_lcm;
    int iv = 2;

    // Largest vertical gap between the two envelopes on [low, high].
    long double d = 0.0L;
    if (n_gcm != 2 || n_lcm != 2) {
      do {
        const int g = gcm[ix];
        const int l = lcm[iv];
        long double dx;
        if (g > l) {
          // Next change point belongs to the majorant.
          const int g1 = gcm[ix + 1];
          dx = (l - g1 + 1) -
               (static_cast<long double>(x(l)) - x(g1)) * (g - g1) / (x(g) - x(g1));
          ++iv;
          if (dx >= d) {
            d = dx;
            ig = ix + 1;
            ih = iv - 1;
          }
        } else {
          // Next change point belongs to the minorant.
          const int l1 = lcm[iv - 1];
          dx = (static_cast<long double>(x(g)) - x(l1)) * (l - l1) / (x(l) - x(l1)) -
               (g - l1 - 1);
          --ix;
          if (dx >= d) {
            d = dx;
            ig = ix + 1;
            ih = iv;
          }
        }
        ix = std::max(ix, 1);
        iv = std::min(iv, n_lcm);
      } while (gcm[ix] != lcm[iv]);
    } else {
      d = 1.0L;
    }

    if (d < dip) break;

    // Dip of the minorant segments left of the modal interval.
    double dip_l = 0.0;
    for (int j = ig; j < n_gcm; ++j) {
      double max_t = 1.0;
      const int jb = gcm[j + 1];
      const int je = gcm[j];
      if (je - jb > 1 && x(je) != x(jb)) {
        const double c = (je - jb) / (x(je) - x(jb));
        for (int jj = jb; jj <= je; ++jj) {
          max_t = std::max(max_t, (jj - jb + 1) - (x(jj) - x(jb)) * c);
        }
      }
      dip_l = std::max(dip_l, max_t);
    }

    // Dip of the majorant segments right of the modal interval.
    double dip_u = 0.0;
    for (int j = ih; j < n_lcm; ++j) {
      double max_t = 1.0;
      const int jb = lcm[j];
      const int je = lcm[j + 1];
      if (je - jb > 1 && x(je) != x(jb)) {
        const double c = (je - jb) / (x(je) - x(jb));
        for (int jj = jb; jj <= je; ++jj) {
          max_t = std::max(max_t, (x(jj) - x(jb)) * c - (jj - jb - 1));
        }
      }
      dip_u = std::max(dip_u, max_t);
    }

    dip = std::max({dip, dip_l, dip_u});

    // Without this check the loop can cycle forever.
    if (low == gcm[ig] && high == lcm[ih]) break;
    low = gcm[ig];
    high = lcm[ih];
  }
  return dip / (2.0 * n);
}

double dip_statistic(const Sample& s) { return dip_statistic(s.values()); }

namespace {

// 1 - prob with the cancellation noise removed, so 1 - 0.9999 prints as 1e-4.
double upper_tail(double prob) { return std::round((1.0 - prob) * 1e15) / 1e15; }

std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

TablePValue dip_pvalue_table(double dip, int n, const DipQuantileTable& table) {
  const auto& sizes = table.sizes;
  if (n < 4 || sizes.empty() || n < sizes.front()) {
    throw Error(ErrorKind::unsupported_size,
                "sample size " + std::to_string(n) +
                    " is below the smallest tabulated size");
  }

  TablePValue out;
  const std::size_t m = table.probs.size();
  std::vector<double> curve(m);
  if (n >= sizes.back()) {
    out.beyond_max_size = n > sizes.back();
    const double s = std::sqrt(static_cast<double>(sizes.back()));
    for (std::size_t j = 0; j < m; ++j) curve[j] = s * table.quantiles.back()[j];
  } else {
    const auto hi = static_cast<std::size_t>(
        std::upper_bound(sizes.begin(), sizes.end(), n) - sizes.begin());
    const std::size_t lo = hi - 1;
    const double f = static_cast<double>(n - sizes[lo]) / (sizes[hi] - sizes[lo]);
    const double s_lo = std::sqrt(static_cast<double>(sizes[lo]));
    const double s_hi = std::sqrt(static_cast<double>(sizes[hi]));
    for (std::size_t j = 0; j < m; ++j) {
      const double y_lo = s_lo * table.quantiles[lo][j];
      const double y_hi = s_hi * table.quantiles[hi][j];
      curve[j] = y_lo + f * (y_hi - y_lo);
    }
  }

  const double target = std::sqrt(static_cast<double>(n)) * dip;
  const auto it = std::lower_bound(curve.begin(), curve.end(), target);
  if (it == curve.end()) {
    out.at_floor = true;
    out.p = upper_tail(table.probs.back());
    return out;
  }
  const auto j = static_cast<std::size_t>(it - curve.begin());
  if (*it == target) {
    out.p = upper_tail(table.probs[j]);
    return out;
  }
  if (j == 0) {
    out.below_table = true;
    out.p = 1.0;
    return out;
  }
  const double t = (target - curve[j - 1]) / (curve[j] - curve[j - 1]);
  const double prob = table.probs[j - 1] + t * (table.probs[j] - table.probs[j - 1]);
  out.p = upper_tail(prob);
  return out;
}

double dip_pvalue_mc(double dip, int n, int reps, const Rng& rng, unsigned workers) {
  if (reps < 1) throw Error(ErrorKind::usage, "reps must be at least 1");
  if (n < 2) {
    throw Error(ErrorKind::degenerate_sample,
                "Monte Carlo dip p-values need n >= 2");
  }
  std::vector<char> exceeds(static_cast<std::size_t>(reps), 0);
  parallel_for(exceeds.size(), workers, [&](std::size_t i) {
    Rng stream = rng.substream(i);
    std::vector<double> u(static_cast<std::size_t>(n));
    for (double& v : u) v = stream.uniform();
    std::sort(u.begin(), u.end());
    exceeds[i] = dip_statistic(u) >= dip ? 1 : 0;
  });
  const auto count = std::count(exceeds.begin(), exceeds.end(), 1);
  return static_cast<double>(count + 1) / static_cast<double>(reps + 1);
}

std::string_view to_string(PValueMethod m) noexcept {
  return m == PValueMethod::table ? "table" : "monte_carlo";
}

DipTestResult dip_test(const Sample& s, const DipOptions& options,
                       const DipQuantileTable* table) {
  DipTestResult result;
  result.n = static_cast<int>(s.size());
  result.statistic = dip_statistic(s);

  if (options.simulate_pvalue) {
    result.method = PValueMethod::monte_carlo;
    result.reps = options.reps;
    result.seed = options.seed;
    result.p_value = dip_pvalue_mc(result.statistic, result.n, options.reps,
                                   Rng(options.seed), options.workers);
    return result;
  }

  if (table == nullptr) {
    throw Error(ErrorKind::corrupt_table, "no dip quantile table available");
  }
  result.method = PValueMethod::table;
  const auto tp = dip_pvalue_table(result.statistic, result.n, *table);
  result.p_value = tp.p;
  if (tp.at_floor) {
    result.warnings.push_back(
        "dip beyond tabulated range; p-value reported at the table floor (p <= " +
        short_number(tp.p) + ")");
  }
  if (tp.below_table) {
    result.warnings.push_back("dip below the smallest tabulated quantile; p-value clamped to 1");
  }
  if (tp.beyond_max_size) {
    result.warnings.push_back("sample size " + std::to_string(result.n) +
                              " exceeds the largest tabulated size " +
                              std::to_string(table->sizes.back()) +
                              "; using its asymptotic row");
  }
  return result;
}

}  // namespace unimodal
