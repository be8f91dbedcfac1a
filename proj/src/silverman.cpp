#include "unimodal/silverman.hpp"

#include <algorithm>
// pchip.hpp in Boost 1.74 calls isnan unqualified; fpclassify declares
// boost::math::isnan for it.
#include <boost/math/special_functions/fpclassify.hpp>
#include <boost/math/interpolators/pchip.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "unimodal/error.hpp"
#include "unimodal/parallel.hpp"

namespace unimodal {

namespace {

struct GridSpec {
  double lo;
  double step;
};

// Sums unnormalised kernels exp(-u^2/2) onto the grid. Each kernel is walked
// outward from its nearest grid point with the recurrence
// e(u + d) = e(u) * r, r <- r * exp(-d^2), so no exp() per grid cell.
GridSpec accumulate_kernels(std::span<const double> data, double h, int grid_size,
                            std::span<double> out) {
  const auto [mn, mx] = std::minmax_element(data.begin(), data.end());
  const double lo = *mn - 3.0 * h;
  const double hi = *mx + 3.0 * h;
  const double step = (hi - lo) / (grid_size - 1);
  const double delta = step / h;
  const double q = std::exp(-delta * delta);
  std::fill(out.begin(), out.end(), 0.0);

  for (double x : data) {
    const double pos = (x - lo) / step;
    const int c = std::clamp(static_cast<int>(std::lround(pos)), 0, grid_size - 1);
    const double u = (lo + c * step - x) / h;
    const double e0 = std::exp(-0.5 * u * u);
    out[c] += e0;

    double e = e0;
    double r = std::exp(-u * delta - 0.5 * delta * delta);
    for (int j = c + 1; j < grid_size; ++j) {
      e *= r;
      if (e == 0.0) break;
      out[j] += e;
      r *= q;
    }
    e = e0;
    r = std::exp(u * delta - 0.5 * delta * delta);
    for (int j = c - 1; j >= 0; --j) {
      e *= r;
      if (e == 0.0) break;
      out[j] += e;
      r *= q;
    }
  }
  return {lo, step};
}

void require_bandwidth(double h) {
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw Error(ErrorKind::usage, "bandwidth must be positive and finite");
  }
}

double standard_deviation(std::span<const double> v) {
  const double mean = sample_mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

KdeGrid kde_gaussian(std::span<const double> data, double h, int grid_size) {
  require_bandwidth(h);
  if (data.empty()) throw Error(ErrorKind::empty_sample, "KDE of an empty sample");
  if (grid_size < 3) throw Error(ErrorKind::usage, "KDE grid needs at least 3 points");

  KdeGrid g;
  g.bandwidth = h;
  g.density.resize(static_cast<std::size_t>(grid_size));
  const auto spec = accumulate_kernels(data, h, grid_size, g.density);
  const double norm =
      1.0 / (static_cast<double>(data.size()) * h * std::sqrt(2.0 * std::numbers::pi));
  for (double& d : g.density) d *= norm;
  g.points.resize(g.density.size());
  for (int j = 0; j < grid_size; ++j) g.points[j] = spec.lo + j * spec.step;
  return g;
}

int count_modes(std::span<const double> density) {
  const std::size_t n = density.size();
  int modes = 0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && density[j + 1] == density[i]) ++j;
    const bool left_lower = i == 0 || density[i - 1] < density[i];
    const bool right_lower = j + 1 == n || density[j + 1] < density[i];
    if (left_lower && right_lower) ++modes;
    i = j + 1;
  }
  return modes;
}

int count_kde_modes(std::span<const double> data, double h, int grid_size) {
  std::vector<double> buf(static_cast<std::size_t>(grid_size));
  accumulate_kernels(data, h, grid_size, buf);
  return count_modes(buf);
}

CriticalBandwidth critical_bandwidth(std::span<const double> data, int k,
                                     double rel_tol, int grid_size) {
  if (k < 1) throw Error(ErrorKind::usage, "k must be at least 1");
  if (data.size() < 2) {
    throw Error(ErrorKind::degenerate_sample,
                "the critical bandwidth needs at least two observations");
  }
  if (!(rel_tol > 0.0 && rel_tol < 1.0)) {
    throw Error(ErrorKind::usage, "rel_tol must lie in (0, 1)");
  }
  if (standard_deviation(data) == 0.0) {
    throw Error(ErrorKind::degenerate_spread,
                "the data have zero spread; every bandwidth gives one mode");
  }
  const auto [mn, mx] = std::minmax_element(data.begin(), data.end());
  const double range = *mx - *mn;

  auto modes = [&](double h) { return count_kde_modes(data, h, grid_size); };

  constexpr int kMaxDoublings = 64;
  constexpr int kMaxHalvings = 40;

  double hi = range;
  for (int i = 0; modes(hi) > k; ++i) {
    if (i == kMaxDoublings) {
      throw Error(ErrorKind::degenerate_spread, "no bandwidth reduces the mode count to k");
    }
    hi *= 2.0;
  }
  double lo = std::min(range * 1e-4, hi * 0.5);
  for (int i = 0; modes(lo) <= k; ++i) {
    if (i == kMaxHalvings) return {lo, true};
    hi = std::min(hi, lo);
    lo *= 0.5;
  }

  // Invariant: modes(lo) > k, modes(hi) <= k.
  while (hi - lo > rel_tol * hi) {
    const double mid = std::sqrt(lo * hi);
    if (modes(mid) <= k) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return {hi, false};
}

CriticalBandwidth critical_bandwidth(const Sample& s, int k, double rel_tol,
                                     int grid_size) {
  return critical_bandwidth(s.values(), k, rel_tol, grid_size);
}

namespace {

std::vector<double> smoothed_bootstrap(std::span<const double> x, double h,
                                       double sd, Rng& rng) {
  const std::size_t n = x.size();
  std::vector<double> y(n);
  for (double& v : y) v = x[rng.index(n)];
  const double mean = sample_mean(y);
  const double shrink = 1.0 / std::sqrt(1.0 + (h * h) / (sd * sd));
  for (double& v : y) v = mean + shrink * (v - mean + h * rng.normal());
  return y;
}

}  // namespace

std::vector<double> smoothed_bootstrap(const Sample& s, double h, Rng& rng) {
  if (!(h >= 0.0)) throw Error(ErrorKind::usage, "bandwidth must be nonnegative");
  const double sd = sample_sd(s);
  if (sd == 0.0) {
    throw Error(ErrorKind::degenerate_spread, "the data have zero spread");
  }
  return smoothed_bootstrap(s.values(), h, sd, rng);
}

SilvermanPValue silverman_pvalue(const Sample& s, int k, int M, const Rng& rng,
                                 unsigned workers, int grid_size) {
  if (M < 1) throw Error(ErrorKind::usage, "M must be at least 1");
  const auto hc = critical_bandwidth(s, k, 1e-6, grid_size);
  const double sd = sample_sd(s);

  std::vector<char> more(static_cast<std::size_t>(M), 0);
  parallel_for(more.size(), workers, [&](std::size_t i) {
    Rng stream = rng.substream(i);
    const auto y = smoothed_bootstrap(s.values(), hc.h, sd, stream);
    more[i] = count_kde_modes(y, hc.h, grid_size) > k ? 1 : 0;
  });
  const auto count = std::count(more.begin(), more.end(), 1);
  return {hc.h, static_cast<double>(count) / M, hc.boundary};
}

AdjustedPValue hall_york_adjust_detail(double p, const CalibrationCurve& curve,
                                       int digits) {
  curve.validate();
  if (!(p >= 0.0 && p <= 1.0)) {
    throw Error(ErrorKind::usage, "p-value must lie in [0, 1]");
  }
  if (digits < 0 || digits > 15) throw Error(ErrorKind::usage, "digits must lie in [0, 15]");

  if (p < kAdjustedZeroBelow) return {0.0, true, false};
  if (p > curve.domain_max()) return {p, false, true};

  auto xs = curve.nominal_levels;
  auto ys = curve.calibrated_levels;
  const boost::math::interpolators::pchip<std::vector<double>> spline(std::move(xs),
                                                                      std::move(ys));
  const double scale = std::pow(10.0, digits);
  const double v = std::clamp(spline(p), 0.0, 1.0);
  if (v < kAdjustedZeroBelow) return {0.0, true, false};
  return {std::round(v * scale) / scale, false, false};
}

std::string silverman_null_hypothesis(int k) {
  return "number of modes <= " + std::to_string(k);
}

SilvermanTestResult silverman_test(const Sample& s, const SilvermanOptions& options,
                                   const CalibrationCurve* curve) {
  if (options.k < 1) throw Error(ErrorKind::usage, "k must be at least 1");
  if (options.M < 1) throw Error(ErrorKind::usage, "M must be at least 1");

  SilvermanTestResult r;
  r.k = options.k;
  r.M = options.M;
  r.digits = options.digits;
  r.seed = options.seed ? *options.seed
                        : (static_cast<std::uint64_t>(std::random_device{}()) << 32) |
                              std::random_device{}();

  const bool adjust = options.adjust && options.k == 1;
  if (options.adjust && options.k != 1) {
    r.warnings.push_back("adjustment only defined for k = 1; reporting the unadjusted test");
  }
  if (adjust && curve == nullptr) {
    throw Error(ErrorKind::calibration_curve, "adjustment requested but no calibration curve loaded");
  }

  const auto pv = silverman_pvalue(s, options.k, options.M, Rng(r.seed), options.workers,
                                   options.grid_size);
  r.h_crit = pv.h_crit;
  r.unadjusted_p = pv.p;
  r.p_value = pv.p;
  r.boundary = pv.boundary;
  if (pv.boundary) {
    r.warnings.push_back("critical bandwidth hit the lower search limit");
  }

  if (adjust) {
    const auto adj = hall_york_adjust_detail(pv.p, *curve, options.digits);
    r.adjusted = true;
    r.p_value = adj.p;
    if (adj.zero_floor) {
      r.warnings.push_back("adjusted p-value below 0.005 reported as 0");
    }
    if (adj.passthrough) {
      r.warnings.push_back("p-value above the calibration curve's domain; passed through unadjusted");
    }
  }
  return r;
}

ModeEstimate estimate_num_modes(const Sample& s, double alpha, int k_max, int M,
                                std::optional<std::uint64_t> seed, unsigned workers) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorKind::usage, "alpha must lie in (0, 1)");
  if (k_max < 1) throw Error(ErrorKind::usage, "k_max must be at least 1");

  ModeEstimate est;
  SilvermanOptions opt;
  opt.M = M;
  opt.workers = workers;
  opt.seed = seed;
  for (int k = 1; k <= k_max; ++k) {
    opt.k = k;
    const auto r = silverman_test(s, opt);
    opt.seed = r.seed;  // reuse the drawn seed for every k
    est.seed = r.seed;
    const bool rejected = r.p_value < alpha;
    est.trace.push_back({k, r.h_crit, r.p_value, rejected});
    if (!rejected) {
      est.modes = k;
      return est;
    }
  }
  est.modes = k_max;
  est.inconclusive = true;
  return est;
}

}  // namespace unimodal
