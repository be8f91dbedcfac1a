#include "unimodal/replication.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "unimodal/dip.hpp"
#include "unimodal/error.hpp"
#include "unimodal/silverman.hpp"

namespace unimodal {

std::vector<GaussianDesign> gaussian_designs() {
  return {
      {"oneNorm", {0.0}, 300},
      {"twoNorms1", {0.0, 2.0}, 300},
      {"twoNorms2", {0.0, 4.0}, 300},
      {"threeNorms", {0.0, 3.5, 7.0}, 300},
  };
}

Sample generate_mixture(const GaussianDesign& design, Rng& rng) {
  const auto c = static_cast<int>(design.means.size());
  std::vector<double> x;
  x.reserve(static_cast<std::size_t>(design.n));
  for (int j = 0; j < c; ++j) {
    const int count = design.n / c + (j < design.n % c ? 1 : 0);
    for (int i = 0; i < count; ++i) x.push_back(design.means[j] + rng.normal());
  }
  return Sample::from_values(std::move(x));
}

std::string_view to_string(ReplicatedTest t) noexcept {
  switch (t) {
    case ReplicatedTest::dip: return "dip";
    case ReplicatedTest::silverman: return "silverman";
    case ReplicatedTest::silverman_adjusted: return "silverman_adjusted";
  }
  return "unknown";
}

namespace {

struct Published {
  std::string dataset;
  int k;
  ReplicatedTest test;
  std::string value;
};

std::vector<Published> table2_cells() {
  using T = ReplicatedTest;
  return {
      {"oneNorm", 1, T::dip, "0.7542"},
      {"oneNorm", 1, T::silverman, "0.5105"},
      {"oneNorm", 1, T::silverman_adjusted, "0.4351"},
      {"twoNorms1", 1, T::dip, "0.3146"},
      {"twoNorms1", 1, T::silverman, "0.1361"},
      {"twoNorms1", 1, T::silverman_adjusted, "0.0546"},
      {"twoNorms2", 1, T::dip, "2.032e-6"},
      {"twoNorms2", 1, T::silverman, "0"},
      {"twoNorms2", 1, T::silverman_adjusted, "0"},
      {"threeNorms", 1, T::dip, "0.0094"},
      {"threeNorms", 1, T::silverman, "0.0591"},
      {"threeNorms", 1, T::silverman_adjusted, "0.0118"},
      {"twoNorms2", 2, T::silverman, "0.1882"},
      {"threeNorms", 2, T::silverman, "0.0010"},
      {"threeNorms", 3, T::silverman, "0.6607"},
  };
}

std::vector<Published> table3_cells() {
  using T = ReplicatedTest;
  return {
      {"irisPW", 1, T::dip, "<2.2e-16"},
      {"irisPW", 1, T::silverman, "0.0030"},
      {"irisPW", 1, T::silverman_adjusted, "0"},
      {"irisPW", 2, T::silverman, "0.4775"},
  };
}

std::vector<ReplicationCell> make_cells(const std::vector<Published>& published) {
  std::vector<ReplicationCell> cells;
  for (const auto& p : published) cells.push_back({p.dataset, p.k, p.test, p.value, {}});
  return cells;
}

// Runs every test listed for `dataset` on one sample with one seed.
void run_cells(std::vector<ReplicationCell>& cells, const std::string& dataset,
               const Sample& s, std::uint64_t seed, int M, unsigned workers,
               const DipQuantileTable& table, const CalibrationCurve& curve) {
  for (auto& c : cells) {
    if (c.dataset != dataset) continue;
    switch (c.test) {
      case ReplicatedTest::dip:
        c.pvalues.push_back(dip_test(s, {}, &table).p_value);
        break;
      case ReplicatedTest::silverman: {
        SilvermanOptions opt;
        opt.k = c.k;
        opt.M = M;
        opt.seed = seed;
        opt.workers = workers;
        c.pvalues.push_back(silverman_test(s, opt).p_value);
        break;
      }
      case ReplicatedTest::silverman_adjusted:
        break;  // derived from the unadjusted cell below
    }
  }
  for (auto& c : cells) {
    if (c.dataset != dataset || c.test != ReplicatedTest::silverman_adjusted) continue;
    const double raw = find_cell(cells, dataset, c.k, ReplicatedTest::silverman).pvalues.back();
    c.pvalues.push_back(hall_york_adjust(raw, curve, kDefaultDigits));
  }
}

double rate(const std::vector<double>& v, auto pred) {
  return static_cast<double>(std::count_if(v.begin(), v.end(), pred)) /
         static_cast<double>(v.size());
}

double paired_rate(const std::vector<double>& a, const std::vector<double>& b, auto pred) {
  std::size_t hits = 0;
  for (std::size_t i = 0; i < a.size(); ++i) hits += pred(a[i], b[i]) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(a.size());
}

double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

CriterionOutcome at_most(std::string name, double observed, double bound) {
  return {std::move(name), "rate " + fmt(observed) + " (need <= " + fmt(bound) + ")",
          observed <= bound};
}

CriterionOutcome at_least(std::string name, double observed, double bound) {
  return {std::move(name), "rate " + fmt(observed) + " (need >= " + fmt(bound) + ")",
          observed >= bound};
}

}  // namespace

const ReplicationCell& find_cell(const std::vector<ReplicationCell>& cells,
                                 std::string_view dataset, int k, ReplicatedTest test) {
  for (const auto& c : cells) {
    if (c.dataset == dataset && c.k == k && c.test == test) return c;
  }
  throw Error(ErrorKind::usage, "no replication cell for " + std::string(dataset));
}

std::vector<ReplicationCell> replicate_gaussians(const ReplicationOptions& options,
                                                 const DipQuantileTable& table,
                                                 const CalibrationCurve& curve) {
  if (options.runs < 1) throw Error(ErrorKind::usage, "runs must be at least 1");
  auto cells = make_cells(table2_cells());
  const auto designs = gaussian_designs();
  for (int run = 0; run < options.runs; ++run) {
    const std::uint64_t seed = options.seed + static_cast<std::uint64_t>(run);
    for (std::size_t d = 0; d < designs.size(); ++d) {
      Rng data_rng = Rng(seed).substream(d);
      const auto s = generate_mixture(designs[d], data_rng);
      run_cells(cells, designs[d].name, s, seed, options.M, options.workers, table, curve);
    }
  }
  return cells;
}

std::vector<ReplicationCell> replicate_iris(const Sample& iris,
                                            const ReplicationOptions& options,
                                            const DipQuantileTable& table,
                                            const CalibrationCurve& curve) {
  if (options.runs < 1) throw Error(ErrorKind::usage, "runs must be at least 1");
  auto cells = make_cells(table3_cells());
  for (int run = 0; run < options.runs; ++run) {
    const std::uint64_t seed = options.seed + static_cast<std::uint64_t>(run);
    run_cells(cells, "irisPW", iris, seed, options.M, options.workers, table, curve);
  }
  return cells;
}

std::vector<CriterionOutcome> evaluate_gaussians(const std::vector<ReplicationCell>& cells) {
  using T = ReplicatedTest;
  auto p = [&](std::string_view d, int k, T t) -> const std::vector<double>& {
    return find_cell(cells, d, k, t).pvalues;
  };
  auto rejects = [](double v) { return v < 0.05; };
  auto keeps = [](double v) { return v >= 0.05; };

  std::vector<CriterionOutcome> out;
  out.push_back(at_most("oneNorm dip rejects at 0.05", rate(p("oneNorm", 1, T::dip), rejects), 0.10));
  out.push_back(at_most("oneNorm Silverman rejects at 0.05",
                        rate(p("oneNorm", 1, T::silverman), rejects), 0.10));
  out.push_back(at_most("oneNorm adjusted Silverman rejects at 0.05",
                        rate(p("oneNorm", 1, T::silverman_adjusted), rejects), 0.10));
  out.push_back(at_least("twoNorms2 dip p < 0.001",
                         rate(p("twoNorms2", 1, T::dip), [](double v) { return v < 0.001; }),
                         0.90));
  out.push_back(at_least("twoNorms2 Silverman p <= 0.005",
                         rate(p("twoNorms2", 1, T::silverman), [](double v) { return v <= 0.005; }),
                         0.90));
  out.push_back(at_least("twoNorms1 adjusted < unadjusted",
                         paired_rate(p("twoNorms1", 1, T::silverman_adjusted),
                                     p("twoNorms1", 1, T::silverman),
                                     [](double a, double u) { return a < u; }),
                         0.95));
  out.push_back(at_least("twoNorms1 dip fails to reject",
                         rate(p("twoNorms1", 1, T::dip), keeps), 0.60));
  out.push_back(at_least("threeNorms adjusted < unadjusted",
                         paired_rate(p("threeNorms", 1, T::silverman_adjusted),
                                     p("threeNorms", 1, T::silverman),
                                     [](double a, double u) { return a < u; }),
                         0.95));
  out.push_back(at_least("threeNorms k=2 rejects and k=3 fails to reject",
                         paired_rate(p("threeNorms", 2, T::silverman),
                                     p("threeNorms", 3, T::silverman),
                                     [](double k2, double k3) { return k2 < 0.05 && k3 >= 0.05; }),
                         0.80));
  return out;
}

std::vector<CriterionOutcome> evaluate_iris(const std::vector<ReplicationCell>& cells) {
  using T = ReplicatedTest;
  std::vector<CriterionOutcome> out;
  const auto& dip = find_cell(cells, "irisPW", 1, T::dip).pvalues;
  const double dip_max = *std::max_element(dip.begin(), dip.end());
  out.push_back({"irisPW dip p at table floor", "p " + fmt(dip_max) + " (need <= 0.0001)",
                 dip_max <= 1e-4});

  const double k1 = mean(find_cell(cells, "irisPW", 1, T::silverman).pvalues);
  out.push_back({"irisPW Silverman k=1 mean p", "mean " + fmt(k1) + " (need in [0, 0.02])",
                 k1 >= 0.0 && k1 <= 0.02});

  const auto& adj = find_cell(cells, "irisPW", 1, T::silverman_adjusted).pvalues;
  const bool all_zero = std::all_of(adj.begin(), adj.end(), [](double v) { return v == 0.0; });
  out.push_back({"irisPW adjusted Silverman p = 0",
                 "max " + fmt(*std::max_element(adj.begin(), adj.end())) + " (need 0)", all_zero});

  const double k2 = mean(find_cell(cells, "irisPW", 2, T::silverman).pvalues);
  out.push_back({"irisPW Silverman k=2 mean p", "mean " + fmt(k2) + " (need in [0.33, 0.63])",
                 k2 >= 0.33 && k2 <= 0.63});
  return out;
}

}  // namespace unimodal
