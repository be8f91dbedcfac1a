#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "unimodal/rng.hpp"
#include "unimodal/sample.hpp"
#include "unimodal/table_types.hpp"

namespace unimodal {

/// Equal-proportion mixture of unit-variance normals.
struct GaussianDesign {
  std::string name;
  std::vector<double> means;
  int n = 300;
};

/// oneNorm {0}, twoNorms1 {0, 2}, twoNorms2 {0, 4}, threeNorms {0, 3.5, 7}.
std::vector<GaussianDesign> gaussian_designs();

/// n / means.size() draws per component (the remainder goes to the first
/// components).
Sample generate_mixture(const GaussianDesign& design, Rng& rng);

enum class ReplicatedTest { dip, silverman, silverman_adjusted };
std::string_view to_string(ReplicatedTest t) noexcept;

/// One cell of a results table: a data set, k and test, with the published
/// single-realisation value and this library's p-value for every seed.
struct ReplicationCell {
  std::string dataset;
  int k = 1;
  ReplicatedTest test = ReplicatedTest::dip;
  std::string published;
  std::vector<double> pvalues;
};

struct ReplicationOptions {
  std::uint64_t seed = 42;
  int runs = 50;
  int M = 999;
  unsigned workers = 0;
};

/// Regenerates the four Gaussian data sets per run (seed + run) and tests
/// them like the published Table 2: dip and Silverman k = 1 (both variants)
/// for all four, plus Silverman k = 2 on twoNorms2 and k = 2, 3 on
/// threeNorms.
std::vector<ReplicationCell> replicate_gaussians(const ReplicationOptions& options,
                                                 const DipQuantileTable& table,
                                                 const CalibrationCurve& curve);

/// Fixed iris petal-width data; the seed varies across runs. Dip (table),
/// Silverman k = 1 (both variants) and k = 2.
std::vector<ReplicationCell> replicate_iris(const Sample& iris,
                                            const ReplicationOptions& options,
                                            const DipQuantileTable& table,
                                            const CalibrationCurve& curve);

const ReplicationCell& find_cell(const std::vector<ReplicationCell>& cells,
                                 std::string_view dataset, int k, ReplicatedTest test);

struct CriterionOutcome {
  std::string name;
  std::string observed;
  bool pass = false;
};

/// Pass/fail of the tolerance each published row is held to.
std::vector<CriterionOutcome> evaluate_gaussians(const std::vector<ReplicationCell>& cells);
std::vector<CriterionOutcome> evaluate_iris(const std::vector<ReplicationCell>& cells);

}  // namespace unimodal
