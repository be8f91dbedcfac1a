#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "unimodal/error.hpp"
#include "unimodal/sample.hpp"
#include "unimodal/silverman.hpp"
#include "unimodal/tables.hpp"

using namespace unimodal;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::io;
}

std::string table_bytes(const DipQuantileTable& t) {
  std::ostringstream os;
  write_table(os, t);
  return os.str();
}

std::string curve_bytes(const CalibrationCurve& c) {
  std::ostringstream os;
  write_curve(os, c);
  return os.str();
}

CalibrationCurve sample_curve() {
  CalibrationCurve c;
  c.nominal_levels = {0.0, 0.0317, 0.0833333333333333, 0.17, 0.4};
  c.calibrated_levels = {0.0, 0.01, 0.05, 0.1, 0.3};
  c.reps_used = 123;
  c.seed_used = 9;
  c.sample_size = 300;
  c.bootstrap_reps = 999;
  return c;
}

}  // namespace

TEST(EmpiricalQuantile, TypeSeven) {
  const std::vector<double> x = {1, 2, 4, 8};
  EXPECT_DOUBLE_EQ(empirical_quantile(x, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(empirical_quantile(x, 1.0), 8.0);
  // h = (n - 1) p = 1.5 -> halfway between 2 and 4.
  EXPECT_DOUBLE_EQ(empirical_quantile(x, 0.5), 3.0);
  EXPECT_DOUBLE_EQ(empirical_quantile(x, 0.9), 4 + 0.7 * 4);
}

TEST(DipTable, RoundTripIsExact) {
  const auto t = generate_dip_table({4, 10, 30}, {0.05, 0.5, 0.95}, 300, 3, 1);
  std::istringstream in(table_bytes(t));
  const auto back = read_table(in);
  EXPECT_EQ(back, t);
  EXPECT_EQ(table_bytes(back), table_bytes(t));
}

TEST(DipTable, DeterministicAcrossRunsAndWorkers) {
  const auto a = generate_dip_table({5, 20}, {0.1, 0.9}, 500, 7, 1);
  const auto b = generate_dip_table({5, 20}, {0.1, 0.9}, 500, 7, 4);
  EXPECT_EQ(table_bytes(a), table_bytes(b));
  EXPECT_NE(table_bytes(a), table_bytes(generate_dip_table({5, 20}, {0.1, 0.9}, 500, 8, 1)));
}

TEST(DipTable, TruncatedOrEditedIsCorrupt) {
  const auto bytes = table_bytes(generate_dip_table({5, 20}, {0.1, 0.9}, 200, 1, 1));
  EXPECT_EQ(kind_of([&] {
              std::istringstream in(bytes.substr(0, bytes.size() / 2));
              read_table(in);
            }),
            ErrorKind::corrupt_table);
  auto edited = bytes;
  const auto pos = edited.find("row,20,");
  ASSERT_NE(pos, std::string::npos);
  edited[pos + 9] = edited[pos + 9] == '1' ? '2' : '1';
  EXPECT_EQ(kind_of([&] {
              std::istringstream in(edited);
              read_table(in);
            }),
            ErrorKind::corrupt_table);
  EXPECT_EQ(kind_of([] {
              std::istringstream in("");
              read_table(in);
            }),
            ErrorKind::corrupt_table);
}

TEST(DipTable, QuantilesShrinkWithSampleSize) {
  const auto t = generate_dip_table({25, 100}, default_table_probs(), 4000, 5, 0);
  for (std::size_t j = 0; j < t.probs.size(); ++j) {
    EXPECT_LT(t.quantiles[1][j], t.quantiles[0][j]) << "prob " << t.probs[j];
  }
}

TEST(DipTable, StableAcrossSeeds) {
  const std::vector<double> probs = {0.5, 0.95};
  const auto a = generate_dip_table({50}, probs, 100000, 1, 0);
  const auto b = generate_dip_table({50}, probs, 100000, 2, 0);
  for (std::size_t j = 0; j < probs.size(); ++j) {
    EXPECT_NEAR(a.quantiles[0][j] / b.quantiles[0][j], 1.0, 0.02) << "prob " << probs[j];
  }
}

TEST(DipTable, RejectsBadGrids) {
  EXPECT_EQ(kind_of([] { generate_dip_table({3}, {0.5}, 100, 1); }),
            ErrorKind::unsupported_size);
  DipQuantileTable t;
  t.sizes = {10, 5};
  t.probs = {0.5};
  t.quantiles = {{0.1}, {0.2}};
  EXPECT_EQ(kind_of([&] { t.validate(); }), ErrorKind::corrupt_table);
}

TEST(CalibrationCurve, RoundTripIsExact) {
  const auto c = sample_curve();
  std::istringstream in(curve_bytes(c));
  EXPECT_EQ(read_curve(in), c);
}

TEST(CalibrationCurve, TruncatedIsCorrupt) {
  const auto bytes = curve_bytes(sample_curve());
  std::istringstream in(bytes.substr(0, bytes.size() - 5));
  EXPECT_NE(kind_of([&] { read_curve(in); }), ErrorKind::io);
}

TEST(CalibrationCurve, FromNullPValuesInvertsTheirQuantiles) {
  // Null p-values distributed as sqrt(U) have alpha-quantile sqrt(alpha).
  std::vector<double> p;
  const int n = 20001;
  for (int i = 0; i < n; ++i) p.push_back(std::sqrt(static_cast<double>(i) / (n - 1)));
  const std::vector<double> grid = {0.01, 0.05, 0.1, 0.2};
  const auto c = curve_from_null_pvalues(p, grid);
  ASSERT_EQ(c.nominal_levels.size(), grid.size() + 1);
  EXPECT_EQ(c.nominal_levels.front(), 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_NEAR(c.nominal_levels[i + 1], std::sqrt(grid[i]), 1e-3);
    EXPECT_DOUBLE_EQ(c.calibrated_levels[i + 1], grid[i]);
  }
}

TEST(CalibrationCurve, TooFewDistinctKnots) {
  const std::vector<double> p(100, 0.5);
  EXPECT_EQ(kind_of([&] { curve_from_null_pvalues(p, {0.01, 0.05, 0.1}); }),
            ErrorKind::calibration_curve);
}

TEST(CalibrationConstants, TwoColumnFile) {
  std::istringstream in("nominal,calibrated\n0.02,0.01\n0.08,0.05\n0.15,0.1\n");
  const auto c = read_calibration_constants(in);
  EXPECT_EQ(c.provenance, CurveProvenance::user_supplied);
  EXPECT_EQ(c.nominal_levels, (std::vector<double>{0.0, 0.02, 0.08, 0.15}));
  EXPECT_EQ(c.calibrated_levels, (std::vector<double>{0.0, 0.01, 0.05, 0.1}));
}

TEST(Bundled, TableAndCurveLoad) {
  const auto t = load_table(bundled_table_path());
  EXPECT_EQ(t.sizes, default_table_sizes());
  EXPECT_EQ(t.probs, default_table_probs());
  EXPECT_EQ(t.reps_used, kDefaultTableReps);
  const auto c = load_curve(bundled_curve_path());
  EXPECT_EQ(c.provenance, CurveProvenance::simulated);
  EXPECT_EQ(c.sample_size, 300);
  EXPECT_GE(c.nominal_levels.size(), 4u);
}

TEST(Bundled, CurveCalibratesAThreeModeSizedPValue) {
  // An unadjusted p near 0.06 should come out near 0.012.
  const double adjusted = hall_york_adjust(0.0591, load_curve(bundled_curve_path()));
  EXPECT_GE(adjusted, 0.005);
  EXPECT_LE(adjusted, 0.02);
}

TEST(Bundled, IrisPetalWidth) {
  const auto s = load_sample(bundled_iris_path());
  EXPECT_EQ(s.size(), 150u);
  EXPECT_NEAR(std::accumulate(s.values().begin(), s.values().end(), 0.0), 179.9, 1e-9);
  EXPECT_DOUBLE_EQ(s.min(), 0.1);
  EXPECT_DOUBLE_EQ(s.max(), 2.5);
}
