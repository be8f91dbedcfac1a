#pragma once

#include <optional>
#include <string>
#include <vector>

#include "unimodal/dip.hpp"
#include "unimodal/replication.hpp"
#include "unimodal/sample.hpp"
#include "unimodal/silverman.hpp"

namespace unimodal {

enum class ReportFormat { text, json, csv };

/// What a single test run reports, independent of the output format.
struct TestReport {
  std::string test_name;
  std::string data_name;
  std::string null_hypothesis;
  std::string alternative;
  std::string statistic_name;
  double statistic = 0.0;
  double p_value = 1.0;
  std::optional<double> unadjusted_p;
  std::string method;
  std::optional<int> k;
  std::optional<int> M;
  std::optional<int> reps;
  std::optional<bool> adjusted;
  std::optional<int> digits;
  std::string seed = "none";
  std::size_t n = 0;
  std::size_t dropped_missing = 0;
  std::vector<std::string> warnings;
};

TestReport make_report(const DipTestResult& r, const Sample& s, std::string data_name);
TestReport make_report(const SilvermanTestResult& r, const Sample& s, std::string data_name);

std::string render(const TestReport& r, ReportFormat format);

std::string render(const ModeEstimate& est, double alpha, int M, const Sample& s,
                   const std::string& data_name, ReportFormat format);

/// Side-by-side published values and per-seed summaries, then one line per
/// criterion.
std::string render(const std::vector<ReplicationCell>& cells,
                   const std::vector<CriterionOutcome>& outcomes, ReportFormat format);

}  // namespace unimodal
