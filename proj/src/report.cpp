#include "unimodal/report.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <json.hpp>
#include <numeric>
#include <sstream>

namespace unimodal {

namespace {

using Json = nlohmann::ordered_json;

std::string shortest(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

std::string pretty(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string to_text(const TestReport& r) {
  std::ostringstream os;
  os << "\n\t" << r.test_name << "\n\n";
  os << "data:  " << r.data_name << " (n = " << r.n;
  if (r.dropped_missing > 0) os << ", dropped_missing = " << r.dropped_missing;
  os << ")\n";
  os << r.statistic_name << " = " << pretty(r.statistic) << ", p-value = " << pretty(r.p_value)
     << "\n";
  if (r.unadjusted_p) os << "unadjusted p-value = " << pretty(*r.unadjusted_p) << "\n";
  os << "null hypothesis: " << r.null_hypothesis << "\n";
  os << "alternative hypothesis: " << r.alternative << "\n";
  os << "method: " << r.method;
  if (r.k) os << ", k = " << *r.k;
  if (r.M) os << ", M = " << *r.M;
  if (r.reps) os << ", reps = " << *r.reps;
  if (r.adjusted) os << ", adjusted = " << (*r.adjusted ? "yes" : "no");
  if (r.digits) os << ", digits = " << *r.digits;
  os << ", seed = " << r.seed << "\n";
  for (const auto& w : r.warnings) os << "warning: " << w << "\n";
  return os.str();
}

Json to_json(const TestReport& r) {
  Json j;
  j["test"] = r.test_name;
  j["data"] = r.data_name;
  j["null_hypothesis"] = r.null_hypothesis;
  j["alternative"] = r.alternative;
  j["statistic_name"] = r.statistic_name;
  j["statistic"] = r.statistic;
  j["p_value"] = r.p_value;
  j["unadjusted_p_value"] = r.unadjusted_p ? Json(*r.unadjusted_p) : Json(nullptr);
  Json params;
  params["method"] = r.method;
  params["k"] = r.k ? Json(*r.k) : Json(nullptr);
  params["M"] = r.M ? Json(*r.M) : Json(nullptr);
  params["reps"] = r.reps ? Json(*r.reps) : Json(nullptr);
  params["adjusted"] = r.adjusted ? Json(*r.adjusted) : Json(nullptr);
  params["digits"] = r.digits ? Json(*r.digits) : Json(nullptr);
  params["seed"] = r.seed;
  j["parameters"] = params;
  j["sample"] = {{"n", r.n}, {"dropped_missing", r.dropped_missing}};
  j["warnings"] = r.warnings;
  return j;
}

std::string to_csv(const TestReport& r) {
  auto opt = [](const auto& v) { return v ? std::to_string(*v) : std::string(); };
  std::vector<std::string> keys = {"test", "data", "null_hypothesis", "alternative",
                                   "statistic_name", "statistic", "p_value",
                                   "unadjusted_p_value", "method", "k", "M", "reps",
                                   "adjusted", "digits", "seed", "n", "dropped_missing",
                                   "warnings"};
  std::vector<std::string> vals = {
      r.test_name,
      r.data_name,
      r.null_hypothesis,
      r.alternative,
      r.statistic_name,
      shortest(r.statistic),
      shortest(r.p_value),
      r.unadjusted_p ? shortest(*r.unadjusted_p) : "",
      r.method,
      opt(r.k),
      opt(r.M),
      opt(r.reps),
      r.adjusted ? (*r.adjusted ? "true" : "false") : "",
      opt(r.digits),
      r.seed,
      std::to_string(r.n),
      std::to_string(r.dropped_missing),
      join(r.warnings, "; "),
  };
  for (auto& v : vals) v = csv_field(v);
  return join(keys, ",") + "\n" + join(vals, ",") + "\n";
}

double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

TestReport make_report(const DipTestResult& r, const Sample& s, std::string data_name) {
  TestReport t;
  t.test_name = "Hartigans' dip test for unimodality / multimodality";
  t.data_name = std::move(data_name);
  t.null_hypothesis = "unimodal";
  t.alternative = std::string(kDipAlternative);
  t.statistic_name = "D";
  t.statistic = r.statistic;
  t.p_value = r.p_value;
  t.method = std::string(to_string(r.method));
  if (r.method == PValueMethod::monte_carlo) t.reps = r.reps;
  t.seed = r.seed ? std::to_string(*r.seed) : "none";
  t.n = s.size();
  t.dropped_missing = s.dropped_missing();
  t.warnings = r.warnings;
  return t;
}

TestReport make_report(const SilvermanTestResult& r, const Sample& s, std::string data_name) {
  TestReport t;
  t.test_name = "Silverman's critical bandwidth test";
  t.data_name = std::move(data_name);
  t.null_hypothesis = silverman_null_hypothesis(r.k);
  t.alternative = "number of modes > " + std::to_string(r.k);
  t.statistic_name = "h_crit";
  t.statistic = r.h_crit;
  t.p_value = r.p_value;
  if (r.adjusted) t.unadjusted_p = r.unadjusted_p;
  t.method = "smoothed bootstrap";
  t.k = r.k;
  t.M = r.M;
  t.adjusted = r.adjusted;
  if (r.adjusted) t.digits = r.digits;
  t.seed = std::to_string(r.seed);
  t.n = s.size();
  t.dropped_missing = s.dropped_missing();
  t.warnings = r.warnings;
  return t;
}

std::string render(const TestReport& r, ReportFormat format) {
  switch (format) {
    case ReportFormat::text: return to_text(r);
    case ReportFormat::json: return to_json(r).dump(2) + "\n";
    case ReportFormat::csv: return to_csv(r);
  }
  return {};
}

std::string render(const ModeEstimate& est, double alpha, int M, const Sample& s,
                   const std::string& data_name, ReportFormat format) {
  switch (format) {
    case ReportFormat::text: {
      std::ostringstream os;
      os << "\n\tSequential Silverman mode estimation\n\n";
      os << "data:  " << data_name << " (n = " << s.size();
      if (s.dropped_missing() > 0) os << ", dropped_missing = " << s.dropped_missing();
      os << ")\n";
      os << "alpha = " << pretty(alpha) << ", M = " << M << ", seed = " << est.seed << "\n";
      os << "  k      h_crit     p-value  decision\n";
      for (const auto& st : est.trace) {
        char line[96];
        std::snprintf(line, sizeof line, "%3d  %10.6g  %10.6g  %s\n", st.k, st.h_crit,
                      st.p_value, st.rejected ? "reject" : "fail to reject");
        os << line;
      }
      os << "estimated modes: " << est.modes << (est.inconclusive ? " (k_max reached)" : "")
         << "\n";
      return os.str();
    }
    case ReportFormat::json: {
      Json j;
      j["test"] = "Sequential Silverman mode estimation";
      j["data"] = data_name;
      j["alpha"] = alpha;
      j["M"] = M;
      j["seed"] = std::to_string(est.seed);
      j["modes"] = est.modes;
      j["inconclusive"] = est.inconclusive;
      Json trace = Json::array();
      for (const auto& st : est.trace) {
        trace.push_back({{"k", st.k}, {"h_crit", st.h_crit}, {"p_value", st.p_value},
                         {"rejected", st.rejected}});
      }
      j["trace"] = trace;
      j["sample"] = {{"n", s.size()}, {"dropped_missing", s.dropped_missing()}};
      return j.dump(2) + "\n";
    }
    case ReportFormat::csv: {
      std::string out = "k,h_crit,p_value,rejected,modes,seed\n";
      for (const auto& st : est.trace) {
        out += std::to_string(st.k) + "," + shortest(st.h_crit) + "," + shortest(st.p_value) +
               "," + (st.rejected ? "true" : "false") + "," + std::to_string(est.modes) + "," +
               std::to_string(est.seed) + "\n";
      }
      return out;
    }
  }
  return {};
}

std::string render(const std::vector<ReplicationCell>& cells,
                   const std::vector<CriterionOutcome>& outcomes, ReportFormat format) {
  switch (format) {
    case ReportFormat::text: {
      std::ostringstream os;
      char line[160];
      std::snprintf(line, sizeof line, "%-11s %2s  %-19s %10s  %10s  %10s  %5s\n", "dataset", "k",
                    "test", "published", "median", "mean", "runs");
      os << line;
      for (const auto& c : cells) {
        std::snprintf(line, sizeof line, "%-11s %2d  %-19s %10s  %10.4g  %10.4g  %5zu\n",
                      c.dataset.c_str(), c.k, std::string(to_string(c.test)).c_str(),
                      c.published.c_str(), median_of(c.pvalues), mean_of(c.pvalues),
                      c.pvalues.size());
        os << line;
      }
      os << "\n";
      for (const auto& o : outcomes) {
        os << (o.pass ? "PASS" : "FAIL") << "  " << o.name << ": " << o.observed << "\n";
      }
      return os.str();
    }
    case ReportFormat::json: {
      Json j;
      Json rows = Json::array();
      for (const auto& c : cells) {
        rows.push_back({{"dataset", c.dataset},
                        {"k", c.k},
                        {"test", std::string(to_string(c.test))},
                        {"published", c.published},
                        {"median", median_of(c.pvalues)},
                        {"mean", mean_of(c.pvalues)},
                        {"pvalues", c.pvalues}});
      }
      j["rows"] = rows;
      Json crit = Json::array();
      for (const auto& o : outcomes) {
        crit.push_back({{"criterion", o.name}, {"observed", o.observed}, {"pass", o.pass}});
      }
      j["criteria"] = crit;
      return j.dump(2) + "\n";
    }
    case ReportFormat::csv: {
      std::string out = "dataset,k,test,published,median,mean,runs\n";
      for (const auto& c : cells) {
        out += c.dataset + "," + std::to_string(c.k) + "," + std::string(to_string(c.test)) + "," +
               csv_field(c.published) + "," + shortest(median_of(c.pvalues)) + "," +
               shortest(mean_of(c.pvalues)) + "," + std::to_string(c.pvalues.size()) + "\n";
      }
      return out;
    }
  }
  return {};
}

}  // namespace unimodal
