#include "unimodal/tables.hpp"

#include <algorithm>
#include <boost/crc.hpp>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <sstream>
#include <type_traits>

#include "unimodal/dip.hpp"
#include "unimodal/error.hpp"
#include "unimodal/parallel.hpp"
#include "unimodal/silverman.hpp"

#ifndef UNIMODAL_DATA_DIR
#define UNIMODAL_DATA_DIR "data"
#endif

namespace unimodal {

std::string_view to_string(CurveProvenance p) noexcept {
  return p == CurveProvenance::simulated ? "simulated" : "user_supplied";
}

void DipQuantileTable::validate() const {
  auto fail = [](const std::string& why) {
    throw Error(ErrorKind::corrupt_table, "invalid dip table: " + why);
  };
  if (sizes.empty() || probs.empty()) fail("empty grid");
  if (quantiles.size() != sizes.size()) fail("row count does not match sizes");
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] < 4) fail("sizes below 4 are not supported");
    if (i > 0 && sizes[i] <= sizes[i - 1]) fail("sizes not increasing");
  }
  for (std::size_t j = 0; j < probs.size(); ++j) {
    if (!(probs[j] > 0.0 && probs[j] < 1.0)) fail("probability outside (0, 1)");
    if (j > 0 && probs[j] <= probs[j - 1]) fail("probabilities not increasing");
  }
  for (std::size_t i = 0; i < quantiles.size(); ++i) {
    const auto& row = quantiles[i];
    if (row.size() != probs.size()) fail("row length does not match probs");
    const double floor_dip = 1.0 / (2.0 * sizes[i]);
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (!std::isfinite(row[j]) || row[j] < floor_dip * (1 - 1e-12)) {
        fail("quantile below 1/(2n) in row " + std::to_string(sizes[i]));
      }
      if (j > 0 && row[j] < row[j - 1]) fail("row " + std::to_string(sizes[i]) + " decreasing");
    }
  }
}

void CalibrationCurve::validate() const {
  auto fail = [](const std::string& why) {
    throw Error(ErrorKind::calibration_curve, "invalid calibration curve: " + why);
  };
  if (nominal_levels.size() != calibrated_levels.size()) fail("knot sequences differ in length");
  if (nominal_levels.size() < 4) fail("fewer than 4 knots");
  if (nominal_levels.front() != 0.0 || calibrated_levels.front() != 0.0) {
    fail("curve must be anchored at (0, 0)");
  }
  for (std::size_t i = 1; i < nominal_levels.size(); ++i) {
    if (!(nominal_levels[i] > nominal_levels[i - 1]) ||
        !(calibrated_levels[i] > calibrated_levels[i - 1])) {
      fail("knots not strictly increasing");
    }
    if (nominal_levels[i] > 1.0 || calibrated_levels[i] > 1.0) fail("knot above 1");
  }
}

std::vector<int> default_table_sizes() {
  return {4, 5, 6, 7, 8, 9, 10, 15, 20, 30, 50, 100, 200, 500, 1000, 2000};
}

std::vector<double> default_table_probs() {
  return {0.01, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6,  0.7,
          0.8,  0.9,  0.95, 0.99, 0.995, 0.999, 0.9995, 0.9999};
}

std::vector<double> default_alpha_grid() {
  return {0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08, 0.09, 0.10,
          0.15, 0.20, 0.30, 0.40, 0.50, 0.60, 0.70, 0.80, 0.90};
}

double empirical_quantile(std::span<const double> sorted, double prob) {
  const double pos = prob * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

DipQuantileTable generate_dip_table(const std::vector<int>& sizes,
                                    const std::vector<double>& probs,
                                    std::uint64_t reps, std::uint64_t seed,
                                    unsigned workers) {
  if (reps < 2) throw Error(ErrorKind::usage, "table generation needs reps >= 2");
  DipQuantileTable table;
  table.sizes = sizes;
  table.probs = probs;
  table.reps_used = reps;
  table.seed_used = seed;

  const Rng root(seed);
  std::vector<double> dips(reps);
  for (std::size_t si = 0; si < sizes.size(); ++si) {
    const int n = sizes[si];
    if (n < 4) throw Error(ErrorKind::unsupported_size, "dip tables start at n = 4");
    const Rng size_stream = root.substream(si);
    parallel_for(reps, workers, [&](std::size_t r) {
      Rng stream = size_stream.substream(r);
      std::vector<double> u(static_cast<std::size_t>(n));
      for (double& v : u) v = stream.uniform();
      std::sort(u.begin(), u.end());
      dips[r] = dip_statistic(u);
    });
    std::sort(dips.begin(), dips.end());
    std::vector<double> row;
    row.reserve(probs.size());
    for (double p : probs) row.push_back(empirical_quantile(dips, p));
    table.quantiles.push_back(std::move(row));
  }
  table.validate();
  return table;
}

std::vector<double> simulate_null_silverman_pvalues(int n, int M, std::uint64_t outer_reps,
                                                    const Rng& rng, unsigned workers) {
  std::vector<double> pvalues(outer_reps);
  parallel_for(outer_reps, workers, [&](std::size_t i) {
    const Rng base = rng.substream(i);
    Rng data_stream = base.substream(0);
    std::vector<double> x(static_cast<std::size_t>(n));
    for (double& v : x) v = data_stream.normal();
    const auto s = Sample::from_values(std::move(x));
    pvalues[i] = silverman_pvalue(s, 1, M, base.substream(1), 1).p;
  });
  return pvalues;
}

CalibrationCurve curve_from_null_pvalues(std::vector<double> null_pvalues,
                                         const std::vector<double>& alpha_grid) {
  if (null_pvalues.empty()) {
    throw Error(ErrorKind::calibration_curve, "no null p-values to calibrate from");
  }
  for (std::size_t i = 0; i < alpha_grid.size(); ++i) {
    if (!(alpha_grid[i] > 0.0 && alpha_grid[i] < 1.0) ||
        (i > 0 && alpha_grid[i] <= alpha_grid[i - 1])) {
      throw Error(ErrorKind::calibration_curve,
                  "alpha grid must be strictly increasing inside (0, 1)");
    }
  }
  std::sort(null_pvalues.begin(), null_pvalues.end());

  CalibrationCurve curve;
  curve.nominal_levels = {0.0};
  curve.calibrated_levels = {0.0};
  for (double alpha : alpha_grid) {
    const double t = empirical_quantile(null_pvalues, alpha);
    if (t > curve.nominal_levels.back()) {
      curve.nominal_levels.push_back(t);
      curve.calibrated_levels.push_back(alpha);
    }
  }
  if (curve.nominal_levels.size() < 4) {
    throw Error(ErrorKind::calibration_curve,
                "degenerate alpha grid: fewer than 4 distinct thresholds");
  }
  curve.reps_used = null_pvalues.size();
  return curve;
}

CalibrationCurve derive_calibration_curve(const std::vector<double>& alpha_grid, int n,
                                          int M, std::uint64_t outer_reps,
                                          std::uint64_t seed, unsigned workers) {
  if (alpha_grid.empty()) throw Error(ErrorKind::calibration_curve, "empty alpha grid");
  const auto pvalues = simulate_null_silverman_pvalues(n, M, outer_reps, Rng(seed), workers);
  auto curve = curve_from_null_pvalues(pvalues, alpha_grid);
  curve.provenance = CurveProvenance::simulated;
  curve.seed_used = seed;
  curve.sample_size = n;
  curve.bootstrap_reps = M;
  curve.validate();
  return curve;
}

double calibration_holdout_level(const CalibrationCurve& curve, int n, int M,
                                 std::uint64_t reps, std::uint64_t seed, double alpha,
                                 unsigned workers) {
  if (reps < 1) throw Error(ErrorKind::usage, "hold-out needs at least one replication");
  curve.validate();
  const auto pvalues = simulate_null_silverman_pvalues(n, M, reps, Rng(seed), workers);
  const auto rejected = std::count_if(pvalues.begin(), pvalues.end(), [&](double p) {
    return hall_york_adjust(p, curve, kDefaultDigits) < alpha;
  });
  return static_cast<double>(rejected) / static_cast<double>(reps);
}

// ---------------------------------------------------------------------------
// Persistence

namespace {

constexpr std::string_view kTableFormat = "unimodal-dip-table";
constexpr std::string_view kCurveFormat = "unimodal-calibration-curve";
constexpr int kFormatVersion = 1;

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

template <class Range>
void write_row(std::ostream& os, std::string_view tag, const Range& values) {
  os << tag;
  for (const auto& v : values) {
    if constexpr (std::is_floating_point_v<std::decay_t<decltype(v)>>) {
      os << ',' << format_double(v);
    } else {
      os << ',' << v;
    }
  }
  os << '\n';
}

std::uint32_t crc32(std::string_view bytes) {
  boost::crc_32_type crc;
  crc.process_bytes(bytes.data(), bytes.size());
  return crc.checksum();
}

std::string crc_hex(std::uint32_t c) {
  std::ostringstream os;
  os << std::hex << std::setw(8) << std::setfill('0') << c;
  return os.str();
}

void finish_with_checksum(std::ostream& out, const std::string& body) {
  out << body << "checksum," << crc_hex(crc32(body)) << '\n';
}

[[noreturn]] void corrupt(const std::string& what) {
  throw Error(ErrorKind::corrupt_table, what);
}

// Checks the trailing CRC line and returns the body split into fields per line.
std::vector<std::vector<std::string>> verified_records(std::istream& in,
                                                       std::string_view format) {
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (text.empty() || text.back() != '\n') corrupt("file truncated");
  const auto last_start = text.rfind('\n', text.size() - 2);
  const std::size_t body_len = last_start == std::string::npos ? 0 : last_start + 1;
  const std::string_view body(text.data(), body_len);
  const std::string_view last(text.data() + body_len, text.size() - body_len - 1);
  constexpr std::string_view prefix = "checksum,";
  if (last.substr(0, prefix.size()) != prefix) corrupt("missing checksum line");
  if (last.substr(prefix.size()) != crc_hex(crc32(body))) corrupt("checksum mismatch");

  std::vector<std::vector<std::string>> records;
  std::istringstream bs{std::string(body)};
  for (std::string line; std::getline(bs, line);) {
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> fields;
    std::istringstream ls(line);
    for (std::string f; std::getline(ls, f, ',');) fields.push_back(f);
    records.push_back(std::move(fields));
  }
  if (records.empty() || records.front().size() != 3 || records.front()[0] != "format" ||
      records.front()[1] != format) {
    corrupt("not a " + std::string(format) + " file");
  }
  if (records.front()[2] != std::to_string(kFormatVersion)) {
    corrupt("unsupported format version " + records.front()[2]);
  }
  return records;
}

template <class T>
T parse_field(const std::string& s) {
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) corrupt("malformed field '" + s + "'");
  return v;
}

template <class T>
std::vector<T> parse_list(const std::vector<std::string>& rec, std::size_t from = 1) {
  std::vector<T> out;
  for (std::size_t i = from; i < rec.size(); ++i) out.push_back(parse_field<T>(rec[i]));
  return out;
}

const std::vector<std::string>& expect(const std::vector<std::vector<std::string>>& recs,
                                       std::size_t i, std::string_view tag) {
  if (i >= recs.size() || recs[i].empty() || recs[i][0] != tag) {
    corrupt("expected '" + std::string(tag) + "' record");
  }
  return recs[i];
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot write '" + path.string() + "'");
  return out;
}

std::ifstream open_for_read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open '" + path.string() + "'");
  return in;
}

}  // namespace

void write_table(std::ostream& out, const DipQuantileTable& table) {
  std::ostringstream os;
  os << "# dip statistic quantiles under uniform(0,1) samples\n";
  os << "format," << kTableFormat << ',' << kFormatVersion << '\n';
  os << "seed," << table.seed_used << '\n';
  os << "reps," << table.reps_used << '\n';
  write_row(os, "sizes", table.sizes);
  write_row(os, "probs", table.probs);
  for (std::size_t i = 0; i < table.sizes.size(); ++i) {
    os << "row," << table.sizes[i];
    for (double q : table.quantiles[i]) os << ',' << format_double(q);
    os << '\n';
  }
  finish_with_checksum(out, os.str());
}

DipQuantileTable read_table(std::istream& in) {
  const auto recs = verified_records(in, kTableFormat);
  DipQuantileTable t;
  t.seed_used = parse_field<std::uint64_t>(expect(recs, 1, "seed").at(1));
  t.reps_used = parse_field<std::uint64_t>(expect(recs, 2, "reps").at(1));
  t.sizes = parse_list<int>(expect(recs, 3, "sizes"));
  t.probs = parse_list<double>(expect(recs, 4, "probs"));
  if (recs.size() != 5 + t.sizes.size()) corrupt("row count does not match sizes");
  for (std::size_t i = 0; i < t.sizes.size(); ++i) {
    const auto& rec = expect(recs, 5 + i, "row");
    if (rec.size() < 2 || parse_field<int>(rec[1]) != t.sizes[i]) corrupt("row size mismatch");
    t.quantiles.push_back(parse_list<double>(rec, 2));
  }
  t.validate();
  return t;
}

void save_table(const std::filesystem::path& path, const DipQuantileTable& table) {
  auto out = open_for_write(path);
  write_table(out, table);
}

DipQuantileTable load_table(const std::filesystem::path& path) {
  auto in = open_for_read(path);
  return read_table(in);
}

void write_curve(std::ostream& out, const CalibrationCurve& curve) {
  std::ostringstream os;
  os << "# calibration curve for the Silverman k = 1 p-value\n";
  os << "format," << kCurveFormat << ',' << kFormatVersion << '\n';
  os << "provenance," << to_string(curve.provenance) << '\n';
  os << "seed," << curve.seed_used << '\n';
  os << "reps," << curve.reps_used << '\n';
  os << "sample_size," << curve.sample_size << '\n';
  os << "bootstrap_reps," << curve.bootstrap_reps << '\n';
  write_row(os, "nominal", curve.nominal_levels);
  write_row(os, "calibrated", curve.calibrated_levels);
  finish_with_checksum(out, os.str());
}

CalibrationCurve read_curve(std::istream& in) {
  const auto recs = verified_records(in, kCurveFormat);
  CalibrationCurve c;
  const auto& prov = expect(recs, 1, "provenance").at(1);
  if (prov == "simulated") {
    c.provenance = CurveProvenance::simulated;
  } else if (prov == "user_supplied") {
    c.provenance = CurveProvenance::user_supplied;
  } else {
    corrupt("unknown provenance '" + prov + "'");
  }
  c.seed_used = parse_field<std::uint64_t>(expect(recs, 2, "seed").at(1));
  c.reps_used = parse_field<std::uint64_t>(expect(recs, 3, "reps").at(1));
  c.sample_size = parse_field<int>(expect(recs, 4, "sample_size").at(1));
  c.bootstrap_reps = parse_field<int>(expect(recs, 5, "bootstrap_reps").at(1));
  c.nominal_levels = parse_list<double>(expect(recs, 6, "nominal"));
  c.calibrated_levels = parse_list<double>(expect(recs, 7, "calibrated"));
  if (recs.size() != 8) corrupt("unexpected trailing records");
  try {
    c.validate();
  } catch (const Error& e) {
    corrupt(e.what());
  }
  return c;
}

void save_curve(const std::filesystem::path& path, const CalibrationCurve& curve) {
  auto out = open_for_write(path);
  write_curve(out, curve);
}

CalibrationCurve load_curve(const std::filesystem::path& path) {
  auto in = open_for_read(path);
  return read_curve(in);
}

CalibrationCurve read_calibration_constants(std::istream& in) {
  CalibrationCurve c;
  c.provenance = CurveProvenance::user_supplied;
  bool first = true;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw Error(ErrorKind::calibration_curve, "constants line without two columns: " + line);
    }
    double x = 0, y = 0;
    const auto a = line.substr(0, comma);
    const auto b = line.substr(comma + 1);
    const auto rx = std::from_chars(a.data(), a.data() + a.size(), x);
    const auto ry = std::from_chars(b.data(), b.data() + b.size(), y);
    const bool ok = rx.ec == std::errc() && ry.ec == std::errc();
    if (!ok && first) {
      first = false;
      continue;  // header
    }
    first = false;
    if (!ok) throw Error(ErrorKind::calibration_curve, "non-numeric constants line: " + line);
    c.nominal_levels.push_back(x);
    c.calibrated_levels.push_back(y);
  }
  if (c.nominal_levels.empty() || c.nominal_levels.front() != 0.0) {
    c.nominal_levels.insert(c.nominal_levels.begin(), 0.0);
    c.calibrated_levels.insert(c.calibrated_levels.begin(), 0.0);
  }
  c.validate();
  return c;
}

CalibrationCurve load_curve_or_constants(const std::filesystem::path& path) {
  auto in = open_for_read(path);
  std::string head;
  std::getline(in, head);
  in.clear();
  in.seekg(0);
  if (head.rfind("# calibration curve", 0) == 0 || head.rfind("format,", 0) == 0) {
    return read_curve(in);
  }
  return read_calibration_constants(in);
}

std::filesystem::path data_dir() {
  if (const char* env = std::getenv("UNIMODAL_DATA_DIR"); env != nullptr && *env != '\0') {
    return env;
  }
  return UNIMODAL_DATA_DIR;
}

std::filesystem::path bundled_table_path() { return data_dir() / "dip_quantiles.tab"; }
std::filesystem::path bundled_curve_path() { return data_dir() / "silverman_calibration.curve"; }
std::filesystem::path bundled_iris_path() { return data_dir() / "iris_petal_width.csv"; }

}  // namespace unimodal
