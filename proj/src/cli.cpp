#include "unimodal/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <optional>
#include <random>

#include "unimodal/dip.hpp"
#include "unimodal/replication.hpp"
#include "unimodal/report.hpp"
#include "unimodal/rng.hpp"
#include "unimodal/sample.hpp"
#include "unimodal/silverman.hpp"
#include "unimodal/tables.hpp"

namespace unimodal::cli {

int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::missing_data: return 3;
    case ErrorKind::unsupported_size:
    case ErrorKind::corrupt_table:
    case ErrorKind::calibration_curve: return 4;
    case ErrorKind::degenerate_spread: return 5;
    case ErrorKind::validation:
    case ErrorKind::dimensionality:
    case ErrorKind::empty_sample:
    case ErrorKind::degenerate_sample:
    case ErrorKind::usage:
    case ErrorKind::io: return 2;
  }
  return 2;
}

namespace {

const std::map<std::string, ReportFormat> kFormats = {
    {"text", ReportFormat::text}, {"json", ReportFormat::json}, {"csv", ReportFormat::csv}};

const std::map<std::string, HeaderMode> kHeaderModes = {
    {"auto", HeaderMode::detect}, {"yes", HeaderMode::present}, {"no", HeaderMode::absent}};

struct OutputArgs {
  std::string out;
  ReportFormat format = ReportFormat::text;
  unsigned workers = 0;
};

struct InputArgs {
  std::string input;
  std::string column;
  bool complete_case = false;
  HeaderMode header = HeaderMode::detect;
};

void add_output_options(CLI::App* cmd, OutputArgs& a) {
  cmd->add_option("--out", a.out, "write the report to this file instead of stdout");
  cmd->add_option("--format", a.format, "text, json or csv")
      ->transform(CLI::CheckedTransformer(kFormats, CLI::ignore_case));
  cmd->add_option("--workers", a.workers, "worker threads (0 = hardware concurrency)");
}

void add_input_options(CLI::App* cmd, InputArgs& a) {
  cmd->add_option("input", a.input, "CSV/TSV file, or - for standard input")->required();
  cmd->add_option("--column", a.column, "column name, or 1-based column index");
  cmd->add_flag("--complete-case", a.complete_case, "drop missing values instead of failing");
  cmd->add_option("--header", a.header, "header row: auto, yes or no")
      ->transform(CLI::CheckedTransformer(kHeaderModes, CLI::ignore_case));
}

Sample read_input(const InputArgs& a, std::istream& in) {
  LoadOptions opt;
  opt.complete_case = a.complete_case;
  opt.header = a.header;
  if (!a.column.empty()) {
    const bool numeric = std::all_of(a.column.begin(), a.column.end(),
                                     [](unsigned char c) { return std::isdigit(c) != 0; });
    if (numeric) {
      const auto idx = std::stoul(a.column);
      if (idx == 0) throw Error(ErrorKind::usage, "column indices start at 1");
      opt.column = ColumnSelector{std::size_t{idx - 1}};
    } else {
      opt.column = ColumnSelector{a.column};
    }
  }
  if (a.input == "-") return load_sample(in, opt);
  return load_sample(std::filesystem::path(a.input), opt);
}

std::string data_name(const InputArgs& a) {
  std::string name = a.input == "-" ? "<stdin>" : a.input;
  if (!a.column.empty()) name += "[" + a.column + "]";
  return name;
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::io, "cannot write '" + path + "'");
  f << text;
  if (!f) throw Error(ErrorKind::io, "failed writing '" + path + "'");
}

// I/O failures on tables and curves are table errors, not input errors.
template <class F>
auto reclassify_io(F&& load, ErrorKind as) {
  try {
    return load();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::io) throw Error(as, e.what());
    throw;
  }
}

DipQuantileTable open_table(const std::string& spec) {
  const auto path = spec == "default" ? bundled_table_path() : std::filesystem::path(spec);
  return reclassify_io([&] { return load_table(path); }, ErrorKind::corrupt_table);
}

CalibrationCurve open_curve(const std::string& spec) {
  const auto path = spec == "default" ? bundled_curve_path() : std::filesystem::path(spec);
  return reclassify_io([&] { return load_curve_or_constants(path); },
                       ErrorKind::calibration_curve);
}

std::uint64_t fresh_seed() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) | rd();
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

std::vector<std::string> reversed(std::vector<std::string> v) {
  std::reverse(v.begin(), v.end());
  return v;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Unimodality tests: Hartigans' dip test and Silverman's critical bandwidth test",
               "unimodal"};
  app.require_subcommand(1);
  app.fallthrough(false);

  // dip
  InputArgs dip_in;
  OutputArgs dip_out;
  bool dip_simulate = false;
  int dip_reps = kDefaultDipReps;
  std::optional<std::uint64_t> dip_seed;
  std::string dip_table = "default";
  auto* dip = app.add_subcommand("dip", "Hartigans' dip test");
  add_input_options(dip, dip_in);
  add_output_options(dip, dip_out);
  dip->add_flag("--simulate-pvalue", dip_simulate, "Monte Carlo p-value instead of the table");
  dip->add_option("--reps", dip_reps, "Monte Carlo replications")->check(CLI::PositiveNumber);
  dip->add_option("--seed", dip_seed, "seed for the Monte Carlo p-value");
  dip->add_option("--table", dip_table, "quantile table file, or 'default' for the bundled one");

  // silverman
  InputArgs sil_in;
  OutputArgs sil_out;
  SilvermanOptions sil;
  bool show_seed = false;
  std::string seed_out;
  std::string sil_curve = "default";
  auto* silv = app.add_subcommand("silverman", "Silverman's critical bandwidth test");
  add_input_options(silv, sil_in);
  add_output_options(silv, sil_out);
  silv->add_option("--k", sil.k, "number of modes under the null")->check(CLI::PositiveNumber);
  silv->add_option("--M", sil.M, "bootstrap replications")->check(CLI::PositiveNumber);
  silv->add_flag("--adjust", sil.adjust, "calibrated p-value (k = 1 only)");
  silv->add_option("--digits", sil.digits, "decimal places of the adjusted p-value")
      ->check(CLI::Range(0, 15));
  silv->add_option("--seed", sil.seed, "random seed (drawn from the system if omitted)");
  silv->add_flag("--show-seed", show_seed, "print the generator state to stderr");
  silv->add_option("--seed-out", seed_out, "write the generator state to this file");
  silv->add_option("--curve", sil_curve,
                   "calibration curve or two-column constants file, or 'default'");

  // modes
  InputArgs modes_in;
  OutputArgs modes_out;
  double alpha = 0.05;
  int k_max = 10;
  int modes_M = kDefaultBootstrapReps;
  std::optional<std::uint64_t> modes_seed;
  auto* modes = app.add_subcommand("modes", "estimate the number of modes sequentially");
  add_input_options(modes, modes_in);
  add_output_options(modes, modes_out);
  modes->add_option("--alpha", alpha, "significance level")->check(CLI::Range(0.0, 1.0));
  modes->add_option("--k-max", k_max, "largest k tested")->check(CLI::PositiveNumber);
  modes->add_option("--M", modes_M, "bootstrap replications")->check(CLI::PositiveNumber);
  modes->add_option("--seed", modes_seed, "random seed shared by every k");

  // gen-table
  std::vector<int> gt_sizes = default_table_sizes();
  std::vector<double> gt_probs = default_table_probs();
  std::uint64_t gt_reps = kDefaultTableReps;
  std::uint64_t gt_seed = 1;
  std::string gt_out;
  unsigned gt_workers = 0;
  auto* gen = app.add_subcommand("gen-table", "simulate a dip quantile table");
  gen->add_option("--sizes", gt_sizes, "sample sizes")->delimiter(',');
  gen->add_option("--probs", gt_probs, "probabilities")->delimiter(',');
  gen->add_option("--reps", gt_reps, "replications per size");
  gen->add_option("--seed", gt_seed, "random seed");
  gen->add_option("--out", gt_out, "table file")->required();
  gen->add_option("--workers", gt_workers, "worker threads (0 = hardware concurrency)");

  // calibrate
  std::vector<double> cal_grid = default_alpha_grid();
  int cal_n = 300;
  int cal_M = kDefaultBootstrapReps;
  std::uint64_t cal_reps = 2000;
  std::uint64_t cal_seed = 1;
  std::string cal_out;
  std::uint64_t holdout_reps = 0;
  unsigned cal_workers = 0;
  auto* cal = app.add_subcommand("calibrate", "derive a Silverman calibration curve");
  cal->add_option("--alpha-grid", cal_grid, "nominal levels")->delimiter(',');
  cal->add_option("--n", cal_n, "null sample size")->check(CLI::Range(2, 1000000));
  cal->add_option("--M", cal_M, "bootstrap replications")->check(CLI::PositiveNumber);
  cal->add_option("--reps-outer", cal_reps, "null samples simulated");
  cal->add_option("--seed", cal_seed, "random seed");
  cal->add_option("--out", cal_out, "curve file")->required();
  cal->add_option("--holdout-reps", holdout_reps,
                  "also report the adjusted test's level on this many fresh samples");
  cal->add_option("--workers", cal_workers, "worker threads (0 = hardware concurrency)");

  // replicate
  std::string suite;
  ReplicationOptions rep;
  rep.runs = 0;
  OutputArgs rep_out;
  std::string rep_table = "default";
  std::string rep_curve = "default";
  std::string rep_iris = "default";
  auto* repl = app.add_subcommand("replicate", "rerun the published comparison tables");
  repl->add_option("--suite", suite, "gaussians or iris")->required();
  repl->add_option("--seed", rep.seed, "first seed; run r uses seed + r");
  repl->add_option("--reps-outer", rep.runs, "runs (default 50 for gaussians, 20 for iris)");
  repl->add_option("--M", rep.M, "bootstrap replications")->check(CLI::PositiveNumber);
  repl->add_option("--table", rep_table, "dip quantile table, or 'default'");
  repl->add_option("--curve", rep_curve, "calibration curve, or 'default'");
  repl->add_option("--iris", rep_iris, "iris petal-width file, or 'default'");
  add_output_options(repl, rep_out);

  try {
    app.parse(reversed(args));
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << (e.get_name() == "CallForVersion" ? "" : app.help());
      return 0;
    }
    err << "error[usage]: " << one_line(e.what()) << "\n";
    return 2;
  }

  try {
    if (dip->parsed()) {
      const auto s = read_input(dip_in, in);
      DipOptions opt;
      opt.simulate_pvalue = dip_simulate;
      opt.reps = dip_reps;
      opt.workers = dip_out.workers;
      std::optional<DipQuantileTable> table;
      if (dip_simulate) {
        opt.seed = dip_seed ? *dip_seed : fresh_seed();
      } else {
        table = open_table(dip_table);
      }
      const auto r = dip_test(s, opt, table ? &*table : nullptr);
      emit(render(make_report(r, s, data_name(dip_in)), dip_out.format), dip_out.out, out);
    } else if (silv->parsed()) {
      const auto s = read_input(sil_in, in);
      if (!sil.seed) sil.seed = fresh_seed();
      const std::string state = Rng(*sil.seed).dump();
      if (show_seed) err << state << "\n";
      if (!seed_out.empty()) emit(state + "\n", seed_out, out);
      sil.workers = sil_out.workers;
      std::optional<CalibrationCurve> curve;
      if (sil.adjust && sil.k == 1) curve = open_curve(sil_curve);
      const auto r = silverman_test(s, sil, curve ? &*curve : nullptr);
      emit(render(make_report(r, s, data_name(sil_in)), sil_out.format), sil_out.out, out);
    } else if (modes->parsed()) {
      const auto s = read_input(modes_in, in);
      const auto seed = modes_seed ? *modes_seed : fresh_seed();
      const auto est = estimate_num_modes(s, alpha, k_max, modes_M, seed, modes_out.workers);
      emit(render(est, alpha, modes_M, s, data_name(modes_in), modes_out.format),
           modes_out.out, out);
    } else if (gen->parsed()) {
      const auto table = generate_dip_table(gt_sizes, gt_probs, gt_reps, gt_seed, gt_workers);
      save_table(gt_out, table);
    } else if (cal->parsed()) {
      const auto curve = derive_calibration_curve(cal_grid, cal_n, cal_M, cal_reps, cal_seed,
                                                  cal_workers);
      save_curve(cal_out, curve);
      if (holdout_reps > 0) {
        // A seed past the derivation seed keeps the hold-out samples fresh.
        const double level = calibration_holdout_level(curve, cal_n, cal_M, holdout_reps,
                                                       cal_seed + 1, 0.05, cal_workers);
        out << "hold-out level at 0.05: " << level << " over " << holdout_reps << " samples\n";
      }
    } else if (repl->parsed()) {
      if (suite != "gaussians" && suite != "iris") {
        throw Error(ErrorKind::usage, "unknown suite '" + suite + "' (gaussians or iris)");
      }
      rep.workers = rep_out.workers;
      const auto table = open_table(rep_table);
      const auto curve = open_curve(rep_curve);
      std::vector<ReplicationCell> cells;
      std::vector<CriterionOutcome> outcomes;
      if (suite == "gaussians") {
        if (rep.runs == 0) rep.runs = 50;
        cells = replicate_gaussians(rep, table, curve);
        outcomes = evaluate_gaussians(cells);
      } else {
        if (rep.runs == 0) rep.runs = 20;
        const auto path =
            rep_iris == "default" ? bundled_iris_path() : std::filesystem::path(rep_iris);
        const auto iris = load_sample(path);
        cells = replicate_iris(iris, rep, table, curve);
        outcomes = evaluate_iris(cells);
      }
      emit(render(cells, outcomes, rep_out.format), rep_out.out, out);
    }
  } catch (const Error& e) {
    err << "error[" << to_string(e.kind()) << "]: " << one_line(e.what()) << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "error[internal]: " << one_line(e.what()) << "\n";
    return 1;
  }
  return 0;
}

}  // namespace unimodal::cli
