#include "hdloc/cli/commands.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "hdloc/cli/csv_input.hpp"
#include "hdloc/cli/report.hpp"
#include "hdloc/cli/run_config.hpp"

namespace hdloc::cli {
namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

void write_single_markdown(std::ostream& out, const PowerTable& table) {
  out << "| test | scenario | n | p | allocation | rate (%) | stderr (%) | rejections | reps |\n";
  out << "|---|---|---|---|---|---|---|---|---|\n";
  for (const PowerRow& r : table.rows) {
    out << "| " << to_string(r.test) << " | " << r.scenario << " | " << r.n << " | " << r.p << " | "
        << to_string(r.allocation) << " | " << percent(r.rejection_rate) << " | " << percent(r.mc_stderr) << " | "
        << r.rejections << " | " << r.reps << " |\n";
  }
}

struct CheckLine {
  bool pass;
  std::string detail;
};

std::string sci(double v) {
  std::ostringstream out;
  out << std::setprecision(3) << v;
  return out.str();
}

Matrix random_fixture(Rng& rng, Index n, Index p) {
  std::normal_distribution<double> normal;
  Matrix x(n, p);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < p; ++j) x(i, j) = normal(rng) + 0.3;
  }
  return x;
}

CheckLine check_oracle(const CheckCommand& cmd) {
  Rng rng(substream_seed(cmd.seed, 1));
  std::uniform_int_distribution<Index> rows(4, 12);
  std::uniform_int_distribution<Index> cols(1, 10);
  double worst = 0.0;
  for (int f = 0; f < 200; ++f) {
    const Index n = rows(rng);
    const Index p = cols(rng);
    const SampleMatrix x(random_fixture(rng, n, p));
    worst = std::max(worst, std::abs(cmd.fast_path(x) - sr_statistic_naive(x)));
  }
  return {worst < 1e-10, "200 fixtures, max |fast - naive| = " + sci(worst) + " (required < 1e-10)"};
}

CheckLine check_trace_identity(const CheckCommand& cmd) {
  Rng rng(substream_seed(cmd.seed, 2));
  double worst = 0.0;
  for (int f = 0; f < 10; ++f) {
    const SampleMatrix x(random_fixture(rng, 6 + f, 5));
    double mean = 0.0;
    for (Index i = 0; i < x.n(); ++i) mean += trace_sigma2_reduced(x, i);
    mean /= static_cast<double>(x.n());
    const double full = trace_sigma2_full(x);
    worst = std::max(worst, std::abs(mean / full - 1.0));
  }
  return {worst < 1e-10,
          "full trace vs mean of frozen-index traces, max relative gap = " + sci(worst) + " (required < 1e-10)"};
}

CheckLine check_lemma1(const CheckCommand& cmd) {
  bool pass = true;
  std::ostringstream detail;
  for (Index p : {5, 20}) {
    Rng rng(substream_seed(cmd.seed, 30 + static_cast<std::uint64_t>(p)));
    const Eigen::MatrixXd a = random_fixture(rng, p, p);
    const Eigen::MatrixXd m = (a + a.transpose()) / 2.0;
    const SphereMomentCheck c = sphere_moment_check(m, 20000, substream_seed(cmd.seed, 40 + p));
    const double z2 = c.se2 > 0.0 ? std::abs(c.mc2 - c.exact2) / c.se2 : 0.0;
    const double z4 = c.se4 > 0.0 ? std::abs(c.mc4 - c.exact4) / c.se4 : 0.0;
    pass = pass && z2 <= 5.0 && z4 <= 5.0;
    detail << "p=" << p << ": |mc-exact|/se = " << sci(z2) << " (2nd), " << sci(z4) << " (4th); ";
  }
  detail << "required <= 5";
  return {pass, detail.str()};
}

CheckLine check_lemma2(const CheckCommand& cmd) {
  const std::array<Index, 2> dims = {1, 200};
  const auto est = tau_f_check(law::Normal{}, dims, 300, 200, substream_seed(cmd.seed, 5));
  const bool ok1 = std::abs(est[0].tau - 1.0 / 3.0) <= std::max(0.03, 5.0 * est[0].se);
  const bool ok2 = est[1].tau >= 0.45 && est[1].tau <= 0.55;
  return {ok1 && ok2, "tau_F(p=1) = " + sci(est[0].tau) + " (required 1/3 +- 0.03), tau_F(p=200) = " +
                          sci(est[1].tau) + " (required in [0.45, 0.55])"};
}

CheckLine check_null_calibration(const CheckCommand& cmd) {
  ExperimentConfig c;
  c.scenario = standard_scenario(ScenarioId::I, 100);
  c.n = 30;
  c.p = 100;
  c.reps = 600;
  c.master_seed = cmd.seed;
  const PowerTable t = run_experiment(c, RunOptions{cmd.threads});
  bool pass = true;
  std::ostringstream detail;
  detail << "scenario I, n=30, p=100, 600 reps:";
  for (const PowerRow& r : t.rows) {
    pass = pass && std::abs(r.rejection_rate - c.alpha) <= 0.04;
    detail << " " << to_string(r.test) << " " << percent(r.rejection_rate) << "%";
  }
  detail << " (required 5 +- 4)";
  return {pass, detail.str()};
}

CheckLine check_determinism(const CheckCommand& cmd) {
  ExperimentConfig c;
  c.scenario = standard_scenario(ScenarioId::III, 40);
  c.n = 20;
  c.p = 40;
  c.allocation = Allocation::Dense;
  c.signal = 0.1;
  c.reps = 200;
  c.master_seed = cmd.seed;
  const PowerTable a = run_experiment(c, RunOptions{1});
  const PowerTable b = run_experiment(c, RunOptions{3});
  bool same = a.rows.size() == b.rows.size();
  for (std::size_t i = 0; same && i < a.rows.size(); ++i) same = a.rows[i].rejections == b.rows[i].rejections;
  return {same, std::string("rejection counts with 1 and 3 workers ") + (same ? "identical" : "differ")};
}

using CheckFn = CheckLine (*)(const CheckCommand&);

const std::vector<std::pair<std::string, CheckFn>>& checks() {
  static const std::vector<std::pair<std::string, CheckFn>> list = {
      {"oracle-equality", check_oracle},   {"trace-identity", check_trace_identity},
      {"lemma1-sphere", check_lemma1},     {"lemma2-tau", check_lemma2},
      {"null-calibration", check_null_calibration}, {"determinism", check_determinism},
  };
  return list;
}

}  // namespace

OutputFormat parse_output_format(const std::string& text) {
  if (text == "csv") return OutputFormat::Csv;
  if (text == "md" || text == "markdown") return OutputFormat::Markdown;
  throw Error("unknown format '" + text + "' (expected csv or md)");
}

unsigned parse_threads(const std::string& text) {
  if (text == "auto") return 0;
  try {
    std::size_t used = 0;
    const long v = std::stol(text, &used);
    if (used == text.size() && v > 0) return static_cast<unsigned>(v);
  } catch (const std::exception&) {
  }
  throw Error("threads must be 'auto' or a positive count, got '" + text + "'");
}

std::optional<std::uint64_t> seed_from_environment() {
  const char* value = std::getenv("HDLOC_SEED");
  if (!value || !*value) return std::nullopt;
  try {
    std::size_t used = 0;
    const unsigned long long seed = std::stoull(value, &used);
    if (used == std::string(value).size()) return seed;
  } catch (const std::exception&) {
  }
  throw Error(std::string("HDLOC_SEED is not an unsigned integer: '") + value + "'");
}

int cmd_test(const TestCommand& cmd, std::ostream& out) {
  const SampleMatrix x = read_csv_matrix(cmd.data, cmd.header);
  const TestResult r = run_test(cmd.test, x, cmd.alpha, cmd.trace_mode);
  out << std::setprecision(6);
  out << "test        " << to_string(cmd.test) << "\n";
  out << "n, p        " << x.n() << ", " << x.p() << "\n";
  out << "statistic   " << r.raw << "\n";
  out << "sigma       " << r.sigma_hat << "\n";
  out << "z           " << r.z << "\n";
  out << "p-value     " << r.p_value << "\n";
  out << "decision    " << (r.reject ? "reject" : "do not reject") << " H0 at alpha = " << cmd.alpha << "\n";
  if (r.zero_signs > 0) out << "note        " << r.zero_signs << " observation(s) at the origin have zero sign\n";
  return 0;
}

int cmd_simulate(const SimulateCommand& cmd, std::ostream& out) {
  if (cmd.table.has_value() == cmd.config.has_value()) throw Error("simulate needs exactly one of --table or --config");
  const std::optional<std::uint64_t> seed = cmd.seed ? cmd.seed : seed_from_environment();
  ResultStore store(cmd.out_dir / "store");

  if (cmd.config) {
    ExperimentConfig config = read_run_config(*cmd.config);
    if (cmd.reps) config.reps = *cmd.reps;
    if (cmd.null_reps) config.null_reps = *cmd.null_reps;
    if (seed) config.master_seed = *seed;
    if (cmd.alpha) config.alpha = *cmd.alpha;
    if (cmd.test) config.tests = {*cmd.test};
    if (cmd.trace_mode) config.trace_mode = *cmd.trace_mode;
    const PowerTable table = run_experiment_cached(config, RunOptions{cmd.threads}, &store);
    const std::string stem = cmd.config->stem().string();
    {
      auto csv = open_output(cmd.out_dir / (stem + ".csv"));
      write_power_csv(csv, table);
      auto md = open_output(cmd.out_dir / (stem + ".md"));
      write_single_markdown(md, table);
    }
    if (cmd.format == OutputFormat::Csv) write_power_csv(out, table);
    else write_single_markdown(out, table);
    return 0;
  }

  if (cmd.alpha || cmd.test) throw Error("--alpha and --test apply to --config runs, not published tables");
  TableOverrides overrides;
  overrides.reps = cmd.reps;
  overrides.null_reps = cmd.null_reps;
  overrides.seed = seed;
  overrides.trace_mode = cmd.trace_mode.value_or(TraceMode::Reduced);
  overrides.run.threads = cmd.threads;
  overrides.store = &store;
  const TableArtifact artifact = run_table(*cmd.table, overrides);
  const std::string stem = to_string(*cmd.table);
  {
    auto csv = open_output(cmd.out_dir / (stem + ".csv"));
    write_artifact_csv(csv, artifact);
    auto md = open_output(cmd.out_dir / (stem + ".md"));
    write_artifact_markdown(md, artifact);
  }
  if (cmd.format == OutputFormat::Csv) write_artifact_csv(out, artifact);
  else write_artifact_markdown(out, artifact);
  return 0;
}

int cmd_are(const AreCommand& cmd, std::ostream& out) {
  const std::uint64_t seed = cmd.seed ? *cmd.seed : seed_from_environment().value_or(kDefaultMasterSeed);
  TableArtifact artifact;
  artifact.id = TableId::T1;
  std::vector<LabeledDistribution> laws;
  Index p = cmd.p.value_or(2000);
  if (cmd.config) {
    const ExperimentConfig config = read_run_config(*cmd.config);
    laws.push_back({config.scenario.label, config.scenario.distribution});
    if (!cmd.p) p = config.p;
  } else {
    laws = are_table_distributions();
  }
  artifact.are_rows = are_table(laws, p, cmd.reps.value_or(10000), seed);
  for (const AreRow& row : artifact.are_rows) artifact.are_published.push_back(published_are(row.label));
  {
    auto csv = open_output(cmd.out_dir / "are.csv");
    write_artifact_csv(csv, artifact);
    auto md = open_output(cmd.out_dir / "are.md");
    write_artifact_markdown(md, artifact);
  }
  if (cmd.format == OutputFormat::Csv) write_artifact_csv(out, artifact);
  else write_artifact_markdown(out, artifact);
  return 0;
}

const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, fn] : checks()) out.push_back(name);
    return out;
  }();
  return names;
}

int cmd_check(const CheckCommand& cmd, std::ostream& out) {
  for (const std::string& name : cmd.only) {
    const auto& names = check_names();
    if (std::find(names.begin(), names.end(), name) == names.end()) throw Error("unknown check '" + name + "'");
  }
  int failures = 0;
  for (const auto& [name, fn] : checks()) {
    if (!cmd.only.empty() && !cmd.only.count(name)) continue;
    CheckLine line{false, ""};
    try {
      line = fn(cmd);
    } catch (const std::exception& e) {
      line = {false, std::string("threw: ") + e.what()};
    }
    if (!line.pass) ++failures;
    out << (line.pass ? "[PASS] " : "[FAIL] ") << name << ": " << line.detail << "\n";
  }
  out << (failures == 0 ? "all checks passed" : std::to_string(failures) + " check(s) failed") << "\n";
  return failures == 0 ? 0 : 1;
}

}  // namespace hdloc::cli
