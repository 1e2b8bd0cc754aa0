// hdloc: one-sample location tests for high-dimensional data.
//
//   hdloc test --data x.csv [--test sr] [--alpha 0.05] [--header]
//   hdloc simulate --table T3 [--reps 500] [--threads auto] [--out-dir results]
//   hdloc simulate --config cell.cfg
//   hdloc are [--config law.cfg] [--p 2000] [--reps 10000]
//   hdloc check
//
// Exit status: 0 ran, 1 runtime error or failed check, 2 usage error.

#include <iostream>

#include "CLI11.hpp"
#include "hdloc/cli/commands.hpp"

namespace {

using namespace hdloc;
using namespace hdloc::cli;

template <class T, class Parse>
std::optional<T> parse_if(const std::string& text, Parse parse) {
  if (text.empty()) return std::nullopt;
  return parse(text);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"High-dimensional one-sample location tests (SR, SS, CQ, TSR) and simulation harness"};
  app.require_subcommand(1);

  const CLI::IsMember kTables({"T1", "T2", "T3", "T4"});
  const CLI::IsMember kTests({"sr", "ss", "cq", "tsr"}, CLI::ignore_case);
  const CLI::IsMember kModes({"full", "reduced"});
  const CLI::IsMember kFormats({"csv", "md", "markdown"});

  std::string threads = "auto";
  std::string format = "md";
  std::string out_dir = "results";
  std::string trace_mode;

  auto* test = app.add_subcommand("test", "Run one test on a CSV sample (rows = observations)");
  TestCommand test_cmd;
  std::string test_name = "sr";
  test->add_option("--data", test_cmd.data, "CSV file, comma separated")->required();
  test->add_flag("--header", test_cmd.header, "Skip one header row");
  test->add_option("--test", test_name, "sr | ss | cq | tsr")->check(kTests)->capture_default_str();
  test->add_option("--alpha", test_cmd.alpha, "Level")->capture_default_str();
  test->add_option("--trace-mode", trace_mode, "SR trace estimator: full | reduced (default reduced)")->check(kModes);

  auto* simulate = app.add_subcommand("simulate", "Reproduce a published table or run one configured experiment");
  SimulateCommand sim_cmd;
  std::string table;
  std::string config;
  std::string sim_test;
  std::optional<double> alpha;
  std::optional<std::uint64_t> seed;
  auto* table_opt = simulate->add_option("--table", table, "T1 | T2 | T3 | T4")->check(kTables);
  auto* config_opt = simulate->add_option("--config", config, "key = value experiment file");
  table_opt->excludes(config_opt);
  simulate->add_option("--reps", sim_cmd.reps, "Replications per cell");
  simulate->add_option("--null-reps", sim_cmd.null_reps, "Null replications for simulated critical values");
  simulate->add_option("--seed", seed, "Master seed (fallback: HDLOC_SEED)");
  simulate->add_option("--alpha", alpha, "Level (config runs)");
  simulate->add_option("--test", sim_test, "Restrict a config run to one test: sr | ss | cq | tsr")->check(kTests);
  simulate->add_option("--trace-mode", trace_mode, "SR trace estimator: full | reduced")->check(kModes);
  simulate->add_option("--threads", threads, "Worker count or auto")->capture_default_str();
  simulate->add_option("--out-dir", out_dir, "Directory for table files and the result store")->capture_default_str();
  simulate->add_option("--format", format, "Console rendering: csv | md")->check(kFormats)->capture_default_str();

  auto* are = app.add_subcommand("are", "Monte Carlo asymptotic relative efficiencies");
  AreCommand are_cmd;
  std::string are_config;
  std::optional<Index> are_p;
  std::optional<int> are_reps;
  are->add_option("--config", are_config, "Config naming one law (scenario or distribution keys)");
  are->add_option("--p", are_p, "Dimension (default 2000, or p from the config)");
  are->add_option("--reps", are_reps, "Monte Carlo draws per law (default 10000)");
  are->add_option("--seed", seed, "Master seed (fallback: HDLOC_SEED)");
  are->add_option("--out-dir", out_dir, "Output directory")->capture_default_str();
  are->add_option("--format", format, "Console rendering: csv | md")->check(kFormats)->capture_default_str();

  auto* check = app.add_subcommand("check", "Small-scale property checks; non-zero exit on any failure");
  CheckCommand check_cmd;
  std::vector<std::string> only;
  check->add_option("--seed", seed, "Master seed (fallback: HDLOC_SEED)");
  check->add_option("--threads", threads, "Worker count or auto")->capture_default_str();
  check->add_option("--only", only, "Run only the named checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (test->parsed()) {
      test_cmd.test = parse_test_kind(test_name);
      if (!trace_mode.empty()) test_cmd.trace_mode = parse_trace_mode(trace_mode);
      return cmd_test(test_cmd, std::cout);
    }
    if (simulate->parsed()) {
      if (!table.empty()) sim_cmd.table = parse_table_id(table);
      if (!config.empty()) sim_cmd.config = config;
      sim_cmd.seed = seed;
      sim_cmd.alpha = alpha;
      sim_cmd.test = parse_if<TestKind>(sim_test, parse_test_kind);
      sim_cmd.trace_mode = parse_if<TraceMode>(trace_mode, parse_trace_mode);
      sim_cmd.threads = parse_threads(threads);
      sim_cmd.out_dir = out_dir;
      sim_cmd.format = parse_output_format(format);
      return cmd_simulate(sim_cmd, std::cout);
    }
    if (are->parsed()) {
      if (!are_config.empty()) are_cmd.config = are_config;
      are_cmd.p = are_p;
      are_cmd.reps = are_reps;
      are_cmd.seed = seed;
      are_cmd.out_dir = out_dir;
      are_cmd.format = parse_output_format(format);
      return cmd_are(are_cmd, std::cout);
    }
    if (check->parsed()) {
      check_cmd.seed = seed ? *seed : seed_from_environment().value_or(kDefaultMasterSeed);
      check_cmd.threads = parse_threads(threads);
      check_cmd.only = {only.begin(), only.end()};
      return cmd_check(check_cmd, std::cout);
    }
  } catch (const std::exception& e) {
    std::cerr << "hdloc: error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
