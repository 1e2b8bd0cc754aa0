#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>

#include "hdloc/simharness.hpp"

namespace hdloc::cli {

enum class OutputFormat { Csv, Markdown };

OutputFormat parse_output_format(const std::string& text);
/// "auto" or a positive count; auto maps to 0 (all hardware threads).
unsigned parse_threads(const std::string& text);
/// Value of HDLOC_SEED, if set. A malformed value is an error.
std::optional<std::uint64_t> seed_from_environment();

// Every command returns the process exit code. Statistical outcomes never
// change it; 0 means the command ran.

struct TestCommand {
  std::filesystem::path data;
  bool header = false;
  TestKind test = TestKind::SR;
  double alpha = 0.05;
  TraceMode trace_mode = TraceMode::Reduced;
};

int cmd_test(const TestCommand& cmd, std::ostream& out);

struct SimulateCommand {
  std::optional<TableId> table;
  std::optional<std::filesystem::path> config;
  std::optional<int> reps;
  std::optional<int> null_reps;
  std::optional<std::uint64_t> seed;
  std::optional<double> alpha;
  std::optional<TestKind> test;
  std::optional<TraceMode> trace_mode;
  unsigned threads = 0;
  std::filesystem::path out_dir = "results";
  OutputFormat format = OutputFormat::Markdown;
};

/// Runs a published table or a single configured experiment, writes
/// <out_dir>/<name>.csv and <out_dir>/<name>.md, and prints the chosen
/// rendering. Completed cells persist under <out_dir>/store for resume.
int cmd_simulate(const SimulateCommand& cmd, std::ostream& out);

struct AreCommand {
  /// Law from a config file; the ARE table columns when absent.
  std::optional<std::filesystem::path> config;
  std::optional<Index> p;
  std::optional<int> reps;
  std::optional<std::uint64_t> seed;
  std::filesystem::path out_dir = "results";
  OutputFormat format = OutputFormat::Markdown;
};

int cmd_are(const AreCommand& cmd, std::ostream& out);

struct CheckCommand {
  std::uint64_t seed = kDefaultMasterSeed;
  unsigned threads = 0;
  /// Statistic compared against the enumeration oracle; replaceable so that
  /// a corrupted fast path can be shown to fail the gate.
  std::function<double(const SampleMatrix&)> fast_path = sr_statistic_fast;
  /// Subset of check names to run; empty runs all.
  std::set<std::string> only;
};

/// Names of the checks in run order.
const std::vector<std::string>& check_names();

/// Property suites at small scale. Prints one line per check with the
/// measured value and the bound; returns 1 if any check fails.
int cmd_check(const CheckCommand& cmd, std::ostream& out);

}  // namespace hdloc::cli
