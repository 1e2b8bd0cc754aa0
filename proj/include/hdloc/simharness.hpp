#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hdloc/analysis.hpp"
#include "hdloc/samplers.hpp"
#include "hdloc/statistics.hpp"

namespace hdloc {

inline constexpr std::uint64_t kDefaultMasterSeed = 20170601;

struct ExperimentConfig {
  ScenarioSpec scenario = standard_scenario(ScenarioId::I, 100);
  Index n = 30;
  Index p = 100;
  Allocation allocation = Allocation::Null;
  double signal = 0.0;
  std::vector<TestKind> tests = {TestKind::CQ, TestKind::SS, TestKind::SR};
  double alpha = 0.05;
  int reps = 2500;
  std::uint64_t master_seed = kDefaultMasterSeed;
  bool size_corrected = false;
  int null_reps = 2500;
  TraceMode trace_mode = TraceMode::Reduced;

  /// Throws Error naming the first violated invariant.
  void validate() const;
  /// Stable textual form; identical configs give identical strings.
  std::string canonical() const;
  /// 64-bit FNV-1a of canonical(); the key of persisted results.
  std::uint64_t hash() const;
};

struct RunOptions {
  /// 0 means all available hardware threads.
  unsigned threads = 0;
};

unsigned resolve_threads(unsigned requested);

struct PowerRow {
  TestKind test = TestKind::SR;
  std::string scenario;
  Index n = 0;
  Index p = 0;
  Allocation allocation = Allocation::Null;
  long rejections = 0;
  double rejection_rate = 0.0;
  double mc_stderr = 0.0;
  int reps = 0;
  std::uint64_t seed = 0;
  double wall_time = 0.0;
  /// Simulated critical value under the size-corrected protocol, else NaN.
  double critical_value = 0.0;
};

struct PowerTable {
  std::vector<PowerRow> rows;
};

/// Every replication draws one sample from its own substream and evaluates
/// all requested tests on it. Counts do not depend on the thread count.
PowerTable run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

/// Per-replication asymptotic results of one test (same draws as run_experiment).
std::vector<TestResult> replicate_test(const ExperimentConfig& config, TestKind test, const RunOptions& options = {});

/// 1-based order statistic used as the upper-alpha critical value:
/// ceil((1 - alpha) * null_reps).
std::size_t critical_order_index(int null_reps, double alpha);

/// Upper-alpha empirical quantile of the raw statistic under the null
/// version of `config`, from null_reps draws on a stream disjoint from the
/// power replications.
double simulate_critical_value(const ExperimentConfig& config, TestKind test, double alpha,
                               const RunOptions& options = {});

/// Append-only store of completed experiments, one JSON record per line in
/// `<dir>/results.jsonl`, keyed by ExperimentConfig::hash().
class ResultStore {
 public:
  explicit ResultStore(std::filesystem::path dir);

  std::optional<PowerTable> find(std::uint64_t key) const;
  void append(const ExperimentConfig& config, const PowerTable& table);
  std::size_t size() const { return records_.size(); }
  const std::filesystem::path& file() const { return file_; }

 private:
  std::filesystem::path file_;
  std::map<std::uint64_t, PowerTable> records_;
};

/// run_experiment, short-circuited by a stored result with the same key.
PowerTable run_experiment_cached(const ExperimentConfig& config, const RunOptions& options, ResultStore* store);

enum class TableId { T1, T2, T3, T4 };

std::string to_string(TableId id);
TableId parse_table_id(const std::string& text);

struct TableOverrides {
  std::optional<int> reps;
  std::optional<int> null_reps;
  std::optional<std::uint64_t> seed;
  TraceMode trace_mode = TraceMode::Reduced;
  RunOptions run;
  ResultStore* store = nullptr;
  /// T1 only.
  std::optional<Index> are_p;
};

struct PowerCell {
  ScenarioId scenario = ScenarioId::I;
  PowerRow row;
  /// Published percentage for the cell, when one exists.
  std::optional<double> published;
};

struct PublishedAre {
  double ss_cq;
  double sr_cq;
  double sr_ss;
};

struct TableArtifact {
  TableId id = TableId::T3;
  std::vector<PowerCell> cells;
  std::vector<AreRow> are_rows;
  std::vector<std::optional<PublishedAre>> are_published;
  double wall_time = 0.0;
};

/// The experiment grid of a power table (T2, T3, T4). Each config carries all
/// tests of its cell so they share replications.
std::vector<ExperimentConfig> table_grid(TableId id, const TableOverrides& overrides = {});

TableArtifact run_table(TableId id, const TableOverrides& overrides = {});

/// Published values, in percent for power tables.
std::optional<double> published_power(TableId id, ScenarioId scenario, Index n, Index p, Allocation allocation,
                                      TestKind test);
std::optional<PublishedAre> published_are(const std::string& label);

}  // namespace hdloc
