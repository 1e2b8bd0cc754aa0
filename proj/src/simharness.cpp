#include "hdloc/simharness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace hdloc {
namespace {

using Clock = std::chrono::steady_clock;

constexpr std::uint64_t kNullStream = 0x6e756c6c;  // "null"

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::uint64_t fnv1a(const void* data, std::size_t size, std::uint64_t h = 0xcbf29ce484222325ULL) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string describe_scatter(const ScatterSpec& s) {
  std::ostringstream out;
  out << std::setprecision(17);
  if (s.is_toeplitz()) {
    out << "toeplitz(" << s.rho() << ")";
  } else {
    const Eigen::MatrixXd m = s.materialize();
    out << "explicit(" << std::hex << fnv1a(m.data(), sizeof(double) * m.size()) << ")";
  }
  return out.str();
}

/// Runs fn(i) for i in [0, count) on up to `threads` workers. If any call
/// throws, the exception from the smallest failing index is rethrown.
template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::mutex failure_mutex;
  std::size_t failed_index = count;
  std::exception_ptr failure;
  {
    std::vector<std::jthread> workers;
    workers.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
      workers.emplace_back([&] {
        for (;;) {
          if (stop.load(std::memory_order_relaxed)) return;
          const std::size_t i = next.fetch_add(1);
          if (i >= count) return;
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (i < failed_index) {
              failed_index = i;
              failure = std::current_exception();
            }
            stop = true;
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

[[noreturn]] void rethrow_with_context(std::size_t replication, TestKind test, const std::exception& e) {
  std::ostringstream msg;
  msg << "replication " << replication << ", test " << to_string(test) << ": " << e.what();
  throw Error(msg.str());
}

bool has_test(const ExperimentConfig& c, TestKind kind) {
  return std::find(c.tests.begin(), c.tests.end(), kind) != c.tests.end();
}

ExperimentConfig null_version(const ExperimentConfig& config) {
  ExperimentConfig null_config = config;
  null_config.allocation = Allocation::Null;
  null_config.signal = 0.0;
  return null_config;
}

nlohmann::json to_json(const PowerRow& r) {
  return {
      {"test", to_string(r.test)},
      {"scenario", r.scenario},
      {"n", r.n},
      {"p", r.p},
      {"allocation", to_string(r.allocation)},
      {"rejections", r.rejections},
      {"rejection_rate", r.rejection_rate},
      {"mc_stderr", r.mc_stderr},
      {"reps", r.reps},
      {"seed", r.seed},
      {"wall_time", r.wall_time},
      {"critical_value", std::isnan(r.critical_value) ? nlohmann::json(nullptr) : nlohmann::json(r.critical_value)},
  };
}

PowerRow row_from_json(const nlohmann::json& j) {
  PowerRow r;
  r.test = parse_test_kind(j.at("test").get<std::string>());
  r.scenario = j.at("scenario").get<std::string>();
  r.n = j.at("n").get<Index>();
  r.p = j.at("p").get<Index>();
  r.allocation = parse_allocation(j.at("allocation").get<std::string>());
  r.rejections = j.at("rejections").get<long>();
  r.rejection_rate = j.at("rejection_rate").get<double>();
  r.mc_stderr = j.at("mc_stderr").get<double>();
  r.reps = j.at("reps").get<int>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.wall_time = j.at("wall_time").get<double>();
  const auto& cv = j.at("critical_value");
  r.critical_value = cv.is_null() ? std::numeric_limits<double>::quiet_NaN() : cv.get<double>();
  return r;
}

}  // namespace

void ExperimentConfig::validate() const {
  hdloc::validate(scenario.distribution);
  if (scenario.scatter.p() != p) throw Error("config: scatter dimension differs from p");
  if (n < 4) throw Error("config: n must be at least 4");
  if (tests.empty()) throw Error("config: no tests requested");
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error("config: alpha must lie in (0, 1)");
  if (reps < 1) throw Error("config: reps must be positive");
  if (!(signal >= 0.0) || !std::isfinite(signal)) throw Error("config: signal must be non-negative");
  if (size_corrected && null_reps < 2000) throw Error("config: size correction requires null_reps >= 2000");
  if (has_test(*this, TestKind::TSR)) {
    if (n <= p) throw Error("config: TSR requires n > p");
    if (!size_corrected) throw Error("config: TSR is only available under size correction");
  }
  if (allocation != Allocation::Null && signal > 0.0 && zero_block_size(allocation, p) >= p) {
    throw Error("config: allocation leaves no nonzero mean component");
  }
}

std::string ExperimentConfig::canonical() const {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "distribution=" << describe(scenario.distribution) << "\n";
  out << "scatter=" << describe_scatter(scenario.scatter) << "\n";
  out << "label=" << scenario.label << "\n";
  out << "n=" << n << "\np=" << p << "\n";
  out << "allocation=" << to_string(allocation) << "\n";
  out << "signal=" << signal << "\n";
  out << "tests=";
  for (std::size_t i = 0; i < tests.size(); ++i) out << (i ? "," : "") << to_string(tests[i]);
  out << "\nalpha=" << alpha << "\nreps=" << reps << "\nmaster_seed=" << master_seed << "\n";
  out << "size_corrected=" << (size_corrected ? 1 : 0) << "\n";
  out << "null_reps=" << (size_corrected ? null_reps : 0) << "\n";
  out << "trace_mode=" << to_string(trace_mode) << "\n";
  return out.str();
}

std::uint64_t ExperimentConfig::hash() const {
  const std::string text = canonical();
  return fnv1a(text.data(), text.size());
}

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

std::size_t critical_order_index(int null_reps, double alpha) {
  if (null_reps < 1) throw Error("critical value needs at least one null replication");
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error("alpha must lie in (0, 1)");
  // The tolerance absorbs rounding in (1 - alpha) * null_reps.
  const double position = std::ceil((1.0 - alpha) * null_reps - 1e-9);
  return static_cast<std::size_t>(std::clamp(position, 1.0, static_cast<double>(null_reps)));
}

double simulate_critical_value(const ExperimentConfig& config, TestKind test, double alpha,
                               const RunOptions& options) {
  const ExperimentConfig null_config = null_version(config);
  null_config.validate();
  if (null_config.null_reps < 2000) throw Error("critical value simulation needs null_reps >= 2000");
  const Sampler sampler(null_config.scenario, MeanSpec{Allocation::Null, 0.0, null_config.p});
  const std::uint64_t null_master = substream_seed(null_config.master_seed, kNullStream);

  std::vector<double> raw(null_config.null_reps);
  parallel_for(raw.size(), resolve_threads(options.threads), [&](std::size_t r) {
    const SampleMatrix x = sampler.draw(null_config.n, substream_seed(null_master, r));
    try {
      raw[r] = raw_statistic(test, x);
    } catch (const std::exception& e) {
      rethrow_with_context(r, test, e);
    }
  });
  std::sort(raw.begin(), raw.end());
  return raw[critical_order_index(null_config.null_reps, alpha) - 1];
}

PowerTable run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  config.validate();
  const auto start = Clock::now();
  const unsigned threads = resolve_threads(options.threads);

  std::vector<double> critical(config.tests.size(), std::numeric_limits<double>::quiet_NaN());
  if (config.size_corrected) {
    for (std::size_t t = 0; t < config.tests.size(); ++t) {
      critical[t] = simulate_critical_value(config, config.tests[t], config.alpha, options);
    }
  }

  const Sampler sampler(config.scenario, MeanSpec{config.allocation, config.signal, config.p});
  const std::size_t tests = config.tests.size();
  std::vector<unsigned char> decisions(static_cast<std::size_t>(config.reps) * tests, 0);
  parallel_for(static_cast<std::size_t>(config.reps), threads, [&](std::size_t r) {
    const SampleMatrix x = sampler.draw(config.n, substream_seed(config.master_seed, r));
    for (std::size_t t = 0; t < tests; ++t) {
      const TestKind kind = config.tests[t];
      try {
        const bool reject = config.size_corrected ? raw_statistic(kind, x) > critical[t]
                                                  : run_test(kind, x, config.alpha, config.trace_mode).reject;
        decisions[r * tests + t] = reject ? 1 : 0;
      } catch (const std::exception& e) {
        rethrow_with_context(r, kind, e);
      }
    }
  });

  const double elapsed = seconds_since(start);
  PowerTable table;
  for (std::size_t t = 0; t < tests; ++t) {
    PowerRow row;
    row.test = config.tests[t];
    row.scenario = config.scenario.label;
    row.n = config.n;
    row.p = config.p;
    row.allocation = config.allocation;
    for (int r = 0; r < config.reps; ++r) row.rejections += decisions[static_cast<std::size_t>(r) * tests + t];
    row.reps = config.reps;
    row.rejection_rate = static_cast<double>(row.rejections) / config.reps;
    row.mc_stderr = std::sqrt(row.rejection_rate * (1.0 - row.rejection_rate) / config.reps);
    row.seed = config.master_seed;
    row.wall_time = elapsed;
    row.critical_value = critical[t];
    table.rows.push_back(row);
  }
  return table;
}

std::vector<TestResult> replicate_test(const ExperimentConfig& config, TestKind test, const RunOptions& options) {
  config.validate();
  const Sampler sampler(config.scenario, MeanSpec{config.allocation, config.signal, config.p});
  std::vector<TestResult> out(config.reps);
  parallel_for(out.size(), resolve_threads(options.threads), [&](std::size_t r) {
    const SampleMatrix x = sampler.draw(config.n, substream_seed(config.master_seed, r));
    try {
      out[r] = run_test(test, x, config.alpha, config.trace_mode);
    } catch (const std::exception& e) {
      rethrow_with_context(r, test, e);
    }
  });
  return out;
}

ResultStore::ResultStore(std::filesystem::path dir) : file_(std::move(dir) / "results.jsonl") {
  std::filesystem::create_directories(file_.parent_path());
  std::ifstream in(file_);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto record = nlohmann::json::parse(line);
      PowerTable table;
      for (const auto& row : record.at("rows")) table.rows.push_back(row_from_json(row));
      records_[std::stoull(record.at("key").get<std::string>(), nullptr, 16)] = std::move(table);
    } catch (const std::exception& e) {
      throw Error(file_.string() + ":" + std::to_string(line_no) + ": unreadable record: " + e.what());
    }
  }
}

std::optional<PowerTable> ResultStore::find(std::uint64_t key) const {
  const auto it = records_.find(key);
  if (it == records_.end()) return std::nullopt;
  return it->second;
}

void ResultStore::append(const ExperimentConfig& config, const PowerTable& table) {
  const std::uint64_t key = config.hash();
  std::ostringstream hex;
  hex << std::hex << std::setw(16) << std::setfill('0') << key;
  nlohmann::json record = {{"key", hex.str()}, {"config", config.canonical()}, {"rows", nlohmann::json::array()}};
  for (const auto& row : table.rows) record["rows"].push_back(to_json(row));
  std::ofstream out(file_, std::ios::app);
  out << record.dump() << "\n";
  if (!out) throw Error("cannot append to " + file_.string());
  records_[key] = table;
}

PowerTable run_experiment_cached(const ExperimentConfig& config, const RunOptions& options, ResultStore* store) {
  if (store) {
    config.validate();
    if (auto hit = store->find(config.hash())) return *hit;
  }
  PowerTable table = run_experiment(config, options);
  if (store) store->append(config, table);
  return table;
}

std::string to_string(TableId id) {
  static const char* names[] = {"T1", "T2", "T3", "T4"};
  return names[static_cast<int>(id)];
}

TableId parse_table_id(const std::string& text) {
  for (int i = 0; i < 4; ++i) {
    if (to_string(static_cast<TableId>(i)) == text) return static_cast<TableId>(i);
  }
  throw Error("unknown table '" + text + "' (expected T1, T2, T3 or T4)");
}

std::vector<ExperimentConfig> table_grid(TableId id, const TableOverrides& overrides) {
  std::vector<ExperimentConfig> grid;
  auto base = [&](ScenarioId s, Index n, Index p) {
    ExperimentConfig c;
    c.scenario = standard_scenario(s, p);
    c.n = n;
    c.p = p;
    c.reps = overrides.reps.value_or(2500);
    c.null_reps = overrides.null_reps.value_or(2500);
    c.master_seed = overrides.seed.value_or(kDefaultMasterSeed);
    c.trace_mode = overrides.trace_mode;
    return c;
  };

  switch (id) {
    case TableId::T1:
      throw Error("T1 is an ARE table and has no experiment grid");
    case TableId::T2:
      for (ScenarioId s : {ScenarioId::I, ScenarioId::II, ScenarioId::III}) {
        for (auto [n, p] : {std::pair<Index, Index>{30, 24}, {40, 32}}) {
          for (Allocation a : {Allocation::Dense, Allocation::Sparse}) {
            ExperimentConfig c = base(s, n, p);
            c.allocation = a;
            c.signal = 0.1;
            c.tests = {TestKind::TSR, TestKind::SR};
            c.size_corrected = true;
            grid.push_back(std::move(c));
          }
        }
      }
      break;
    case TableId::T3:
    case TableId::T4: {
      const auto scenarios = id == TableId::T3
                                 ? std::vector<ScenarioId>{ScenarioId::I, ScenarioId::II, ScenarioId::III}
                                 : std::vector<ScenarioId>{ScenarioId::IV, ScenarioId::V};
      for (ScenarioId s : scenarios) {
        for (Index n : {30, 40}) {
          for (Index p : {100, 200, 400}) {
            for (Allocation a : {Allocation::Null, Allocation::Dense, Allocation::Sparse}) {
              ExperimentConfig c = base(s, n, p);
              c.allocation = a;
              c.signal = a == Allocation::Null ? 0.0 : 0.05;
              c.tests = {TestKind::CQ, TestKind::SS, TestKind::SR};
              grid.push_back(std::move(c));
            }
          }
        }
      }
      break;
    }
  }
  return grid;
}

TableArtifact run_table(TableId id, const TableOverrides& overrides) {
  const auto start = Clock::now();
  TableArtifact artifact;
  artifact.id = id;
  if (id == TableId::T1) {
    const std::uint64_t seed = overrides.seed.value_or(kDefaultMasterSeed);
    artifact.are_rows =
        are_table(are_table_distributions(), overrides.are_p.value_or(2000), overrides.reps.value_or(10000), seed);
    for (const auto& row : artifact.are_rows) artifact.are_published.push_back(published_are(row.label));
    artifact.wall_time = seconds_since(start);
    return artifact;
  }
  for (const ExperimentConfig& config : table_grid(id, overrides)) {
    const ScenarioId scenario = parse_scenario_id(config.scenario.label);
    const PowerTable table = run_experiment_cached(config, overrides.run, overrides.store);
    for (const PowerRow& row : table.rows) {
      artifact.cells.push_back(
          {scenario, row, published_power(id, scenario, row.n, row.p, row.allocation, row.test)});
    }
  }
  artifact.wall_time = seconds_since(start);
  return artifact;
}

}  // namespace hdloc
