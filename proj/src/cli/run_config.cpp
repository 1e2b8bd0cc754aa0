#include "hdloc/cli/run_config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace hdloc::cli {
namespace {

const std::set<std::string> kKeys = {"scenario", "distribution", "df",        "gamma",          "tau",
                                     "rho",      "n",            "p",         "allocation",     "signal",
                                     "tests",    "alpha",        "reps",      "master_seed",    "size_corrected",
                                     "null_reps", "trace_mode"};

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

struct Entry {
  std::string value;
  std::size_t line = 0;
};

class Fields {
 public:
  explicit Fields(std::map<std::string, Entry> entries) : entries_(std::move(entries)) {}

  bool has(const std::string& key) const { return entries_.count(key) > 0; }

  std::optional<std::string> text(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second.value;
  }

  template <class T>
  std::optional<T> number(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    const std::string& v = it->second.value;
    T out{};
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) fail(key, "expected a number, got '" + v + "'");
    return out;
  }

  std::optional<bool> flag(const std::string& key) const {
    const auto v = text(key);
    if (!v) return std::nullopt;
    if (*v == "true" || *v == "1" || *v == "yes") return true;
    if (*v == "false" || *v == "0" || *v == "no") return false;
    fail(key, "expected true or false, got '" + *v + "'");
  }

  /// Re-throws parse errors from the domain helpers with the key's line.
  template <class Fn>
  auto with_context(const std::string& key, Fn&& fn) const {
    try {
      return fn();
    } catch (const Error& e) {
      fail(key, e.what());
    }
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    std::ostringstream msg;
    msg << "config line " << entries_.at(key).line << " (" << key << "): " << what;
    throw Error(msg.str());
  }

 private:
  std::map<std::string, Entry> entries_;
};

Distribution distribution_from(const Fields& f) {
  const std::string name = *f.text("distribution");
  const auto df = f.number<int>("df");
  const auto gamma = f.number<double>("gamma");
  const auto tau = f.number<double>("tau");
  auto need = [&](const auto& value, const char* key) {
    if (!value) f.fail("distribution", "'" + name + "' needs key " + key);
    return *value;
  };
  if (name == "normal") return law::Normal{};
  if (name == "t") return law::MultivariateT{need(df, "df")};
  if (name == "mn") return law::MixedNormal{need(gamma, "gamma"), need(tau, "tau")};
  if (name == "factor_t") return law::FactorT{need(df, "df")};
  if (name == "factor_mn") return law::FactorMixed{need(gamma, "gamma"), need(tau, "tau")};
  f.fail("distribution", "unknown law '" + name + "' (expected normal, t, mn, factor_t or factor_mn)");
}

std::vector<TestKind> tests_from(const Fields& f, const std::string& list) {
  std::vector<TestKind> out;
  std::stringstream in(list);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    out.push_back(f.with_context("tests", [&] { return parse_test_kind(item); }));
  }
  return out;
}

}  // namespace

ExperimentConfig parse_run_config(std::istream& in) {
  std::map<std::string, Entry> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!kKeys.count(key)) throw Error("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    if (value.empty()) throw Error("config line " + std::to_string(line_no) + ": empty value for '" + key + "'");
    if (entries.count(key)) {
      throw Error("config line " + std::to_string(line_no) + ": key '" + key + "' repeats line " +
                  std::to_string(entries[key].line));
    }
    entries[key] = {value, line_no};
  }
  const Fields f(std::move(entries));

  ExperimentConfig c;
  if (auto p = f.number<Index>("p")) {
    if (*p < 1) f.fail("p", "must be positive");
    c.p = *p;
  }
  const double rho = f.number<double>("rho").value_or(0.5);
  if (f.has("scenario") && f.has("distribution")) f.fail("distribution", "conflicts with key 'scenario'");
  Distribution dist = law::Normal{};
  std::string label;
  if (auto s = f.text("scenario")) {
    const ScenarioId id = f.with_context("scenario", [&] { return parse_scenario_id(*s); });
    dist = standard_distribution(id);
    label = to_string(id);
  } else if (f.has("distribution")) {
    dist = distribution_from(f);
    label = describe(dist);
  } else {
    label = to_string(ScenarioId::I);
  }
  if (f.has("distribution")) {
    f.with_context("distribution", [&] {
      validate(dist);
      return 0;
    });
  }
  const ScatterSpec scatter =
      f.with_context(f.has("rho") ? "rho" : "p", [&] { return ScatterSpec::toeplitz(rho, c.p); });
  c.scenario = ScenarioSpec{dist, scatter, label};

  if (auto v = f.number<Index>("n")) c.n = *v;
  if (auto v = f.text("allocation")) c.allocation = f.with_context("allocation", [&] { return parse_allocation(*v); });
  if (auto v = f.number<double>("signal")) c.signal = *v;
  if (auto v = f.text("tests")) c.tests = tests_from(f, *v);
  if (auto v = f.number<double>("alpha")) c.alpha = *v;
  if (auto v = f.number<int>("reps")) c.reps = *v;
  if (auto v = f.number<std::uint64_t>("master_seed")) c.master_seed = *v;
  if (auto v = f.flag("size_corrected")) c.size_corrected = *v;
  if (auto v = f.number<int>("null_reps")) c.null_reps = *v;
  if (auto v = f.text("trace_mode")) c.trace_mode = f.with_context("trace_mode", [&] { return parse_trace_mode(*v); });
  c.validate();
  return c;
}

ExperimentConfig read_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file " + path.string());
  try {
    return parse_run_config(in);
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

}  // namespace hdloc::cli
