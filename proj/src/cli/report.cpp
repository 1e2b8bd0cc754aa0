#include "hdloc/cli/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <tuple>
#include <vector>

namespace hdloc::cli {
namespace {

constexpr const char* kPowerHeader =
    "test,scenario,n,p,allocation,rejections,rejection_rate,mc_stderr,reps,seed,wall_time,critical_value";

std::string exact(double v) {
  if (std::isnan(v)) return "";
  std::ostringstream out;
  out << std::setprecision(17) << v;
  return out.str();
}

std::string fixed(double v, int digits) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(digits) << v;
  return out.str();
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

template <class T>
T parse_cell(const std::string& cell, std::size_t row, std::size_t column) {
  T value{};
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size()) {
    throw Error("row " + std::to_string(row) + ", column " + std::to_string(column) + ": cannot parse '" + cell +
                "'");
  }
  return value;
}

std::string cell_text(const std::optional<const PowerCell*>& cell) {
  if (!cell) return "";
  const PowerCell& c = **cell;
  std::string text = percent(c.row.rejection_rate);
  if (c.published) text += " (" + fixed(*c.published, 1) + ")";
  return text;
}

void power_markdown(std::ostream& out, const TableArtifact& artifact) {
  using Key = std::tuple<ScenarioId, Index, Index, Allocation, TestKind>;
  std::map<Key, const PowerCell*> cells;
  std::vector<ScenarioId> scenarios;
  std::vector<std::pair<Index, Index>> shapes;
  std::vector<TestKind> tests;
  std::vector<Allocation> allocations;
  auto remember = [](auto& list, const auto& value) {
    if (std::find(list.begin(), list.end(), value) == list.end()) list.push_back(value);
  };
  for (const PowerCell& c : artifact.cells) {
    cells[{c.scenario, c.row.n, c.row.p, c.row.allocation, c.row.test}] = &c;
    remember(scenarios, c.scenario);
    remember(shapes, std::pair{c.row.n, c.row.p});
    remember(tests, c.row.test);
    remember(allocations, c.row.allocation);
  }
  auto lookup = [&](ScenarioId s, Index n, Index p, Allocation a, TestKind t) -> std::optional<const PowerCell*> {
    const auto it = cells.find({s, n, p, a, t});
    if (it == cells.end()) return std::nullopt;
    return it->second;
  };
  auto group_name = [](Allocation a) {
    return a == Allocation::Null ? "Size" : (a == Allocation::Dense ? "Dense" : "Sparse");
  };

  out << "## " << to_string(artifact.id) << ": "
      << (artifact.id == TableId::T2 ? "size-corrected power (%)" : "empirical size and power (%)") << "\n\n";
  out << "Each cell: reproduced (published).\n\n";

  if (artifact.id == TableId::T2) {
    // One row per scenario; column groups allocation x (n, p) x test.
    out << "| Scenario |";
    for (Allocation a : allocations) {
      for (auto [n, p] : shapes) {
        for (TestKind t : tests) out << " " << group_name(a) << " (" << n << "," << p << ") " << to_string(t) << " |";
      }
    }
    out << "\n|---|";
    for (std::size_t i = 0; i < allocations.size() * shapes.size() * tests.size(); ++i) out << "---|";
    out << "\n";
    for (ScenarioId s : scenarios) {
      out << "| " << to_string(s) << " |";
      for (Allocation a : allocations) {
        for (auto [n, p] : shapes) {
          for (TestKind t : tests) out << " " << cell_text(lookup(s, n, p, a, t)) << " |";
        }
      }
      out << "\n";
    }
    return;
  }

  for (ScenarioId s : scenarios) {
    out << "### Scenario " << to_string(s) << "\n\n| n | p |";
    for (Allocation a : allocations) {
      for (TestKind t : tests) out << " " << group_name(a) << " " << to_string(t) << " |";
    }
    out << "\n|---|---|";
    for (std::size_t i = 0; i < allocations.size() * tests.size(); ++i) out << "---|";
    out << "\n";
    for (auto [n, p] : shapes) {
      out << "| " << n << " | " << p << " |";
      for (Allocation a : allocations) {
        for (TestKind t : tests) out << " " << cell_text(lookup(s, n, p, a, t)) << " |";
      }
      out << "\n";
    }
    out << "\n";
  }
}

void are_markdown(std::ostream& out, const TableArtifact& artifact) {
  out << "## T1: asymptotic relative efficiency\n\nEach cell: reproduced (published).\n\n|  |";
  for (const AreRow& row : artifact.are_rows) out << " " << row.label << " |";
  out << "\n|---|";
  for (std::size_t i = 0; i < artifact.are_rows.size(); ++i) out << "---|";
  out << "\n";
  const std::pair<const char*, double AreRow::*> kinds[] = {
      {"ARE(SS,CQ)", &AreRow::ss_cq}, {"ARE(SR,CQ)", &AreRow::sr_cq}, {"ARE(SR,SS)", &AreRow::sr_ss}};
  const double PublishedAre::*published[] = {&PublishedAre::ss_cq, &PublishedAre::sr_cq, &PublishedAre::sr_ss};
  for (int k = 0; k < 3; ++k) {
    out << "| " << kinds[k].first << " |";
    for (std::size_t i = 0; i < artifact.are_rows.size(); ++i) {
      out << " " << fixed(artifact.are_rows[i].*kinds[k].second, 2);
      if (i < artifact.are_published.size() && artifact.are_published[i]) {
        out << " (" << fixed(*artifact.are_published[i].*published[k], 2) << ")";
      }
      out << " |";
    }
    out << "\n";
  }
}

}  // namespace

std::string percent(double rate) { return fixed(100.0 * rate, 1); }

void write_power_csv(std::ostream& out, const PowerTable& table) {
  out << kPowerHeader << "\n";
  for (const PowerRow& r : table.rows) {
    out << to_string(r.test) << ',' << r.scenario << ',' << r.n << ',' << r.p << ',' << to_string(r.allocation) << ','
        << r.rejections << ',' << exact(r.rejection_rate) << ',' << exact(r.mc_stderr) << ',' << r.reps << ','
        << r.seed << ',' << exact(r.wall_time) << ',' << exact(r.critical_value) << "\n";
  }
}

PowerTable read_power_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kPowerHeader) throw Error("power CSV: unexpected header");
  PowerTable table;
  std::size_t row_no = 1;
  while (std::getline(in, line)) {
    ++row_no;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != 12) {
      throw Error("row " + std::to_string(row_no) + ": expected 12 columns, found " + std::to_string(cells.size()));
    }
    PowerRow r;
    r.test = parse_test_kind(cells[0]);
    r.scenario = cells[1];
    r.n = parse_cell<Index>(cells[2], row_no, 3);
    r.p = parse_cell<Index>(cells[3], row_no, 4);
    r.allocation = parse_allocation(cells[4]);
    r.rejections = parse_cell<long>(cells[5], row_no, 6);
    r.rejection_rate = parse_cell<double>(cells[6], row_no, 7);
    r.mc_stderr = parse_cell<double>(cells[7], row_no, 8);
    r.reps = parse_cell<int>(cells[8], row_no, 9);
    r.seed = parse_cell<std::uint64_t>(cells[9], row_no, 10);
    r.wall_time = parse_cell<double>(cells[10], row_no, 11);
    r.critical_value =
        cells[11].empty() ? std::numeric_limits<double>::quiet_NaN() : parse_cell<double>(cells[11], row_no, 12);
    table.rows.push_back(r);
  }
  return table;
}

void write_artifact_csv(std::ostream& out, const TableArtifact& artifact) {
  if (artifact.id == TableId::T1) {
    out << "distribution,measure,value,stderr,published,relative_deviation\n";
    for (std::size_t i = 0; i < artifact.are_rows.size(); ++i) {
      const AreRow& row = artifact.are_rows[i];
      const PublishedAre* pub =
          i < artifact.are_published.size() && artifact.are_published[i] ? &*artifact.are_published[i] : nullptr;
      auto emit = [&](const char* name, double value, double se, std::optional<double> published) {
        out << row.label << ',' << name << ',' << exact(value) << ',' << exact(se) << ',';
        if (published) out << exact(*published) << ',' << exact(value / *published - 1.0);
        else out << ',';
        out << "\n";
      };
      auto published = [&](double PublishedAre::*field) -> std::optional<double> {
        if (!pub) return std::nullopt;
        return pub->*field;
      };
      emit("ARE(SS,CQ)", row.ss_cq, row.se_ss_cq, published(&PublishedAre::ss_cq));
      emit("ARE(SR,CQ)", row.sr_cq, row.se_sr_cq, published(&PublishedAre::sr_cq));
      emit("ARE(SR,SS)", row.sr_ss, row.se_sr_ss, published(&PublishedAre::sr_ss));
    }
    return;
  }
  out << "scenario,n,p,allocation,test,percent,published,deviation,mc_stderr_percent,rejections,reps,seed,"
         "critical_value\n";
  for (const PowerCell& c : artifact.cells) {
    const PowerRow& r = c.row;
    out << to_string(c.scenario) << ',' << r.n << ',' << r.p << ',' << to_string(r.allocation) << ','
        << to_string(r.test) << ',' << exact(100.0 * r.rejection_rate) << ',';
    if (c.published) out << exact(*c.published) << ',' << exact(100.0 * r.rejection_rate - *c.published);
    else out << ',';
    out << ',' << exact(100.0 * r.mc_stderr) << ',' << r.rejections << ',' << r.reps << ',' << r.seed << ','
        << exact(r.critical_value) << "\n";
  }
}

void write_artifact_markdown(std::ostream& out, const TableArtifact& artifact) {
  if (artifact.id == TableId::T1) {
    are_markdown(out, artifact);
  } else {
    power_markdown(out, artifact);
  }
}

}  // namespace hdloc::cli
