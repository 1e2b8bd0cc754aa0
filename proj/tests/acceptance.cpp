// Acceptance suite: one PASS/FAIL line per criterion, followed by indented
// details for cells outside tolerance. Exit status 1 if any criterion fails.

#include <array>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hdloc/analysis.hpp"
#include "hdloc/simharness.hpp"

using namespace hdloc;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string summary;
  std::vector<std::string> details;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v, int digits = 2) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(digits) << v;
  return out.str();
}

std::string cell_name(const PowerCell& c) {
  return to_string(c.scenario) + " n=" + std::to_string(c.row.n) + " p=" + std::to_string(c.row.p) + " " +
         to_string(c.row.allocation) + " " + to_string(c.row.test);
}

Outcome oracle_equality() {
  const auto start = Clock::now();
  std::mt19937_64 rng(substream_seed(kDefaultMasterSeed, 101));
  std::uniform_int_distribution<Index> rows(4, 12);
  std::uniform_int_distribution<Index> cols(1, 10);
  std::normal_distribution<double> normal;
  double worst = 0.0;
  for (int f = 0; f < 600; ++f) {
    const Index n = rows(rng);
    const Index p = cols(rng);
    Matrix m(n, p);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < p; ++j) m(i, j) = normal(rng) + 0.25 * (f % 3);
    const SampleMatrix x(std::move(m));
    worst = std::max(worst, std::abs(sr_statistic_fast(x) - sr_statistic_naive(x)));
  }
  const double elapsed = seconds_since(start);
  return {worst < 1e-10 && elapsed < 60.0,
          "600 fixtures, max |fast - naive| = " + fmt(worst * 1e15, 1) + "e-15 (< 1e-10), " + fmt(elapsed, 1) +
              " s (< 60 s)",
          {}};
}

Outcome are_table_check() {
  const auto start = Clock::now();
  const TableArtifact t1 = run_table(TableId::T1);
  const double elapsed = seconds_since(start);
  Outcome o;
  int within = 0;
  int total = 0;
  double worst = 0.0;
  for (std::size_t i = 0; i < t1.are_rows.size(); ++i) {
    const AreRow& row = t1.are_rows[i];
    const PublishedAre pub = *t1.are_published[i];
    const std::array<std::tuple<const char*, double, double, double>, 3> cells = {{
        {"ARE(SS,CQ)", row.ss_cq, pub.ss_cq, row.se_ss_cq},
        {"ARE(SR,CQ)", row.sr_cq, pub.sr_cq, row.se_sr_cq},
        {"ARE(SR,SS)", row.sr_ss, pub.sr_ss, row.se_sr_ss},
    }};
    for (const auto& [name, ours, theirs, se] : cells) {
      const double rel = ours / theirs - 1.0;
      worst = std::max(worst, std::abs(rel));
      ++total;
      if (std::abs(rel) <= 0.04) {
        ++within;
      } else {
        o.details.push_back(row.label + " " + name + ": " + fmt(ours, 3) + " (se " + fmt(se, 3) + ") vs " +
                            fmt(theirs) + ", " + fmt(100 * rel, 1) + "%");
      }
    }
  }
  o.pass = within == total && elapsed < 900.0;
  o.summary = std::to_string(within) + "/" + std::to_string(total) + " cells within 4% relative (worst " +
              fmt(100 * worst, 1) + "%), " + fmt(elapsed, 1) + " s (< 900 s)";
  return o;
}

/// Tolerance check of a power table plus the SS >= SR >= CQ ordering on the
/// given scenarios' power cells.
Outcome power_table_check(const TableArtifact& t, double elapsed, const std::vector<ScenarioId>& ordered) {
  Outcome o;
  int size_ok = 0, size_total = 0, power_ok = 0, power_total = 0, order_ok = 0, order_total = 0;
  for (const PowerCell& c : t.cells) {
    if (!c.published) continue;
    const double ours = 100.0 * c.row.rejection_rate;
    const double tol = c.row.allocation == Allocation::Null ? 2.0 : 4.0;
    const bool ok = std::abs(ours - *c.published) <= tol;
    (c.row.allocation == Allocation::Null ? size_total : power_total)++;
    if (ok) {
      (c.row.allocation == Allocation::Null ? size_ok : power_ok)++;
    } else {
      o.details.push_back(cell_name(c) + ": " + fmt(ours, 1) + " vs " + fmt(*c.published, 1) + " (tolerance " +
                          fmt(tol, 0) + ")");
    }
  }
  for (const PowerCell& ss : t.cells) {
    if (ss.row.test != TestKind::SS || ss.row.allocation == Allocation::Null) continue;
    if (std::find(ordered.begin(), ordered.end(), ss.scenario) == ordered.end()) continue;
    double sr = NAN, cq = NAN;
    for (const PowerCell& c : t.cells) {
      if (c.scenario != ss.scenario || c.row.n != ss.row.n || c.row.p != ss.row.p ||
          c.row.allocation != ss.row.allocation)
        continue;
      if (c.row.test == TestKind::SR) sr = c.row.rejection_rate;
      if (c.row.test == TestKind::CQ) cq = c.row.rejection_rate;
    }
    ++order_total;
    if (ss.row.rejection_rate >= sr && sr >= cq) {
      ++order_ok;
    } else {
      o.details.push_back("ordering " + to_string(ss.scenario) + " n=" + std::to_string(ss.row.n) +
                          " p=" + std::to_string(ss.row.p) + " " + to_string(ss.row.allocation) + ": SS " +
                          fmt(100 * ss.row.rejection_rate, 1) + ", SR " + fmt(100 * sr, 1) + ", CQ " +
                          fmt(100 * cq, 1));
    }
  }
  o.pass = size_ok == size_total && power_ok == power_total && order_ok == order_total && elapsed < 3600.0;
  o.summary = "size " + std::to_string(size_ok) + "/" + std::to_string(size_total) + " within 2 pts, power " +
              std::to_string(power_ok) + "/" + std::to_string(power_total) + " within 4 pts, SS>=SR>=CQ " +
              std::to_string(order_ok) + "/" + std::to_string(order_total) + ", " + fmt(elapsed / 60.0, 1) +
              " min (< 60) on " + std::to_string(resolve_threads(0)) + " thread(s)";
  return o;
}

Outcome size_corrected_check(const TableArtifact& t, double elapsed) {
  Outcome o;
  int beats = 0, total = 0, sr_ok = 0, sr_total = 0;
  double worst_tsr = 0.0;
  for (const PowerCell& sr : t.cells) {
    if (sr.row.test != TestKind::SR) continue;
    const PowerCell* tsr = nullptr;
    for (const PowerCell& c : t.cells) {
      if (c.row.test == TestKind::TSR && c.scenario == sr.scenario && c.row.n == sr.row.n &&
          c.row.allocation == sr.row.allocation)
        tsr = &c;
    }
    ++total;
    if (tsr && sr.row.rejection_rate > tsr->row.rejection_rate) {
      ++beats;
    } else {
      o.details.push_back("ordering " + cell_name(sr) + ": SR does not exceed TSR");
    }
    if (tsr && tsr->published) {
      worst_tsr = std::max(worst_tsr, std::abs(100 * tsr->row.rejection_rate - *tsr->published));
    }
    ++sr_total;
    const double ours = 100.0 * sr.row.rejection_rate;
    if (std::abs(ours - *sr.published) <= 5.0) {
      ++sr_ok;
    } else {
      o.details.push_back(cell_name(sr) + ": " + fmt(ours, 1) + " vs " + fmt(*sr.published, 1) + " (tolerance 5)");
    }
  }
  o.pass = beats == total && sr_ok == sr_total;
  o.summary = "SR > TSR in " + std::to_string(beats) + "/" + std::to_string(total) + " cells, SR " +
              std::to_string(sr_ok) + "/" + std::to_string(sr_total) +
              " within 5 pts; TSR informational, max |dev| " + fmt(worst_tsr, 1) + " pts; " + fmt(elapsed, 0) + " s";
  return o;
}

Outcome trace_consistency() {
  const auto s = standard_scenario(ScenarioId::I, 200);
  const double truth = s.scatter.trace_squared();
  const Sampler sampler(s, {Allocation::Null, 0.0, 200});
  const std::uint64_t master = substream_seed(kDefaultMasterSeed, 606);
  int full_ok = 0, reduced_ok = 0;
  double lo = INFINITY, hi = 0.0;
  for (int run = 0; run < 100; ++run) {
    const SampleMatrix x = sampler.draw(40, substream_seed(master, run));
    const double full = trace_sigma2_full(x);
    const double reduced = trace_sigma2_reduced(x, reduced_trace_index(40));
    lo = std::min(lo, full / truth);
    hi = std::max(hi, full / truth);
    full_ok += full / truth >= 0.85 && full / truth <= 1.15;
    reduced_ok += std::abs(reduced / full - 1.0) <= 0.2;
  }
  return {full_ok >= 95 && reduced_ok >= 95,
          "full/true in [0.85, 1.15] in " + std::to_string(full_ok) + "/100 (range " + fmt(lo, 3) + "-" + fmt(hi, 3) +
              "), reduced within 20% of full in " + std::to_string(reduced_ok) + "/100 (need >= 95 each)",
          {}};
}

Outcome lemma_suites() {
  Outcome o;
  std::ostringstream summary;
  std::mt19937_64 rng(substream_seed(kDefaultMasterSeed, 707));
  std::normal_distribution<double> normal;
  double worst = 0.0;
  for (Index p : {5, 20, 100}) {
    Eigen::MatrixXd a(p, p);
    for (Index i = 0; i < p; ++i)
      for (Index j = 0; j < p; ++j) a(i, j) = normal(rng);
    const Eigen::MatrixXd m = (a + a.transpose()) / 2.0;
    const SphereMomentCheck c = sphere_moment_check(m, 20000, substream_seed(kDefaultMasterSeed, 710 + p));
    const double z2 = std::abs(c.mc2 - c.exact2) / c.se2;
    const double z4 = std::abs(c.mc4 - c.exact4) / c.se4;
    worst = std::max({worst, z2, z4});
    if (z2 > 5.0 || z4 > 5.0) {
      o.pass = false;
      o.details.push_back("sphere p=" + std::to_string(p) + ": " + fmt(z2) + " / " + fmt(z4) + " standard errors");
    }
  }
  const std::array<Index, 1> dims = {500};
  const auto tau = tau_f_check(law::Normal{}, dims, 200, 500, substream_seed(kDefaultMasterSeed, 720));
  const bool tau_ok = tau[0].tau >= 0.45 && tau[0].tau <= 0.55;
  o.pass = o.pass && tau_ok;
  o.summary = "sphere moments at p=5,20,100 within " + fmt(worst) + " se (<= 5); tau_F(p=500) = " +
              fmt(tau[0].tau, 4) + " (in [0.45, 0.55])";
  return o;
}

Outcome power_coherence(const TableArtifact& t3) {
  const Index n = 40, p = 400;
  const auto s = standard_scenario(ScenarioId::I, p);
  double empirical = NAN;
  for (const PowerCell& c : t3.cells) {
    if (c.scenario == ScenarioId::I && c.row.n == n && c.row.p == p && c.row.allocation == Allocation::Dense &&
        c.row.test == TestKind::SR)
      empirical = c.row.rejection_rate;
  }
  const MomentEstimates m = estimate_moments(s, 10000, substream_seed(kDefaultMasterSeed, 808));
  const double theta2 = make_theta({Allocation::Dense, 0.05, p}, s).squaredNorm();
  const double beta = asymptotic_power_sr(theta2, s.scatter.trace_squared(), m.c0, n, p, 0.05);
  const double gap = 100.0 * std::abs(empirical - beta);
  return {gap <= 6.0,
          "empirical SR power " + fmt(100 * empirical, 1) + " vs asymptotic " + fmt(100 * beta, 1) + " (|gap| " +
              fmt(gap, 1) + " <= 6 pts)",
          {}};
}

Outcome determinism(const TableArtifact& t3) {
  ExperimentConfig c = table_grid(TableId::T3)[0];
  for (const ExperimentConfig& g : table_grid(TableId::T3)) {
    if (g.scenario.label == "II" && g.n == 30 && g.p == 100 && g.allocation == Allocation::Dense) c = g;
  }
  const PowerTable one = run_experiment(c, {1});
  const PowerTable four = run_experiment(c, {4});
  bool same = true;
  for (std::size_t i = 0; i < one.rows.size(); ++i) {
    same = same && one.rows[i].rejections == four.rows[i].rejections;
    for (const PowerCell& cell : t3.cells) {
      if (cell.scenario == ScenarioId::II && cell.row.n == 30 && cell.row.p == 100 &&
          cell.row.allocation == Allocation::Dense && cell.row.test == one.rows[i].test)
        same = same && cell.row.rejections == one.rows[i].rejections;
    }
  }
  std::ostringstream counts;
  for (const PowerRow& r : one.rows) counts << " " << to_string(r.test) << "=" << r.rejections;
  return {same,
          std::string("scenario II n=30 p=100 dense with 1, 4 and auto threads: counts ") +
              (same ? "identical" : "differ") + " (" + counts.str().substr(1) + ")",
          {}};
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](const char* id, const char* name, const Outcome& o) {
    if (!o.pass) ++failures;
    std::cout << id << " " << (o.pass ? "PASS" : "FAIL") << "  " << name << ": " << o.summary << "\n";
    for (const auto& d : o.details) std::cout << "      " << d << "\n";
    std::cout.flush();
  };
  auto guarded = [](const std::function<Outcome()>& fn) {
    try {
      return fn();
    } catch (const std::exception& e) {
      return Outcome{false, std::string("error: ") + e.what(), {}};
    }
  };

  report("AC1", "oracle equality", guarded(oracle_equality));
  report("AC2", "ARE table", guarded(are_table_check));

  TableArtifact t3;
  report("AC3", "Table 3 reproduction", guarded([&] {
           const auto start = Clock::now();
           t3 = run_table(TableId::T3);
           return power_table_check(t3, seconds_since(start), {ScenarioId::II, ScenarioId::III});
         }));
  report("AC4", "Table 4 reproduction", guarded([&] {
           const auto start = Clock::now();
           const TableArtifact t4 = run_table(TableId::T4);
           return power_table_check(t4, seconds_since(start), {ScenarioId::IV, ScenarioId::V});
         }));
  report("AC5", "size-corrected protocol", guarded([&] {
           const auto start = Clock::now();
           const TableArtifact t2 = run_table(TableId::T2);
           return size_corrected_check(t2, seconds_since(start));
         }));
  report("AC6", "trace estimator consistency", guarded(trace_consistency));
  report("AC7", "lemma suites", guarded(lemma_suites));
  report("AC8", "asymptotic vs empirical power", guarded([&] { return power_coherence(t3); }));
  report("AC9", "determinism", guarded([&] { return determinism(t3); }));

  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criterion(s) failed") << "\n";
  return failures == 0 ? 0 : 1;
}
