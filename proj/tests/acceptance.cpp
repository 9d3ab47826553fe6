// Copyright 2026 The cdtbounds Authors.
// Licensed under the Apache License, Version 2.0.

// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cdt/bounds.hpp"
#include "cdt/instance_io.hpp"
#include "oracles.hpp"

namespace {

using namespace cdt;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

constexpr double kInf = std::numeric_limits<double>::infinity();

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Collects failed checks for one criterion.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    ++checks_;
    if (!ok) {
      if (failures_.size() < 8) failures_.push_back(what);
      ++failed_;
    }
  }
  void near(double actual, double expected, double tol, const std::string& what) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s = %.10g, expected %.10g +- %.1e", what.c_str(), actual,
                  expected, tol);
    expect(std::abs(actual - expected) <= tol, buf);
  }
  void note(const std::string& s) { notes_.push_back(s); }
  bool passed() const { return failed_ == 0; }
  int checks() const { return checks_; }
  int failed() const { return failed_; }
  const std::vector<std::string>& failures() const { return failures_; }
  const std::vector<std::string>& notes() const { return notes_; }

 private:
  int checks_ = 0;
  int failed_ = 0;
  std::vector<std::string> failures_;
  std::vector<std::string> notes_;
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

void criterion1(Check& c) {
  const CdtInstance ex = example1();
  const auto t0 = Clock::now();
  const BoundReport dual = lb_dual(ex);
  const double below = solve_relaxation(ex, 1.0 - 1e-3).h;
  const double above = solve_relaxation(ex, 1.0 + 1e-3).h;
  const double t = seconds_since(t0);
  c.near(dual.final_lambda, 1.0, 1e-6, "dual lambda");
  c.near(dual.lb, -4.25, 1e-3, "dual lb");
  c.near(below, 2.66, 0.02, "h(1 - 1e-3)");
  c.near(above, 1.34, 0.02, "h(1 + 1e-3)");
  c.expect(t < 1.0, "runtime " + fmt("%.3f s", t));
  c.note("lb " + fmt("%.9f", dual.lb) + " at lambda " + fmt("%.9f", dual.final_lambda) +
         ", " + fmt("%.4f s", t));
}

void criterion2(Check& c) {
  const CdtInstance ex = example1();
  const Vector anchor = project_to_boundary(ex, vec2(-0.911, 0.4114));
  c.near(anchor(0), -0.7901, 1e-3, "anchor x1");
  c.near(anchor(1), 0.3565, 1e-3, "anchor x2");
  const BoundReport onecut = lb_one_cut(ex, lb_dual(ex));
  c.expect(onecut.cuts.size() == 1, "onecut has one cut");
  if (onecut.cuts.size() == 1) {
    c.near(onecut.cuts[0].anchor(0), -0.7901, 1e-3, "report anchor x1");
    c.near(onecut.cuts[0].anchor(1), 0.3565, 1e-3, "report anchor x2");
  }
  c.near(onecut.lb, -4.097, 0.01, "onecut lb");
  c.near(onecut.final_lambda, 0.726, 0.01, "onecut lambda");
  c.note("lb " + fmt("%.6f", onecut.lb) + " at lambda " + fmt("%.6f", onecut.final_lambda));
}

void criterion3(Check& c) {
  const CdtInstance ex = example1();
  BoundOptions opts;
  opts.trace = true;
  const BoundReport oneopt = lb_one_opt(ex, lb_one_cut(ex, lb_dual(ex)), opts);
  c.near(oneopt.lb, -4.0362, 1e-3, "oneopt lb");
  c.near(oneopt.final_lambda, 0.557, 0.01, "oneopt lambda");
  c.expect(!oneopt.trace.empty() && oneopt.trace[0].anchors.size() == 1, "iteration-1 trace");
  if (!oneopt.trace.empty() && oneopt.trace[0].anchors.size() == 1) {
    const TraceRecord& it1 = oneopt.trace[0];
    c.near(it1.anchors[0](0), -0.7204, 1e-2, "iter-1 anchor x1");
    c.near(it1.anchors[0](1), 0.6658, 1e-2, "iter-1 anchor x2");
    c.near(it1.lb, -4.0850, 1e-2, "iter-1 Lb");
  }
  c.note("lb " + fmt("%.6f", oneopt.lb) + " at lambda " + fmt("%.6f", oneopt.final_lambda) +
         " after " + std::to_string(oneopt.iterations) + " iterations");
}

void criterion4(Check& c) {
  const CdtInstance ex = example1();
  const BoundReport twocut = lb_two_cut(ex, lb_one_cut(ex, lb_dual(ex)));
  c.near(twocut.lb, -4.005, 0.01, "twocut lb");
  c.near(twocut.final_lambda, 0.39, 0.02, "twocut lambda");
  const BoundReport twoopt = lb_two_opt(ex, twocut);
  const GapCertificate gap = relative_gap(twoopt.lb, -4.0);
  c.expect(gap.rel_gap <= 1e-4, "twoopt rel_gap " + fmt("%.3e", gap.rel_gap));
  c.note("twocut " + fmt("%.6f", twocut.lb) + " at " + fmt("%.4f", twocut.final_lambda) +
         "; twoopt " + fmt("%.10f", twoopt.lb) + ", gap " + fmt("%.2e", gap.rel_gap));
}

oracle::GridMin grid_relaxation(const CdtInstance& inst, double lambda, const CutSet& cuts) {
  return oracle::polar_grid_min(
      [&](const Vector& x) { return inst.lagrangian(x, lambda); },
      [&](const Vector& x) {
        for (const Cut& cut : cuts)
          if (cut.slack(x) > 0.0) return false;
        return true;
      });
}

void compare_relaxation(Check& c, const CdtInstance& inst, const BoundReport& r,
                        const std::string& tag, double& worst) {
  const RelaxationSolution s = solve_relaxation(inst, r.final_lambda, r.cuts);
  const oracle::GridMin o = grid_relaxation(inst, r.final_lambda, r.cuts);
  c.expect(s.infeasible != o.found, tag + " feasibility agrees with grid");
  if (!o.found || s.infeasible) return;
  worst = std::max(worst, std::abs(s.value - o.value));
  c.near(s.value, o.value, 1e-3, tag + " relaxation vs grid");
}

void criterion5(Check& c) {
  const auto t0 = Clock::now();
  double worst_bound = -kInf, worst_trs = 0.0, worst_one = 0.0, worst_two = 0.0;
  for (unsigned seed = 1; seed <= 200; ++seed) {
    const std::string tag = "seed " + std::to_string(seed);
    const CdtInstance inst = oracle::random_instance_2d(seed);
    const oracle::GridMin opt = oracle::polar_grid_min(
        [&](const Vector& x) { return inst.objective(x); },
        [&](const Vector& x) { return inst.inside_ellipsoid(x); });
    c.expect(opt.found, tag + " grid optimum found");
    PipelineResult pr;
    try {
      pr = run_all_bounds(inst);
    } catch (const std::exception& e) {
      c.expect(false, tag + " pipeline threw: " + e.what());
      continue;
    }
    for (const BoundReport& r : pr.reports) {
      worst_bound = std::max(worst_bound, r.lb - opt.value);
      c.expect(r.lb <= opt.value + 1e-3,
               tag + " " + std::string(bound_name(r.bound)) + " lb " + fmt("%.8g", r.lb) +
                   " above grid optimum " + fmt("%.8g", opt.value));
    }

    const TrsSolution t = trs_global({inst.Q(), inst.q(), 1.0});
    const oracle::GridMin ot =
        oracle::polar_grid_min([&](const Vector& x) { return inst.objective(x); }, oracle::always);
    worst_trs = std::max(worst_trs, std::abs(t.value - ot.value));
    c.near(t.value, ot.value, 1e-3, tag + " trs_global vs grid");

    compare_relaxation(c, inst, pr.report(BoundKind::onecut), tag + " one-cut", worst_one);
    compare_relaxation(c, inst, pr.report(BoundKind::twocut), tag + " two-cut", worst_two);
  }
  const double t = seconds_since(t0);
  c.expect(t < 300.0, "runtime " + fmt("%.1f s", t));
  c.note("max(lb - grid opt) " + fmt("%.2e", worst_bound) + ", trs err " +
         fmt("%.2e", worst_trs) + ", one-cut err " + fmt("%.2e", worst_one) + ", two-cut err " +
         fmt("%.2e", worst_two) + ", " + fmt("%.1f s", t));
}

void criterion6(Check& c) {
  int h_checks = 0;
  double worst_h = -kInf;
  double worst_chain = -kInf;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const std::string tag = "seed " + std::to_string(seed);
    const CdtInstance inst = generate_instance(5, seed);

    const double top = lambda_hat(inst);
    double prev_h = kInf;
    double prev_min_e = kInf;
    for (int k = 0; k < 100; ++k) {
      const RelaxationSolution s = solve_relaxation(inst, top * k / 99.0);
      double lo = kInf, hi = -kInf;
      for (const Candidate& w : s.witnesses) {
        lo = std::min(lo, w.ellipsoid);
        hi = std::max(hi, w.ellipsoid);
      }
      if (k > 0) {
        worst_h = std::max({worst_h, s.h - prev_h, hi - prev_min_e});
        c.expect(s.h <= prev_h + 1e-6, tag + " h increases at grid point " + std::to_string(k));
        c.expect(hi <= prev_min_e + 1e-6,
                 tag + " witness ellipsoid value increases at grid point " + std::to_string(k));
        ++h_checks;
      }
      prev_h = s.h;
      prev_min_e = lo;
    }

    const PipelineResult pr = run_all_bounds(inst);
    const double dual = pr.report(BoundKind::dual).lb;
    const double one = pr.report(BoundKind::onecut).lb;
    const double oneopt = pr.report(BoundKind::oneopt).lb;
    const double two = pr.report(BoundKind::twocut).lb;
    const double twoopt = pr.report(BoundKind::twoopt).lb;
    const double ub = pr.ub->ub;
    const double ub_slack = 1e-6 * (1.0 + std::abs(ub));
    worst_chain = std::max({worst_chain, dual - one, one - two, one - oneopt, two - twoopt,
                            two - ub - ub_slack + 1e-8, twoopt - ub - ub_slack + 1e-8,
                            oneopt - ub - ub_slack + 1e-8});
    c.expect(dual <= one + 1e-8, tag + " dual > onecut");
    c.expect(one <= two + 1e-8, tag + " onecut > twocut");
    c.expect(one <= oneopt + 1e-8, tag + " onecut > oneopt");
    c.expect(two <= twoopt + 1e-8, tag + " twocut > twoopt");
    c.expect(two <= ub + ub_slack, tag + " twocut > ub");
    c.expect(twoopt <= ub + ub_slack, tag + " twoopt > ub");
    c.expect(oneopt <= ub + ub_slack, tag + " oneopt > ub");
  }
  c.note(std::to_string(h_checks) + " grid steps, max increase " + fmt("%.2e", worst_h) +
         "; max chain violation " + fmt("%.2e", worst_chain));
}

void criterion7(Check& c) {
  double gap_sum[5] = {0, 0, 0, 0, 0};
  double worst_time = 0.0;
  int done = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const std::string tag = "seed " + std::to_string(seed);
    const CdtInstance inst = generate_instance(20, seed);
    PipelineResult pr;
    try {
      pr = run_all_bounds(inst);
    } catch (const std::exception& e) {
      c.expect(false, tag + " pipeline threw: " + e.what());
      continue;
    }
    ++done;
    for (BoundKind b : kAllBounds) {
      const double t = pr.cumulative_time(b);
      worst_time = std::max(worst_time, t);
      c.expect(t < 5.0, tag + " " + std::string(bound_name(b)) + " took " + fmt("%.2f s", t));
      gap_sum[static_cast<int>(b)] += relative_gap(pr.report(b).lb, pr.ub->ub).rel_gap;
    }
  }
  const double dual = gap_sum[0] / done;
  const double one = gap_sum[1] / done;
  const double two = gap_sum[3] / done;
  c.expect(one <= dual, "mean gap onecut " + fmt("%.4g", one) + " > dual " + fmt("%.4g", dual));
  c.expect(two <= one, "mean gap twocut " + fmt("%.4g", two) + " > onecut " + fmt("%.4g", one));
  c.note("mean gaps dual " + fmt("%.4e", dual) + ", onecut " + fmt("%.4e", one) + ", oneopt " +
         fmt("%.4e", gap_sum[2] / done) + ", twocut " + fmt("%.4e", two) + ", twoopt " +
         fmt("%.4e", gap_sum[4] / done) + "; slowest " + fmt("%.3f s", worst_time));
}

Matrix random_sym(std::mt19937& rng, int n) {
  std::normal_distribution<double> nd(0.0, 2.0);
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) m(i, j) = m(j, i) = nd(rng);
  return m;
}

void criterion8(Check& c) {
  std::mt19937 rng(8);
  std::normal_distribution<double> nd;
  int hard = 0;
  double worst_stat = 0.0, worst_psd = 0.0;
  for (int n : {2, 5, 20, 50}) {
    for (int trial = 0; trial < 250; ++trial) {
      const std::string tag = "n " + std::to_string(n) + " trial " + std::to_string(trial);
      const Matrix h = random_sym(rng, n);
      const Eigen::SelfAdjointEigenSolver<Matrix> es(h);
      Vector g(n);
      for (int i = 0; i < n; ++i) g(i) = nd(rng) * (trial % 3 == 0 ? 0.05 : 1.0);
      if (trial % 10 == 0) {
        // Hard case: g orthogonal to the bottom eigenvector.
        const Vector u = es.eigenvectors().col(0);
        g -= u.dot(g) * u;
        ++hard;
      }
      const double r = 0.5 + 0.01 * trial;
      TrsSolution s;
      try {
        s = trs_global({h, g, r});
      } catch (const std::exception& e) {
        c.expect(false, tag + " threw: " + e.what());
        continue;
      }
      const Matrix shifted = h + s.mu * Matrix::Identity(n, n);
      const double hn = es.eigenvalues().cwiseAbs().maxCoeff();
      const double stat = (shifted * s.x + 0.5 * g).norm() / (1.0 + g.norm() + hn);
      const double comp = std::abs(s.mu * (s.x.norm() - r));
      const double psd =
          -Eigen::SelfAdjointEigenSolver<Matrix>(shifted, Eigen::EigenvaluesOnly).eigenvalues()(0) /
          (1.0 + hn);
      worst_stat = std::max(worst_stat, stat);
      worst_psd = std::max(worst_psd, psd);
      c.expect(stat <= 1e-8, tag + " stationarity " + fmt("%.2e", stat));
      c.expect(comp <= 1e-8 * (1.0 + s.mu), tag + " complementarity " + fmt("%.2e", comp));
      c.expect(s.mu >= 0.0, tag + " negative multiplier");
      c.expect(s.x.norm() <= r * (1.0 + 1e-10), tag + " infeasible");
      c.expect(psd <= 1e-8, tag + " H + mu I not PSD: " + fmt("%.2e", psd));
      c.expect(std::abs(s.value - (s.x.dot(h * s.x) + g.dot(s.x))) <= 1e-10 * (1.0 + std::abs(s.value)),
               tag + " reported value");
    }
  }

  // Local-nonglobal detection against circle sampling.
  int agree = 0, with_lng = 0, ambiguous = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::string tag = "2-D trial " + std::to_string(trial);
    const Matrix h = random_sym(rng, 2);
    Vector g(2);
    g << nd(rng), nd(rng);
    g *= trial % 2 == 0 ? 0.3 : 2.0;
    const TrsAnalysis a = analyze_trs({h, g, 1.0});
    std::vector<oracle::CircleMin> mins = oracle::circle_local_minima(h, g, 1.0, 200000);
    bool unclear = false;
    std::vector<oracle::CircleMin> lng;
    for (const oracle::CircleMin& m : mins) {
      const double sep = m.value - a.global.value;
      if (std::abs(m.mu) < 1e-6 || (sep > 1e-9 && sep < 1e-6)) unclear = true;
      if (m.mu > 0.0 && sep >= 1e-6) lng.push_back(m);
    }
    if (unclear) {
      ++ambiguous;
      continue;
    }
    const bool expected = !lng.empty();
    c.expect(lng.size() <= 1, tag + " oracle found more than one local-nonglobal point");
    c.expect(a.local_nonglobal.has_value() == expected,
             tag + (expected ? " false negative" : " false positive"));
    if (expected && a.local_nonglobal) {
      ++with_lng;
      c.near(a.local_nonglobal->value, lng[0].value, 1e-6, tag + " local-nonglobal value");
    }
    if (a.local_nonglobal.has_value() == expected) ++agree;
  }
  c.note("1000 TRS (" + std::to_string(hard) + " hard case), max scaled stationarity " +
         fmt("%.1e", worst_stat) + ", max PSD defect " + fmt("%.1e", worst_psd) + "; " +
         std::to_string(agree) + " of " + std::to_string(200 - ambiguous) +
         " 2-D problems agree (" + std::to_string(with_lng) + " with a local-nonglobal point, " +
         std::to_string(ambiguous) + " within 1e-6 of a tie)");
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

void criterion9(Check& c) {
  const fs::path dir = fs::path(CDT_TEST_TMP);
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::vector<BenchInstance> batch;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const int n = 2 + static_cast<int>(seed % 9);
    const InstanceFile f = generate_instance_file(n, seed);
    const fs::path a = dir / ("a_" + std::to_string(seed) + ".json");
    const fs::path b = dir / ("b_" + std::to_string(seed) + ".json");
    write_instance(f.instance, a, f.meta);
    const InstanceFile back = read_instance_file(a);
    write_instance(back.instance, b, back.meta);
    c.expect(slurp(a) == slurp(b), "seed " + std::to_string(seed) + " bytes differ");
    c.expect(back.instance == f.instance, "seed " + std::to_string(seed) + " values differ");
    if (seed <= 20) batch.push_back({*f.meta.name, f.instance});
  }

  const BenchResult r = benchmark_run(batch, {});
  std::ostringstream csv;
  write_bench_csv(csv, r);
  const std::vector<BenchRecord> parsed = parse_bench_csv(csv.str());
  const std::vector<BoundKind> bounds(kAllBounds.begin(), kAllBounds.end());
  const std::vector<BenchAggregate> again = aggregate_records(parsed, bounds);
  c.expect(parsed.size() == r.records.size(), "record count");
  c.expect(again.size() == r.aggregates.size(), "aggregate count");
  for (std::size_t i = 0; i < std::min(again.size(), r.aggregates.size()); ++i) {
    const BenchAggregate& x = again[i];
    const BenchAggregate& y = r.aggregates[i];
    c.expect(x.bound == y.bound && x.records == y.records && x.solved == y.solved &&
                 x.avg_gap == y.avg_gap && x.max_gap == y.max_gap &&
                 x.avg_time_ms == y.avg_time_ms && x.max_time_ms == y.max_time_ms &&
                 x.mean_gap_all == y.mean_gap_all,
             "aggregate " + std::string(bound_name(y.bound)) + " differs after CSV round trip");
  }
  c.expect(format_summary(again) == format_summary(r.aggregates), "summary text differs");
  c.note("100 instances round-tripped; " + std::to_string(parsed.size()) +
         " records re-aggregated");
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* title;
    std::function<void(Check&)> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "reference instance: dual bound", criterion1},
      {2, "reference instance: one-cut bound", criterion2},
      {3, "reference instance: optimized one-cut bound", criterion3},
      {4, "reference instance: two-cut bounds", criterion4},
      {5, "oracle equivalence on 200 random 2-D instances", criterion5},
      {6, "monotonicity of h and the bound chain", criterion6},
      {7, "scale sanity on 100 generated n=20 instances", criterion7},
      {8, "trust-region kernel certificates", criterion8},
      {9, "determinism and I/O", criterion9},
  };
  int failed = 0;
  for (const Criterion& cr : criteria) {
    Check c;
    const auto t0 = Clock::now();
    try {
      cr.run(c);
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    const double t = seconds_since(t0);
    std::printf("criterion %d: %s  %s (%d checks, %.2f s)\n", cr.id, c.passed() ? "PASS" : "FAIL",
                cr.title, c.checks(), t);
    for (const std::string& n : c.notes()) std::printf("    %s\n", n.c_str());
    for (const std::string& f : c.failures()) std::printf("    failed: %s\n", f.c_str());
    if (c.failed() > static_cast<int>(c.failures().size()))
      std::printf("    ... %d failures in total\n", c.failed());
    std::fflush(stdout);
    if (!c.passed()) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
