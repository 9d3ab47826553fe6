// Copyright 2026 The cdtbounds Authors.
// Licensed under the Apache License, Version 2.0.

#include "cdt/bounds.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace cdt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double resolve_eps(const CdtInstance& inst, const BoundOptions& opts) {
  if (opts.eps) {
    if (!(*opts.eps > 0.0)) throw ValidationError("eps must be positive");
    return *opts.eps;
  }
  return 1e-8 * (1.0 + lambda_hat(inst));
}

double resolve_tol(const BoundOptions& opts, double lb) {
  if (opts.tol) {
    if (!(*opts.tol > 0.0)) throw ValidationError("tol must be positive");
    return *opts.tol;
  }
  return 1e-6 * (1.0 + std::abs(lb));
}

std::vector<Vector> anchors_of(const CutSet& cuts) {
  std::vector<Vector> out;
  for (const Cut& c : cuts) out.push_back(c.anchor);
  return out;
}

std::optional<Vector> outside_witness(const CdtInstance& inst,
                                      const std::vector<Candidate>& ws) {
  const Candidate* best = nullptr;
  for (const Candidate& c : ws)
    if (c.ellipsoid > inst.a0() && (!best || c.ellipsoid > best->ellipsoid)) best = &c;
  if (!best) return std::nullopt;
  return best->x;
}

std::optional<Vector> inside_witness(const CdtInstance& inst,
                                     const std::vector<Candidate>& ws) {
  const Candidate* best = nullptr;
  for (const Candidate& c : ws)
    if (c.ellipsoid <= inst.a0() && (!best || c.ellipsoid < best->ellipsoid)) best = &c;
  if (!best) return std::nullopt;
  return best->x;
}

// One step of the cut-augmented bisection at a fixed lambda.
struct Probe {
  bool to_max = false;  // lambda goes to the lambda_max side
  double lb = -kInf;    // min(f1, f2) when to_max
  std::optional<Vector> z1;
  std::optional<Vector> v;  // violating minimizer when !to_max
};

Probe probe(const CdtInstance& inst, double lambda, const CutSet& cuts) {
  const std::vector<Candidate> cands = enumerate_candidates(inst, lambda, cuts);
  const Candidate* z1 = nullptr;
  const Candidate* z0 = nullptr;
  const Candidate* z2 = nullptr;
  for (const Candidate& c : cands) {
    if (c.active == 0) {
      if (c.origin == CandidateOrigin::local_nonglobal) {
        z1 = &c;
      } else if (c.feasible && (!z0 || c.value < z0->value)) {
        z0 = &c;
      }
    } else if (c.feasible && (!z2 || c.value < z2->value)) {
      z2 = &c;
    }
  }
  const double f1 = z1 ? z1->value : kInf;
  const double f2 = z2 ? z2->value : kInf;
  const double f0 = z0 ? z0->value : kInf;

  Probe p;
  if (z1) p.z1 = z1->x;
  if (!z1 || z1->ellipsoid > inst.a0() || f2 < f1 || f0 < f1) {
    const Candidate* v = (z0 && f0 < f2) ? z0 : z2;
    if (v) p.v = v->x;
    return p;
  }
  p.to_max = true;
  p.lb = std::min(f1, f2);
  return p;
}

BoundReport relabel(const BoundReport& r, BoundKind kind) {
  BoundReport out = r;
  out.bound = kind;
  out.iterations = 0;
  out.wall_time = 0.0;
  out.trace.clear();
  return out;
}

// Bisection on [0, lambda_start] for the relaxation with `cuts`.
BoundReport cut_bisection(const CdtInstance& inst, const CutSet& cuts, double lambda_start,
                          double eps, double lb_floor, bool trace, BoundKind kind) {
  BoundReport r;
  r.bound = kind;
  r.cuts = cuts;

  const RelaxationSolution init = solve_relaxation(inst, lambda_start, cuts);
  r.lb = init.infeasible ? lb_floor : std::max(lb_floor, init.value);
  r.witness_outside = outside_witness(inst, init.witnesses);
  r.witness_inside = inside_witness(inst, init.witnesses);

  double lo = 0.0;
  double hi = lambda_start;
  while (hi - lo > eps) {
    const double lambda = 0.5 * (lo + hi);
    if (lambda <= lo || lambda >= hi) break;
    const Probe p = probe(inst, lambda, cuts);
    if (p.to_max) {
      hi = lambda;
      r.lb = std::max(r.lb, p.lb);
      r.witness_inside = p.z1;
    } else {
      lo = lambda;
      if (p.v) r.witness_outside = p.v;
    }
    ++r.iterations;
    if (trace) r.trace.push_back({r.iterations, lambda, r.lb, anchors_of(cuts)});
  }
  r.final_lambda = hi;
  return r;
}

double cut_active_value(const CdtInstance& inst, double lambda, const CutSet& cuts) {
  const ActiveSetSolution s = solve_cut_active(inst, lambda, cuts);
  return s.infeasible ? -kInf : s.value;
}

// Algorithm-3 line search on the anchor of cut `i`. Returns the accepted cut
// set, or nullopt when every halving fails.
std::optional<CutSet> improve_cut(const CdtInstance& inst, const CutSet& cuts, std::size_t i,
                                  const Vector& v, double lambda, double lb,
                                  int max_halvings) {
  const Cut& cut = cuts[i];
  if ((v - cut.anchor).norm() == 0.0) return std::nullopt;
  double eta = 1.0;
  for (int k = 0; k <= max_halvings; ++k, eta *= 0.5) {
    std::optional<Vector> y;
    try {
      y = perturb_cut(inst, cut, v, eta);
    } catch (const ValidationError&) {
      return std::nullopt;
    }
    if (!y || !inst.on_boundary(*y)) continue;
    const Vector n = inst.ellipsoid_gradient(*y);
    if (!(n.norm() > 0.0)) continue;
    CutSet trial = cuts.with_replaced(i, Cut{*y, n});
    if (cut_active_value(inst, lambda, trial) > lb) return trial;
  }
  return std::nullopt;
}

// Shared outer loop of oneopt and twoopt.
BoundReport optimize_cuts(const CdtInstance& inst, const BoundReport& start,
                          const BoundOptions& opts, BoundKind kind, double eps) {
  const auto t0 = Clock::now();
  BoundReport best = relabel(start, kind);
  const double tol = resolve_tol(opts, start.lb);
  double lb_old = -kInf;
  int outer = 0;
  while (best.lb - lb_old > tol && outer < opts.max_outer && best.witness_outside) {
    const Vector v = *best.witness_outside;
    std::optional<CutSet> accepted;
    for (std::size_t i = 0; i < best.cuts.size() && !accepted; ++i) {
      if (!best.cuts[i].active_at(v)) continue;
      accepted =
          improve_cut(inst, best.cuts, i, v, best.final_lambda, best.lb, opts.max_halvings);
    }
    if (!accepted) break;

    BoundReport next =
        cut_bisection(inst, *accepted, best.final_lambda, eps, best.lb, false, kind);
    ++outer;
    lb_old = best.lb;
    best.lb = next.lb;
    best.final_lambda = next.final_lambda;
    best.cuts = std::move(next.cuts);
    best.witness_outside = std::move(next.witness_outside);
    best.witness_inside = std::move(next.witness_inside);
    if (opts.trace) best.trace.push_back({outer, best.final_lambda, best.lb, anchors_of(best.cuts)});
  }
  best.iterations = outer;
  best.wall_time = seconds_since(t0);
  return best;
}

}  // namespace

std::string_view bound_name(BoundKind b) {
  switch (b) {
    case BoundKind::dual: return "dual";
    case BoundKind::onecut: return "onecut";
    case BoundKind::oneopt: return "oneopt";
    case BoundKind::twocut: return "twocut";
    case BoundKind::twoopt: return "twoopt";
  }
  return "unknown";
}

std::optional<BoundKind> parse_bound(std::string_view name) {
  for (BoundKind b : kAllBounds)
    if (bound_name(b) == name) return b;
  return std::nullopt;
}

BoundReport lb_dual(const CdtInstance& inst, const BoundOptions& opts) {
  const auto t0 = Clock::now();
  const double lhat = lambda_hat(inst);
  const double eps = opts.eps ? resolve_eps(inst, opts) : 1e-8 * (1.0 + lhat);

  BoundReport r;
  r.bound = BoundKind::dual;
  const RelaxationSolution s0 = solve_relaxation(inst, 0.0);
  r.lb = s0.value;
  if (s0.h <= inst.a0()) {
    r.final_lambda = 0.0;
    r.witness_inside = inside_witness(inst, s0.witnesses);
    r.wall_time = seconds_since(t0);
    return r;
  }
  r.witness_outside = outside_witness(inst, s0.witnesses);

  double lo = 0.0;
  double hi = lhat;
  while (hi - lo > eps) {
    const double lambda = 0.5 * (lo + hi);
    if (lambda <= lo || lambda >= hi) break;
    const RelaxationSolution s = solve_relaxation(inst, lambda);
    r.lb = std::max(r.lb, s.value);
    if (s.h > inst.a0()) {
      lo = lambda;
      if (auto w = outside_witness(inst, s.witnesses)) r.witness_outside = std::move(w);
    } else {
      hi = lambda;
      r.witness_inside = inside_witness(inst, s.witnesses);
    }
    ++r.iterations;
    if (opts.trace) r.trace.push_back({r.iterations, lambda, r.lb, {}});
  }
  if (!r.witness_inside) {
    const RelaxationSolution s = solve_relaxation(inst, hi);
    r.lb = std::max(r.lb, s.value);
    r.witness_inside = inside_witness(inst, s.witnesses);
  }
  r.final_lambda = hi;
  r.wall_time = seconds_since(t0);
  return r;
}

BoundReport lb_one_cut(const CdtInstance& inst, const Vector& xbar, double lambda_start,
                       const BoundOptions& opts, double lb_floor) {
  const auto t0 = Clock::now();
  if (!(lambda_start >= 0.0)) throw ValidationError("lb_one_cut: lambda_start must be >= 0");
  const double eps = resolve_eps(inst, opts);
  CutSet cuts;
  cuts.push_back(supporting_cut(inst, xbar));
  BoundReport r =
      cut_bisection(inst, cuts, lambda_start, eps, lb_floor, opts.trace, BoundKind::onecut);
  r.wall_time = seconds_since(t0);
  return r;
}

BoundReport lb_one_cut(const CdtInstance& inst, const BoundReport& dual,
                       const BoundOptions& opts) {
  if (!dual.witness_outside || inst.inside_ellipsoid(*dual.witness_outside))
    return relabel(dual, BoundKind::onecut);
  const Vector xbar = project_to_boundary(inst, *dual.witness_outside);
  return lb_one_cut(inst, xbar, dual.final_lambda, opts, dual.lb);
}

BoundReport lb_one_opt(const CdtInstance& inst, const BoundReport& onecut,
                       const BoundOptions& opts) {
  if (onecut.cuts.size() != 1 || !onecut.witness_outside)
    return relabel(onecut, BoundKind::oneopt);
  return optimize_cuts(inst, onecut, opts, BoundKind::oneopt, resolve_eps(inst, opts));
}

BoundReport lb_two_cut(const CdtInstance& inst, const BoundReport& onecut,
                       const BoundOptions& opts) {
  const auto t0 = Clock::now();
  if (onecut.cuts.size() != 1 || !onecut.witness_outside ||
      inst.inside_ellipsoid(*onecut.witness_outside))
    return relabel(onecut, BoundKind::twocut);
  CutSet cuts = onecut.cuts;
  cuts.push_back(supporting_cut(inst, project_to_boundary(inst, *onecut.witness_outside)));
  BoundReport r = cut_bisection(inst, cuts, onecut.final_lambda, resolve_eps(inst, opts),
                                onecut.lb, opts.trace, BoundKind::twocut);
  r.wall_time = seconds_since(t0);
  return r;
}

BoundReport lb_two_opt(const CdtInstance& inst, const BoundReport& twocut,
                       const BoundOptions& opts) {
  if (twocut.cuts.size() != 2 || !twocut.witness_outside)
    return relabel(twocut, BoundKind::twoopt);
  return optimize_cuts(inst, twocut, opts, BoundKind::twoopt, resolve_eps(inst, opts));
}

GapCertificate relative_gap(double lb, double ub) {
  if (!std::isfinite(ub)) throw ValidationError("relative_gap: ub must be finite");
  GapCertificate g;
  g.lb = lb;
  g.ub = ub;
  g.rel_gap = std::abs(ub) <= 1e-12 ? ub - lb : (ub - lb) / std::abs(ub);
  g.solved = g.rel_gap <= kSolvedGap;
  return g;
}

MultiplicityDiagnosis diagnose_multiplicity(const CdtInstance& inst, double lambda,
                                            const CutSet& cuts) {
  if (cuts.size() != 2) throw ValidationError("diagnose_multiplicity: two cuts required");
  MultiplicityDiagnosis d;
  const std::vector<Candidate> cands = enumerate_candidates(inst, lambda, cuts);

  for (const Candidate& c : cands)
    if (c.active == 0 && c.feasible && c.ellipsoid <= inst.a0() + inst.boundary_tolerance())
      if (!d.values[0] || c.value < *d.values[0]) d.values[0] = c.value;

  for (std::uint32_t mask : {1u, 2u}) {
    std::optional<double> global;
    std::optional<double> lng;
    for (const Candidate& c : cands) {
      if (c.active != mask || !c.feasible) continue;
      auto& slot = c.origin == CandidateOrigin::local_nonglobal ? lng : global;
      if (!slot || c.value < *slot) slot = c.value;
    }
    d.values[mask] = global ? global : lng;
  }

  for (const Candidate& c : cands)
    if (c.active == 3 && c.origin != CandidateOrigin::local_nonglobal)
      if (!d.values[3] || c.value < *d.values[3]) d.values[3] = c.value;

  double lo = kInf;
  for (const auto& v : d.values)
    if (v) lo = std::min(lo, *v);
  if (std::isfinite(lo)) {
    const double tie = 1e-6 * (1.0 + std::abs(lo));
    for (const auto& v : d.values)
      if (v && *v - lo <= tie) ++d.tie_count;
  }
  d.near_tie = d.tie_count >= 3;
  return d;
}

const BoundReport& PipelineResult::report(BoundKind b) const {
  for (const BoundReport& r : reports)
    if (r.bound == b) return r;
  throw ValidationError("pipeline: bound not computed: " + std::string(bound_name(b)));
}

bool PipelineResult::has(BoundKind b) const {
  return std::any_of(reports.begin(), reports.end(),
                     [b](const BoundReport& r) { return r.bound == b; });
}

double PipelineResult::cumulative_time(BoundKind b) const {
  auto t = [&](BoundKind k) { return report(k).wall_time; };
  switch (b) {
    case BoundKind::dual: return t(BoundKind::dual);
    case BoundKind::onecut: return t(BoundKind::dual) + t(BoundKind::onecut);
    case BoundKind::oneopt: return cumulative_time(BoundKind::onecut) + t(BoundKind::oneopt);
    case BoundKind::twocut: return cumulative_time(BoundKind::onecut) + t(BoundKind::twocut);
    case BoundKind::twoopt: return cumulative_time(BoundKind::twocut) + t(BoundKind::twoopt);
  }
  return 0.0;
}

PipelineResult run_bounds(const CdtInstance& inst, std::span<const BoundKind> wanted,
                          const BoundOptions& opts) {
  auto want = [&](BoundKind b) {
    return std::find(wanted.begin(), wanted.end(), b) != wanted.end();
  };
  PipelineResult out;
  out.reports.push_back(lb_dual(inst, opts));
  out.reports.push_back(lb_one_cut(inst, out.reports.back(), opts));
  const BoundReport onecut = out.reports.back();
  out.ub = upper_bound(inst, onecut);
  if (want(BoundKind::oneopt)) out.reports.push_back(lb_one_opt(inst, onecut, opts));
  if (want(BoundKind::twocut) || want(BoundKind::twoopt)) {
    out.reports.push_back(lb_two_cut(inst, onecut, opts));
    if (want(BoundKind::twoopt)) out.reports.push_back(lb_two_opt(inst, out.reports.back(), opts));
  }
  return out;
}

PipelineResult run_pipeline(const CdtInstance& inst, BoundKind target,
                            const BoundOptions& opts) {
  return run_bounds(inst, std::span<const BoundKind>(&target, 1), opts);
}

PipelineResult run_all_bounds(const CdtInstance& inst, const BoundOptions& opts) {
  return run_bounds(inst, kAllBounds, opts);
}

}  // namespace cdt
