// Copyright 2026 The cdtbounds Authors.
// Licensed under the Apache License, Version 2.0.

#include "cdt/lagrangian.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>

namespace cdt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRadiusSqTol = 1e-12;

// Minimum of the convex quadratic e(base + t dir) over t in [lo, hi].
double min_ellipsoid_on_segment(const CdtInstance& inst, const Vector& base,
                                const Vector& dir, double lo, double hi) {
  const double qa = dir.dot(inst.A() * dir);
  const double qb = inst.ellipsoid_gradient(base).dot(dir);
  double t = qa > 0.0 ? -qb / (2.0 * qa) : lo;
  t = std::clamp(t, lo, hi);
  return inst.ellipsoid_value(base + t * dir);
}

struct FaceCandidates {
  std::vector<Vector> points;
  std::vector<CandidateOrigin> origins;
  // Singular hard case: the segment base + t dir, |t| <= reach, is optimal.
  std::optional<std::pair<Vector, Vector>> segment;
  double reach = 0.0;
};

FaceCandidates solve_face(const ReducedProblem& face) {
  FaceCandidates out;
  if (!face.trs) {
    out.points.push_back(face.center);
    out.origins.push_back(CandidateOrigin::single_point);
    return out;
  }
  const TrsAnalysis a = analyze_trs(*face.trs);
  for (const Vector& u : global_minimizers(a.global)) {
    out.points.push_back(face.map(u));
    out.origins.push_back(CandidateOrigin::global);
  }
  if (a.global.hard_case && a.global.hard_case_dir && a.global.mu == 0.0) {
    const Vector& dir = *a.global.hard_case_dir;
    const Vector base_u = a.global.x - dir.dot(a.global.x) * dir;
    out.reach = std::sqrt(std::max(0.0, face.trs->radius * face.trs->radius -
                                            base_u.squaredNorm()));
    out.segment.emplace(face.map(base_u), Vector(face.basis * dir));
  }
  if (a.local_nonglobal) {
    out.points.push_back(face.map(a.local_nonglobal->x));
    out.origins.push_back(CandidateOrigin::local_nonglobal);
  }
  return out;
}

std::optional<ReducedProblem> whole_space(const CdtInstance& inst, double lambda) {
  ReducedProblem p;
  p.trs = TrsProblem{inst.Q() + lambda * inst.A(), inst.q() + lambda * inst.a(), 1.0};
  p.basis = Matrix::Identity(inst.n(), inst.n());
  p.center = Vector::Zero(inst.n());
  p.radius_sq = 1.0;
  p.offset = -lambda * inst.a0();
  return p;
}

}  // namespace

CutSet::CutSet(std::vector<Cut> cuts) : cuts_(std::move(cuts)) {
  if (cuts_.size() > kMaxCuts) throw ValidationError("CutSet: at most two cuts");
}

void CutSet::push_back(Cut cut) {
  if (cuts_.size() >= kMaxCuts) throw ValidationError("CutSet: at most two cuts");
  cuts_.push_back(std::move(cut));
}

CutSet CutSet::with_replaced(std::size_t i, Cut cut) const {
  CutSet out = *this;
  out.cuts_.at(i) = std::move(cut);
  return out;
}

bool CutSet::satisfied(const Vector& x, double tol) const {
  return std::all_of(cuts_.begin(), cuts_.end(),
                     [&](const Cut& c) { return c.satisfied(x, tol); });
}

std::optional<ReducedProblem> reduce_to_face(const CdtInstance& inst, double lambda,
                                             std::span<const Cut> active) {
  const Eigen::Index n = inst.n();
  if (active.empty()) return whole_space(inst, lambda);
  const auto k = static_cast<Eigen::Index>(active.size());

  Matrix nt(k, n);
  Vector rhs(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const Cut& c = active[static_cast<std::size_t>(i)];
    if (c.normal.size() != n) throw ValidationError("reduce_to_face: dimension mismatch");
    if (!(c.normal.norm() > 0.0)) throw ValidationError("reduce_to_face: zero cut normal");
    nt.row(i) = c.normal.transpose();
    rhs(i) = c.normal.dot(c.anchor);
  }

  Eigen::JacobiSVD<Matrix> svd(nt, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector& sigma = svd.singularValues();
  Eigen::Index rank = 0;
  while (rank < sigma.size() && sigma(rank) > 1e-10 * sigma(0)) ++rank;

  // Min-norm solution of nt x = rhs.
  const Matrix& u = svd.matrixU();
  const Matrix& v = svd.matrixV();
  Vector center = Vector::Zero(n);
  for (Eigen::Index i = 0; i < rank; ++i)
    center += (u.col(i).dot(rhs) / sigma(i)) * v.col(i);
  const double mismatch = (nt * center - rhs).norm();
  if (mismatch > 1e-9 * (1.0 + rhs.norm() + nt.norm() * center.norm()))
    return std::nullopt;  // parallel, distinct hyperplanes

  ReducedProblem p;
  p.radius_sq = 1.0 - center.squaredNorm();
  if (p.radius_sq < -kRadiusSqTol) return std::nullopt;
  p.basis = v.rightCols(n - rank);
  p.center = std::move(center);

  const Matrix m = inst.Q() + lambda * inst.A();
  const Vector c = inst.q() + lambda * inst.a();
  p.offset = p.center.dot(m * p.center) + c.dot(p.center) - lambda * inst.a0();
  if (p.basis.cols() > 0 && p.radius_sq > kRadiusSqTol) {
    Matrix h = p.basis.transpose() * m * p.basis;
    h = 0.5 * (h + h.transpose());
    Vector g = p.basis.transpose() * (2.0 * (m * p.center) + c);
    p.trs = TrsProblem{std::move(h), std::move(g), std::sqrt(p.radius_sq)};
  }
  return p;
}

std::optional<ReducedProblem> nullspace_reduce(const CdtInstance& inst, double lambda,
                                               const Cut& cut) {
  return reduce_to_face(inst, lambda, std::span<const Cut>(&cut, 1));
}

std::vector<Candidate> enumerate_candidates(const CdtInstance& inst, double lambda,
                                            const CutSet& cuts) {
  std::vector<Candidate> out;
  const auto k = static_cast<std::uint32_t>(cuts.size());
  for (std::uint32_t mask = 0; mask < (1u << k); ++mask) {
    std::vector<Cut> active;
    for (std::uint32_t i = 0; i < k; ++i)
      if (mask & (1u << i)) active.push_back(cuts[i]);
    const std::optional<ReducedProblem> face = reduce_to_face(inst, lambda, active);
    if (!face) continue;
    const FaceCandidates fc = solve_face(*face);

    auto free_cuts_ok = [&](const Vector& x) {
      for (std::uint32_t i = 0; i < k; ++i)
        if (!(mask & (1u << i)) && !cuts[i].satisfied(x)) return false;
      return true;
    };

    double segment_h = kInf;
    if (fc.segment) {
      const auto& [base, dir] = *fc.segment;
      double lo = -fc.reach;
      double hi = fc.reach;
      for (std::uint32_t i = 0; i < k; ++i) {
        if (mask & (1u << i)) continue;
        const double slope = cuts[i].normal.dot(dir);
        const double s0 = cuts[i].slack(base);
        if (std::abs(slope) < 1e-14) {
          if (s0 > 0.0) lo = kInf;
        } else if (slope > 0.0) {
          hi = std::min(hi, -s0 / slope);
        } else {
          lo = std::max(lo, -s0 / slope);
        }
      }
      if (lo <= hi) segment_h = min_ellipsoid_on_segment(inst, base, dir, lo, hi);
    }

    for (std::size_t j = 0; j < fc.points.size(); ++j) {
      Candidate c;
      c.x = fc.points[j];
      c.value = inst.lagrangian(c.x, lambda);
      c.ellipsoid = inst.ellipsoid_value(c.x);
      c.family_min_ellipsoid = c.ellipsoid;
      if (fc.origins[j] == CandidateOrigin::global)
        c.family_min_ellipsoid = std::min(c.ellipsoid, segment_h);
      c.active = mask;
      c.origin = fc.origins[j];
      c.feasible = free_cuts_ok(c.x);
      out.push_back(std::move(c));
    }
  }
  return out;
}

namespace {

template <typename Pred>
ActiveSetSolution cluster_minimum(std::vector<Candidate> cands, Pred keep) {
  ActiveSetSolution out;
  double best = kInf;
  for (const Candidate& c : cands)
    if (c.feasible && keep(c)) best = std::min(best, c.value);
  if (!std::isfinite(best)) {
    out.infeasible = true;
    out.value = kInf;
    return out;
  }
  out.value = best;
  const double tie = kWitnessTieTol * (1.0 + std::abs(best));
  for (Candidate& c : cands)
    if (c.feasible && keep(c) && c.value <= best + tie) out.witnesses.push_back(std::move(c));
  return out;
}

}  // namespace

RelaxationSolution solve_relaxation(const CdtInstance& inst, double lambda,
                                    const CutSet& cuts) {
  if (!(lambda >= 0.0)) throw ValidationError("solve_relaxation: lambda must be >= 0");
  ActiveSetSolution m =
      cluster_minimum(enumerate_candidates(inst, lambda, cuts), [](const Candidate&) { return true; });
  RelaxationSolution sol;
  sol.lambda = lambda;
  sol.value = m.value;
  sol.infeasible = m.infeasible;
  sol.witnesses = std::move(m.witnesses);
  sol.h = sol.infeasible ? kInf : h_value(sol);
  return sol;
}

double h_value(const RelaxationSolution& sol) {
  double h = kInf;
  for (const Candidate& c : sol.witnesses) h = std::min(h, c.family_min_ellipsoid);
  return h;
}

ActiveSetSolution solve_cut_active(const CdtInstance& inst, double lambda,
                                   const CutSet& cuts) {
  return cluster_minimum(enumerate_candidates(inst, lambda, cuts),
                         [](const Candidate& c) { return c.active != 0; });
}

ActiveSetSolution solve_active_set_problem(const CdtInstance& inst, double lambda,
                                           const CutSet& cuts) {
  if (cuts.size() != 2)
    throw ValidationError("solve_active_set_problem: exactly two cuts required");
  return solve_cut_active(inst, lambda, cuts);
}

}  // namespace cdt
