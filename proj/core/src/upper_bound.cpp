// Copyright 2026 The cdtbounds Authors.
// Licensed under the Apache License, Version 2.0.

// Projected-gradient local search on ball ∩ E followed by a Newton polish of
// the KKT system on the active constraints.

#include <Eigen/LU>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>

#include "cdt/bounds.hpp"

namespace cdt {

namespace {

class FeasibleSet {
 public:
  FeasibleSet(const CdtInstance& inst, const LocalSearchOptions& opts)
      : inst_(inst), to_e_(inst), sweeps_(opts.max_projection_sweeps) {
    const InteriorCheck c = require_interior_assumption(inst);
    const double room = inst.a0() - c.ell_a;
    const double shrink = 0.5 * room / (std::abs(c.ell_a) + room);
    slater_ = (1.0 - shrink) * c.argmin_z;
  }

  bool contains(const Vector& x) const {
    return x.squaredNorm() <= 1.0 && inst_.ellipsoid_value(x) <= inst_.a0();
  }

  // Dykstra's alternating projection, then a pull towards the Slater point
  // so the result is exactly feasible.
  Vector project(const Vector& v) const {
    if (contains(v)) return v;
    Vector x = v;
    Vector p = Vector::Zero(v.size());
    Vector q = Vector::Zero(v.size());
    for (int k = 0; k < sweeps_; ++k) {
      const Vector y = to_ball(x + p);
      p = x + p - y;
      const Vector xn = to_e_(y + q);
      q = y + q - xn;
      const double move = (xn - x).norm();
      x = xn;
      if (move <= 1e-15 * (1.0 + x.norm()) && (y - xn).norm() <= 1e-15 * (1.0 + x.norm()))
        break;
    }
    return repair(x);
  }

  Vector repair(const Vector& x) const {
    if (contains(x)) return x;
    const Vector d = x - slater_;
    double lo = 0.0;
    double hi = 1.0;
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if (contains(slater_ + mid * d))
        lo = mid;
      else
        hi = mid;
    }
    return slater_ + lo * d;
  }

 private:
  static Vector to_ball(const Vector& x) {
    const double r = x.norm();
    return r > 1.0 ? Vector(x / r) : x;
  }

  const CdtInstance& inst_;
  EllipsoidProjector to_e_;
  int sweeps_;
  Vector slater_;
};

Vector gradient(const CdtInstance& inst, const Vector& x) {
  return 2.0 * (inst.Q() * x) + inst.q();
}

// Newton on the KKT system with the constraints active at x imposed as
// equalities. nullopt when there is nothing to polish or it fails.
std::optional<Vector> polish(const CdtInstance& inst, const Vector& x0) {
  const bool ball = 1.0 - x0.squaredNorm() <= 1e-6;
  const bool ell = inst.a0() - inst.ellipsoid_value(x0) <= 1e-6 * (1.0 + std::abs(inst.a0()));
  if (!ball && !ell) return std::nullopt;
  const Eigen::Index n = inst.n();
  const Eigen::Index m = (ball ? 1 : 0) + (ell ? 1 : 0);

  auto grads = [&](const Vector& x) {
    Matrix g(n, m);
    Eigen::Index j = 0;
    if (ball) g.col(j++) = 2.0 * x;
    if (ell) g.col(j++) = inst.ellipsoid_gradient(x);
    return g;
  };
  auto values = [&](const Vector& x) {
    Vector c(m);
    Eigen::Index j = 0;
    if (ball) c(j++) = x.squaredNorm() - 1.0;
    if (ell) c(j++) = inst.ellipsoid_value(x) - inst.a0();
    return c;
  };

  Vector x = x0;
  Matrix g = grads(x);
  Vector mu = g.colPivHouseholderQr().solve(-gradient(inst, x));
  const double scale = 1.0 + gradient(inst, x0).norm();
  for (int it = 0; it < 30; ++it) {
    g = grads(x);
    Vector res(n + m);
    res.head(n) = gradient(inst, x) + g * mu;
    res.tail(m) = values(x);
    if (res.norm() <= 1e-14 * scale) break;
    Matrix hess = 2.0 * inst.Q();
    Eigen::Index j = 0;
    if (ball) hess += 2.0 * mu(j++) * Matrix::Identity(n, n);
    if (ell) hess += 2.0 * mu(j++) * inst.A();
    Matrix jac = Matrix::Zero(n + m, n + m);
    jac.topLeftCorner(n, n) = hess;
    jac.topRightCorner(n, m) = g;
    jac.bottomLeftCorner(m, n) = g.transpose();
    const Eigen::FullPivLU<Matrix> lu(jac);
    if (!lu.isInvertible()) return std::nullopt;
    const Vector step = lu.solve(-res);
    x += step.head(n);
    mu += step.tail(m);
    if (!x.allFinite()) return std::nullopt;
  }
  g = grads(x);
  const double stat = (gradient(inst, x) + g * mu).norm();
  if (stat > 1e-8 * scale || values(x).cwiseAbs().maxCoeff() > 1e-8) return std::nullopt;
  if ((mu.array() < -1e-8 * scale).any()) return std::nullopt;
  if ((x - x0).norm() > 1e-2) return std::nullopt;
  return x;
}

}  // namespace

std::optional<UpperBound> local_search(const CdtInstance& inst, const Vector& seed,
                                       const LocalSearchOptions& opts) {
  if (seed.size() != inst.n() || !seed.allFinite()) return std::nullopt;
  const FeasibleSet set(inst, opts);
  const SymEig qe = sym_eig(inst.Q());
  const double lip = 2.0 * std::max(std::abs(qe.values(0)), std::abs(qe.values(qe.values.size() - 1)));
  const double step0 = lip > 0.0 ? 1.0 / lip : 1.0;

  Vector x = set.project(seed);
  double fx = inst.objective(x);
  for (int it = 0; it < opts.max_iterations; ++it) {
    const Vector g = gradient(inst, x);
    Vector xn = x;
    double fn = fx;
    double s = step0;
    for (int k = 0; k < 40; ++k, s *= 0.5) {
      xn = set.project(x - s * g);
      fn = inst.objective(xn);
      const Vector d = xn - x;
      if (fn <= fx + g.dot(d) + 0.5 * d.squaredNorm() / s) break;
    }
    if (!(fn < fx)) break;
    const double move = (xn - x).norm();
    x = std::move(xn);
    fx = fn;
    if (move <= opts.step_tol * (1.0 + x.norm())) break;
  }

  if (std::optional<Vector> p = polish(inst, x)) {
    const Vector xp = set.repair(*p);
    const double fp = inst.objective(xp);
    if (fp <= fx) {
      x = xp;
      fx = fp;
    }
  }
  if (!set.contains(x)) return std::nullopt;
  return UpperBound{fx, x};
}

UpperBound upper_bound(const CdtInstance& inst, const BoundReport& report,
                       const LocalSearchOptions& opts) {
  std::optional<UpperBound> best;
  for (const auto* seed : {&report.witness_inside, &report.witness_outside}) {
    if (!seed->has_value()) continue;
    std::optional<UpperBound> r = local_search(inst, **seed, opts);
    if (r && (!best || r->ub < best->ub)) best = std::move(r);
  }
  if (!best) throw NumericError("upper_bound: no local search reached a feasible point");
  return *best;
}

}  // namespace cdt
