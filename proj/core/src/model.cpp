// Copyright 2026 The cdtbounds Authors.
// Licensed under the Apache License, Version 2.0.

#include "cdt/model.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>
#include <string>

namespace cdt {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError("cdt instance: " + what);
}

}  // namespace

CdtInstance::CdtInstance(Matrix Q, Vector q, Matrix A, Vector a, double a0)
    : Q_(std::move(Q)), q_(std::move(q)), A_(std::move(A)), a_(std::move(a)), a0_(a0) {
  const Eigen::Index n = q_.size();
  require(n >= 1, "dimension must be >= 1");
  require(Q_.rows() == n && Q_.cols() == n, "Q must be n x n");
  require(A_.rows() == n && A_.cols() == n, "A must be n x n");
  require(a_.size() == n, "a must have length n");
  require(Q_.allFinite() && q_.allFinite() && A_.allFinite() && a_.allFinite() &&
              std::isfinite(a0_),
          "non-finite entry");
  require(is_symmetric(Q_), "Q is not symmetric");
  require(is_symmetric(A_), "A is not symmetric");
  const SymEig e = sym_eig(A_);
  const double top = std::max(std::abs(e.values(0)), std::abs(e.values(n - 1)));
  require(e.values(0) > 1e-12 * top && e.values(0) > 0.0, "A is not positive definite");
}

bool CdtInstance::on_boundary(const Vector& x) const {
  return std::abs(ellipsoid_value(x) - a0_) <= boundary_tolerance();
}

CdtInstance example1() {
  Matrix Q(2, 2);
  Q << -4, 1, 1, -2;
  Matrix A(2, 2);
  A << 3, 0, 0, 1;
  return CdtInstance(Q, Vector::Ones(2), A, Vector::Zero(2), 2.0);
}

bool Cut::active_at(const Vector& v, double tol) const {
  return std::abs(slack(v)) <= tol * (1.0 + normal.norm() * (v - anchor).norm());
}

InteriorCheck check_interior_assumption(const CdtInstance& inst) {
  const TrsSolution s = trs_global({inst.A(), inst.a(), 1.0});
  InteriorCheck out;
  out.ell_a = s.value;
  out.argmin_z = s.x;
  out.satisfied = s.value < inst.a0() - 1e-10 * (1.0 + std::abs(inst.a0()));
  return out;
}

InteriorCheck require_interior_assumption(const CdtInstance& inst) {
  InteriorCheck c = check_interior_assumption(inst);
  if (!c.satisfied)
    throw AssumptionError("interior assumption violated: ell_a = " +
                          std::to_string(c.ell_a) +
                          " is not below a0 = " + std::to_string(inst.a0()));
  return c;
}

double lambda_hat(const CdtInstance& inst) { return ellipsoid_info(inst).lambda_hat; }

EllipsoidInfo ellipsoid_info(const CdtInstance& inst) {
  const InteriorCheck c = require_interior_assumption(inst);
  const double fmin = trs_global({inst.Q(), inst.q(), 1.0}).value;
  const double fmax = -trs_global({-inst.Q(), -inst.q(), 1.0}).value;
  EllipsoidInfo info;
  info.ell_a = c.ell_a;
  info.argmin_z = c.argmin_z;
  info.lambda_hat = std::max(0.0, (fmax - fmin) / (inst.a0() - c.ell_a));
  return info;
}

Vector ellipsoid_center(const CdtInstance& inst) {
  return -0.5 * inst.A().llt().solve(inst.a());
}

Vector project_onto_ellipsoid(const CdtInstance& inst, const Vector& v) {
  return EllipsoidProjector(inst)(v);
}

EllipsoidProjector::EllipsoidProjector(const CdtInstance& inst)
    : inst_(&inst), eig_(sym_eig(inst.A())), at_(eig_.vectors.transpose() * inst.a()) {}

Vector EllipsoidProjector::operator()(const Vector& v) const {
  if (inst_->inside_ellipsoid(v)) return v;
  // x(nu) = (I + nu A)^{-1} (v - nu a / 2), evaluated in the eigenbasis of A.
  const Vector vt = eig_.vectors.transpose() * v;
  const Vector& alpha = eig_.values;
  auto coords = [&](double nu) {
    Vector x(vt.size());
    for (Eigen::Index i = 0; i < x.size(); ++i)
      x(i) = (vt(i) - 0.5 * nu * at_(i)) / (1.0 + nu * alpha(i));
    return x;
  };
  auto excess = [&](double nu) {
    const Vector x = coords(nu);
    return (alpha.array() * x.array().square()).sum() + at_.dot(x) - inst_->a0();
  };
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; excess(hi) > 0.0; ++it) {
    if (it > 2000) throw NumericError("project_onto_ellipsoid: no bracket");
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < 300; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (excess(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return eig_.vectors * coords(hi);
}

Vector project_to_boundary(const CdtInstance& inst, const Vector& v,
                           ProjectionKind kind) {
  if (v.size() != inst.n()) throw ValidationError("project_to_boundary: dimension mismatch");
  if (!(inst.ellipsoid_value(v) > inst.a0()))
    throw ValidationError("project_to_boundary: point is not outside the ellipsoid");
  if (kind == ProjectionKind::euclidean) return project_onto_ellipsoid(inst, v);

  const Vector c = ellipsoid_center(inst);
  const Vector d = v - c;
  // The gradient vanishes at c, so e(c + t d) = e(c) + t^2 d'Ad.
  const double room = inst.a0() - inst.ellipsoid_value(c);
  if (!(room > 0.0)) throw ValidationError("project_to_boundary: ellipsoid has empty interior");
  const double t = std::sqrt(room / d.dot(inst.A() * d));
  return c + t * d;
}

Cut supporting_cut(const CdtInstance& inst, const Vector& xbar) {
  if (xbar.size() != inst.n()) throw ValidationError("supporting_cut: dimension mismatch");
  if (!inst.on_boundary(xbar))
    throw ValidationError("supporting_cut: anchor is off the ellipsoid boundary (residual " +
                          std::to_string(inst.ellipsoid_value(xbar) - inst.a0()) + ")");
  Cut cut{xbar, inst.ellipsoid_gradient(xbar)};
  if (!(cut.normal.norm() > 0.0)) throw ValidationError("supporting_cut: zero normal");
  return cut;
}

std::optional<double> boundary_correction_gamma(const CdtInstance& inst,
                                                const Vector& xbar,
                                                const Vector& v, double eta) {
  const Vector n = inst.ellipsoid_gradient(xbar);
  const Vector delta = eta * (v - xbar);
  const Vector a_delta = inst.A() * delta;
  const Vector a_n = inst.A() * n;
  // e(w - gamma n) - a0 = qa gamma^2 + qb gamma + qc, with w = xbar + delta
  // and e expanded around xbar to keep qc accurate for tiny steps.
  const double qa = n.dot(a_n);
  const double qb = -(n.dot(n) + 2.0 * a_delta.dot(n));
  const double base = inst.ellipsoid_value(xbar) - inst.a0();
  const double qc = base + n.dot(delta) + delta.dot(a_delta);
  const double noise = 16.0 * kEps *
                       (std::abs(inst.a0()) + std::abs(inst.ellipsoid_value(xbar)) + 1.0);
  if (std::abs(qc) <= noise) return 0.0;

  const double disc = qb * qb - 4.0 * qa * qc;
  if (disc < 0.0) return std::nullopt;
  const double s = std::sqrt(disc);
  const double q = -0.5 * (qb + (qb >= 0.0 ? s : -s));
  double r1 = q / qa;
  double r2 = q != 0.0 ? qc / q : r1;
  if (r1 > r2) std::swap(r1, r2);
  if (r1 > 0.0) return r1;
  if (r2 > 0.0) return r2;
  return std::nullopt;
}

std::optional<Vector> perturb_cut(const CdtInstance& inst, const Cut& cut,
                                  const Vector& v, double eta) {
  const Vector step = v - cut.anchor;
  const double span = step.norm();
  if (!(span > 0.0)) throw ValidationError("perturb_cut: v coincides with the anchor");
  if (std::abs(cut.slack(v)) > 1e-6 * cut.normal.norm() * span)
    throw ValidationError("perturb_cut: cut is not active at v");
  const std::optional<double> gamma = boundary_correction_gamma(inst, cut.anchor, v, eta);
  if (!gamma) return std::nullopt;
  return Vector(cut.anchor + eta * step - *gamma * cut.normal);
}

}  // namespace cdt
