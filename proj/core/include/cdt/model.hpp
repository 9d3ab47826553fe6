// Copyright 2026 The cdtbounds Authors.
// Licensed under the Apache License, Version 2.0.

// CDT problem data and the geometry of its ellipsoid constraint:
//
//   min  x'Qx + q'x   s.t.  x'x <= 1,   x'Ax + a'x <= a0,   A positive definite.
//
// E = {x : x'Ax + a'x <= a0} and dE is its boundary.

#pragma once

#include <optional>

#include "cdt/common.hpp"
#include "cdt/trs.hpp"

namespace cdt {

/// Validated problem data. Construction enforces dimensions, finiteness,
/// symmetry of Q and A and positive definiteness of A. The interior
/// assumption is a property of the data and is checked separately
/// (check_interior_assumption / require_interior_assumption).
class CdtInstance {
 public:
  CdtInstance(Matrix Q, Vector q, Matrix A, Vector a, double a0);

  Eigen::Index n() const { return q_.size(); }
  const Matrix& Q() const { return Q_; }
  const Vector& q() const { return q_; }
  const Matrix& A() const { return A_; }
  const Vector& a() const { return a_; }
  double a0() const { return a0_; }

  double objective(const Vector& x) const { return x.dot(Q_ * x) + q_.dot(x); }
  double ellipsoid_value(const Vector& x) const { return x.dot(A_ * x) + a_.dot(x); }
  /// Objective of the Lagrangian relaxation, including the -lambda*a0 term.
  double lagrangian(const Vector& x, double lambda) const {
    return objective(x) + lambda * (ellipsoid_value(x) - a0_);
  }
  /// Gradient of the ellipsoid function: 2Ax + a.
  Vector ellipsoid_gradient(const Vector& x) const { return 2.0 * (A_ * x) + a_; }

  bool inside_ellipsoid(const Vector& x, double tol = 0.0) const {
    return ellipsoid_value(x) <= a0_ + tol;
  }
  /// |ellipsoid_value(x) - a0| within 1e-8 (1 + |a0|).
  bool on_boundary(const Vector& x) const;
  double boundary_tolerance() const { return 1e-8 * (1.0 + std::abs(a0_)); }

  friend bool operator==(const CdtInstance&, const CdtInstance&) = default;

 private:
  Matrix Q_;
  Vector q_;
  Matrix A_;
  Vector a_;
  double a0_;
};

/// Two-dimensional reference instance (Burer and Anstreicher, 2013); optimal value -4.
CdtInstance example1();

/// Supporting hyperplane (2A x_bar + a)'(x - x_bar) <= 0 at x_bar on dE.
struct Cut {
  Vector anchor;
  Vector normal;

  double slack(const Vector& x) const { return normal.dot(x - anchor); }
  bool satisfied(const Vector& x, double tol = 1e-9) const {
    return slack(x) <= tol * (1.0 + normal.norm());
  }
  /// |normal'(v - anchor)| <= tol (1 + ||normal|| ||v - anchor||).
  bool active_at(const Vector& v, double tol = 1e-6) const;
};

struct InteriorCheck {
  double ell_a = 0.0;
  Vector argmin_z;
  bool satisfied = false;
};

struct EllipsoidInfo {
  double ell_a = 0.0;
  Vector argmin_z;
  double lambda_hat = 0.0;
};

/// ell_a = min over the unit ball of x'Ax + a'x; satisfied when
/// ell_a < a0 - 1e-10 (1 + |a0|).
InteriorCheck check_interior_assumption(const CdtInstance& inst);

/// Throws AssumptionError when the interior assumption fails.
InteriorCheck require_interior_assumption(const CdtInstance& inst);

/// Upper end of the useful multiplier range:
/// (max_ball f - min_ball f) / (a0 - ell_a). Throws AssumptionError.
double lambda_hat(const CdtInstance& inst);
EllipsoidInfo ellipsoid_info(const CdtInstance& inst);

/// Centre of E, -A^{-1} a / 2.
Vector ellipsoid_center(const CdtInstance& inst);

enum class ProjectionKind {
  // Scale v towards the centre of E until it hits dE.
  radial,
  // Nearest point of E in the Euclidean norm.
  euclidean,
};

/// Maps v (strictly outside E) onto dE. Throws ValidationError if v is in E.
Vector project_to_boundary(const CdtInstance& inst, const Vector& v,
                           ProjectionKind kind = ProjectionKind::radial);

/// Euclidean projection onto the convex set E; identity for points of E.
Vector project_onto_ellipsoid(const CdtInstance& inst, const Vector& v);

/// project_onto_ellipsoid with the eigendecomposition of A computed once.
class EllipsoidProjector {
 public:
  explicit EllipsoidProjector(const CdtInstance& inst);
  Vector operator()(const Vector& v) const;

 private:
  const CdtInstance* inst_;
  SymEig eig_;
  Vector at_;  // a in the eigenbasis of A
};

/// Cut at x_bar. Throws ValidationError if x_bar is not on dE or the
/// normal vanishes.
Cut supporting_cut(const CdtInstance& inst, const Vector& xbar);

/// Smallest gamma > 0 with x_bar + eta (v - x_bar) - gamma (2A x_bar + a)
/// on dE, or nullopt when the scalar quadratic has no positive real root.
std::optional<double> boundary_correction_gamma(const CdtInstance& inst,
                                                const Vector& xbar,
                                                const Vector& v, double eta);

/// New anchor x_bar + eta (v - x_bar) - gamma (2A x_bar + a) on dE for a
/// point v at which `cut` is active, or nullopt when gamma is undefined.
/// Throws ValidationError if the cut is not active at v.
std::optional<Vector> perturb_cut(const CdtInstance& inst, const Cut& cut,
                                  const Vector& v, double eta);

}  // namespace cdt
