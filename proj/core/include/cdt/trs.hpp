// Copyright 2026 The cdtbounds Authors.
// Licensed under the Apache License, Version 2.0.

// Dense trust-region subproblem kernel:
//
//   min  w'Hw + g'w   s.t.  ||w||^2 <= r^2.
//
// Both the global minimizer and the (at most one) local-nonglobal minimizer
// are obtained from a single symmetric eigendecomposition of H followed by
// safeguarded root finding on the secular function ||x(mu)||, where
// x(mu) = -(H + mu I)^{-1} g / 2.

#pragma once

#include <optional>
#include <span>
#include <vector>

#include "cdt/common.hpp"

namespace cdt {

struct TrsProblem {
  Matrix H;
  Vector g;
  double radius = 1.0;

  Eigen::Index dim() const { return g.size(); }
  double objective(const Vector& w) const { return w.dot(H * w) + g.dot(w); }
};

struct TrsSolution {
  Vector x;
  double value = 0.0;
  double mu = 0.0;
  bool on_boundary = false;
  bool hard_case = false;
  // Unit direction u with H u = lambda_1 u. When set, x + t u stays optimal
  // for every t keeping the point on the sphere (and on the whole segment
  // inside the ball when mu == 0).
  std::optional<Vector> hard_case_dir;
};

struct SymEig {
  Vector values;   // ascending
  Matrix vectors;  // orthonormal columns
};

struct TrsTolerances {
  double symmetry = 1e-10;
  double kkt = 1e-8;
  double root_width = 1e-12;
  // Bottom-eigenspace component of g below hard_case * ||g|| counts as zero.
  double hard_case = 1e-10;
  // Two eigenvalues closer than this (relative to ||H||) are treated as equal.
  double eig_cluster = 1e-10;
};

/// Raised by secular_norm_sq when mu sits on a pole.
class PoleError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// Symmetric eigendecomposition, eigenvalues ascending.
/// Throws ValidationError for non-square or non-symmetric input.
SymEig sym_eig(const Matrix& h, double symmetry_tol = 1e-10);

/// ||x(mu)||^2 = sum_i (g_i/2)^2 / (lambda_i + mu)^2 in the eigenbasis.
/// `scale` is the ||H|| used for the pole test |lambda_i + mu| < 1e-14 * scale.
double secular_norm_sq(std::span<const double> eigvals,
                       std::span<const double> g_eig, double mu,
                       double scale = 1.0);

/// Global minimizer of the TRS.
TrsSolution trs_global(const TrsProblem& p, const TrsTolerances& tol = {});

/// The local-nonglobal minimizer, if one exists.
std::optional<TrsSolution> trs_local_nonglobal(const TrsProblem& p,
                                               const TrsTolerances& tol = {});

/// Both of the above sharing one eigendecomposition.
struct TrsAnalysis {
  TrsSolution global;
  std::optional<TrsSolution> local_nonglobal;
};
TrsAnalysis analyze_trs(const TrsProblem& p, const TrsTolerances& tol = {});

/// Every global minimizer the solution represents: x itself, plus the mirror
/// point across the hard-case direction when that lands elsewhere on the
/// sphere.
std::vector<Vector> global_minimizers(const TrsSolution& s);

/// Maximum over the checks in the TrsSolution contract; used by tests.
struct KktResidual {
  double stationarity = 0.0;     // ||(H + mu I)x + g/2||
  double complementarity = 0.0;  // |mu (||x|| - r)|
  double feasibility = 0.0;      // max(0, ||x|| - r)
  double min_shifted_eig = 0.0;  // lambda_min(H + mu I)
};
KktResidual kkt_residual(const TrsProblem& p, const TrsSolution& s);

/// Smallest eigenvalue of P'(H + mu I)P over an orthonormal basis P of the
/// tangent space {d : d'x = 0}. +inf when that space is trivial (n == 1).
double tangent_min_eig(const TrsProblem& p, const Vector& x, double mu);

}  // namespace cdt
