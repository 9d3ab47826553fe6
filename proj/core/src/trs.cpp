// Copyright 2026 The cdtbounds Authors.
// Licensed under the Apache License, Version 2.0.

#include "cdt/trs.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace cdt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Spectral {
  Vector lam;
  Matrix V;
  Vector gt;  // V' g
  double hnorm = 0.0;
  double gnorm = 0.0;
};

void validate(const TrsProblem& p, double symmetry_tol) {
  if (p.g.size() < 1) throw ValidationError("trs: dimension must be >= 1");
  if (p.H.rows() != p.g.size() || p.H.cols() != p.g.size())
    throw ValidationError("trs: H is " + std::to_string(p.H.rows()) + "x" +
                          std::to_string(p.H.cols()) + " but g has size " +
                          std::to_string(p.g.size()));
  if (!(p.radius > 0.0) || !std::isfinite(p.radius))
    throw ValidationError("trs: radius must be positive and finite");
  if (!p.H.allFinite() || !p.g.allFinite())
    throw ValidationError("trs: non-finite data");
  if (!is_symmetric(p.H, symmetry_tol))
    throw ValidationError("trs: H is not symmetric");
}

Spectral decompose(const TrsProblem& p, const TrsTolerances& tol) {
  validate(p, tol.symmetry);
  SymEig e = sym_eig(p.H, tol.symmetry);
  Spectral s;
  s.gt = e.vectors.transpose() * p.g;
  s.lam = std::move(e.values);
  s.V = std::move(e.vectors);
  s.hnorm = p.H.norm();
  s.gnorm = p.g.norm();
  return s;
}

// sum_{i >= skip} (gt_i / 2)^2 / (lam_i + mu)^2; +inf on an exact pole.
double norm_sq(const Spectral& s, double mu, Eigen::Index skip = 0) {
  double acc = 0.0;
  for (Eigen::Index i = skip; i < s.lam.size(); ++i) {
    const double c = 0.5 * s.gt(i);
    if (c == 0.0) continue;
    const double d = s.lam(i) + mu;
    if (d == 0.0) return kInf;
    acc += (c / d) * (c / d);
  }
  return acc;
}

// d/dmu of norm_sq.
double norm_sq_deriv(const Spectral& s, double mu, Eigen::Index skip = 0) {
  double acc = 0.0;
  for (Eigen::Index i = skip; i < s.lam.size(); ++i) {
    const double c = 0.5 * s.gt(i);
    if (c == 0.0) continue;
    const double d = s.lam(i) + mu;
    acc -= 2.0 * c * c / (d * d * d);
  }
  return acc;
}

Vector point_at(const Spectral& s, double mu, Eigen::Index skip = 0) {
  Vector c = Vector::Zero(s.lam.size());
  for (Eigen::Index i = skip; i < s.lam.size(); ++i) {
    if (s.gt(i) == 0.0) continue;
    c(i) = -0.5 * s.gt(i) / (s.lam(i) + mu);
  }
  return s.V * c;
}

// Solves ||x(mu)|| = r for mu in (lo, hi), where ||x|| is monotone on the
// bracket. Safeguarded Newton on phi(mu) = 1/||x(mu)|| - 1/r, which is close
// to linear in mu away from poles.
double solve_secular(const Spectral& s, double r, double lo, double hi,
                     bool decreasing, const TrsTolerances& tol) {
  const double sign = decreasing ? 1.0 : -1.0;  // sign * phi is increasing
  double mu = hi;
  double best_mu = hi;
  double best_res = kInf;
  for (int it = 0; it < 200; ++it) {
    const double sq = norm_sq(s, mu);
    const double psi = std::sqrt(sq);
    const double res = std::abs(psi - r);
    if (res < best_res) {
      best_res = res;
      best_mu = mu;
    }
    if (res <= 1e-15 * r) return mu;
    const double phi = (std::isfinite(psi) ? 1.0 / psi : 0.0) - 1.0 / r;
    if (sign * phi < 0.0)
      lo = mu;
    else
      hi = mu;
    if (hi - lo <= tol.root_width * 1e-3 * (1.0 + std::abs(hi))) break;
    double next = 0.5 * (lo + hi);
    if (std::isfinite(sq) && sq > 0.0) {
      const double dphi = -norm_sq_deriv(s, mu) / (2.0 * sq * psi);
      if (dphi != 0.0 && std::isfinite(dphi)) {
        const double newton = mu - phi / dphi;
        if (newton > lo && newton < hi) next = newton;
      }
    }
    if (next == mu) next = 0.5 * (lo + hi);
    if (next <= lo || next >= hi) break;
    mu = next;
  }
  return best_mu;
}

Eigen::Index bottom_multiplicity(const Spectral& s, const TrsTolerances& tol) {
  const double band = tol.eig_cluster * std::max(1.0, s.hnorm);
  Eigen::Index k = 1;
  while (k < s.lam.size() && s.lam(k) <= s.lam(0) + band) ++k;
  return k;
}

TrsSolution finish(const TrsProblem& p, Vector x, double mu) {
  TrsSolution out;
  out.value = p.objective(x);
  out.mu = std::max(0.0, mu);
  out.on_boundary = std::abs(x.norm() - p.radius) <= 1e-10 * p.radius;
  out.x = std::move(x);
  return out;
}

TrsSolution global_1d(const TrsProblem& p) {
  const double h = p.H(0, 0);
  const double g = p.g(0);
  const double r = p.radius;
  if (g == 0.0 && h <= 0.0) {
    TrsSolution s = finish(p, Vector::Constant(1, r), -h);
    s.hard_case = true;
    s.hard_case_dir = Vector::Constant(1, 1.0);
    return s;
  }
  if (h > 0.0 && std::abs(g) <= 2.0 * h * r)
    return finish(p, Vector::Constant(1, -g / (2.0 * h)), 0.0);
  // Minimum on the boundary, on the side opposite to g.
  const double x = g > 0.0 ? -r : r;
  const double mu = -h - g / (2.0 * x);
  TrsSolution s = finish(p, Vector::Constant(1, x), mu);
  s.on_boundary = true;
  return s;
}

std::optional<TrsSolution> local_nonglobal_1d(const TrsProblem& p,
                                              const TrsSolution& global) {
  const double h = p.H(0, 0);
  const double g = p.g(0);
  if (!(h < 0.0) || g == 0.0) return std::nullopt;
  const double x = g > 0.0 ? p.radius : -p.radius;
  const double mu = -h - std::abs(g) / (2.0 * p.radius);
  if (!(mu > 0.0)) return std::nullopt;
  TrsSolution s = finish(p, Vector::Constant(1, x), mu);
  s.on_boundary = true;
  if (s.value <= global.value + 1e-10 * (1.0 + std::abs(global.value)))
    return std::nullopt;
  return s;
}

TrsSolution global_nd(const TrsProblem& p, const Spectral& s,
                      const TrsTolerances& tol) {
  const double r = p.radius;
  const double r2 = r * r;
  const double lam1 = s.lam(0);
  const double hi = s.gnorm / (2.0 * r) + std::max(0.0, -lam1);

  if (lam1 > 0.0) {
    if (norm_sq(s, 0.0) <= r2) return finish(p, point_at(s, 0.0), 0.0);
    const double mu = solve_secular(s, r, 0.0, hi, true, tol);
    TrsSolution out = finish(p, point_at(s, mu), mu);
    out.on_boundary = true;
    return out;
  }

  const double lo = -lam1;
  const Eigen::Index k = bottom_multiplicity(s, tol);
  const double g_bottom = s.gt.head(k).norm();
  if (g_bottom <= tol.hard_case * s.gnorm) {
    Vector xp = point_at(s, lo, k);
    const double sp = xp.squaredNorm();
    if (sp <= r2) {
      const Vector u = s.V.col(0);
      const double t = std::sqrt(r2 - sp);
      TrsSolution out = finish(p, xp + t * u, lo);
      out.on_boundary = true;
      out.hard_case = true;
      out.hard_case_dir = u;
      return out;
    }
  }
  const double mu = solve_secular(s, r, lo, hi, true, tol);
  TrsSolution out = finish(p, point_at(s, mu), mu);
  out.on_boundary = true;
  return out;
}

std::optional<TrsSolution> local_nonglobal_nd(const TrsProblem& p,
                                              const Spectral& s,
                                              const TrsSolution& global,
                                              const TrsTolerances& tol) {
  const double r = p.radius;
  const double r2 = r * r;
  const double lam1 = s.lam(0);
  if (!(lam1 < 0.0)) return std::nullopt;
  if (bottom_multiplicity(s, tol) > 1) return std::nullopt;
  // With no g component along u1 the point has u1 in its tangent space,
  // where H + mu I is negative; the second-order test can never pass.
  if (std::abs(s.gt(0)) <= tol.hard_case * s.gnorm) return std::nullopt;

  const double lam2 = s.lam(1);
  const double a = std::max(0.0, -lam2);
  const double b = -lam1;
  if (!(a < b)) return std::nullopt;

  // ||x(mu)||^2 is convex on (a, b) and blows up at b. Locate its minimum.
  auto nudge_up = [](double v) {
    return std::nextafter(v + 1e-15 * (1.0 + std::abs(v)), kInf);
  };
  double left = (a == 0.0 && -lam2 < 0.0) ? 0.0 : nudge_up(a);
  if (!(left < b)) return std::nullopt;
  double m = left;
  if (norm_sq_deriv(s, left) < 0.0) {
    double lo = left;
    double hi = b;
    for (int it = 0; it < 400; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if (norm_sq_deriv(s, mid) < 0.0)
        lo = mid;
      else
        hi = mid;
    }
    m = lo;
  }
  if (!(norm_sq(s, m) < r2)) return std::nullopt;

  const double shift_scale = std::max(1.0, s.hnorm);
  auto accept = [&](double mu) -> std::optional<TrsSolution> {
    Vector x = point_at(s, mu);
    if (tangent_min_eig(p, x, mu) < -tol.kkt * shift_scale) return std::nullopt;
    TrsSolution out = finish(p, std::move(x), mu);
    out.on_boundary = true;
    if (out.value <= global.value + 1e-10 * (1.0 + std::abs(global.value)))
      return std::nullopt;
    return out;
  };

  // Right root: ||x|| increasing on (m, b).
  if (auto sol = accept(solve_secular(s, r, m, b, false, tol))) return sol;
  // Left root, decreasing branch, when it exists.
  if (norm_sq(s, left) > r2) {
    if (auto sol = accept(solve_secular(s, r, left, m, true, tol))) return sol;
  }
  return std::nullopt;
}

}  // namespace

bool is_symmetric(const Matrix& m, double rel_tol) {
  if (m.rows() != m.cols()) return false;
  const double asym = (m - m.transpose()).norm();
  return asym <= rel_tol * m.norm();
}

SymEig sym_eig(const Matrix& h, double symmetry_tol) {
  if (h.rows() != h.cols())
    throw ValidationError("sym_eig: matrix is not square");
  if (!h.allFinite()) throw ValidationError("sym_eig: non-finite entries");
  if (!is_symmetric(h, symmetry_tol))
    throw ValidationError("sym_eig: matrix is not symmetric");
  const Matrix sym = 0.5 * (h + h.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  if (es.info() != Eigen::Success)
    throw NumericError("sym_eig: eigensolver did not converge");
  return {es.eigenvalues(), es.eigenvectors()};
}

double secular_norm_sq(std::span<const double> eigvals,
                       std::span<const double> g_eig, double mu, double scale) {
  if (eigvals.size() != g_eig.size())
    throw ValidationError("secular_norm_sq: size mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < eigvals.size(); ++i) {
    const double c = 0.5 * g_eig[i];
    if (c == 0.0) continue;
    const double d = eigvals[i] + mu;
    if (std::abs(d) < 1e-14 * scale)
      throw PoleError("secular_norm_sq: mu = " + std::to_string(mu) +
                      " is a pole (eigenvalue index " + std::to_string(i) + ")");
    acc += (c / d) * (c / d);
  }
  return acc;
}

TrsSolution trs_global(const TrsProblem& p, const TrsTolerances& tol) {
  return analyze_trs(p, tol).global;
}

std::optional<TrsSolution> trs_local_nonglobal(const TrsProblem& p,
                                               const TrsTolerances& tol) {
  return analyze_trs(p, tol).local_nonglobal;
}

TrsAnalysis analyze_trs(const TrsProblem& p, const TrsTolerances& tol) {
  if (p.g.size() == 1) {
    validate(p, tol.symmetry);
    TrsAnalysis out{global_1d(p), std::nullopt};
    out.local_nonglobal = local_nonglobal_1d(p, out.global);
    return out;
  }
  const Spectral s = decompose(p, tol);
  TrsAnalysis out{global_nd(p, s, tol), std::nullopt};
  out.local_nonglobal = local_nonglobal_nd(p, s, out.global, tol);
  return out;
}

std::vector<Vector> global_minimizers(const TrsSolution& s) {
  std::vector<Vector> out{s.x};
  if (s.hard_case && s.hard_case_dir) {
    const Vector& u = *s.hard_case_dir;
    const double t = u.dot(s.x);
    if (std::abs(t) > 1e-12 * (1.0 + s.x.norm())) out.push_back(s.x - 2.0 * t * u);
  }
  return out;
}

KktResidual kkt_residual(const TrsProblem& p, const TrsSolution& s) {
  KktResidual k;
  const Eigen::Index n = p.dim();
  const Matrix shifted = p.H + s.mu * Matrix::Identity(n, n);
  k.stationarity = (shifted * s.x + 0.5 * p.g).norm();
  k.complementarity = std::abs(s.mu * (s.x.norm() - p.radius));
  k.feasibility = std::max(0.0, s.x.norm() - p.radius);
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (shifted + shifted.transpose()),
                                           Eigen::EigenvaluesOnly);
  k.min_shifted_eig = es.eigenvalues()(0);
  return k;
}

double tangent_min_eig(const TrsProblem& p, const Vector& x, double mu) {
  const Eigen::Index n = p.dim();
  if (n <= 1) return kInf;
  Eigen::HouseholderQR<Matrix> qr(x);
  const Matrix q = qr.householderQ();
  const Matrix basis = q.rightCols(n - 1);
  Matrix reduced = basis.transpose() * (p.H + mu * Matrix::Identity(n, n)) * basis;
  reduced = 0.5 * (reduced + reduced.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(reduced, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

}  // namespace cdt
