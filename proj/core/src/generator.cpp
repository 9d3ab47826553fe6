// Copyright 2026 The cdtbounds Authors.
// Licensed under the Apache License, Version 2.0.

#include <Eigen/QR>

#include <algorithm>
#include <random>

#include "cdt/instance_io.hpp"

namespace cdt {

namespace {

constexpr int kMaxAttempts = 1000;

class Draw {
 public:
  explicit Draw(std::uint64_t seed) : rng_(seed) {}

  double normal() { return normal_(rng_); }
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }
  Vector normals(Eigen::Index n) {
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = normal();
    return v;
  }
  Matrix orthogonal(Eigen::Index n) {
    Matrix g(n, n);
    for (Eigen::Index j = 0; j < n; ++j) g.col(j) = normals(n);
    return Eigen::HouseholderQR<Matrix>(g).householderQ() * Matrix::Identity(n, n);
  }

 private:
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_;
};

Matrix symmetric(const Matrix& u, const Vector& d) {
  Matrix m = u.transpose() * d.asDiagonal() * u;
  return 0.5 * (m + m.transpose());
}

std::optional<CdtInstance> attempt(Draw& draw, Eigen::Index n) {
  const Matrix u = draw.orthogonal(n);
  Vector d(n);
  for (Eigen::Index i = 0; i < n; ++i) d(i) = draw.uniform(-5.0, 5.0);
  std::sort(d.data(), d.data() + n);
  if (!(d(0) < 0.0 && d(0) < d(1) - 0.1)) return std::nullopt;
  const Matrix q_mat = symmetric(u, d);

  Vector q = draw.normals(n);
  std::optional<TrsAnalysis> trs;
  for (int k = 0; k < 60; ++k, q *= 0.5) {
    TrsAnalysis a = analyze_trs({q_mat, q, 1.0});
    if (a.local_nonglobal && !a.global.hard_case) {
      trs = std::move(a);
      break;
    }
  }
  if (!trs) return std::nullopt;

  const Matrix w = draw.orthogonal(n);
  Vector e(n);
  for (Eigen::Index i = 0; i < n; ++i) e(i) = draw.uniform(0.5, 3.0);
  const Matrix a_mat = symmetric(w, e);
  const Vector a = 0.5 * draw.normals(n);

  auto ell = [&](const Vector& x) { return x.dot(a_mat * x) + a.dot(x); };
  const double e_global = ell(trs->global.x);
  const double e_lng = ell(trs->local_nonglobal->x);
  if (!(e_global > e_lng)) return std::nullopt;
  CdtInstance inst(q_mat, q, a_mat, a, 0.5 * (e_global + e_lng));
  if (!check_interior_assumption(inst).satisfied) return std::nullopt;
  return inst;
}

}  // namespace

std::string instance_name(int n, std::uint64_t seed) {
  return "cdt_n" + std::to_string(n) + "_s" + std::to_string(seed);
}

CdtInstance generate_instance(int n, std::uint64_t seed) {
  if (n < 2) throw ValidationError("generate_instance: n must be >= 2");
  Draw draw(seed);
  for (int k = 0; k < kMaxAttempts; ++k)
    if (std::optional<CdtInstance> inst = attempt(draw, n)) return *std::move(inst);
  throw GenerationError("generate_instance: no acceptable draw in " +
                        std::to_string(kMaxAttempts) + " attempts for " +
                        instance_name(n, seed));
}

InstanceFile generate_instance_file(int n, std::uint64_t seed) {
  InstanceMeta meta;
  meta.name = instance_name(n, seed);
  meta.seed = seed;
  return {generate_instance(n, seed), std::move(meta)};
}

}  // namespace cdt
