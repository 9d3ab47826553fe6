// Copyright 2026 The cdtbounds Authors.
// Licensed under the Apache License, Version 2.0.

// Brute-force 2-D oracles. None of them calls the library's solvers.

#pragma once

#include <functional>
#include <vector>

#include "cdt/model.hpp"

namespace cdt::oracle {

using Fn = std::function<double(const Vector&)>;
using Pred = std::function<bool(const Vector&)>;

struct GridMin {
  bool found = false;
  double value = 0.0;
  Vector x;
};

/// Minimum of f over the disc of `radius` intersected with `feasible`:
/// polar grid (nr radii x nt angles), then a shrinking square grid around the
/// best point of each angular basin.
GridMin polar_grid_min(const Fn& f, const Pred& feasible, double radius = 1.0,
                       int nr = 1001, int nt = 2001);

inline bool always(const Vector&) { return true; }

/// x'Hx + g'x.
double quad(const Matrix& h, const Vector& g, const Vector& x);

struct CircleMin {
  double value = 0.0;
  double mu = 0.0;  // -x'grad f / (2 r^2): positive when f decreases outward
  Vector x;
};

/// Local minima of x'Hx + g'x along the circle of radius r (m angles,
/// golden-section refinement).
std::vector<CircleMin> circle_local_minima(const Matrix& h, const Vector& g, double r,
                                           int m = 100000);

/// Minimum of f over {x : normal'(x - anchor) = 0, ||x|| <= 1} ∩ feasible,
/// sampled at m points with local refinement. found = false if the chord is
/// empty.
GridMin chord_min(const Fn& f, const Vector& normal, const Vector& anchor,
                  const Pred& feasible, int m = 1000000);

/// Nearest point of the ellipse x'Ax + a'x = a0 to v by angle sampling.
Vector nearest_on_ellipse(const Matrix& A, const Vector& a, double a0, const Vector& v,
                          int m = 1000000);

/// Point of the ellipse boundary at angle t (parametrized through the
/// Cholesky factor of A).
Vector ellipse_point(const Matrix& A, const Vector& a, double a0, double t);

/// Random 2-D CDT instance with the interior assumption: Q symmetric with
/// N(0, s^2) entries, A = B'B + 0.3 I, a0 chosen with slack above min e.
CdtInstance random_instance_2d(unsigned seed);

}  // namespace cdt::oracle
