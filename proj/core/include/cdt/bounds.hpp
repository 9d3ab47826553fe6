// Copyright 2026 The cdtbounds Authors.
// Licensed under the Apache License, Version 2.0.

// Lower bounds for the CDT problem from the Lagrangian relaxation, with and
// without supporting cuts of the ellipsoid:
//
//   dual    bisection on lambda for the plain relaxation
//   onecut  one cut anchored at the radial projection of the violating
//           dual minimizer, bisection via local-nonglobal vs cut-active values
//   oneopt  the onecut anchor moved along dE while the bound improves
//   twocut  a second cut through the onecut violating minimizer
//   twoopt  the twocut anchors moved along dE while the bound improves
//
// plus a local-search upper bound and the relative-gap certificate.

#pragma once

#include <array>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "cdt/lagrangian.hpp"
#include "cdt/model.hpp"

namespace cdt {

enum class BoundKind { dual, onecut, oneopt, twocut, twoopt };

inline constexpr std::array<BoundKind, 5> kAllBounds = {
    BoundKind::dual, BoundKind::onecut, BoundKind::oneopt, BoundKind::twocut,
    BoundKind::twoopt};

std::string_view bound_name(BoundKind b);
std::optional<BoundKind> parse_bound(std::string_view name);

struct TraceRecord {
  int iter = 0;
  double lambda = 0.0;
  double lb = 0.0;
  std::vector<Vector> anchors;
};

struct BoundReport {
  BoundKind bound = BoundKind::dual;
  double lb = 0.0;
  double final_lambda = 0.0;
  CutSet cuts;
  std::optional<Vector> witness_outside;  // relaxation minimizer outside E
  std::optional<Vector> witness_inside;   // relaxation minimizer inside E
  int iterations = 0;
  double wall_time = 0.0;  // seconds, this stage only
  std::vector<TraceRecord> trace;
};

struct BoundOptions {
  // Width at which lambda bisection stops; default 1e-8 (1 + lambda_hat).
  std::optional<double> eps;
  // Minimum improvement to keep optimizing cuts; default 1e-6 (1 + |Lb|).
  std::optional<double> tol;
  int max_halvings = 60;
  int max_outer = 200;
  bool trace = false;
};

BoundReport lb_dual(const CdtInstance& inst, const BoundOptions& opts = {});

/// Bisection on [0, lambda_start] with the cut anchored at `xbar` (on dE).
/// `lb_floor` is a bound already known to hold (e.g. the dual bound).
BoundReport lb_one_cut(const CdtInstance& inst, const Vector& xbar, double lambda_start,
                       const BoundOptions& opts = {},
                       double lb_floor = -std::numeric_limits<double>::infinity());

/// Anchors the cut at the radial projection of the dual's violating witness.
BoundReport lb_one_cut(const CdtInstance& inst, const BoundReport& dual,
                       const BoundOptions& opts = {});

BoundReport lb_one_opt(const CdtInstance& inst, const BoundReport& onecut,
                       const BoundOptions& opts = {});
BoundReport lb_two_cut(const CdtInstance& inst, const BoundReport& onecut,
                       const BoundOptions& opts = {});
BoundReport lb_two_opt(const CdtInstance& inst, const BoundReport& twocut,
                       const BoundOptions& opts = {});

struct LocalSearchOptions {
  int max_iterations = 500;
  int max_projection_sweeps = 200;
  double step_tol = 1e-13;
};

struct UpperBound {
  double ub = 0.0;
  Vector x;
};

/// Best feasible value from local searches seeded at the report's inside
/// and (projected) outside witnesses. Throws NumericError if no seed
/// reaches feasibility.
UpperBound upper_bound(const CdtInstance& inst, const BoundReport& report,
                       const LocalSearchOptions& opts = {});

/// Descent from one seed; nullopt when it cannot be made feasible.
std::optional<UpperBound> local_search(const CdtInstance& inst, const Vector& seed,
                                       const LocalSearchOptions& opts = {});

inline constexpr double kSolvedGap = 1e-4;

struct GapCertificate {
  double lb = 0.0;
  double ub = 0.0;
  double rel_gap = 0.0;
  bool solved = false;
};

/// (ub - lb) / |ub|; when |ub| <= 1e-12 the absolute difference is used.
GapCertificate relative_gap(double lb, double ub);

struct MultiplicityDiagnosis {
  // interior-of-E value, cut-1-active, cut-2-active, both-active
  std::array<std::optional<double>, 4> values;
  int tie_count = 0;
  bool near_tie = false;  // tie_count >= 3
};

MultiplicityDiagnosis diagnose_multiplicity(const CdtInstance& inst, double lambda,
                                            const CutSet& cuts);

/// Reports for `target` and every bound it depends on, in pipeline order,
/// plus the upper bound computed from the onecut report.
struct PipelineResult {
  std::vector<BoundReport> reports;
  std::optional<UpperBound> ub;
  const BoundReport& report(BoundKind b) const;
  bool has(BoundKind b) const;
  /// Wall time of `b` plus every stage it depends on, in seconds.
  double cumulative_time(BoundKind b) const;
};

/// Smallest pipeline covering every bound in `wanted` (dual and onecut are
/// always run: onecut seeds the upper bound).
PipelineResult run_bounds(const CdtInstance& inst, std::span<const BoundKind> wanted,
                          const BoundOptions& opts = {});

PipelineResult run_pipeline(const CdtInstance& inst, BoundKind target,
                            const BoundOptions& opts = {});

PipelineResult run_all_bounds(const CdtInstance& inst, const BoundOptions& opts = {});

}  // namespace cdt
