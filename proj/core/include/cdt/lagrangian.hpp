// Copyright 2026 The cdtbounds Authors.
// Licensed under the Apache License, Version 2.0.

// Lagrangian relaxation of the CDT problem,
//
//   p(lambda) = min  x'(Q + lambda A)x + (q + lambda a)'x - lambda a0
//               s.t. x'x <= 1,  x in X,
//
// with X the whole space or the intersection of one or two supporting cuts.
// Problems with cuts are solved exactly by enumerating local minimizers per
// active face: a minimizer at which the cuts in S are active is a global or
// local-nonglobal minimizer of the trust-region problem restricted to the
// face of S, so every face contributes at most three candidates.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cdt/model.hpp"
#include "cdt/trs.hpp"

namespace cdt {

/// Ordered list of at most two supporting cuts.
class CutSet {
 public:
  static constexpr std::size_t kMaxCuts = 2;

  CutSet() = default;
  explicit CutSet(std::vector<Cut> cuts);

  std::size_t size() const { return cuts_.size(); }
  bool empty() const { return cuts_.empty(); }
  const Cut& operator[](std::size_t i) const { return cuts_[i]; }
  auto begin() const { return cuts_.begin(); }
  auto end() const { return cuts_.end(); }
  std::span<const Cut> cuts() const { return cuts_; }

  void push_back(Cut cut);
  CutSet with_replaced(std::size_t i, Cut cut) const;

  /// Every cut satisfied with slack tolerance `tol` (scaled by 1 + ||normal||).
  bool satisfied(const Vector& x, double tol = 1e-9) const;

 private:
  std::vector<Cut> cuts_;
};

/// A face of the cut polyhedron intersected with the unit ball, written as
/// x = center + basis * u with ||u|| <= radius. `center` is the min-norm
/// point of the face so the ball becomes centred in u.
struct ReducedProblem {
  // Absent when the face meets the ball in a single point (center).
  std::optional<TrsProblem> trs;
  Matrix basis;
  Vector center;
  double radius_sq = 0.0;
  // Lagrangian value at `center`: reduced value + offset = original value.
  double offset = 0.0;

  Vector map(const Vector& u) const { return center + basis * u; }
};

/// Restricts the relaxation to the face where every cut in `active` holds
/// with equality. nullopt when that face misses the ball.
std::optional<ReducedProblem> reduce_to_face(const CdtInstance& inst, double lambda,
                                             std::span<const Cut> active);

/// Single-cut case: basis spans the null space of the cut normal.
/// Throws ValidationError for a zero normal.
std::optional<ReducedProblem> nullspace_reduce(const CdtInstance& inst, double lambda,
                                               const Cut& cut);

enum class CandidateOrigin : std::uint8_t { global, local_nonglobal, single_point };

struct Candidate {
  Vector x;
  double value = 0.0;      // Lagrangian value, including -lambda a0
  double ellipsoid = 0.0;  // x'Ax + a'x
  // Smallest ellipsoid value over the optimal family this point represents
  // (a segment in the singular hard case), otherwise equal to `ellipsoid`.
  double family_min_ellipsoid = 0.0;
  std::uint32_t active = 0;  // bit i: cut i imposed as an equality
  CandidateOrigin origin = CandidateOrigin::global;
  bool feasible = true;  // satisfies the cuts not imposed as equalities
};

/// All candidates over every face of `cuts` (including infeasible ones,
/// flagged). Faces that miss the ball contribute nothing.
std::vector<Candidate> enumerate_candidates(const CdtInstance& inst, double lambda,
                                            const CutSet& cuts);

struct RelaxationSolution {
  double lambda = 0.0;
  double value = 0.0;
  std::vector<Candidate> witnesses;  // within the clustering tolerance of value
  double h = 0.0;
  bool infeasible = false;
};

/// Relative tolerance deciding that two candidate values tie.
inline constexpr double kWitnessTieTol = 1e-8;

RelaxationSolution solve_relaxation(const CdtInstance& inst, double lambda,
                                    const CutSet& cuts = {});

/// min over witnesses of the ellipsoid value, hard-case segments included.
double h_value(const RelaxationSolution& sol);

struct ActiveSetSolution {
  double value = 0.0;
  std::vector<Candidate> witnesses;
  bool infeasible = false;
};

/// Minimum over ball and both cuts with at least one cut active.
/// Requires exactly two cuts.
ActiveSetSolution solve_active_set_problem(const CdtInstance& inst, double lambda,
                                           const CutSet& cuts);

/// Relaxation minimum restricted to candidates with at least one active cut
/// (the cut-active problem for one cut, the active-set problem for two).
ActiveSetSolution solve_cut_active(const CdtInstance& inst, double lambda,
                                   const CutSet& cuts);

}  // namespace cdt
