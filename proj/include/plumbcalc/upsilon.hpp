#pragma once

#include "plumbcalc/quadratic.hpp"

#include <utility>
#include <vector>

namespace plumbcalc {

// Exact breakpoint form of a piecewise linear function: (t, value) pairs with
// strictly increasing t, linear interpolation between consecutive points.
struct PiecewiseLinearFn {
  std::vector<std::pair<Rational, Rational>> breakpoints;

  Rational value_at(const Rational& t) const;
};

// Smallest n >= 0 with n*n >= r.
long long ceil_sqrt(const Rational& r);

// Certified lattice minimum of chi_t. Every minimizer lies in the ball of
// squared radius search_radius_sq around the real stationary point, and every
// integer point of that ball was evaluated. The radius itself is irrational
// in general, which is why the square is what gets stored.
struct MinCertificate {
  TParam t;
  Rational min_value;
  IntVec argmin;  // lexicographically smallest minimizer
  Rational search_radius_sq;
  long long candidates_checked = 0;
};

MinCertificate minimize_chi(const GradingContext& ctx, const TParam& t);

// The upsilon function of a spin-c class on [0, 2], computed as the exact
// upper envelope of the affine functions
//   t -> (k + t u) . x + x^T Q x + grading_constant(t)
// over a candidate set of lattice points x that provably contains a pointwise
// maximizer for every t. Output breakpoints are exact rationals and the
// function is convex by construction.
PiecewiseLinearFn upsilon(const IntersectionLattice& l, const IntVec& k);
PiecewiseLinearFn upsilon(const IntersectionLattice& l, const SpincClass& s);

// Minus the slope of the initial segment, and the value at the left endpoint.
Rational tau(const PiecewiseLinearFn& f);
Rational d_invariant(const PiecewiseLinearFn& f);

struct ZemkeAuditEntry {
  Rational t;
  Rational best_bound;
  IntVec best_k;
  bool equality = false;
};

struct ZemkeAuditReport {
  std::vector<ZemkeAuditEntry> entries;
  bool equality_everywhere = true;
  long long vectors_checked = 0;
};

// Replays the lower bound zemke_bound(k', t) at every breakpoint of f, for
// every k' = center + 2Qz with |z_i| <= window_radius, where center is the
// certified bound maximizer of the class at that t (the maximizer drifts by a
// full dual-class shift as t goes from 0 to 2, so a window fixed at the class
// representative would miss it). A bound exceeding f would contradict the
// envelope construction and raises AuditFailureError. The report records,
// per t, the best bound found, a vector attaining it, and whether it reaches
// f(t); equality everywhere is the sharpness statement and is expected for
// graphs with at most two bad vertices.
ZemkeAuditReport zemke_audit(const IntersectionLattice& l, const SpincClass& s,
                             const PiecewiseLinearFn& f, Int window_radius);

}  // namespace plumbcalc
