#pragma once

#include "plumbcalc/plumbing.hpp"

namespace plumbcalc {

// Deformation parameter, an exact rational in [0,2].
struct TParam {
  Rational t;
  TParam(Rational v = Rational(0)) : t(std::move(v)) {  // NOLINT: implicit by design
    if (t < Rational(0) || t > Rational(2)) throw InvalidParamsError("t must lie in [0,2]");
  }
  Int numer() const { return t.num(); }
  Int denom() const { return t.den(); }
};

// Everything needed to evaluate the quadratic functions and gradings of one
// characteristic vector: k^2 = k^T Qinv k and the two grading coefficients.
struct GradingContext {
  IntersectionLattice L;
  IntVec k;
  Rational ksq;
  Rational c0;  // (ksq + s)/4
  Rational c1;  // (k.F - F^2)/2
};

GradingContext grading_context(const IntersectionLattice& l, const IntVec& k);

// chi_k(x) = -(k.x + x^T Q x)/2; integer-valued for characteristic k.
Rational chi_k(const GradingContext& ctx, const IntVec& x);

// chi_t(x) = chi_k(x) - (t/2)(u.x), the twisted deformation.
Rational chi_t(const GradingContext& ctx, const TParam& t, const IntVec& x);

// c(k,t) = c0 - t*c1, the additive constant of the upsilon formula.
Rational grading_constant(const GradingContext& ctx, const TParam& t);

// Same quantity derived from scratch (fresh linear solves, no cached ksq/F);
// kept as an independently coded lower-bound oracle for audits.
Rational zemke_bound(const GradingContext& ctx, const TParam& t);
Rational zemke_bound(const IntersectionLattice& l, const IntVec& k, const TParam& t);

}  // namespace plumbcalc
