#include "plumbcalc/quadratic.hpp"

namespace plumbcalc {

GradingContext grading_context(const IntersectionLattice& l, const IntVec& k) {
  if (k.size() != l.s) throw ValidationError("characteristic vector has wrong length");
  for (int i = 0; i < l.s; ++i) {
    if (((k[i] - l.Q(i, i)) % 2) != 0)
      throw ValidationError("vector is not characteristic: parity fails at index " +
                            std::to_string(i));
  }
  GradingContext ctx{l, k, Rational(0), Rational(0), Rational(0)};
  RatVec y(l.s);
  for (int i = 0; i < l.s; ++i) {
    Rational s;
    for (int j = 0; j < l.s; ++j) s += l.Qinv(i, j) * Rational(k[j]);
    y[i] = s;
  }
  ctx.ksq = dot(k, y);
  ctx.c0 = (ctx.ksq + Rational(l.s)) / Rational(4);
  ctx.c1 = (dot(ctx.k, l.F) - l.F2) / Rational(2);
  return ctx;
}

Rational chi_k(const GradingContext& ctx, const IntVec& x) {
  const Int v = checked_add(dot_int(ctx.k, x), quadratic_form(ctx.L.Q, x));
  return Rational(-v, 2);
}

Rational chi_t(const GradingContext& ctx, const TParam& t, const IntVec& x) {
  return chi_k(ctx, x) - t.t / Rational(2) * Rational(dot_int(ctx.L.u, x));
}

Rational grading_constant(const GradingContext& ctx, const TParam& t) {
  return ctx.c0 - t.t * ctx.c1;
}

Rational zemke_bound(const IntersectionLattice& l, const IntVec& k, const TParam& t) {
  // Deliberately re-derives everything from Q and u with fresh solves.
  const RatVec y = rational_solve(l.Q, rat_cast(k));
  Rational ksq;
  for (int i = 0; i < l.s; ++i) ksq += Rational(k[i]) * y[i];
  RatVec mu(l.s);
  for (int i = 0; i < l.s; ++i) mu[i] = Rational(-l.u[i]);
  const RatVec f = rational_solve(l.Q, mu);
  Rational kf;
  for (int i = 0; i < l.s; ++i) kf += Rational(k[i]) * f[i];
  Rational f2;
  for (int i = 0; i < l.s; ++i) f2 += Rational(-l.u[i]) * f[i];
  return (ksq + Rational(l.s)) / Rational(4) - t.t * (kf - f2) / Rational(2);
}

Rational zemke_bound(const GradingContext& ctx, const TParam& t) {
  return zemke_bound(ctx.L, ctx.k, t);
}

}  // namespace plumbcalc
