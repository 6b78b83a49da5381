#include "plumbcalc/upsilon.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <vector>

namespace plumbcalc {

namespace {

RatVec apply_qinv(const IntersectionLattice& l, const RatVec& v) {
  RatVec out(l.s);
  for (int i = 0; i < l.s; ++i) {
    Rational acc;
    for (int j = 0; j < l.s; ++j) acc += l.Qinv(i, j) * v[j];
    out[i] = acc;
  }
  return out;
}

IntVec round_components(const RatVec& v) {
  IntVec out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = v[i].round_half_up();
  return out;
}

// Visits every integer vector x with ||x - center||^2 <= radius_sq, in
// lexicographically ascending order. The center is scaled by its common
// denominator once so the interior loops compare plain integers; rounding
// the scaled budget down is exact because the left side is an integer.
void scan_ball(const RatVec& center, const Rational& radius_sq,
               const std::function<void(const IntVec&)>& visit) {
  const int n = static_cast<int>(center.size());
  if (radius_sq < Rational(0)) return;
  Int scale = 1;
  for (int i = 0; i < n; ++i) scale = std::lcm(scale, center[i].den());
  std::vector<Int> cs(n);
  for (int i = 0; i < n; ++i) cs[i] = center[i].num() * (scale / center[i].den());
  const Int budget0 = (Rational(scale) * Rational(scale) * radius_sq).floor();
  IntVec x(n);
  std::function<void(int, Int)> rec = [&](int i, Int budget) {
    if (i == n) {
      visit(x);
      return;
    }
    const Int fl = cs[i] >= 0 ? cs[i] / scale : -((-cs[i] + scale - 1) / scale);
    Int lo = fl + 1, hi = fl;
    for (Int m = fl;; --m) {
      const Int d = m * scale - cs[i];
      if (d * d > budget) break;
      lo = m;
    }
    for (Int m = fl + 1;; ++m) {
      const Int d = m * scale - cs[i];
      if (d * d > budget) break;
      hi = m;
    }
    for (Int m = lo; m <= hi; ++m) {
      x[i] = m;
      const Int d = m * scale - cs[i];
      rec(i + 1, budget - d * d);
    }
  };
  rec(0, budget0);
}

struct AffLine {
  Rational slope;
  Rational icpt;

  Rational at(const Rational& t) const { return icpt + slope * t; }
};

// Upper envelope of affine functions, restricted to [0, 2], as breakpoints.
PiecewiseLinearFn upper_envelope(std::vector<AffLine> lines) {
  if (lines.empty()) throw InternalError("envelope construction got no candidate lines");
  std::sort(lines.begin(), lines.end(), [](const AffLine& a, const AffLine& b) {
    if (a.slope != b.slope) return a.slope < b.slope;
    return a.icpt < b.icpt;
  });
  // per slope only the largest intercept can contribute
  std::vector<AffLine> distinct;
  for (const AffLine& l : lines) {
    if (!distinct.empty() && distinct.back().slope == l.slope)
      distinct.back() = l;
    else
      distinct.push_back(l);
  }
  // stack construction: the middle line b gets discarded when its dominance
  // interval between a and l is empty
  std::vector<AffLine> hull;
  for (const AffLine& l : distinct) {
    while (hull.size() >= 2) {
      const AffLine& a = hull[hull.size() - 2];
      const AffLine& b = hull.back();
      if ((a.icpt - b.icpt) * (l.slope - a.slope) >= (a.icpt - l.icpt) * (b.slope - a.slope))
        hull.pop_back();
      else
        break;
    }
    hull.push_back(l);
  }

  std::vector<Rational> ts;
  ts.push_back(Rational(0));
  for (std::size_t i = 1; i < hull.size(); ++i) {
    const Rational tc = (hull[i - 1].icpt - hull[i].icpt) / (hull[i].slope - hull[i - 1].slope);
    if (tc > Rational(0) && tc < Rational(2)) ts.push_back(tc);
  }
  ts.push_back(Rational(2));
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());

  PiecewiseLinearFn f;
  for (const Rational& t : ts) {
    Rational best = hull.front().at(t);
    for (const AffLine& l : hull) {
      const Rational v = l.at(t);
      if (v > best) best = v;
    }
    f.breakpoints.emplace_back(t, best);
  }
  // drop interior points where consecutive segments share a slope
  std::vector<std::pair<Rational, Rational>> pruned;
  for (const auto& bp : f.breakpoints) {
    while (pruned.size() >= 2) {
      const auto& a = pruned[pruned.size() - 2];
      const auto& b = pruned.back();
      if ((b.second - a.second) * (bp.first - b.first) ==
          (bp.second - b.second) * (b.first - a.first))
        pruned.pop_back();
      else
        break;
    }
    pruned.push_back(bp);
  }
  f.breakpoints = std::move(pruned);
  return f;
}

}  // namespace

Rational PiecewiseLinearFn::value_at(const Rational& t) const {
  if (breakpoints.empty()) throw InternalError("piecewise linear function has no breakpoints");
  if (t < breakpoints.front().first || t > breakpoints.back().first)
    throw InvalidParamsError("argument t=" + t.str() + " lies outside the function's domain");
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    const auto& [t0, v0] = breakpoints[i];
    const auto& [t1, v1] = breakpoints[i + 1];
    if (t <= t1) return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
  }
  return breakpoints.back().second;
}

long long ceil_sqrt(const Rational& r) {
  if (r <= Rational(0)) return 0;
  const double approx = std::sqrt(static_cast<double>(r.num()) / static_cast<double>(r.den()));
  long long n = static_cast<long long>(approx);
  while (n > 0 && Rational(n) * Rational(n) >= r) --n;
  while (Rational(n) * Rational(n) < r) ++n;
  return n;
}

MinCertificate minimize_chi(const GradingContext& ctx, const TParam& t) {
  const IntersectionLattice& l = ctx.L;
  RatVec c(l.s);
  for (int i = 0; i < l.s; ++i) c[i] = Rational(ctx.k[i]) + t.t * Rational(l.u[i]);
  const RatVec y = apply_qinv(l, c);
  RatVec xstar(l.s);
  for (int i = 0; i < l.s; ++i) xstar[i] = -y[i] / Rational(2);
  // chi_t at the real stationary point, the unconstrained minimum
  const Rational chistar = dot(c, y) / Rational(8);

  const IntVec x0 = round_components(xstar);
  const Rational gap = chi_t(ctx, t, x0) - chistar;
  const Rational radius_sq = Rational(2) * gap / l.lambda_lower;

  MinCertificate cert;
  cert.t = t;
  cert.argmin = x0;
  cert.search_radius_sq = radius_sq;
  // compare 2b*chi_t = -b(k.x + x.Qx) - a(u.x) for t = a/b in plain integers
  const Int a = t.t.num(), b = t.t.den();
  const auto scaled_chi = [&](const IntVec& x) {
    const Int quad = checked_add(dot_int(ctx.k, x), quadratic_form(l.Q, x));
    return checked_add(checked_mul(-b, quad), checked_mul(-a, dot_int(l.u, x)));
  };
  Int best = scaled_chi(x0);
  scan_ball(xstar, radius_sq, [&](const IntVec& x) {
    ++cert.candidates_checked;
    const Int v = scaled_chi(x);
    if (v < best || (v == best && lex_less(x, cert.argmin))) {
      best = v;
      cert.argmin = x;
    }
  });
  cert.min_value = Rational(best, 2 * b);
  return cert;
}

PiecewiseLinearFn upsilon(const IntersectionLattice& l, const IntVec& k) {
  const GradingContext ctx = grading_context(l, k);

  // the stationary point of chi_t moves along x*(t) = x*(0) + (t/2) F; the
  // path is covered by one small ball per short segment so the enumerated
  // volume grows with the segment count, not with |F|^s
  RatVec k_rat(l.s);
  for (int i = 0; i < l.s; ++i) k_rat[i] = Rational(k[i]);
  const RatVec y0 = apply_qinv(l, k_rat);
  RatVec xstar0(l.s);
  for (int i = 0; i < l.s; ++i) xstar0[i] = -y0[i] / Rational(2);

  Rational fsq_euclid;
  for (int i = 0; i < l.s; ++i) fsq_euclid += l.F[i] * l.F[i];
  const Int m = std::max<Int>(1, ceil_sqrt(fsq_euclid));
  const Rational seg_inflate_sq = fsq_euclid / Rational(4 * m * m);

  const Rational kf = dot(k, l.F);
  const auto continuous_min = [&](const Rational& t) {
    return (ctx.ksq - Rational(2) * t * kf + t * t * l.F2) / Rational(8);
  };

  // only the largest -2chi_k per slope u.x can touch the envelope, so a
  // slope-indexed maximum replaces any per-point bookkeeping; points that
  // neighboring balls share collapse into the same bucket
  std::map<Int, Int> best_by_slope;
  const auto add_candidate = [&](const IntVec& x) {
    const Int alpha = checked_add(dot_int(k, x), quadratic_form(l.Q, x));
    const Int beta = dot_int(l.u, x);
    auto [it, fresh] = best_by_slope.try_emplace(beta, alpha);
    if (!fresh && alpha > it->second) it->second = alpha;
  };

  for (Int j = 0; j < m; ++j) {
    // segment [2j/m, 2(j+1)/m], ball centered on its midpoint
    const Rational tmid = Rational(2 * j + 1, m);
    RatVec c(l.s);
    for (int i = 0; i < l.s; ++i) c[i] = xstar0[i] + tmid / Rational(2) * l.F[i];
    const IntVec r = round_components(c);
    // chi_t at the rounded center is affine in t and bounds the lattice
    // minimum from above; the continuous minimum bounds it from below, and
    // their gap is convex on the segment, so the endpoints dominate
    const AffLine bound{Rational(-dot_int(l.u, r), 2), chi_k(ctx, r)};
    const Rational t0 = Rational(2 * j, m), t1 = Rational(2 * (j + 1), m);
    const Rational h =
        std::max(bound.at(t0) - continuous_min(t0), bound.at(t1) - continuous_min(t1));
    // every pointwise minimizer stays within rmax of the moving stationary
    // point, itself within the segment inflation of the midpoint;
    // 2(a^2 + b^2) >= (a + b)^2 keeps the radius rational
    const Rational rmax_sq = Rational(2) * h / l.lambda_lower;
    const Rational rho_sq = Rational(2) * (rmax_sq + seg_inflate_sq);
    scan_ball(c, rho_sq, add_candidate);
  }

  std::vector<AffLine> lines;
  lines.reserve(best_by_slope.size());
  for (const auto& [beta, alpha] : best_by_slope)
    lines.push_back(AffLine{Rational(beta) - ctx.c1, Rational(alpha) + ctx.c0});
  return upper_envelope(std::move(lines));
}

PiecewiseLinearFn upsilon(const IntersectionLattice& l, const SpincClass& s) {
  return upsilon(l, s.rep);
}

Rational tau(const PiecewiseLinearFn& f) {
  if (f.breakpoints.size() < 2)
    throw InvalidParamsError("slope needs at least two breakpoints");
  const auto& [t0, v0] = f.breakpoints[0];
  const auto& [t1, v1] = f.breakpoints[1];
  return -(v1 - v0) / (t1 - t0);
}

Rational d_invariant(const PiecewiseLinearFn& f) {
  if (f.breakpoints.empty())
    throw InvalidParamsError("function has no breakpoints");
  return f.breakpoints.front().second;
}

namespace {

// Steepest ascent of the bound at fixed t over single +-2Q column moves,
// walking across plateaus toward lexicographically smaller vectors.  The
// bound is discrete-valued with finite level sets, so the walk terminates.
IntVec ascend_bound(const IntersectionLattice& l, IntVec k, const TParam& t) {
  const auto better = [](const Rational& av, const IntVec& a, const Rational& bv,
                         const IntVec& b) {
    if (av != bv) return av > bv;
    return lex_less(a, b);
  };
  Rational cur = zemke_bound(l, k, t);
  for (;;) {
    bool moved = false;
    IntVec best;
    Rational bestval;
    for (int c = 0; c < l.s; ++c) {
      for (int sgn = -1; sgn <= 1; sgn += 2) {
        IntVec cand = k;
        for (int i = 0; i < l.s; ++i)
          cand[i] = checked_add(cand[i], checked_mul(2 * sgn, l.Q(i, c)));
        const Rational v = zemke_bound(l, cand, t);
        if (!better(v, cand, cur, k)) continue;
        if (!moved || better(v, cand, bestval, best)) {
          best = cand;
          bestval = v;
          moved = true;
        }
      }
    }
    if (!moved) return k;
    k = best;
    cur = bestval;
  }
}

// Certified global maximizer of the bound over a coset.  Writing m = k + t*u,
// the bound equals (m^2 - t^2 u^2 + s)/4 + t F^2/2, so maximizing it means
// finding the coset element nearest -t*u in the dual metric.  Any k at least
// as good as a greedy local maximum g satisfies |k_i + t*u_i|^2 <= R*(-mg^2)
// with R = max_i sum_j |Q(i,j)| bounding the top eigenvalue of -Q, which
// yields a finite certified search box.  Falls back to the greedy vector when
// the box is too large to sweep.
IntVec best_bound_vector(const IntersectionLattice& l, const IntVec& rep, const TParam& t) {
  IntVec g = ascend_bound(l, rep, t);
  Rational gval = zemke_bound(l, g, t);

  // -mg^2 where mg = g + t*u
  Rational neg_msq;
  {
    RatVec m(l.s);
    for (int i = 0; i < l.s; ++i) m[i] = Rational(g[i]) + t.t * Rational(l.u[i]);
    for (int i = 0; i < l.s; ++i) {
      Rational row;
      for (int j = 0; j < l.s; ++j) row += l.Qinv(i, j) * m[j];
      neg_msq -= m[i] * row;
    }
  }
  Int r = 0;
  for (int i = 0; i < l.s; ++i) {
    Int row = 0;
    for (int j = 0; j < l.s; ++j) row += std::abs(l.Q(i, j));
    r = std::max(r, row);
  }
  const Rational msq = neg_msq * Rational(r);  // bound on each (k_i + t*u_i)^2

  Int rb = 0;
  while (Rational((rb + 1) * (rb + 1)) <= msq) ++rb;
  ++rb;  // slack for the fractional center -t*u_i

  std::vector<std::vector<Int>> choices(l.s);
  Int count = 1;
  for (int i = 0; i < l.s; ++i) {
    const Rational ci = -t.t * Rational(l.u[i]);  // center of the i range
    const Int base = ci.floor();
    for (Int v = base - rb; v <= base + 1 + rb; ++v) {
      if (((v - l.Q(i, i)) % 2) != 0) continue;
      const Rational dv = Rational(v) - ci;
      if (dv * dv <= msq) choices[i].push_back(v);
    }
    if (choices[i].empty()) return g;
    count *= static_cast<Int>(choices[i].size());
    if (count > 200000) return g;
  }

  IntVec cand(l.s);
  std::vector<size_t> pos(l.s, 0);
  for (;;) {
    for (int i = 0; i < l.s; ++i) cand[i] = choices[i][pos[i]];
    if (same_spinc_class(l, cand, rep)) {
      const Rational v = zemke_bound(l, cand, t);
      if (v > gval || (v == gval && lex_less(cand, g))) {
        g = cand;
        gval = v;
      }
    }
    int i = l.s - 1;
    while (i >= 0 && ++pos[i] == choices[i].size()) pos[i--] = 0;
    if (i < 0) break;
  }
  return g;
}

}  // namespace

ZemkeAuditReport zemke_audit(const IntersectionLattice& l, const SpincClass& s,
                             const PiecewiseLinearFn& f, Int window_radius) {
  if (window_radius < 0) throw InvalidParamsError("window radius must be nonnegative");

  ZemkeAuditReport report;
  for (const auto& bp : f.breakpoints) {
    ZemkeAuditEntry e;
    e.t = bp.first;
    const Rational fval = bp.second;

    // The maximizing characteristic vector drifts with t (at t=2 it sits a
    // full dual-class shift away from the t=0 one), so a fixed window around
    // the class representative cannot see every extremum.  Recenter per t on
    // the certified bound maximizer.
    const IntVec center = best_bound_vector(l, s.rep, TParam(e.t));

    IntVec z = IntVec::Constant(l.s, -window_radius);
    bool first = true;
    for (;;) {
      IntVec kp(l.s);
      for (int i = 0; i < l.s; ++i) {
        Int row = 0;
        for (int j = 0; j < l.s; ++j) row = checked_add(row, checked_mul(l.Q(i, j), z[j]));
        kp[i] = checked_add(center[i], checked_mul(2, row));
      }
      ++report.vectors_checked;
      const Rational bound = zemke_bound(l, kp, TParam(e.t));
      if (bound > fval) {
        std::string vec = "(";
        for (int j = 0; j < l.s; ++j) vec += (j ? "," : "") + std::to_string(kp[j]);
        vec += ")";
        throw AuditFailureError("bound " + bound.str() + " from characteristic vector " + vec +
                                " exceeds the claimed value " + fval.str() + " at t=" + e.t.str());
      }
      if (first || bound > e.best_bound) {
        e.best_bound = bound;
        e.best_k = kp;
        first = false;
      }
      int j = l.s - 1;
      while (j >= 0 && z[j] == window_radius) z[j--] = -window_radius;
      if (j < 0) break;
      ++z[j];
    }

    e.equality = (e.best_bound == fval);
    if (!e.equality) report.equality_everywhere = false;
    report.entries.push_back(e);
  }
  return report;
}

}  // namespace plumbcalc
