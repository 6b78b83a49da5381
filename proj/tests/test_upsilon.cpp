#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "plumbcalc/fixtures.hpp"
#include "plumbcalc/upsilon.hpp"

using namespace plumbcalc;

namespace {

// Brute-force oracle: scaled integer minimization of chi_t over a box.
// 2b*chi_t(x) = -b(k.x + x^T Q x) - a(u.x) for t = a/b, so the comparison
// runs in plain integers, independent of the certified-ball implementation.
struct BruteResult {
  Rational min_value;
  IntVec argmin;
};

BruteResult brute_min_chi(const IntersectionLattice& l, const IntVec& k, const TParam& t,
                          Int radius) {
  const Int a = t.numer(), b = t.denom();
  IntVec x = IntVec::Constant(l.s, -radius);
  BruteResult best;
  bool first = true;
  Int best_scaled = 0;
  for (;;) {
    Int kx = 0, xqx = 0, ux = 0;
    for (int i = 0; i < l.s; ++i) {
      kx += k[i] * x[i];
      ux += l.u[i] * x[i];
      for (int j = 0; j < l.s; ++j) xqx += x[i] * l.Q(i, j) * x[j];
    }
    const Int scaled = -b * (kx + xqx) - a * ux;  // 2b * chi_t
    if (first || scaled < best_scaled) {
      best_scaled = scaled;
      best.argmin = x;
      first = false;
    }
    int i = l.s - 1;
    while (i >= 0 && x[i] == radius) x[i--] = -radius;
    if (i < 0) break;
    ++x[i];
  }
  best.min_value = Rational(best_scaled, 2 * b);
  return best;
}

// Independent d oracle: max of (k'^2 + s)/4 over a window of shifts.
Rational brute_d(const IntersectionLattice& l, const IntVec& rep, Int radius) {
  IntVec z = IntVec::Constant(l.s, -radius);
  Rational best;
  bool first = true;
  for (;;) {
    IntVec kp = rep;
    for (int i = 0; i < l.s; ++i)
      for (int j = 0; j < l.s; ++j) kp[i] += 2 * l.Q(i, j) * z[j];
    Rational ksq;
    for (int i = 0; i < l.s; ++i) {
      Rational row;
      for (int j = 0; j < l.s; ++j) row += l.Qinv(i, j) * Rational(kp[j]);
      ksq += Rational(kp[i]) * row;
    }
    const Rational c0 = (ksq + Rational(l.s)) / Rational(4);
    if (first || c0 > best) {
      best = c0;
      first = false;
    }
    int i = l.s - 1;
    while (i >= 0 && z[i] == radius) z[i--] = -radius;
    if (i < 0) break;
    ++z[i];
  }
  return best;
}

IntVec vec3(Int a, Int b, Int c) {
  IntVec v(3);
  v << a, b, c;
  return v;
}

void check_convex(const PiecewiseLinearFn& f) {
  REQUIRE(f.breakpoints.size() >= 2);
  CHECK(f.breakpoints.front().first == Rational(0));
  CHECK(f.breakpoints.back().first == Rational(2));
  bool have_prev = false;
  Rational prev_slope;
  for (size_t i = 1; i < f.breakpoints.size(); ++i) {
    const auto& [t0, v0] = f.breakpoints[i - 1];
    const auto& [t1, v1] = f.breakpoints[i];
    CHECK(t1 > t0);
    const Rational slope = (v1 - v0) / (t1 - t0);
    if (have_prev) CHECK(slope >= prev_slope);
    prev_slope = slope;
    have_prev = true;
  }
}

}  // namespace

TEST_CASE("certified minimum with frozen examples") {
  IntersectionLattice l = lattice(fixture_graph("trefoil"));
  GradingContext ctx = grading_context(l, vec3(1, 0, -1));

  MinCertificate at0 = minimize_chi(ctx, TParam(Rational(0)));
  CHECK(at0.min_value == Rational(0));
  // zero also attains the minimum; the lex-smallest minimizer sits elsewhere
  CHECK(at0.argmin == vec3(-1, -2, -4));

  MinCertificate at2 = minimize_chi(ctx, TParam(Rational(2)));
  CHECK(at2.min_value == Rational(-1));
  CHECK(at2.argmin == vec3(1, 1, 2));
  CHECK(at2.candidates_checked > 0);
}

TEST_CASE("certified minimum agrees with brute force on the trefoil grid") {
  IntersectionLattice l = lattice(fixture_graph("trefoil"));
  auto cls = spinc_classes(l);
  GradingContext ctx = grading_context(l, cls[0].rep);
  for (Int num = 0; num <= 16; ++num) {  // 17 rational t values
    TParam t(Rational(num, 8));
    MinCertificate cert = minimize_chi(ctx, t);
    BruteResult oracle = brute_min_chi(l, cls[0].rep, t, 10);
    CHECK(cert.min_value == oracle.min_value);
    CHECK(cert.argmin == oracle.argmin);
  }
}

TEST_CASE("upsilon golden values") {
  IntersectionLattice tre = lattice(fixture_graph("trefoil"));
  PiecewiseLinearFn f = upsilon(tre, spinc_classes(tre)[0]);
  REQUIRE(f.breakpoints.size() == 3);
  CHECK(f.breakpoints[0] == std::make_pair(Rational(0), Rational(0)));
  CHECK(f.breakpoints[1] == std::make_pair(Rational(1), Rational(-1)));
  CHECK(f.breakpoints[2] == std::make_pair(Rational(2), Rational(0)));
  CHECK(tau(f) == Rational(1));
  CHECK(d_invariant(f) == Rational(0));

  IntersectionLattice unk = lattice(fixture_graph("unknot"));
  PiecewiseLinearFn g = upsilon(unk, spinc_classes(unk)[0]);
  for (const auto& [t, v] : g.breakpoints) CHECK(v == Rational(0));
  CHECK(tau(g) == Rational(0));
  CHECK(d_invariant(g) == Rational(0));

  IntersectionLattice rp = lattice(fixture_graph("rp3"));
  auto rcls = spinc_classes(rp);
  PiecewiseLinearFn h0 = upsilon(rp, rcls[0]);  // rep (-2)
  PiecewiseLinearFn h1 = upsilon(rp, rcls[1]);  // rep (0)
  CHECK(h0.value_at(Rational(0)) == Rational(-1, 4));
  CHECK(h0.value_at(Rational(1)) == Rational(0));
  CHECK(h0.value_at(Rational(2)) == Rational(1, 4));
  CHECK(h1.value_at(Rational(0)) == Rational(1, 4));
  CHECK(h1.value_at(Rational(1, 3)) == Rational(1, 4) - Rational(1, 12));
  CHECK(h1.value_at(Rational(2)) == Rational(-1, 4));
}

TEST_CASE("torus knot tau values") {
  IntersectionLattice t25 = lattice(torus_knot_graph(2, 5));
  CHECK(tau(upsilon(t25, spinc_classes(t25)[0])) == Rational(2));
  IntersectionLattice t34 = lattice(torus_knot_graph(3, 4));
  CHECK(tau(upsilon(t34, spinc_classes(t34)[0])) == Rational(3));
}

TEST_CASE("d matches the window oracle on every small fixture") {
  for (const char* name : {"trefoil", "unknot", "rp3", "chain22", "chain222"}) {
    IntersectionLattice l = lattice(fixture_graph(name));
    for (const auto& c : spinc_classes(l)) {
      CHECK(d_invariant(upsilon(l, c)) == brute_d(l, c.rep, 3));
    }
  }
}

TEST_CASE("chain22 d multiset") {
  IntersectionLattice l = lattice(fixture_graph("chain22"));
  std::vector<Rational> ds;
  for (const auto& c : spinc_classes(l)) ds.push_back(d_invariant(upsilon(l, c)));
  std::sort(ds.begin(), ds.end());
  REQUIRE(ds.size() == 3);
  CHECK(ds[0] == Rational(-1, 6));
  CHECK(ds[1] == Rational(-1, 6));
  CHECK(ds[2] == Rational(1, 2));
}

TEST_CASE("upsilon shape on every fixture") {
  for (const auto& fx : fixtures()) {
    IntersectionLattice l = lattice(fixture_graph(fx.name));
    for (const auto& c : spinc_classes(l)) {
      PiecewiseLinearFn f = upsilon(l, c);
      check_convex(f);
      // affine near zero: the second breakpoint sits strictly inside (0,2]
      CHECK(f.breakpoints[1].first > Rational(0));
    }
  }
}

TEST_CASE("upsilon is a class function") {
  std::mt19937 rng(20260822);
  std::uniform_int_distribution<Int> zdist(-4, 4);
  for (const auto& fx : fixtures()) {
    IntersectionLattice l = lattice(fixture_graph(fx.name));
    auto cls = spinc_classes(l);
    for (const auto& c : cls) {
      PiecewiseLinearFn base = upsilon(l, c);
      for (int shift = 0; shift < 20; ++shift) {
        IntVec kp = c.rep;
        for (int col = 0; col < l.s; ++col) {
          const Int z = zdist(rng);
          for (int i = 0; i < l.s; ++i) kp[i] += 2 * z * l.Q(i, col);
        }
        PiecewiseLinearFn shifted = upsilon(l, kp);
        CHECK(shifted.breakpoints == base.breakpoints);
      }
    }
  }
}

TEST_CASE("random instances agree with exhaustive search") {
  // random negative definite trees with s <= 4: weights below -(degree)
  // keep the form strictly diagonally dominant
  std::mt19937 rng(1729);
  std::uniform_int_distribution<int> sdist(1, 4);
  std::uniform_int_distribution<Int> extra(0, 3);
  std::uniform_int_distribution<Int> tnum(0, 6);
  int mismatches = 0;
  for (int inst = 0; inst < 200; ++inst) {
    const int s = sdist(rng);
    IntMat q = IntMat::Zero(s, s);
    std::vector<int> deg(s, 0);
    for (int v = 1; v < s; ++v) {
      std::uniform_int_distribution<int> pdist(0, v - 1);
      const int p = pdist(rng);
      q(v, p) = q(p, v) = 1;
      ++deg[v];
      ++deg[p];
    }
    for (int v = 0; v < s; ++v) q(v, v) = -(deg[v] + 1 + extra(rng));
    IntVec u = IntVec::Zero(s);
    u[static_cast<int>(rng() % s)] = 1;
    IntersectionLattice l = lattice_from_form(q, u, {});

    auto cls = spinc_classes(l);
    const auto& c = cls[static_cast<size_t>(rng() % cls.size())];
    IntVec k = c.rep;
    std::uniform_int_distribution<Int> zdist(-2, 2);
    for (int col = 0; col < s; ++col) {
      const Int z = zdist(rng);
      for (int i = 0; i < s; ++i) k[i] += 2 * z * l.Q(i, col);
    }
    TParam t(Rational(tnum(rng), 3));

    GradingContext ctx = grading_context(l, k);
    MinCertificate cert = minimize_chi(ctx, t);
    const Int box = 2 * ceil_sqrt(cert.search_radius_sq) + 2;
    REQUIRE(box <= 30);
    BruteResult oracle = brute_min_chi(l, k, t, box);
    if (cert.min_value != oracle.min_value || cert.argmin != oracle.argmin) ++mismatches;
  }
  CHECK(mismatches == 0);
}

TEST_CASE("audit reaches equality and rejects corrupted input") {
  IntersectionLattice tre = lattice(fixture_graph("trefoil"));
  auto cls = spinc_classes(tre);
  PiecewiseLinearFn f = upsilon(tre, cls[0]);

  ZemkeAuditReport rep = zemke_audit(tre, cls[0], f, 2);
  CHECK(rep.equality_everywhere);
  CHECK(rep.vectors_checked > 0);

  IntersectionLattice rp = lattice(fixture_graph("rp3"));
  for (const auto& c : spinc_classes(rp)) {
    PiecewiseLinearFn g = upsilon(rp, c);
    CHECK(zemke_audit(rp, c, g, 3).equality_everywhere);
  }

  // corrupt the middle value downward; some bound must now exceed it
  PiecewiseLinearFn bad = f;
  bad.breakpoints[1].second = Rational(-2);
  CHECK_THROWS_AS(zemke_audit(tre, cls[0], bad, 2), AuditFailureError);
}
