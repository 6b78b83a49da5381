#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "plumbcalc/fixtures.hpp"
#include "plumbcalc/quadratic.hpp"

using namespace plumbcalc;

namespace {

IntersectionLattice trefoil_lattice() { return lattice(fixture_graph("trefoil")); }

IntVec vec3(Int a, Int b, Int c) {
  IntVec v(3);
  v << a, b, c;
  return v;
}

IntVec vec1(Int a) {
  IntVec v(1);
  v << a;
  return v;
}

}  // namespace

TEST_CASE("t parameter range") {
  CHECK_NOTHROW(TParam(Rational(0)));
  CHECK_NOTHROW(TParam(Rational(2)));
  CHECK_NOTHROW(TParam(Rational(2, 3)));
  CHECK_THROWS_AS(TParam(Rational(-1, 2)), InvalidParamsError);
  CHECK_THROWS_AS(TParam(Rational(5, 2)), InvalidParamsError);
  CHECK(TParam(Rational(4, 6)).numer() == 2);
  CHECK(TParam(Rational(4, 6)).denom() == 3);
}

TEST_CASE("quadratic function values") {
  IntersectionLattice g2 = lattice(fixture_graph("rp3"));
  GradingContext zero = grading_context(g2, vec1(0));
  CHECK(chi_k(zero, vec1(0)) == Rational(0));
  CHECK(chi_k(zero, vec1(1)) == Rational(1));

  IntersectionLattice tre = trefoil_lattice();
  GradingContext ctx = grading_context(tre, vec3(1, 0, -1));
  CHECK(chi_k(ctx, vec3(1, 1, 1)) == Rational(1));
  CHECK(chi_t(ctx, TParam(Rational(1)), vec3(1, 1, 2)) == Rational(0));
  CHECK(chi_t(ctx, TParam(Rational(0)), vec3(1, 1, 2)) ==
        chi_k(ctx, vec3(1, 1, 2)));

  GradingContext m2 = grading_context(g2, vec1(-2));
  for (Int num = 0; num <= 4; ++num) {
    TParam t(Rational(num, 2));
    CHECK(chi_t(m2, t, vec1(-1)) == t.t / Rational(2));
  }
}

TEST_CASE("grading constants") {
  IntersectionLattice tre = trefoil_lattice();
  GradingContext ctx = grading_context(tre, vec3(1, 0, -1));
  CHECK(ctx.ksq == Rational(-3));
  CHECK(ctx.c0 == Rational(0));
  CHECK(ctx.c1 == Rational(1));
  CHECK(grading_constant(ctx, TParam(Rational(1))) == Rational(-1));
  CHECK(grading_constant(ctx, TParam(Rational(1, 3))) == Rational(-1, 3));

  IntersectionLattice g2 = lattice(fixture_graph("rp3"));
  CHECK(grading_constant(grading_context(g2, vec1(0)), TParam(Rational(1))) ==
        Rational(0));
  CHECK(grading_constant(grading_context(g2, vec1(0)), TParam(Rational(0))) ==
        Rational(1, 4));
  CHECK(grading_constant(grading_context(g2, vec1(-2)), TParam(Rational(0))) ==
        Rational(-1, 4));
  CHECK(grading_constant(grading_context(g2, vec1(-2)), TParam(Rational(2))) ==
        Rational(1, 4));
}

TEST_CASE("independent bound recomputation matches the cached constant") {
  // the two are coded separately on purpose; this is the cross-check
  std::mt19937 rng(7);
  std::uniform_int_distribution<Int> zdist(-3, 3);
  for (const char* name : {"trefoil", "chain22", "doublecover", "t25"}) {
    IntersectionLattice l = lattice(fixture_graph(name));
    auto cls = spinc_classes(l);
    for (const auto& c : cls) {
      for (int trial = 0; trial < 10; ++trial) {
        IntVec k = c.rep;
        for (int col = 0; col < l.s; ++col) {
          Int z = zdist(rng);
          for (int i = 0; i < l.s; ++i) k[i] += 2 * z * l.Q(i, col);
        }
        GradingContext ctx = grading_context(l, k);
        for (Int num = 0; num <= 6; ++num) {
          TParam t(Rational(num, 3));
          CHECK(grading_constant(ctx, t) == zemke_bound(ctx, t));
          CHECK(zemke_bound(ctx, t) == zemke_bound(l, k, t));
        }
      }
    }
  }
}

TEST_CASE("shifted bound stays below upsilon at zero") {
  IntersectionLattice tre = trefoil_lattice();
  CHECK(zemke_bound(tre, vec3(3, 2, -3), TParam(Rational(0))) <= Rational(0));
  CHECK(zemke_bound(tre, vec3(1, 0, -1), TParam(Rational(1))) == Rational(-1));
}

TEST_CASE("coset identity links shifted vectors") {
  // -2 chi_t^(k)(x + e_j) + c(k,t) = -2 chi_t^(k') (x) + c(k',t)
  // with k' = k + 2 Q e_j; exercised over a small box
  IntersectionLattice l = trefoil_lattice();
  auto cls = spinc_classes(l);
  GradingContext base = grading_context(l, cls[0].rep);
  for (int j = 0; j < l.s; ++j) {
    IntVec kp = cls[0].rep;
    for (int i = 0; i < l.s; ++i) kp[i] += 2 * l.Q(i, j);
    GradingContext shifted = grading_context(l, kp);
    for (Int num = 0; num <= 4; ++num) {
      TParam t(Rational(num, 2));
      IntVec x(3);
      for (x[0] = -2; x[0] <= 2; ++x[0])
        for (x[1] = -2; x[1] <= 2; ++x[1])
          for (x[2] = -2; x[2] <= 2; ++x[2]) {
            IntVec xe = x;
            xe[j] += 1;
            const Rational lhs =
                Rational(-2) * chi_t(base, t, xe) + grading_constant(base, t);
            const Rational rhs =
                Rational(-2) * chi_t(shifted, t, x) + grading_constant(shifted, t);
            CHECK(lhs == rhs);
          }
    }
  }
}
