#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>

#include "plumbcalc/cubecx.hpp"
#include "plumbcalc/fixtures.hpp"
#include "plumbcalc/upsilon.hpp"

using namespace plumbcalc;

namespace {

IntersectionLattice single_vertex(Int weight) {
  IntMat q(1, 1);
  q << weight;
  IntVec u(1);
  u << 1;
  return lattice_from_form(q, u, {"v"});
}

IntVec vec1(Int a) {
  IntVec v(1);
  v << a;
  return v;
}

std::vector<long long> count_by_dim(const WeightedComplex& w) {
  std::vector<long long> counts(w.dims() + 1, 0);
  for (long long id = 0; id < w.total; ++id) ++counts[w.cell_dim(id)];
  return counts;
}

}  // namespace

TEST_CASE("cell counts for the unit box in three dimensions") {
  IntersectionLattice l = lattice(fixture_graph("trefoil"));
  WeightedComplex w = build(l, spinc_classes(l)[0], TParam(Rational(0)), 1);
  const auto counts = count_by_dim(w);
  CHECK(counts[0] == 27);
  CHECK(counts[1] == 54);
  CHECK(counts[2] == 36);
  CHECK(counts[3] == 8);
  CHECK(w.total == 125);
}

TEST_CASE("vertex weights on a one-vertex graph") {
  IntersectionLattice l = single_vertex(-1);
  WeightedComplex w = build(l, vec1(-1), TParam(Rational(0)), 2);
  const auto counts = count_by_dim(w);
  CHECK(counts[0] == 5);
  CHECK(counts[1] == 4);
  // 2 chi(n) = n^2 + n for this form and spin-c vector
  for (Int n = -2; n <= 2; ++n) {
    const long long id = w.cell_id(Cell{vec1(n), {}});
    CHECK(w.weight_t(id) == Rational(n * n + n));
  }
}

TEST_CASE("edge weight is the corner maximum") {
  IntersectionLattice l = single_vertex(-2);
  WeightedComplex w = build(l, vec1(0), TParam(Rational(0)), 1);
  const long long id = w.cell_id(Cell{vec1(0), {0}});
  CHECK(w.cell_dim(id) == 1);
  CHECK(w.weight_t(id) == Rational(2));
}

TEST_CASE("vertex weights equal twice the twisted form") {
  IntersectionLattice l = lattice(fixture_graph("trefoil"));
  const auto cls = spinc_classes(l);
  GradingContext ctx = grading_context(l, cls[0].rep);
  for (const Rational& tv : {Rational(0), Rational(2, 3), Rational(1)}) {
    TParam t(tv);
    WeightedComplex w = build(l, cls[0], t, 2);
    for (long long id = 0; id < w.total; ++id) {
      if (w.cell_dim(id) != 0) continue;
      const Cell c = w.cell_at(id);
      CHECK(w.weight_t(id) == Rational(2) * chi_t(ctx, t, c.base));
    }
  }
}

TEST_CASE("faces never exceed their cell in the filtration") {
  std::vector<long long> scratch;
  for (const char* name : {"rp3", "chain22", "trefoil"}) {
    IntersectionLattice l = lattice(fixture_graph(name));
    for (const auto& c : spinc_classes(l)) {
      for (Int n = 1; n <= 3; ++n) {
        for (const Rational& tv : {Rational(2, 3), Rational(1)}) {
          WeightedComplex w = build(l, c, TParam(tv), n);
          for (long long id = 0; id < w.total; ++id) {
            w.faces(id, scratch);
            for (long long f : scratch) CHECK(w.weight_t(f) <= w.weight_t(id));
          }
        }
      }
    }
  }
}

TEST_CASE("alexander grading on the double cover of the unknot") {
  IntersectionLattice l = lattice(fixture_graph("rp3"));
  const auto cls = spinc_classes(l);
  REQUIRE(cls[1].rep == vec1(0));
  WeightedComplex w = build(l, cls[1], TParam(Rational(0)), 2);
  CHECK(alexander(w, Cell{vec1(0), {}}) == Rational(1, 4));
  CHECK(alexander(w, Cell{vec1(1), {}}) == Rational(-3, 4));
}

TEST_CASE("interval sublevels leave no finite bars") {
  IntersectionLattice l = single_vertex(-1);
  Barcode b = persistence(build(l, vec1(-1), TParam(Rational(0)), 3));
  const Bar* inf = b.infinite_bar();
  REQUIRE(inf != nullptr);
  CHECK(b.infinite_bar_degree() == 0);
  CHECK(inf->birth == Rational(0));
  CHECK(b.finite_bar_count() == 0);
}

TEST_CASE("one-vertex box") {
  IntersectionLattice l = single_vertex(-2);
  Barcode b = persistence(build(l, vec1(0), TParam(Rational(0)), 0));
  REQUIRE(b.infinite_bar() != nullptr);
  CHECK(b.infinite_bar()->birth == Rational(0));
  CHECK(b.finite_bar_count() == 0);
}

TEST_CASE("barcode reading matches the minimizer engine") {
  IntersectionLattice tre = lattice(fixture_graph("trefoil"));
  const auto tcls = spinc_classes(tre);
  GradingContext tctx = grading_context(tre, tcls[0].rep);
  Barcode tb = persistence(build(tre, tcls[0], TParam(Rational(1)), 3));
  CHECK(upsilon_from_barcode(tb, tctx, TParam(Rational(1))) == Rational(-1));

  IntersectionLattice rp = lattice(fixture_graph("rp3"));
  const auto rcls = spinc_classes(rp);
  GradingContext rctx = grading_context(rp, rcls[1].rep);
  Barcode rb = persistence(build(rp, rcls[1], TParam(Rational(0)), 3));
  CHECK(upsilon_from_barcode(rb, rctx, TParam(Rational(0))) == Rational(1, 4));

  IntersectionLattice unk = lattice(fixture_graph("unknot"));
  const auto ucls = spinc_classes(unk);
  GradingContext uctx = grading_context(unk, ucls[0].rep);
  for (const Rational& tv : {Rational(0), Rational(1, 2), Rational(2)}) {
    Barcode ub = persistence(build(unk, ucls[0], TParam(tv), 2));
    CHECK(upsilon_from_barcode(ub, uctx, TParam(tv)) == Rational(0));
  }
}

TEST_CASE("stabilized barcodes agree with the minimizer on a t grid") {
  for (const char* name : {"trefoil", "rp3", "chain222", "t34"}) {
    IntersectionLattice l = lattice(fixture_graph(name));
    for (const auto& c : spinc_classes(l)) {
      GradingContext ctx = grading_context(l, c.rep);
      PiecewiseLinearFn f = upsilon(l, c);
      for (int num = 0; num <= 8; ++num) {  // 9 rational t values
        TParam t(Rational(num, 4));
        StabilizationResult r = stabilize(l, c, t, 2);
        REQUIRE(r.barcode.infinite_bar() != nullptr);
        CHECK(r.barcode.infinite_bar_degree() == 0);
        CHECK(upsilon_from_barcode(r.barcode, ctx, t) == f.value_at(t.t));
      }
    }
  }
}

TEST_CASE("reduced barcode is trivial without bad vertices") {
  for (const char* name : {"unknot", "rp3", "chain22", "chain222"}) {
    PlumbingGraph g = fixture_graph(name);
    REQUIRE(bad_vertices(g).empty());
    IntersectionLattice l = lattice(g);
    for (const auto& c : spinc_classes(l)) {
      StabilizationResult r = stabilize(l, c, TParam(Rational(2, 3)), 2);
      Barcode red = reduced_barcode(r.barcode);
      for (const auto& deg : red.degrees) CHECK(deg.empty());
    }
  }
}

TEST_CASE("reduced barcode degree stays below the bad vertex count") {
  for (const char* name : {"trefoil", "doublecover", "t25", "t34", "twobad"}) {
    PlumbingGraph g = fixture_graph(name);
    const auto nbad = bad_vertices(g).size();
    REQUIRE(nbad >= 1);
    IntersectionLattice l = lattice(g);
    for (const auto& c : spinc_classes(l)) {
      StabilizationResult r = stabilize(l, c, TParam(Rational(1, 2)), 2);
      Barcode red = reduced_barcode(r.barcode);
      for (std::size_t deg = nbad; deg < red.degrees.size(); ++deg)
        CHECK(red.degrees[deg].empty());
    }
  }
}

TEST_CASE("stabilization settles") {
  IntersectionLattice one = single_vertex(-1);
  StabilizationResult r =
      stabilize(one, SpincClass{vec1(-1), 0}, TParam(Rational(0)), 1);
  // centering on the minimizer makes the interval stable from the start
  CHECK(r.N <= 2);
  REQUIRE(r.barcode.infinite_bar() != nullptr);
  CHECK(r.barcode.infinite_bar()->birth == Rational(0));

  IntersectionLattice tre = lattice(fixture_graph("trefoil"));
  const auto cls = spinc_classes(tre);
  StabilizationResult rt = stabilize(tre, cls[0], TParam(Rational(1)), 1);
  MinCertificate cert = minimize_chi(grading_context(tre, cls[0].rep), TParam(Rational(1)));
  Int amax = 0;
  for (int i = 0; i < tre.s; ++i) amax = std::max(amax, std::abs(cert.argmin[i]));
  CHECK(rt.N >= std::min<Int>(amax, 2));
  CHECK(rt.barcode.infinite_bar()->birth == Rational(2) * cert.min_value);
}

TEST_CASE("cutoff below the minimum leaves only the free part") {
  IntersectionLattice l = lattice(fixture_graph("trefoil"));
  const auto cls = spinc_classes(l);
  StabilizationResult r =
      stabilize(l, cls[0], TParam(Rational(0)), 2, Rational(-1));
  REQUIRE(r.barcode.infinite_bar() != nullptr);
  CHECK(r.barcode.infinite_bar()->birth == Rational(0));
  CHECK(r.barcode.finite_bar_count() == 0);
  CHECK(r.N <= 4);
}

TEST_CASE("cell budget is enforced") {
  REQUIRE(setenv("PLUMBCALC_MAX_CELLS", "100", 1) == 0);
  IntersectionLattice l = lattice(fixture_graph("trefoil"));
  CHECK_THROWS_AS(build(l, spinc_classes(l)[0], TParam(Rational(0)), 2), CapacityError);
  REQUIRE(unsetenv("PLUMBCALC_MAX_CELLS") == 0);
  CHECK(max_cells() == 2000000);
}
