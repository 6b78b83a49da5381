#pragma once

#include "plumbcalc/f2_reduction.hpp"
#include "plumbcalc/quadratic.hpp"
#include "plumbcalc/upsilon.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace plumbcalc {

// One cube of the box decomposition: base corner and the set of coordinate
// directions the cube extends in. Its dimension is the subset size.
struct Cell {
  IntVec base;
  std::vector<int> subset;  // strictly increasing framed-vertex indices
};

struct Bar {
  Rational birth;
  Rational length;  // meaningful only for finite bars
  bool is_infinite = false;
};

struct Barcode {
  std::vector<std::vector<Bar>> degrees;  // outer index = homological degree

  const Bar* infinite_bar() const;
  int infinite_bar_degree() const;
  long long finite_bar_count() const;
};

// Cube complex over the box [-N, N]^s. Each cell carries the maximum of chi
// over its corners, once for k and once for k + 2 v0*; the filtration weight
// is the convex combination (2 - t) w_k + t w_k2, which at a vertex equals
// 2 chi_t. Cells are dense ids grouped by direction mask, base point
// lexicographic inside each group.
struct WeightedComplex {
  GradingContext ctx;
  TParam t;
  Int N = 0;
  long long total = 0;

  std::vector<Int> wk, wk2;              // per cell id
  std::vector<std::uint32_t> cell_mask;  // per cell id
  std::vector<long long> subset_offset;  // per direction mask, cumulative

  int dims() const { return ctx.L.s; }
  long long cell_id(const Cell& c) const;
  Cell cell_at(long long id) const;
  int cell_dim(long long id) const;
  Rational weight_t(long long id) const;
  long long scaled_weight_t(long long id) const;  // numerator over den(t)
  void faces(long long id, std::vector<long long>& out) const;
};

WeightedComplex build(const IntersectionLattice& l, const IntVec& k, const TParam& t, Int n);
WeightedComplex build(const IntersectionLattice& l, const SpincClass& s, const TParam& t, Int n);

// Sublevel persistence of the t-weight. Exactly one infinite bar comes out,
// in degree 0, because the box is contractible; its birth is twice the
// minimum of chi_t over the box.
Barcode persistence(const WeightedComplex& w);

// -(infinite bar birth) + grading_constant. Matches the minimizer engine
// once the box is large enough to contain a global minimizer.
Rational upsilon_from_barcode(const Barcode& b, const GradingContext& ctx, const TParam& t);

// Alexander grading: w_k2 - w_k plus the class constant (k.F - F^2)/2.
Rational alexander(const WeightedComplex& w, const Cell& c);

// Everything except the infinite degree-0 bar (the torsion part).
Barcode reduced_barcode(const Barcode& b);

struct StabilizationResult {
  Int N = 0;
  Barcode barcode;
};

// Grows the box until the infinite bar and every finite bar born at or below
// the level cutoff agree across two consecutive radius increments; bars above
// the cutoff are discarded from the result (far from the minimum they keep
// trickling in as the box grows, so no finite box ever settles them).  The
// default cutoff is two levels above the infinite bar's birth.  The class
// representative is first translated so the certified minimizer sits at the
// origin, which keeps the interesting region inside small boxes; reported
// births are in absolute levels and N measures the translated box.
StabilizationResult stabilize(const IntersectionLattice& l, const SpincClass& s, const TParam& t,
                              Int n0,
                              const std::optional<Rational>& level_cutoff = std::nullopt);

// Start radius for stabilize; boxes are centered on the certified minimizer,
// so this no longer depends on where that minimizer sits.
Int default_start_radius(const MinCertificate& cert);

// Cell budget from PLUMBCALC_MAX_CELLS, default 2,000,000.
long long max_cells();

}  // namespace plumbcalc
