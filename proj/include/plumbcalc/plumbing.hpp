#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "plumbcalc/exact_linalg.hpp"
#include "plumbcalc/types.hpp"

namespace plumbcalc {

// A plumbing tree with one unframed vertex v0. Framed vertices are kept in
// sorted id order and all matrices downstream are indexed that way.
struct PlumbingGraph {
  std::vector<std::string> ids;  // framed vertex ids, sorted
  IntVec weights;                // framings, parallel to ids
  std::string v0_id;
  std::vector<std::pair<int, int>> edges;  // framed-framed edges, i < j
  std::vector<int> v0_adjacent;            // framed indices adjacent to v0

  int index_of(std::string_view id) const;
  // Degree within G = graph minus v0 (framed neighbours only).
  int degree(int i) const;
  int order() const { return static_cast<int>(ids.size()); }
};

// Accepts the line-based text format (`id weight`, `*` for the unframed
// vertex, then an `edges:` section) and, when the input starts with `{`, the
// equivalent JSON form {vertices:[{id,weight|null}],edges:[[id,id]]}.
PlumbingGraph parse_plumbing(std::string_view text);
PlumbingGraph parse_plumbing_file(const std::string& path);

// The intersection data of G: everything the quadratic and complex layers
// consume. Immutable after construction.
struct IntersectionLattice {
  int s = 0;
  IntMat Q;
  RatMat Qinv;
  IntVec u;   // v0 adjacency indicator
  RatVec F;   // solves Q F = -u
  Rational F2;  // F^T Q F
  Int det = 0;
  Rational lambda_lower;  // certified lower bound for min eigenvalue of -Q
  std::vector<std::string> ids;
};

IntersectionLattice lattice(const PlumbingGraph& g);

// Assembles the same data from a raw form; used by tests and generators.
IntersectionLattice lattice_from_form(const IntMat& q, const IntVec& u,
                                      std::vector<std::string> ids = {});

// Framed vertices whose degree in G exceeds minus their weight.
std::vector<std::string> bad_vertices(const PlumbingGraph& g);

struct SpincClass {
  IntVec rep;  // canonical characteristic representative
  int index = 0;
};

// True when a - b lies in 2 Q Z^s.
bool same_spinc_class(const IntersectionLattice& l, const IntVec& a, const IntVec& b);

// Deterministic well-centered coset member: maximizes k^2 (which is <= 0 on a
// negative definite lattice) with lexicographic tie-break.  Centering matters
// downstream: bound audits search a fixed-radius window around the returned
// vector.
IntVec canonical_rep(const IntersectionLattice& l, const IntVec& k);

// All |det Q| classes, sorted by canonical representative.
std::vector<SpincClass> spinc_classes(const IntersectionLattice& l);

// Star-shaped presentation of the (p,q) torus knot: central -1 vertex
// carrying v0, legs from the negative continued fractions of p/p' and q/q'.
// The determinant is checked to certify the ambient sphere.
PlumbingGraph torus_knot_graph(Int p, Int q);

}  // namespace plumbcalc
