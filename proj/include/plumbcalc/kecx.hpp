#pragma once

#include "plumbcalc/cubecx.hpp"
#include "plumbcalc/plumbing.hpp"
#include "plumbcalc/quadratic.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace plumbcalc {

// Quadratic data of a weighted tree fragment: the intersection form and the
// v0-adjacency indicator. The surgery sequence visits graphs that are not
// negative definite (and can even be singular), so this carries no inverse
// and makes no definiteness promise.
struct FormData {
  IntMat Q;
  IntVec u;

  int order() const { return static_cast<int>(Q.rows()); }
};

FormData form_data(const PlumbingGraph& g);
FormData form_data(const IntersectionLattice& l);
FormData delete_vertex(const FormData& f, int v);     // G - v
FormData increment_vertex(const FormData& f, int v);  // G with weight(v) + 1
FormData attach_minus_one(const FormData& f, int v);  // new -1 vertex on v, last index

// 2 f = K.I + I^2 with I summed as a lattice vector. Integer whenever K is
// characteristic, half-integer otherwise.
Rational f_G(const FormData& g, const IntVec& K, const std::vector<int>& I);

// min over subsets I of E of f_G; enumeration is 2^|E|.
Rational g_G(const FormData& g, const IntVec& K, const std::vector<int>& E);

// a_v = g[K,E-v] - g[K,E],  b_v = g[K+2v*,E-v] - g[K,E] + (K(v)+v^2)/2.
// Both are nonnegative integers for characteristic K.
struct VertexExponents {
  Int a = 0;
  Int b = 0;
};
VertexExponents exponents(const FormData& g, const IntVec& K, const std::vector<int>& E, int v);

// Per-coordinate inclusive range of characteristic values, parity matching
// the diagonal of Q.
struct KEWindow {
  std::vector<Int> lo, hi;

  bool contains(const IntVec& K) const;
  // shrunk by `times` differential steps: a step on coordinate i moves K_i
  // by at most max_v |2 Q(i,v)|
  bool interior(const IntMat& q, const IntVec& K, int times) const;
};

KEWindow default_window(const FormData& f);                // [-7|Q_ii|, 7|Q_ii|]
KEWindow absolute_window(const FormData& f, Int halfwidth);

struct KEGenerator {
  IntVec K;
  std::uint32_t emask = 0;  // subset E of framed vertices, as bits

  std::vector<int> subset() const;
};

struct KETerm {
  long long target = -1;
  long long sexp = 0;  // q-exponent scaled by den(t)
};

// All [K,E] generators with K in the window, together with the deformed
// differential. Exponents are stored scaled by den(t) so everything stays in
// integers; terms whose b-target leaves the window are dropped and counted.
struct TruncatedComplex {
  FormData form;
  TParam t;
  KEWindow window;
  Rational qmax;
  long long qmax_scaled = 0;

  long long kcount = 1;                   // characteristic vectors in window
  long long total = 0;                    // kcount << order
  std::vector<Int> gee, gee2;             // g[K,E] and g[K+2u,E] per generator
  std::vector<std::vector<KETerm>> diff;  // stored differential per generator
  long long window_escapes = 0;

  long long gen_id(const IntVec& k, std::uint32_t emask) const;  // -1 if outside
  KEGenerator gen_at(long long id) const;
  int gen_dim(long long id) const;  // |E|
  // scaled deformed level (2b-a) g + a g2, the t-weight of the generator
  long long scaled_level(long long id) const;
};

TruncatedComplex build_complex(const FormData& f, const TParam& t, const KEWindow& w,
                               const Rational& qmax);

// gr_t = tg[K,E] + |E| + (K^2+s)/4 - t (K.F - F^2)/2, over the definite
// lattice the complex came from. Every differential term drops it by 1.
Rational gr_t(const TruncatedComplex& c, long long id, const IntersectionLattice& l);

// psi_v: [K,E] over G-v goes to the sum of all window extensions [K,p,E]
// over G, p running over the characteristic values at the new vertex v. All
// exponents are zero. v is the vertex index in the target form.
std::vector<long long> psi_v(const TruncatedComplex& source, const TruncatedComplex& target,
                             long long id, int v);

// B_t: [K,E] over G goes to sum of q^{s_m} [K with K_v + 2m - 1, E] over
// G_{+1}(v), one term per m with the target inside the window and the
// exponent at most qmax. Never emits a negative exponent.
std::vector<KETerm> b_t(const TruncatedComplex& middle, const TruncatedComplex& target,
                        long long id, int v);

struct ExactnessCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct ExactnessReport {
  std::string vertex;
  Rational t;
  Int window_halfwidth = 0;  // 0 means the default window formula
  Rational qmax;
  std::vector<ExactnessCheck> checks;

  bool all_pass() const;
};

// Machine verification of the surgery sequence at vertex v:
//   (i)   differential squares to zero on window interiors, all three graphs
//   (ii)  psi_v is injective and a chain map on the interior
//   (iii) B_t after psi_v cancels pairwise to zero on core targets
//   (iv)  kernel/image ranks agree blockwise at exponent zero, and interior
//         graded columns are independent; with (ii) and (iii) this pins the
//         graded rank identity
//   (v)   the middle complex reproduces the cube engine's barcodes per class
// Failures are recorded per check; ensure_exact turns them into an error.
ExactnessReport verify_exact(const PlumbingGraph& g, const std::string& vertex_id,
                             const TParam& t, Int window_halfwidth, const Rational& qmax);

void ensure_exact(const ExactnessReport& r);  // ExactnessFailureError on a failed check

struct RelationsReport {
  long long vectors_checked = 0;
  long long relations_checked = 0;
  long long forward_only = 0;  // n = 0 at a v0-adjacent vertex: single-sided case
};

// Grading consistency of the elementary q-power relations between k and
// k + 2v* at every vertex, for every representative rep + 2Qz with
// |z_i| <= window. GradingMismatchError on any violation.
RelationsReport relations_audit(const IntersectionLattice& l, const SpincClass& s,
                                const TParam& t, Int window);

}  // namespace plumbcalc
