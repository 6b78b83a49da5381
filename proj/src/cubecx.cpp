#include "plumbcalc/cubecx.hpp"

#include <algorithm>
#include <bit>
#include <cstdlib>
#include <numeric>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace plumbcalc {

namespace {

long long flat_index(const WeightedComplex& w, std::uint32_t mask, const IntVec& base) {
  const int s = w.dims();
  long long idx = 0;
  for (int i = 0; i < s; ++i) {
    const long long radix = 2 * w.N + 1 - ((mask >> i) & 1);
    idx = idx * radix + (base[i] + w.N);
  }
  return w.subset_offset[mask] + idx;
}

IntVec decode_base(const WeightedComplex& w, long long id) {
  const int s = w.dims();
  const std::uint32_t mask = w.cell_mask[static_cast<std::size_t>(id)];
  long long rest = id - w.subset_offset[mask];
  IntVec base(s);
  for (int i = s - 1; i >= 0; --i) {
    const long long radix = 2 * w.N + 1 - ((mask >> i) & 1);
    base[i] = rest % radix - w.N;
    rest /= radix;
  }
  return base;
}

}  // namespace

long long max_cells() {
  const char* env = std::getenv("PLUMBCALC_MAX_CELLS");
  if (env == nullptr || *env == '\0') return 2'000'000;
  char* end = nullptr;
  const long long v = std::strtoll(env, &end, 10);
  if (end == env || *end != '\0' || v <= 0)
    throw InvalidParamsError("PLUMBCALC_MAX_CELLS must be a positive integer");
  return v;
}

long long WeightedComplex::cell_id(const Cell& c) const {
  const int s = dims();
  if (c.base.size() != static_cast<Eigen::Index>(s))
    throw InvalidParamsError("cell base has the wrong length");
  std::uint32_t mask = 0;
  int prev = -1;
  for (int i : c.subset) {
    if (i <= prev || i >= s) throw InvalidParamsError("cell subset must be strictly increasing vertex indices");
    mask |= std::uint32_t(1) << i;
    prev = i;
  }
  for (int i = 0; i < s; ++i) {
    const Int hi = N - ((mask >> i) & 1);
    if (c.base[i] < -N || c.base[i] > hi)
      throw InvalidParamsError("cell lies outside the box");
  }
  return flat_index(*this, mask, c.base);
}

Cell WeightedComplex::cell_at(long long id) const {
  if (id < 0 || id >= total) throw InvalidParamsError("cell id out of range");
  Cell c;
  c.base = decode_base(*this, id);
  const std::uint32_t mask = cell_mask[static_cast<std::size_t>(id)];
  for (int i = 0; i < dims(); ++i)
    if ((mask >> i) & 1) c.subset.push_back(i);
  return c;
}

int WeightedComplex::cell_dim(long long id) const {
  return std::popcount(cell_mask[static_cast<std::size_t>(id)]);
}

long long WeightedComplex::scaled_weight_t(long long id) const {
  const long long a = t.t.num();
  const long long b = t.t.den();
  return checked_add(checked_mul(2 * b - a, wk[static_cast<std::size_t>(id)]),
                     checked_mul(a, wk2[static_cast<std::size_t>(id)]));
}

Rational WeightedComplex::weight_t(long long id) const {
  return Rational(scaled_weight_t(id), t.t.den());
}

void WeightedComplex::faces(long long id, std::vector<long long>& out) const {
  out.clear();
  const std::uint32_t mask = cell_mask[static_cast<std::size_t>(id)];
  if (mask == 0) return;
  IntVec base = decode_base(*this, id);
  for (int i = 0; i < dims(); ++i) {
    if (!((mask >> i) & 1)) continue;
    const std::uint32_t rest = mask & ~(std::uint32_t(1) << i);
    out.push_back(flat_index(*this, rest, base));
    ++base[i];
    out.push_back(flat_index(*this, rest, base));
    --base[i];
  }
}

WeightedComplex build(const IntersectionLattice& l, const IntVec& k, const TParam& t, Int n) {
  if (n < 0) throw InvalidParamsError("box radius must be nonnegative");
  const int s = l.s;
  if (s > 20) throw CapacityError("cube engine supports at most 20 framed vertices");

  const long long budget = max_cells();
  long long predicted = 1;
  try {
    for (int i = 0; i < s && predicted <= budget; ++i)
      predicted = checked_mul(predicted, 4 * n + 1);
  } catch (const OverflowError&) {
    predicted = budget + 1;
  }
  if (predicted > budget)
    throw CapacityError("box radius " + std::to_string(n) + " needs more than " +
                        std::to_string(budget) +
                        " cells; raise PLUMBCALC_MAX_CELLS or shrink the box");

  WeightedComplex w{grading_context(l, k), t, n, 0, {}, {}, {}, {}};

  const std::uint32_t nmask = std::uint32_t(1) << s;
  w.subset_offset.assign(nmask, 0);
  long long running = 0;
  for (std::uint32_t m = 0; m < nmask; ++m) {
    w.subset_offset[m] = running;
    long long block = 1;
    for (int i = 0; i < s; ++i) block *= 2 * n + 1 - ((m >> i) & 1);
    running += block;
  }
  w.total = running;
  w.wk.assign(static_cast<std::size_t>(w.total), 0);
  w.wk2.assign(static_cast<std::size_t>(w.total), 0);
  w.cell_mask.assign(static_cast<std::size_t>(w.total), 0);

  // vertices first: chi_k directly, chi_{k+2v0*} via the shift by -u.x
  IntVec base = IntVec::Constant(s, -n);
  for (long long id = 0;;) {
    const Int sum = checked_add(dot_int(k, base), quadratic_form(l.Q, base));
    if (sum % 2 != 0) throw InternalError("chi took a half-integer value on a lattice point");
    const Int chi = -(sum / 2);
    w.wk[static_cast<std::size_t>(id)] = chi;
    w.wk2[static_cast<std::size_t>(id)] = chi - dot_int(l.u, base);
    ++id;
    int j = s - 1;
    while (j >= 0 && base[j] == n) base[j--] = -n;
    if (j < 0) break;
    ++base[j];
  }

  // higher cells by increasing dimension: the maximum over corners splits
  // along any one direction into the two opposite faces
  if (n > 0) {
    std::vector<std::uint32_t> masks(nmask);
    std::iota(masks.begin(), masks.end(), 0u);
    std::sort(masks.begin(), masks.end(), [](std::uint32_t a, std::uint32_t b) {
      const int pa = std::popcount(a), pb = std::popcount(b);
      if (pa != pb) return pa < pb;
      return a < b;
    });
    for (const std::uint32_t m : masks) {
      if (m == 0) continue;
      const int i0 = std::countr_zero(m);
      const std::uint32_t rest = m & (m - 1);
      IntVec b(s);
      for (int i = 0; i < s; ++i) b[i] = -n;
      for (;;) {
        const long long id = flat_index(w, m, b);
        const long long fa = flat_index(w, rest, b);
        ++b[i0];
        const long long fb = flat_index(w, rest, b);
        --b[i0];
        w.wk[static_cast<std::size_t>(id)] =
            std::max(w.wk[static_cast<std::size_t>(fa)], w.wk[static_cast<std::size_t>(fb)]);
        w.wk2[static_cast<std::size_t>(id)] =
            std::max(w.wk2[static_cast<std::size_t>(fa)], w.wk2[static_cast<std::size_t>(fb)]);
        w.cell_mask[static_cast<std::size_t>(id)] = m;
        int j = s - 1;
        while (j >= 0) {
          const Int hi = n - ((m >> j) & 1);
          if (b[j] == hi) b[j--] = -n;
          else break;
        }
        if (j < 0) break;
        ++b[j];
      }
    }
  }
  return w;
}

WeightedComplex build(const IntersectionLattice& l, const SpincClass& s, const TParam& t, Int n) {
  return build(l, s.rep, t, n);
}

const Bar* Barcode::infinite_bar() const {
  for (const auto& dl : degrees)
    for (const auto& bar : dl)
      if (bar.is_infinite) return &bar;
  return nullptr;
}

int Barcode::infinite_bar_degree() const {
  for (std::size_t d = 0; d < degrees.size(); ++d)
    for (const auto& bar : degrees[d])
      if (bar.is_infinite) return static_cast<int>(d);
  return -1;
}

long long Barcode::finite_bar_count() const {
  long long n = 0;
  for (const auto& dl : degrees)
    for (const auto& bar : dl)
      if (!bar.is_infinite) ++n;
  return n;
}

Barcode persistence(const WeightedComplex& w) {
  const long long m = w.total;
  std::vector<long long> key(static_cast<std::size_t>(m));
  std::vector<int> dim(static_cast<std::size_t>(m));
  for (long long id = 0; id < m; ++id) {
    key[static_cast<std::size_t>(id)] = w.scaled_weight_t(id);
    dim[static_cast<std::size_t>(id)] = w.cell_dim(id);
  }
  std::vector<long long> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), 0ll);
  std::sort(order.begin(), order.end(), [&](long long a, long long b) {
    const auto& ka = key[static_cast<std::size_t>(a)];
    const auto& kb = key[static_cast<std::size_t>(b)];
    if (ka != kb) return ka < kb;
    const int da = dim[static_cast<std::size_t>(a)];
    const int db = dim[static_cast<std::size_t>(b)];
    if (da != db) return da < db;
    return a < b;
  });

  const PersistencePairs pp = persistence_pairs(
      order, dim, [&](long long id, std::vector<long long>& out) { w.faces(id, out); });

  int maxd = 0;
  for (int d : dim) maxd = std::max(maxd, d);
  Barcode b;
  b.degrees.assign(static_cast<std::size_t>(maxd) + 1, {});
  const long long den = w.t.t.den();
  for (const auto& [birth, death] : pp.pairs) {
    const long long kb = key[static_cast<std::size_t>(birth)];
    const long long kd = key[static_cast<std::size_t>(death)];
    if (kb == kd) continue;  // zero-length bar, invisible in the module
    Bar bar;
    bar.birth = Rational(kb, den);
    bar.length = Rational(kd - kb, den);
    b.degrees[static_cast<std::size_t>(dim[static_cast<std::size_t>(birth)])].push_back(bar);
  }
  if (pp.essential.size() != 1 || dim[static_cast<std::size_t>(pp.essential.front())] != 0)
    throw InternalError("contractible box must leave exactly one essential class, in degree 0");
  Bar inf;
  inf.birth = Rational(key[static_cast<std::size_t>(pp.essential.front())], den);
  inf.is_infinite = true;
  b.degrees[0].push_back(inf);

  for (auto& dl : b.degrees) {
    std::sort(dl.begin(), dl.end(), [](const Bar& x, const Bar& y) {
      if (x.is_infinite != y.is_infinite) return x.is_infinite;
      if (x.birth != y.birth) return x.birth < y.birth;
      return x.length < y.length;
    });
  }
  while (!b.degrees.empty() && b.degrees.back().empty()) b.degrees.pop_back();
  return b;
}

Rational upsilon_from_barcode(const Barcode& b, const GradingContext& ctx, const TParam& t) {
  const Bar* inf = b.infinite_bar();
  if (inf == nullptr)
    throw MissingFreePartError("barcode has no infinite bar; the truncation is too small");
  return -inf->birth + grading_constant(ctx, t);
}

Rational alexander(const WeightedComplex& w, const Cell& c) {
  const long long id = w.cell_id(c);
  return Rational(w.wk2[static_cast<std::size_t>(id)] - w.wk[static_cast<std::size_t>(id)]) +
         w.ctx.c1;
}

Barcode reduced_barcode(const Barcode& b) {
  Barcode out = b;
  if (!out.degrees.empty()) {
    auto& d0 = out.degrees[0];
    d0.erase(std::remove_if(d0.begin(), d0.end(), [](const Bar& x) { return x.is_infinite; }),
             d0.end());
  }
  while (!out.degrees.empty() && out.degrees.back().empty()) out.degrees.pop_back();
  return out;
}

namespace {

using BarSignature = std::vector<std::tuple<int, int, Rational, Rational>>;

// drop finite bars born above the cutoff; births here are still relative to
// the translated complex
void clip_barcode(Barcode& b, const Rational& cut) {
  for (auto& dl : b.degrees) {
    dl.erase(std::remove_if(dl.begin(), dl.end(),
                            [&](const Bar& x) { return !x.is_infinite && x.birth > cut; }),
             dl.end());
  }
  while (!b.degrees.empty() && b.degrees.back().empty()) b.degrees.pop_back();
}

BarSignature bar_signature(const Barcode& b) {
  BarSignature sig;
  for (std::size_t d = 0; d < b.degrees.size(); ++d) {
    for (const Bar& bar : b.degrees[d]) {
      sig.emplace_back(static_cast<int>(d), bar.is_infinite ? 0 : 1, bar.birth,
                       bar.is_infinite ? Rational(0) : bar.length);
    }
  }
  std::sort(sig.begin(), sig.end());
  return sig;
}

}  // namespace

StabilizationResult stabilize(const IntersectionLattice& l, const SpincClass& s, const TParam& t,
                              Int n0, const std::optional<Rational>& level_cutoff) {
  if (n0 < 1) throw InvalidParamsError("stabilization start radius must be at least 1");
  const GradingContext base_ctx = grading_context(l, s.rep);
  const MinCertificate cert = minimize_chi(base_ctx, t);

  // translate the representative so the certified minimizer is the origin;
  // small boxes then already contain the birth of the infinite bar
  IntVec kp(l.s);
  for (int i = 0; i < l.s; ++i) {
    Int row = 0;
    for (int j = 0; j < l.s; ++j) row = checked_add(row, checked_mul(l.Q(i, j), cert.argmin[j]));
    kp[i] = checked_add(s.rep[i], checked_mul(2, row));
  }
  const Rational shift = Rational(2) * cert.min_value;

  // cutoff in translated levels (the translated minimum weight is 0)
  const Rational cut = level_cutoff ? *level_cutoff - shift : Rational(2);

  const auto clipped = [&](Int n) {
    Barcode b = persistence(build(l, kp, t, n));
    clip_barcode(b, cut);
    return b;
  };

  Int nn = n0;
  Barcode cur = clipped(nn);
  BarSignature cur_sig = bar_signature(cur);
  int agreements = 0;
  for (Int probe = nn + 1; agreements < 2; ++probe) {
    Barcode next = clipped(probe);
    BarSignature next_sig = bar_signature(next);
    if (next_sig == cur_sig) {
      ++agreements;
      continue;
    }
    cur = std::move(next);
    cur_sig = std::move(next_sig);
    nn = probe;
    agreements = 0;
  }
  if (cur.infinite_bar() == nullptr)
    throw InternalError("stabilization lost the infinite bar");
  for (auto& dl : cur.degrees)
    for (auto& bar : dl) bar.birth += shift;
  return {nn, std::move(cur)};
}

Int default_start_radius(const MinCertificate&) { return 2; }

}  // namespace plumbcalc
