#include "plumbcalc/plumbing.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>

#include <json.hpp>

namespace plumbcalc {
namespace {

struct RawGraph {
  // id -> weight; empty optional marks the unframed vertex
  std::vector<std::pair<std::string, std::optional<Int>>> vertices;
  std::vector<std::pair<std::string, std::string>> edges;
};

std::string trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

Int parse_weight(const std::string& tok, int lineno) {
  try {
    size_t pos = 0;
    long long w = std::stoll(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return w;
  } catch (const std::exception&) {
    throw ParseError("line " + std::to_string(lineno) + ": bad weight '" + tok + "'");
  }
}

RawGraph read_text(std::string_view text) {
  RawGraph raw;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  bool in_edges = false;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t == "edges:") {
      if (in_edges) throw ParseError("line " + std::to_string(lineno) + ": repeated edges section");
      in_edges = true;
      continue;
    }
    auto toks = split_ws(t);
    if (toks.size() != 2)
      throw ParseError("line " + std::to_string(lineno) + ": expected two tokens, got '" + t + "'");
    if (!in_edges) {
      if (toks[1] == "*")
        raw.vertices.emplace_back(toks[0], std::nullopt);
      else
        raw.vertices.emplace_back(toks[0], parse_weight(toks[1], lineno));
    } else {
      raw.edges.emplace_back(toks[0], toks[1]);
    }
  }
  return raw;
}

RawGraph read_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  RawGraph raw;
  if (!j.is_object() || !j.contains("vertices") || !j.contains("edges") ||
      !j["vertices"].is_array() || !j["edges"].is_array())
    throw ParseError("JSON plumbing needs 'vertices' and 'edges' arrays");
  for (const auto& v : j["vertices"]) {
    if (!v.is_object() || !v.contains("id") || !v["id"].is_string() || !v.contains("weight"))
      throw ParseError("JSON vertex needs a string 'id' and a 'weight' (integer or null)");
    const auto& w = v["weight"];
    if (w.is_null())
      raw.vertices.emplace_back(v["id"].get<std::string>(), std::nullopt);
    else if (w.is_number_integer())
      raw.vertices.emplace_back(v["id"].get<std::string>(), w.get<Int>());
    else
      throw ParseError("JSON vertex weight must be an integer or null");
  }
  for (const auto& e : j["edges"]) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_string())
      throw ParseError("JSON edge must be a pair of vertex ids");
    raw.edges.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
  }
  return raw;
}

PlumbingGraph validate(const RawGraph& raw) {
  std::map<std::string, std::optional<Int>> weights;
  for (const auto& [id, w] : raw.vertices) {
    if (!weights.emplace(id, w).second) throw ValidationError("duplicate vertex id '" + id + "'");
  }
  std::string v0;
  int unframed = 0;
  for (const auto& [id, w] : weights) {
    if (!w) {
      ++unframed;
      v0 = id;
    }
  }
  if (unframed != 1)
    throw ValidationError("expected exactly one unframed vertex, found " +
                          std::to_string(unframed));
  if (weights.size() < 2)
    throw ValidationError("the unframed vertex needs at least one framed neighbour");

  std::set<std::pair<std::string, std::string>> seen;
  for (auto [a, b] : raw.edges) {
    if (a == b) throw ValidationError("self-loop at '" + a + "'");
    if (!weights.count(a) || !weights.count(b))
      throw ValidationError("edge references unknown vertex '" + (weights.count(a) ? b : a) + "'");
    if (b < a) std::swap(a, b);
    if (!seen.emplace(a, b).second) throw ValidationError("duplicate edge " + a + "-" + b);
  }
  if (seen.size() + 1 != weights.size())
    throw ValidationError("not a tree: " + std::to_string(seen.size()) + " edges for " +
                          std::to_string(weights.size()) + " vertices");

  // Connectivity; with the edge count above this certifies a tree.
  std::map<std::string, std::vector<std::string>> adj;
  for (const auto& [a, b] : seen) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::set<std::string> reached{weights.begin()->first};
  std::vector<std::string> queue{weights.begin()->first};
  while (!queue.empty()) {
    std::string cur = queue.back();
    queue.pop_back();
    for (const auto& n : adj[cur]) {
      if (reached.insert(n).second) queue.push_back(n);
    }
  }
  if (reached.size() != weights.size()) throw ValidationError("graph is not connected");

  PlumbingGraph g;
  g.v0_id = v0;
  for (const auto& [id, w] : weights) {
    if (w) g.ids.push_back(id);
  }
  g.weights = IntVec(g.ids.size());
  for (size_t i = 0; i < g.ids.size(); ++i) g.weights[i] = *weights[g.ids[i]];
  for (const auto& [a, b] : seen) {
    if (a == v0) {
      g.v0_adjacent.push_back(g.index_of(b));
    } else if (b == v0) {
      g.v0_adjacent.push_back(g.index_of(a));
    } else {
      int i = g.index_of(a), j = g.index_of(b);
      g.edges.emplace_back(std::min(i, j), std::max(i, j));
    }
  }
  std::sort(g.v0_adjacent.begin(), g.v0_adjacent.end());
  std::sort(g.edges.begin(), g.edges.end());
  return g;
}

}  // namespace

int PlumbingGraph::index_of(std::string_view id) const {
  auto it = std::lower_bound(ids.begin(), ids.end(), id);
  if (it == ids.end() || *it != id) return -1;
  return static_cast<int>(it - ids.begin());
}

int PlumbingGraph::degree(int i) const {
  int d = 0;
  for (const auto& [a, b] : edges)
    if (a == i || b == i) ++d;
  return d;
}

PlumbingGraph parse_plumbing(std::string_view text) {
  size_t b = 0;
  while (b < text.size() && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
  if (b < text.size() && text[b] == '{') return validate(read_json(text));
  return validate(read_text(text));
}

PlumbingGraph parse_plumbing_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_plumbing(buf.str());
}

IntersectionLattice lattice_from_form(const IntMat& q, const IntVec& u,
                                      std::vector<std::string> ids) {
  IntersectionLattice l;
  l.s = static_cast<int>(q.rows());
  l.Q = q;
  l.u = u;
  l.ids = std::move(ids);
  if (l.ids.empty()) {
    for (int i = 0; i < l.s; ++i) l.ids.push_back("x" + std::to_string(i));
  }
  const DefinitenessReport rep = definiteness_report(q);
  if (!rep.negative_definite) {
    throw NotNegativeDefiniteError(
        "intersection form is not negative definite (leading minor " +
            std::to_string(rep.violating_minor) + " has the wrong sign)",
        rep.violating_minor);
  }
  l.lambda_lower = rep.lambda_lower;
  l.Qinv = rational_inverse(q);
  l.det = integer_determinant(q);
  l.F = RatVec(l.s);
  for (int i = 0; i < l.s; ++i) {
    Rational s;
    for (int j = 0; j < l.s; ++j) s += l.Qinv(i, j) * Rational(-u[j]);
    l.F[i] = s;
  }
  l.F2 = -dot(u, l.F);  // F^T Q F = F . (-u)
  return l;
}

IntersectionLattice lattice(const PlumbingGraph& g) {
  const int s = g.order();
  IntMat q = IntMat::Zero(s, s);
  for (int i = 0; i < s; ++i) q(i, i) = g.weights[i];
  for (const auto& [a, b] : g.edges) {
    q(a, b) = 1;
    q(b, a) = 1;
  }
  IntVec u = IntVec::Zero(s);
  for (int i : g.v0_adjacent) u[i] = 1;
  return lattice_from_form(q, u, g.ids);
}

std::vector<std::string> bad_vertices(const PlumbingGraph& g) {
  std::vector<std::string> out;
  for (int i = 0; i < g.order(); ++i)
    if (g.degree(i) > -g.weights[i]) out.push_back(g.ids[i]);
  return out;
}

bool same_spinc_class(const IntersectionLattice& l, const IntVec& a, const IntVec& b) {
  // a - b in 2 Q Z^s  iff  Qinv (a - b) / 2 is integral.
  for (int i = 0; i < l.s; ++i) {
    Rational s;
    for (int j = 0; j < l.s; ++j) s += l.Qinv(i, j) * Rational(a[j] - b[j]);
    s /= Rational(2);
    if (!s.is_integer()) return false;
  }
  return true;
}

namespace {

Rational self_pairing(const IntersectionLattice& l, const IntVec& k) {
  Rational acc;
  for (int i = 0; i < l.s; ++i) {
    Rational row;
    for (int j = 0; j < l.s; ++j) row += l.Qinv(i, j) * Rational(k[j]);
    acc += Rational(k[i]) * row;
  }
  return acc;
}

// a beats b when its square is closer to zero, with lexicographic tie-break.
bool rep_better(const IntersectionLattice& l, const Rational& asq, const IntVec& a,
                const Rational& bsq, const IntVec& b) {
  if (asq != bsq) return asq > bsq;
  return lex_less(a, b);
}

}  // namespace

IntVec canonical_rep(const IntersectionLattice& l, const IntVec& k) {
  // Climb to a local maximum of k^2 over the coset k + 2QZ^s.  Each accepted
  // step either strictly increases the square (bounded above, discrete) or
  // keeps it and strictly decreases lexicographically within a finite level
  // set, so the climb terminates.
  IntVec cur = k;
  Rational cursq = self_pairing(l, cur);
  for (;;) {
    IntVec best;
    Rational bestsq;
    bool moved = false;
    for (int c = 0; c < l.s; ++c) {
      for (int sgn = -1; sgn <= 1; sgn += 2) {
        IntVec cand = cur;
        for (int i = 0; i < l.s; ++i)
          cand[i] = checked_add(cand[i], checked_mul(2 * sgn, l.Q(i, c)));
        const Rational csq = self_pairing(l, cand);
        if (!rep_better(l, csq, cand, cursq, cur)) continue;
        if (!moved || rep_better(l, csq, cand, bestsq, best)) {
          best = cand;
          bestsq = csq;
          moved = true;
        }
      }
    }
    if (!moved) break;
    cur = best;
    cursq = bestsq;
  }

  // Certify globally: every coset element with square >= cur's lies in the box
  // |k_i| <= sqrt(R * (-k^2)) where R = max_i sum_j |Q(i,j)| bounds the top
  // eigenvalue of -Q.  Sweep that box exactly when it is small enough;
  // otherwise keep the local maximum (still deterministic).
  Int r = 0;
  for (int i = 0; i < l.s; ++i) {
    Int row = 0;
    for (int j = 0; j < l.s; ++j) row += std::abs(l.Q(i, j));
    r = std::max(r, row);
  }
  const Rational msq = -cursq * Rational(r);  // bound on each |k_i|^2
  Int b = 0;
  while (Rational((b + 1) * (b + 1)) <= msq) ++b;

  std::vector<std::vector<Int>> choices(l.s);
  Int count = 1;
  for (int i = 0; i < l.s; ++i) {
    for (Int v = -b; v <= b; ++v)
      if (((v - l.Q(i, i)) % 2) == 0) choices[i].push_back(v);
    if (choices[i].empty()) return cur;
    count *= static_cast<Int>(choices[i].size());
    if (count > 200000) return cur;
  }
  IntVec cand(l.s);
  std::vector<size_t> pos(l.s, 0);
  for (;;) {
    for (int i = 0; i < l.s; ++i) cand[i] = choices[i][pos[i]];
    if (same_spinc_class(l, cand, cur)) {
      const Rational csq = self_pairing(l, cand);
      if (rep_better(l, csq, cand, cursq, cur)) {
        cur = cand;
        cursq = csq;
      }
    }
    int i = l.s - 1;
    while (i >= 0 && ++pos[i] == choices[i].size()) pos[i--] = 0;
    if (i < 0) break;
  }
  return cur;
}

std::vector<SpincClass> spinc_classes(const IntersectionLattice& l) {
  const SmithForm sf = smith_form(l.Q);
  IntVec k0(l.s);
  for (int i = 0; i < l.s; ++i) k0[i] = l.Q(i, i);

  std::vector<IntVec> reps;
  IntVec r = IntVec::Zero(l.s);
  for (;;) {
    IntVec x = IntVec::Zero(l.s);
    for (int i = 0; i < l.s; ++i)
      for (int j = 0; j < l.s; ++j) x[i] = checked_add(x[i], checked_mul(sf.uinv(i, j), r[j]));
    reps.push_back(canonical_rep(l, k0 + 2 * x));
    int i = l.s - 1;
    while (i >= 0 && ++r[i] == sf.diag[i]) r[i--] = 0;
    if (i < 0) break;
  }
  std::sort(reps.begin(), reps.end(), lex_less);
  for (size_t i = 1; i < reps.size(); ++i)
    if (reps[i] == reps[i - 1]) throw InternalError("spinc_classes: duplicate canonical rep");
  if (reps.size() != static_cast<size_t>(std::abs(l.det)))
    throw InternalError("spinc_classes: class count does not match |det|");

  std::vector<SpincClass> out;
  for (size_t i = 0; i < reps.size(); ++i)
    out.push_back(SpincClass{reps[i], static_cast<int>(i)});
  return out;
}

namespace {

// Negative continued fraction n/d = a_1 - 1/(a_2 - ...), all a_j >= 2.
std::vector<Int> negative_cf(Int n, Int d) {
  std::vector<Int> out;
  while (d > 0) {
    const Int a = (n + d - 1) / d;
    out.push_back(a);
    const Int nd = a * d - n;
    n = d;
    d = nd;
  }
  return out;
}

Int inverse_mod(Int a, Int m) {
  a %= m;
  if (a < 0) a += m;
  for (Int x = 1; x < m; ++x)
    if ((a * x) % m == 1) return x;
  throw InvalidParamsError("no inverse of " + std::to_string(a) + " mod " + std::to_string(m));
}

std::string leg_id(char leg, size_t j) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "%c%03zu", leg, j + 1);
  return buf;
}

}  // namespace

PlumbingGraph torus_knot_graph(Int p, Int q) {
  if (p < 2 || q < 2) throw InvalidParamsError("torus knot parameters must be at least 2");
  if (std::gcd(p, q) != 1) throw InvalidParamsError("torus knot parameters must be coprime");

  const Int ph = (p - inverse_mod(q, p)) % p;  // -q^{-1} mod p
  const Int qh = (q - inverse_mod(p, q)) % q;
  std::ostringstream text;
  text << "c0 -1\nv0 *\n";
  std::ostringstream edges;
  edges << "edges:\nc0 v0\n";
  auto emit_leg = [&](char name, const std::vector<Int>& cf) {
    std::string prev = "c0";
    for (size_t j = 0; j < cf.size(); ++j) {
      const std::string id = leg_id(name, j);
      text << id << ' ' << -cf[j] << '\n';
      edges << prev << ' ' << id << '\n';
      prev = id;
    }
  };
  if (ph > 0) emit_leg('p', negative_cf(p, ph));
  if (qh > 0) emit_leg('q', negative_cf(q, qh));
  PlumbingGraph g = parse_plumbing(text.str() + edges.str());

  const IntersectionLattice l = lattice(g);
  if (std::abs(l.det) != 1)
    throw InternalError("torus knot graph failed the sphere determinant check");
  return g;
}

}  // namespace plumbcalc
