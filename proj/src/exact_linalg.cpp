#include "plumbcalc/exact_linalg.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cstdlib>
#include <utility>
#include <vector>

namespace plumbcalc {

RatMat rational_inverse(const IntMat& m) {
  const Eigen::Index n = m.rows();
  if (n != m.cols()) throw InternalError("rational_inverse: matrix is not square");
  RatMat a = rat_cast(m);
  RatMat inv = RatMat::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) inv(i, i) = Rational(1);

  for (Eigen::Index col = 0; col < n; ++col) {
    Eigen::Index pivot = -1;
    for (Eigen::Index r = col; r < n; ++r) {
      if (a(r, col) != Rational(0)) {
        pivot = r;
        break;
      }
    }
    if (pivot < 0) throw InternalError("rational_inverse: matrix is singular");
    if (pivot != col) {
      a.row(pivot).swap(a.row(col));
      inv.row(pivot).swap(inv.row(col));
    }
    const Rational p = a(col, col);
    for (Eigen::Index j = 0; j < n; ++j) {
      a(col, j) /= p;
      inv(col, j) /= p;
    }
    for (Eigen::Index r = 0; r < n; ++r) {
      if (r == col) continue;
      const Rational f = a(r, col);
      if (f == Rational(0)) continue;
      for (Eigen::Index j = 0; j < n; ++j) {
        a(r, j) -= f * a(col, j);
        inv(r, j) -= f * inv(col, j);
      }
    }
  }
  return inv;
}

RatVec rational_solve(const IntMat& m, const RatVec& b) {
  RatMat inv = rational_inverse(m);
  RatVec x(b.size());
  for (Eigen::Index i = 0; i < b.size(); ++i) {
    Rational s;
    for (Eigen::Index j = 0; j < b.size(); ++j) s += inv(i, j) * b[j];
    x[i] = s;
  }
  return x;
}

// Fraction-free elimination: every division below is exact.
Int integer_determinant(const IntMat& m) {
  const Eigen::Index n = m.rows();
  if (n != m.cols()) throw InternalError("integer_determinant: matrix is not square");
  if (n == 0) return 1;
  IntMat a = m;
  Int sign = 1;
  Int prev = 1;
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    if (a(k, k) == 0) {
      Eigen::Index swap = -1;
      for (Eigen::Index r = k + 1; r < n; ++r) {
        if (a(r, k) != 0) {
          swap = r;
          break;
        }
      }
      if (swap < 0) return 0;
      a.row(k).swap(a.row(swap));
      sign = -sign;
    }
    for (Eigen::Index i = k + 1; i < n; ++i) {
      for (Eigen::Index j = k + 1; j < n; ++j) {
        const Int num =
            checked_add(checked_mul(a(k, k), a(i, j)), -checked_mul(a(i, k), a(k, j)));
        a(i, j) = num / prev;
      }
      a(i, k) = 0;
    }
    prev = a(k, k);
  }
  return checked_mul(sign, a(n - 1, n - 1));
}

DefinitenessReport definiteness_report(const IntMat& q) {
  const Eigen::Index n = q.rows();
  DefinitenessReport rep;
  if (n == 0) {
    rep.negative_definite = true;
    rep.lambda_lower = Rational(1);
    return rep;
  }

  // Q = L D L^T with unit lower triangular L; Q is negative definite exactly
  // when every d_k is negative, and the first failure pinpoints the offending
  // leading principal minor.
  RatMat l = RatMat::Zero(n, n);
  RatVec d(n);
  for (Eigen::Index i = 0; i < n; ++i) l(i, i) = Rational(1);
  for (Eigen::Index k = 0; k < n; ++k) {
    Rational dk(q(k, k));
    for (Eigen::Index j = 0; j < k; ++j) dk -= l(k, j) * l(k, j) * d[j];
    if (!(dk < Rational(0))) {
      rep.violating_minor = static_cast<int>(k) + 1;
      return rep;
    }
    d[k] = dk;
    for (Eigen::Index i = k + 1; i < n; ++i) {
      Rational s(q(i, k));
      for (Eigen::Index j = 0; j < k; ++j) s -= l(i, j) * l(k, j) * d[j];
      l(i, k) = s / dk;
    }
  }
  rep.negative_definite = true;

  // -Q = L (-D) L^T, so for any x:  x^T(-Q)x >= dmin |L^T x|^2 with
  // dmin = min_k(-d_k), and |L^T x|^2 >= |x|^2 / |L^{-1}|_1 |L^{-1}|_inf.
  RatMat linv = RatMat::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    linv(i, i) = Rational(1);
    for (Eigen::Index r = i + 1; r < n; ++r) {
      Rational s;
      for (Eigen::Index j = i; j < r; ++j) s += l(r, j) * linv(j, i);
      linv(r, i) = -s;
    }
  }
  Rational dmin = -d[0];
  for (Eigen::Index k = 1; k < n; ++k) dmin = std::min(dmin, -d[k]);
  Rational norm1, norminf;
  for (Eigen::Index j = 0; j < n; ++j) {
    Rational col;
    for (Eigen::Index i = 0; i < n; ++i) col += abs(linv(i, j));
    norm1 = std::max(norm1, col);
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    Rational row;
    for (Eigen::Index j = 0; j < n; ++j) row += abs(linv(i, j));
    norminf = std::max(norminf, row);
  }
  Rational bound = dmin / (norm1 * norminf);

  // Gershgorin on -Q sometimes beats the factorization bound (and is exact
  // for diagonal matrices); keep whichever is larger.
  Rational gersh;
  bool first = true;
  for (Eigen::Index i = 0; i < n; ++i) {
    Rational row(-q(i, i));
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i) row -= Rational(std::abs(q(i, j)));
    }
    gersh = first ? row : std::min(gersh, row);
    first = false;
  }
  rep.lambda_lower = std::max(bound, gersh);

  // Sharpen with a shift test: -Q - (p/128) I is positive definite exactly
  // when every leading principal minor of 128(-Q) - p I is positive, checked
  // by fraction-free elimination in plain integers. A floating guess below
  // the true smallest eigenvalue proposes p; shrinking it on failure keeps
  // the certificate exact regardless of rounding, and an overflow on a large
  // matrix just keeps the factorization bound.
  const auto shifted_pd = [&](Int p) {
    IntMat a(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        a(i, j) = checked_add(checked_mul(128, -q(i, j)), i == j ? -p : 0);
    Int prev = 1;
    for (Eigen::Index k = 0; k < n; ++k) {
      if (a(k, k) <= 0) return false;
      for (Eigen::Index i = k + 1; i < n; ++i)
        for (Eigen::Index j = k + 1; j < n; ++j)
          a(i, j) =
              checked_add(checked_mul(a(k, k), a(i, j)), -checked_mul(a(i, k), a(k, j))) / prev;
      prev = a(k, k);
    }
    return true;
  };
  try {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es((-q).cast<double>());
    Int p = static_cast<Int>(es.eigenvalues()(0) * 0.9375 * 128.0);
    while (p >= 1 && Rational(p, 128) > rep.lambda_lower && !shifted_pd(p)) p = p * 3 / 4;
    if (p >= 1 && Rational(p, 128) > rep.lambda_lower) rep.lambda_lower = Rational(p, 128);
  } catch (const OverflowError&) {
  }
  return rep;
}

SmithForm smith_form(const IntMat& m) {
  const Eigen::Index n = m.rows();
  if (n != m.cols()) throw InternalError("smith_form: matrix is not square");
  IntMat a = m;
  IntMat u = IntMat::Identity(n, n);

  for (Eigen::Index t = 0; t < n; ++t) {
    for (;;) {
      // Smallest nonzero entry of the trailing block becomes the pivot.
      Eigen::Index pi = -1, pj = -1;
      for (Eigen::Index i = t; i < n; ++i) {
        for (Eigen::Index j = t; j < n; ++j) {
          if (a(i, j) != 0 && (pi < 0 || std::abs(a(i, j)) < std::abs(a(pi, pj)))) {
            pi = i;
            pj = j;
          }
        }
      }
      if (pi < 0) break;  // trailing block is zero
      if (pi != t) {
        a.row(pi).swap(a.row(t));
        u.row(pi).swap(u.row(t));
      }
      if (pj != t) a.col(pj).swap(a.col(t));

      bool clean = true;
      for (Eigen::Index i = t + 1; i < n; ++i) {
        if (a(i, t) == 0) continue;
        const Int f = a(i, t) / a(t, t);
        if (f != 0) {
          for (Eigen::Index j = 0; j < n; ++j) {
            a(i, j) = checked_add(a(i, j), -checked_mul(f, a(t, j)));
            u(i, j) = checked_add(u(i, j), -checked_mul(f, u(t, j)));
          }
        }
        if (a(i, t) != 0) clean = false;
      }
      for (Eigen::Index j = t + 1; j < n; ++j) {
        if (a(t, j) == 0) continue;
        const Int f = a(t, j) / a(t, t);
        if (f != 0) {
          for (Eigen::Index i = 0; i < n; ++i)
            a(i, j) = checked_add(a(i, j), -checked_mul(f, a(i, t)));
        }
        if (a(t, j) != 0) clean = false;
      }
      if (clean) {
        bool done = true;
        for (Eigen::Index i = t + 1; i < n && done; ++i)
          if (a(i, t) != 0) done = false;
        for (Eigen::Index j = t + 1; j < n && done; ++j)
          if (a(t, j) != 0) done = false;
        if (done) break;
      }
    }
    if (a(t, t) < 0) {
      a.row(t) = -a.row(t);
      u.row(t) = -u.row(t);
    }
  }

  SmithForm out;
  out.diag = IntVec(n);
  for (Eigen::Index i = 0; i < n; ++i) out.diag[i] = a(i, i);

  // U is unimodular, so its exact inverse is integral.
  RatMat uinv = rational_inverse(u);
  out.uinv = IntMat(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!uinv(i, j).is_integer()) throw InternalError("smith_form: transform not unimodular");
      out.uinv(i, j) = uinv(i, j).num();
    }
  }
  return out;
}

}  // namespace plumbcalc
