#pragma once

#include <Eigen/Core>

#include "plumbcalc/rational.hpp"

// Register the exact rational scalar with Eigen so dense vectors/matrices of
// Rational behave like any other scalar type in expressions.
namespace Eigen {
template <>
struct NumTraits<plumbcalc::Rational> : GenericNumTraits<plumbcalc::Rational> {
  typedef plumbcalc::Rational Real;
  typedef plumbcalc::Rational NonInteger;
  typedef plumbcalc::Rational Nested;
  typedef plumbcalc::Rational Literal;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 2,
    AddCost = 12,
    MulCost = 14
  };
  static inline Real epsilon() { return plumbcalc::Rational(0); }
  static inline Real dummy_precision() { return plumbcalc::Rational(0); }
  static inline int digits10() { return 18; }
};
}  // namespace Eigen

namespace plumbcalc {

using Int = std::int64_t;
using IntVec = Eigen::Matrix<Int, Eigen::Dynamic, 1>;
using IntMat = Eigen::Matrix<Int, Eigen::Dynamic, Eigen::Dynamic>;
using RatVec = Eigen::Matrix<Rational, Eigen::Dynamic, 1>;
using RatMat = Eigen::Matrix<Rational, Eigen::Dynamic, Eigen::Dynamic>;

inline RatVec rat_cast(const IntVec& v) {
  RatVec r(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) r[i] = Rational(v[i]);
  return r;
}

inline RatMat rat_cast(const IntMat& m) {
  RatMat r(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) r(i, j) = Rational(m(i, j));
  return r;
}

// Strict lexicographic order on integer vectors; the tie-break rule used for
// canonical representatives and certified argmins.
inline bool lex_less(const IntVec& a, const IntVec& b) {
  for (Eigen::Index i = 0; i < a.size() && i < b.size(); ++i) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return a.size() < b.size();
}

inline Rational dot(const RatVec& a, const RatVec& b) {
  Rational s;
  for (Eigen::Index i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline Rational dot(const IntVec& a, const RatVec& b) {
  Rational s;
  for (Eigen::Index i = 0; i < a.size(); ++i) s += Rational(a[i]) * b[i];
  return s;
}

inline Int dot_int(const IntVec& a, const IntVec& b) {
  Int s = 0;
  for (Eigen::Index i = 0; i < a.size(); ++i) s = checked_add(s, checked_mul(a[i], b[i]));
  return s;
}

// x^T Q x with overflow-checked int64 arithmetic.
inline Int quadratic_form(const IntMat& Q, const IntVec& x) {
  Int s = 0;
  for (Eigen::Index i = 0; i < Q.rows(); ++i) {
    Int row = 0;
    for (Eigen::Index j = 0; j < Q.cols(); ++j) row = checked_add(row, checked_mul(Q(i, j), x[j]));
    s = checked_add(s, checked_mul(x[i], row));
  }
  return s;
}

}  // namespace plumbcalc
