#pragma once

#include "plumbcalc/errors.hpp"
#include "plumbcalc/types.hpp"

namespace plumbcalc {

// Exact inverse of an integer matrix; throws InternalError when singular.
RatMat rational_inverse(const IntMat& m);

RatVec rational_solve(const IntMat& m, const RatVec& b);

// Exact determinant by fraction-free elimination.
Int integer_determinant(const IntMat& m);

// Outcome of the exact symmetric factorization Q = L D L^T, used both to
// certify negative definiteness and to bound the spectrum of -Q from below.
struct DefinitenessReport {
  bool negative_definite = false;
  // 1-based index of the first leading principal minor with the wrong sign;
  // 0 when the form is negative definite.
  int violating_minor = 0;
  // Certified positive lower bound for the smallest eigenvalue of -Q.
  // Zero when the factorization stopped early.
  Rational lambda_lower;
};

DefinitenessReport definiteness_report(const IntMat& q);

// Integer diagonalization U * m * V = diag with U, V unimodular. Only U^{-1}
// is kept: the vectors x = uinv * r with r_i in [0, diag_i) enumerate coset
// representatives of Z^s / (m Z^s) when m is nonsingular.
struct SmithForm {
  IntVec diag;  // entries >= 0
  IntMat uinv;
};

SmithForm smith_form(const IntMat& m);

}  // namespace plumbcalc
