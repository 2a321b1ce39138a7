#pragma once

// Two-dimensional fixtures with V = C^2, H = C, J = [1, 0] and Jt = I.

#include <vector>

#include "relforms/convergence.hpp"
#include "relforms/forms.hpp"

namespace relforms::testing {

inline Matrix mat2(Complex a, Complex b, Complex c, Complex d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

inline Matrix j_first() {
  Matrix j(1, 2);
  j << 1.0, 0.0;
  return j;
}

inline FormTriple triple2(const Matrix& m) { return FormTriple(m, j_first()); }

inline Matrix antidiag() { return mat2(0, 1, 1, 0); }

// M = 0; M_n = (1/n) antidiag.
inline FormTriple limit_zero_form() { return triple2(Matrix::Zero(2, 2)); }
inline FormTriple scaled_antidiag(double n) { return triple2(antidiag() / n); }

// M = antidiag; M_n = [[0, 1], [1, 1/n]].
inline FormTriple tilted_plus(double n) { return triple2(mat2(0, 1, 1, 1.0 / n)); }
// M_n = [[0, 1], [1, -1/n]].
inline FormTriple tilted_minus(double n) { return triple2(mat2(0, 1, 1, -1.0 / n)); }
// M = diag(1, 0); M_n = diag(1, 1/n).
inline FormTriple diag_limit() { return triple2(mat2(1, 0, 0, 0)); }
inline FormTriple diag_member(double n) { return triple2(mat2(1, 0, 0, 1.0 / n)); }

enum class Family { ZeroLimit, TiltedPlus, DiagDrop, TiltedMinus };

inline FormSequence family_sequence(Family family, int n_max, std::vector<double> s = {1.0}) {
  std::vector<FormTriple> members;
  FormTriple limit = triple2(antidiag());
  for (int n = 1; n <= n_max; ++n) {
    switch (family) {
      case Family::ZeroLimit: members.push_back(scaled_antidiag(n)); break;
      case Family::TiltedPlus: members.push_back(tilted_plus(n)); break;
      case Family::DiagDrop: members.push_back(diag_member(n)); break;
      case Family::TiltedMinus: members.push_back(tilted_minus(n)); break;
    }
  }
  if (family == Family::ZeroLimit) limit = limit_zero_form();
  if (family == Family::DiagDrop) limit = diag_limit();
  return make_form_sequence(std::move(members), std::move(limit), 2.0, std::move(s));
}

inline FormSequence constant_sequence(const FormTriple& f, int n_max, double omega = 2.0) {
  std::vector<FormTriple> members(static_cast<std::size_t>(n_max), f);
  return make_form_sequence(std::move(members), f, omega, {1.0});
}

}  // namespace relforms::testing
