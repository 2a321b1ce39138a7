#pragma once

// Sequences of forms a_n -> a sharing j and j~, and the diagnostics that
// relate the dimensions of W(a_n), V(a_n) ∩ ker j to resolvent convergence,
// uniform lower bounds and semigroup convergence.
//
// In finite dimensions, weak form convergence with shared J is equivalent to
// ||M_n - M|| -> 0: a bounded sequence u_n -> u weakly converges in norm, so
// |a_n(u_n, v) - a(u, v)| <= ||M_n - M|| ||u_n|| ||v|| + |a(u_n - u, v)| -> 0,
// and testing with coordinate vectors gives the converse. Likewise strong and
// uniform resolvent convergence coincide; reports call it "uniform".

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "relforms/forms.hpp"
#include "relforms/limits.hpp"
#include "relforms/relation.hpp"

namespace relforms {

struct FormSequence {
  std::vector<FormTriple> members;
  std::vector<double> indices;  // the n of each member
  FormTriple limit;
  double omega = 0.0;
  std::vector<double> s_values;
};

/// Validates shared J, Jt and dimensions. `indices` defaults to 1..N.
FormSequence make_form_sequence(std::vector<FormTriple> members, FormTriple limit,
                                double omega, std::vector<double> s_values,
                                std::vector<double> indices = {});

enum class SubspaceChoice { W, VcapKer };

struct Assertion {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ConvergenceRecord {
  double n = 0.0;
  double form_error = 0.0;
  Index dim_w = 0;
  Index dim_vcap = 0;
  double delta_w = 0.0;      // δ(W_n, W)
  double delta_w_rev = 0.0;  // δ(W, W_n)
  double proj_error_w = 0.0;
  double delta_v = 0.0;      // same for V ∩ ker j
  double delta_v_rev = 0.0;
  double proj_error_v = 0.0;
  std::vector<double> resolvent_errors;  // one per s value
  double lower_bound = 0.0;
};

struct LimitRecord {
  Index dim_w = 0;
  Index dim_vcap = 0;
  double lower_bound = 0.0;
};

struct ConvergenceReport {
  std::vector<double> s_values;
  std::vector<ConvergenceRecord> records;
  LimitRecord limit;
  std::vector<Assertion> assertions;

  bool all_passed() const;
  const Assertion* find(const std::string& name) const;
};

struct ConvergenceOptions {
  ZeroLimitPolicy policy{};
  /// Uniform lower bound threshold; default 5 * max(1, |limit bound|).
  std::optional<double> lower_bound_threshold;
};

struct UniformEllipticity {
  double mu_min = 0.0;
  bool pass = false;
};

struct WeakConvergence {
  std::vector<double> errors;
  bool pass = false;
};

struct GapEquivalence {
  SubspaceChoice which = SubspaceChoice::W;
  bool forward_gap_to_zero = false;  // δ(U_n, U) -> 0, always expected
  bool dims_converge = false;        // (i)
  bool gap_hat_to_zero = false;      // (ii)
  bool reverse_gap_to_zero = false;  // (iii) δ(U, U_n) -> 0
  bool projectors_converge = false;  // (iv)

  bool agree() const {
    return dims_converge == gap_hat_to_zero && gap_hat_to_zero == reverse_gap_to_zero &&
           reverse_gap_to_zero == projectors_converge;
  }
};

struct LowerBoundResult {
  std::vector<double> bounds;
  double bound = 0.0;      // min over members
  double threshold = 0.0;
  bool uniform = false;
  bool hypothesis = false;  // dims of V(a_n) ∩ ker j converge
};

struct SemigroupReport {
  std::vector<double> indices;
  std::vector<double> t_values;
  std::vector<std::vector<double>> errors;  // [member][t]
  bool hypotheses_hold = false;
  std::vector<Assertion> assertions;

  bool all_passed() const;
};

UniformEllipticity check_uniform_ellipticity(const FormSequence& seq);

WeakConvergence check_weak_convergence(const FormSequence& seq,
                                       const ZeroLimitPolicy& policy = {});

/// Dimensions and gaps for both subspace choices, with the semicontinuity
/// and δ(U_n, U) -> 0 assertions.
ConvergenceReport dim_track(const FormSequence& seq, const ConvergenceOptions& options = {});

GapEquivalence gap_equivalence_report(const FormSequence& seq, SubspaceChoice which,
                                      const ZeroLimitPolicy& policy = {});

/// Resolvent errors ||(A_n + isI)^{-1} - (A + isI)^{-1}|| for every s; when
/// dim W(a_n) -> dim W(a) they are asserted to tend to zero.
ConvergenceReport resolvent_convergence(const FormSequence& seq,
                                        const ConvergenceOptions& options = {});

LowerBoundResult uniform_lower_bound(const FormSequence& seq,
                                     const ConvergenceOptions& options = {});

/// Errors ||e^{-tA_n} - e^{-tA}||, asserted to tend to zero when the
/// sequence is uniformly bounded below and dim W(a_n) -> dim W(a).
SemigroupReport semigroup_convergence(const FormSequence& seq,
                                      std::span<const double> t_values,
                                      const ConvergenceOptions& options = {});

/// Everything above in one report (relations computed once).
ConvergenceReport analyze(const FormSequence& seq, const ConvergenceOptions& options = {});

}  // namespace relforms
