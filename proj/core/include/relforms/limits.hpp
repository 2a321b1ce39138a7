#pragma once

#include <span>

namespace relforms {

/// Finite-sequence surrogate for "e_n -> 0".
///
/// A sequence tends to zero when its second half is nonincreasing (up to
/// `abs_tol` slack) and its last entry is either <= abs_tol or has decayed
/// to at most `decay_ratio` times the sequence maximum. The decay clause lets
/// O(1/n) sequences of modest length register as convergent; constant or
/// growing sequences never do.
struct ZeroLimitPolicy {
  double abs_tol = 1e-8;
  double decay_ratio = 0.2;
};

bool tends_to_zero(std::span<const double> errors, const ZeroLimitPolicy& policy = {});

}  // namespace relforms
