#include "relforms/limits.hpp"

#include <algorithm>

namespace relforms {

bool tends_to_zero(std::span<const double> errors, const ZeroLimitPolicy& policy) {
  if (errors.empty()) return true;
  const std::size_t start = errors.size() / 2;
  for (std::size_t k = start + 1; k < errors.size(); ++k) {
    if (errors[k] > errors[k - 1] + policy.abs_tol) return false;
  }
  const double last = errors.back();
  if (last <= policy.abs_tol) return true;
  const double peak = *std::max_element(errors.begin(), errors.end());
  return last <= policy.decay_ratio * peak;
}

}  // namespace relforms
