#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace relforms {

enum class ErrorKind {
  InvalidInput,
  DimensionMismatch,
  NotHermitian,
  NotPositiveDefinite,
  NotInvertible,
  NotSelfAdjoint,
  InternalInvariantViolation,
  ParseError,
  DegenerateElement,
  NearDirichletSpectrum,
  IoError,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Single exception type for the library. The kind is what callers branch
/// on; `index` carries a line number (ParseError) or element index
/// (DegenerateElement) when one applies.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message,
        std::optional<long> index = std::nullopt);

  ErrorKind kind() const noexcept { return kind_; }
  std::optional<long> index() const noexcept { return index_; }

 private:
  ErrorKind kind_;
  std::optional<long> index_;
};

}  // namespace relforms
