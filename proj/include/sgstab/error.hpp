#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sgstab {

enum class ErrorCode {
  usage,
  parameter_domain,
  singular,
  not_positive_definite,
  non_convergence,
  no_unique_solution,
  insufficient_quadrature,
  integration,
  config,
  io,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Exception thrown by every numerical kernel in the library.
///
/// `index` carries the kernel-specific location of the failure (pivot row,
/// leading minor, unreduced block size, quadrature node, time step), and
/// `parameter` the parameter value p when the failure happened at a point of
/// the parameter domain.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::size_t> index = std::nullopt,
        std::optional<double> parameter = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  /// The message without the leading error-kind text.
  const std::string& message() const noexcept { return message_; }
  std::optional<std::size_t> index() const noexcept { return index_; }
  std::optional<double> parameter() const noexcept { return parameter_; }

 private:
  ErrorCode code_;
  std::string message_;
  std::optional<std::size_t> index_;
  std::optional<double> parameter_;
};

}  // namespace sgstab
