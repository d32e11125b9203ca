#include "sgstab/error.hpp"

namespace sgstab {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::usage: return "usage error";
    case ErrorCode::parameter_domain: return "parameter-domain error";
    case ErrorCode::singular: return "singular matrix";
    case ErrorCode::not_positive_definite: return "matrix not positive definite";
    case ErrorCode::non_convergence: return "iteration did not converge";
    case ErrorCode::no_unique_solution: return "no unique solution";
    case ErrorCode::insufficient_quadrature: return "insufficient quadrature";
    case ErrorCode::integration: return "integration failure";
    case ErrorCode::config: return "config error";
    case ErrorCode::io: return "i/o error";
  }
  return "unknown error";
}

Error::Error(ErrorCode code, const std::string& message,
             std::optional<std::size_t> index, std::optional<double> parameter)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code),
      message_(message),
      index_(index),
      parameter_(parameter) {}

}  // namespace sgstab
