#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>

#include "sgstab/matrix.hpp"

namespace sgstab {

/// ẋ = A(p) x on the parameter domain [-1, 1].
struct ParametricLinearSystem {
  std::size_t dimension = 0;
  std::function<Matrix(double p)> matrix;
};

/// ẋ = f(x, p) with analytic Jacobian ∂f/∂x and an optional equilibrium
/// family x*(p). Evaluators must be pure and reentrant.
struct ParametricNonlinearSystem {
  using Rhs = std::function<Vector(std::span<const double> x, double p)>;
  using Jacobian = std::function<Matrix(std::span<const double> x, double p)>;
  using Equilibrium = std::function<Vector(double p)>;

  std::size_t dimension = 0;
  Rhs rhs;
  Jacobian jacobian;
  std::optional<Equilibrium> equilibrium;
};

/// The 3×3 test matrix with quadratic polynomial entries (coefficients / 100).
ParametricLinearSystem paper_linear_system();

/// The 2-D quadratic test system with equilibrium x*(p) = (sin p, cos p).
ParametricNonlinearSystem paper_quadratic_system();

/// f(x, p) = A(p) x with equilibrium 0.
ParametricNonlinearSystem as_nonlinear(const ParametricLinearSystem& sys);

/// f̃(x, p) = f(x + x*(p), p); the equilibrium becomes 0 for every p.
ParametricNonlinearSystem shift_system(const ParametricNonlinearSystem& sys);

/// ∂f/∂x at x = x*(p).
Matrix equilibrium_jacobian(const ParametricNonlinearSystem& sys, double p);

}  // namespace sgstab
