#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "sgstab/matrix.hpp"

namespace sgstab {

using VectorField = std::function<Vector(std::span<const double>)>;
using JacobianField = std::function<Matrix(std::span<const double>)>;

struct NewtonOptions {
  double tolerance = 1e-10;
  std::size_t max_iterations = 50;
  /// Step halvings tried per iteration before giving up on a decrease.
  std::size_t max_halvings = 20;
};

struct NewtonReport {
  Vector root;
  std::size_t iterations = 0;
  double residual = 0.0;  // max-norm of F at root
  bool converged = false;
};

/// Newton iteration with step-halving line search on the max-norm residual.
/// Non-convergence is reported, not thrown; a singular Jacobian throws.
NewtonReport newton_solve(const VectorField& f, const JacobianField& jacobian, Vector x0,
                          const NewtonOptions& options = {});

struct Trajectory {
  std::vector<double> times;
  std::vector<Vector> states;
  double step = 0.0;
};

/// Implicit trapezoidal rule
///   x_{k+1} = x_k + h/2 (f(x_k) + f(x_{k+1}))
/// with each step solved by Newton from the explicit Euler predictor.
/// When t_end is not a multiple of h the step shrinks to t_end / ceil(t_end / h).
Trajectory trapezoidal_integrate(const VectorField& rhs, const JacobianField& jacobian, Vector x0,
                                 double t_end, double h, const NewtonOptions& newton = {});

}  // namespace sgstab
