#include "sgstab/odesolve.hpp"

#include <cmath>
#include <string>

#include "sgstab/error.hpp"
#include "sgstab/matops.hpp"

namespace sgstab {

NewtonReport newton_solve(const VectorField& f, const JacobianField& jacobian, Vector x0,
                          const NewtonOptions& options) {
  if (!(options.tolerance > 0.0)) throw Error(ErrorCode::usage, "Newton tolerance must be positive");
  NewtonReport report;
  report.root = std::move(x0);
  Vector fx = f(report.root);
  if (fx.size() != report.root.size()) {
    throw Error(ErrorCode::usage, "Newton: F maps to a space of different dimension");
  }
  report.residual = max_norm(fx);

  while (!(report.residual < options.tolerance) && report.iterations < options.max_iterations) {
    const Vector delta = lu_solve(jacobian(report.root), fx);
    const std::size_t n = report.root.size();
    double lambda = 1.0;
    Vector trial(n);
    Vector ftrial;
    double trial_residual = 0.0;
    bool decreased = false;
    for (std::size_t halving = 0; halving <= options.max_halvings; ++halving) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = report.root[i] - lambda * delta[i];
      ftrial = f(trial);
      trial_residual = max_norm(ftrial);
      if (trial_residual < report.residual) {
        decreased = true;
        break;
      }
      lambda *= 0.5;
    }
    ++report.iterations;
    if (!decreased) break;  // stagnation: no descent along the Newton direction
    report.root = trial;
    fx = std::move(ftrial);
    report.residual = trial_residual;
  }
  report.converged = report.residual < options.tolerance;
  return report;
}

Trajectory trapezoidal_integrate(const VectorField& rhs, const JacobianField& jacobian, Vector x0,
                                 double t_end, double h, const NewtonOptions& newton) {
  if (!(h > 0.0) || !(t_end >= h)) {
    throw Error(ErrorCode::usage, "trapezoidal rule needs h > 0 and t_end >= h");
  }
  const auto steps = static_cast<std::size_t>(std::ceil(t_end / h - 1e-9));
  const double step = t_end / static_cast<double>(steps);
  const std::size_t n = x0.size();

  Trajectory traj;
  traj.step = step;
  traj.times.reserve(steps + 1);
  traj.states.reserve(steps + 1);
  traj.times.push_back(0.0);
  traj.states.push_back(std::move(x0));

  Vector f_prev = rhs(traj.states.back());
  for (std::size_t k = 0; k < steps; ++k) {
    const Vector& xk = traj.states.back();
    Vector anchor(n);
    Vector guess(n);
    for (std::size_t i = 0; i < n; ++i) {
      anchor[i] = xk[i] + 0.5 * step * f_prev[i];
      guess[i] = xk[i] + step * f_prev[i];
    }
    // G(z) = z − x_k − h/2 (f(x_k) + f(z)),  G'(z) = I − h/2 f'(z)
    auto residual = [&](std::span<const double> z) {
      Vector g = rhs(z);
      for (std::size_t i = 0; i < n; ++i) g[i] = z[i] - anchor[i] - 0.5 * step * g[i];
      return g;
    };
    auto residual_jacobian = [&](std::span<const double> z) {
      Matrix j = jacobian(z);
      j *= -0.5 * step;
      for (std::size_t i = 0; i < n; ++i) j(i, i) += 1.0;
      return j;
    };

    const double t_next = static_cast<double>(k + 1) * step;
    NewtonReport report;
    try {
      report = newton_solve(residual, residual_jacobian, std::move(guess), newton);
    } catch (const Error& e) {
      throw Error(ErrorCode::integration,
                  "step " + std::to_string(k + 1) + " (t = " + std::to_string(t_next) +
                      "): " + e.what(),
                  k + 1);
    }
    if (!report.converged) {
      throw Error(ErrorCode::integration,
                  "Newton did not converge in step " + std::to_string(k + 1) + " (t = " +
                      std::to_string(t_next) + ", residual " + std::to_string(report.residual) + ")",
                  k + 1);
    }
    f_prev = rhs(report.root);
    traj.times.push_back(k + 1 == steps ? t_end : t_next);
    traj.states.push_back(std::move(report.root));
  }
  return traj;
}

}  // namespace sgstab
