#include "sgstab/model.hpp"

#include <array>
#include <cmath>

#include "sgstab/error.hpp"

namespace sgstab {

namespace {

// Entry (i, j) of the linear test matrix is (c2 p² + c1 p + c0) / 100.
struct QuadraticEntry {
  int c2, c1, c0;
};

constexpr std::array<std::array<QuadraticEntry, 3>, 3> kLinearCoefficients{{
    {{{128, -72, -32}, {295, -199, 4}, {165, -234, 46}}},
    {{{-82, -59, 270}, {-266, 144, -73}, {-147, -210, 286}}},
    {{{70, 296, -80}, {43, 96, 8}, {15, 146, -251}}},
}};

void require_dimension(std::span<const double> x, std::size_t n) {
  if (x.size() != n) throw Error(ErrorCode::usage, "state has wrong dimension");
}

}  // namespace

ParametricLinearSystem paper_linear_system() {
  ParametricLinearSystem sys;
  sys.dimension = 3;
  sys.matrix = [](double p) {
    Matrix a(3, 3);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) {
        const auto& c = kLinearCoefficients[i][j];
        a(i, j) = (c.c2 * p * p + c.c1 * p + c.c0) / 100.0;
      }
    return a;
  };
  return sys;
}

ParametricNonlinearSystem paper_quadratic_system() {
  ParametricNonlinearSystem sys;
  sys.dimension = 2;
  sys.rhs = [](std::span<const double> x, double p) {
    require_dimension(x, 2);
    const double s = std::sin(p), c = std::cos(p);
    const double x1 = x[0], x2 = x[1];
    const double f1 = x1 * x1 + (-35.0 * p - 2.0 * s - 13.0 * p * p - 97.0) * x1 - 2.0 * x2 * x2 +
                      (4.0 * c - 77.0 * p - 33.0 * p * p + 23.0) * x2 + s * s - 2.0 * c * c +
                      c * (33.0 * p * p + 77.0 * p - 23.0) + s * (13.0 * p * p + 35.0 * p + 97.0);
    const double f2 = 4.0 * x1 * x1 + (85.0 * p - 8.0 * s + 51.0 * p * p - 54.0) * x1 - x2 * x2 +
                      (2.0 * c - 0.1 * p + 67.0 * p * p - 24.0) * x2 + 4.0 * s * s - c * c +
                      c * (-67.0 * p * p + 0.1 * p + 24.0) - s * (51.0 * p * p + 85.0 * p - 54.0);
    return Vector{f1, f2};
  };
  sys.jacobian = [](std::span<const double> x, double p) {
    require_dimension(x, 2);
    const double s = std::sin(p), c = std::cos(p);
    Matrix j(2, 2);
    j(0, 0) = 2.0 * x[0] + (-35.0 * p - 2.0 * s - 13.0 * p * p - 97.0);
    j(0, 1) = -4.0 * x[1] + (4.0 * c - 77.0 * p - 33.0 * p * p + 23.0);
    j(1, 0) = 8.0 * x[0] + (85.0 * p - 8.0 * s + 51.0 * p * p - 54.0);
    j(1, 1) = -2.0 * x[1] + (2.0 * c - 0.1 * p + 67.0 * p * p - 24.0);
    return j;
  };
  sys.equilibrium = [](double p) { return Vector{std::sin(p), std::cos(p)}; };
  return sys;
}

ParametricNonlinearSystem as_nonlinear(const ParametricLinearSystem& lin) {
  ParametricNonlinearSystem sys;
  sys.dimension = lin.dimension;
  auto matrix = lin.matrix;
  sys.rhs = [matrix](std::span<const double> x, double p) { return matrix(p) * x; };
  sys.jacobian = [matrix](std::span<const double>, double p) { return matrix(p); };
  const std::size_t n = lin.dimension;
  sys.equilibrium = [n](double) { return Vector(n, 0.0); };
  return sys;
}

ParametricNonlinearSystem shift_system(const ParametricNonlinearSystem& sys) {
  if (!sys.equilibrium) throw Error(ErrorCode::usage, "shift_system: system has no equilibrium map");
  const auto rhs = sys.rhs;
  const auto jac = sys.jacobian;
  const auto eq = *sys.equilibrium;
  const std::size_t n = sys.dimension;

  auto offset = [eq, n](std::span<const double> x, double p) {
    require_dimension(x, n);
    Vector z = eq(p);
    for (std::size_t i = 0; i < n; ++i) z[i] += x[i];
    return z;
  };

  ParametricNonlinearSystem shifted;
  shifted.dimension = n;
  shifted.rhs = [rhs, offset](std::span<const double> x, double p) { return rhs(offset(x, p), p); };
  shifted.jacobian = [jac, offset](std::span<const double> x, double p) {
    return jac(offset(x, p), p);
  };
  shifted.equilibrium = [n](double) { return Vector(n, 0.0); };
  return shifted;
}

Matrix equilibrium_jacobian(const ParametricNonlinearSystem& sys, double p) {
  if (!sys.equilibrium) {
    throw Error(ErrorCode::usage, "equilibrium_jacobian: system has no equilibrium map");
  }
  const Vector x = (*sys.equilibrium)(p);
  return sys.jacobian(x, p);
}

}  // namespace sgstab
