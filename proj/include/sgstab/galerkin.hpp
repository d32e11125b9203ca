#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "sgstab/matrix.hpp"
#include "sgstab/model.hpp"
#include "sgstab/orthopoly.hpp"

namespace sgstab {

/// mn × mn matrix made of m × m minors of size n × n. Minor (i, j), 1-based,
/// occupies rows (i−1)n .. in−1 and columns (j−1)n .. jn−1.
class GalerkinMatrix {
 public:
  GalerkinMatrix(std::size_t blocks, std::size_t block_size);

  std::size_t blocks() const noexcept { return blocks_; }
  std::size_t block_size() const noexcept { return block_size_; }
  const Matrix& matrix() const noexcept { return matrix_; }
  Matrix& matrix() noexcept { return matrix_; }
  Matrix minor(std::size_t i, std::size_t j) const;

 private:
  std::size_t blocks_;
  std::size_t block_size_;
  Matrix matrix_;
};

/// Result of the Lyapunov/Cholesky transformation at one parameter value:
/// AᵀM + MA + Q = 0, M = L Lᵀ, B = Lᵀ A L⁻ᵀ.
struct StabilizedPoint {
  std::optional<double> parameter;
  Matrix lyapunov;         // M
  Matrix factor;           // L
  Matrix factor_inv_t;     // L⁻ᵀ
  Matrix transformed;      // B
};

/// Fails with the underlying Lyapunov/Cholesky error code, tagged with `p`.
StabilizedPoint stabilize_point(const Matrix& a, const Matrix& q,
                                std::optional<double> p = std::nullopt);

/// Â with Âᵢⱼ = Σ_k w_k A(p_k) Φ_i(p_k) Φ_j(p_k).
GalerkinMatrix assemble_linear(const ParametricLinearSystem& sys, const OrthonormalBasis& basis,
                               const QuadratureRule& rule);

/// Stabilization evaluated once per quadrature node.
std::vector<StabilizedPoint> stabilize_nodes(const std::function<Matrix(double)>& a,
                                             const Matrix& q, const QuadratureRule& rule);

/// B̂ with B̂ᵢⱼ = Σ_k w_k B(p_k) Φ_i(p_k) Φ_j(p_k), B(p_k) from stabilize_point.
GalerkinMatrix assemble_stabilized_linear(const ParametricLinearSystem& sys, const Matrix& q,
                                          const OrthonormalBasis& basis,
                                          const QuadratureRule& rule);

/// Projected right-hand side F(v̂) and its Jacobian for ẋ = f(x, p).
/// v̂ is coefficient-major: (v̂₁ᵀ, …, v̂ₘᵀ)ᵀ with v̂ᵢ ∈ ℝⁿ.
class NonlinearGalerkin {
 public:
  NonlinearGalerkin(ParametricNonlinearSystem sys, OrthonormalBasis basis, QuadratureRule rule);

  std::size_t dimension() const noexcept;
  const OrthonormalBasis& basis() const noexcept { return basis_; }
  const QuadratureRule& rule() const noexcept { return rule_; }

  Vector rhs(std::span<const double> v) const;
  Matrix jacobian(std::span<const double> v) const;

 private:
  ParametricNonlinearSystem sys_;
  OrthonormalBasis basis_;
  QuadratureRule rule_;
  Matrix phi_;  // m × K
};

/// Projection of ẏ = L(p)ᵀ f̃(L(p)⁻ᵀ y, p) for a shifted system f̃ with
/// equilibrium 0. L(p_k) is computed once per node from the Lyapunov equation
/// of the equilibrium Jacobian and cached.
class StabilizedNonlinearGalerkin {
 public:
  StabilizedNonlinearGalerkin(ParametricNonlinearSystem shifted, const Matrix& q,
                              OrthonormalBasis basis, QuadratureRule rule);

  std::size_t dimension() const noexcept;
  const std::vector<StabilizedPoint>& node_factors() const noexcept { return nodes_; }

  Vector rhs(std::span<const double> y) const;
  Matrix jacobian(std::span<const double> y) const;

 private:
  ParametricNonlinearSystem sys_;
  OrthonormalBasis basis_;
  QuadratureRule rule_;
  Matrix phi_;
  std::vector<StabilizedPoint> nodes_;
  std::vector<Matrix> factor_t_;  // L(p_k)ᵀ
};

Vector nonlinear_galerkin_rhs(const ParametricNonlinearSystem& sys, const OrthonormalBasis& basis,
                              const QuadratureRule& rule, std::span<const double> v);
Matrix nonlinear_galerkin_jacobian(const ParametricNonlinearSystem& sys,
                                   const OrthonormalBasis& basis, const QuadratureRule& rule,
                                   std::span<const double> v);
Vector stabilized_nonlinear_rhs(const ParametricNonlinearSystem& shifted, const Matrix& q,
                                const OrthonormalBasis& basis, const QuadratureRule& rule,
                                std::span<const double> y);

/// Σ_j v̂_j Φ_j(p).
Vector reconstruct(std::span<const double> v, const OrthonormalBasis& basis, double p);

/// Coefficient-major projection of the equilibrium map x*(p).
Vector project_equilibrium(const ParametricNonlinearSystem& sys, const OrthonormalBasis& basis,
                           const QuadratureRule& rule);

}  // namespace sgstab
