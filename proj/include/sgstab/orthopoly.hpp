#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "sgstab/matrix.hpp"

namespace sgstab {

/// Probability density on [-1, 1]: uniform, or c (1-p)^alpha (1+p)^beta.
class Density {
 public:
  enum class Kind { uniform, beta };

  static Density uniform();
  /// Throws ErrorCode::parameter_domain unless alpha > -1 and beta > -1.
  static Density beta(double alpha, double beta);

  Kind kind() const noexcept { return kind_; }
  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }
  /// Normalization constant c making the density integrate to one.
  double normalization() const noexcept { return normalization_; }
  double operator()(double p) const noexcept;

  /// Monic three-term recurrence π_{k+1} = (p − a_k) π_k − b_k π_{k−1}.
  double recurrence_a(std::size_t k) const noexcept;
  /// b_0 is the total mass (one); b_k for k ≥ 1 equals ‖π_k‖² / ‖π_{k−1}‖².
  double recurrence_b(std::size_t k) const noexcept;

 private:
  Density(Kind kind, double alpha, double beta);

  Kind kind_;
  double alpha_;
  double beta_;
  double normalization_;
};

/// Gauss rule integrating against the density; weights sum to one and nodes ascend.
class QuadratureRule {
 public:
  QuadratureRule(Density density, std::size_t nodes);

  const Density& density() const noexcept { return density_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  std::span<const double> nodes() const noexcept { return nodes_; }
  std::span<const double> weights() const noexcept { return weights_; }

 private:
  Density density_;
  Vector nodes_;
  Vector weights_;
};

/// Polynomials Φ_1..Φ_m orthonormal under the density; Φ_i has degree i−1.
class OrthonormalBasis {
 public:
  OrthonormalBasis(Density density, std::size_t size);

  const Density& density() const noexcept { return density_; }
  std::size_t size() const noexcept { return size_; }
  std::size_t degree() const noexcept { return size_ - 1; }

  /// Φ_i(p), 1-based index.
  double evaluate(std::size_t i, double p) const;
  /// Φ_1(p), …, Φ_m(p).
  Vector evaluate_all(double p) const;

  /// Norm of the monic polynomial π_{i−1}, i.e. Φ_i = π_{i−1} / norm.
  double monic_norm(std::size_t i) const;

 private:
  Density density_;
  std::size_t size_;
  Vector sqrt_b_;       // sqrt(b_k), k = 0..m
  Vector monic_norms_;  // ‖π_k‖, k = 0..m−1
};

using ScalarFunction = std::function<double(double)>;
using VectorFunction = std::function<Vector(double)>;

/// Σ_k w_k f(p_k) g(p_k).
double inner_product(const ScalarFunction& f, const ScalarFunction& g, const QuadratureRule& rule);

/// m × n coefficient matrix; row i−1 holds E[f Φ_i].
Matrix project(const VectorFunction& f, const OrthonormalBasis& basis, const QuadratureRule& rule);

/// Φ_i(p_k) tabulated as an m × K matrix.
Matrix basis_at_nodes(const OrthonormalBasis& basis, const QuadratureRule& rule);

}  // namespace sgstab
