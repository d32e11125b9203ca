#include "sgstab/orthopoly.hpp"

#include <cmath>
#include <string>

#include "sgstab/error.hpp"
#include "sgstab/matops.hpp"

namespace sgstab {

// ---------------------------------------------------------------------------
// Density

Density::Density(Kind kind, double alpha, double beta)
    : kind_(kind), alpha_(alpha), beta_(beta), normalization_(0.5) {
  if (kind_ == Kind::beta) {
    // 1 / (2^(α+β+1) B(α+1, β+1))
    const double log_beta_fn =
        std::lgamma(alpha + 1.0) + std::lgamma(beta + 1.0) - std::lgamma(alpha + beta + 2.0);
    normalization_ = std::exp(-(alpha + beta + 1.0) * std::log(2.0) - log_beta_fn);
  }
}

Density Density::uniform() { return Density(Kind::uniform, 0.0, 0.0); }

Density Density::beta(double alpha, double beta) {
  if (!(alpha > -1.0) || !(beta > -1.0) || !std::isfinite(alpha) || !std::isfinite(beta)) {
    throw Error(ErrorCode::parameter_domain,
                "beta density requires alpha > -1 and beta > -1 (got alpha=" + std::to_string(alpha) +
                    ", beta=" + std::to_string(beta) + ")");
  }
  return Density(Kind::beta, alpha, beta);
}

double Density::operator()(double p) const noexcept {
  if (p < -1.0 || p > 1.0) return 0.0;
  if (kind_ == Kind::uniform) return 0.5;
  return normalization_ * std::pow(1.0 - p, alpha_) * std::pow(1.0 + p, beta_);
}

double Density::recurrence_a(std::size_t k) const noexcept {
  if (kind_ == Kind::uniform) return 0.0;
  const double a = alpha_, b = beta_;
  const double s = 2.0 * static_cast<double>(k) + a + b;
  if (k == 0) return (b - a) / (a + b + 2.0);
  return (b * b - a * a) / (s * (s + 2.0));
}

double Density::recurrence_b(std::size_t k) const noexcept {
  if (k == 0) return 1.0;
  const double kk = static_cast<double>(k);
  if (kind_ == Kind::uniform) return kk * kk / (4.0 * kk * kk - 1.0);
  const double a = alpha_, b = beta_;
  if (k == 1) {
    const double s = 2.0 + a + b;
    return 4.0 * (1.0 + a) * (1.0 + b) / (s * s * (s + 1.0));
  }
  const double s = 2.0 * kk + a + b;
  return 4.0 * kk * (kk + a) * (kk + b) * (kk + a + b) / (s * s * (s + 1.0) * (s - 1.0));
}

// ---------------------------------------------------------------------------
// Quadrature (Golub-Welsch)

QuadratureRule::QuadratureRule(Density density, std::size_t nodes) : density_(density) {
  if (nodes == 0) throw Error(ErrorCode::usage, "quadrature rule needs at least one node");
  Vector diag(nodes), off(nodes - 1);
  for (std::size_t k = 0; k < nodes; ++k) diag[k] = density_.recurrence_a(k);
  for (std::size_t k = 1; k < nodes; ++k) off[k - 1] = std::sqrt(density_.recurrence_b(k));

  TridiagonalEigen eig = symmetric_tridiagonal_eigen(diag, off);
  nodes_ = std::move(eig.values);
  weights_.resize(nodes);
  double total = 0.0;
  for (std::size_t k = 0; k < nodes; ++k) {
    weights_[k] = eig.first_components[k] * eig.first_components[k];
    total += weights_[k];
  }
  // b_0 = 1; renormalizing removes the rounding in the eigenvector scaling.
  for (double& w : weights_) w /= total;
}

// ---------------------------------------------------------------------------
// Orthonormal basis

OrthonormalBasis::OrthonormalBasis(Density density, std::size_t size)
    : density_(density), size_(size) {
  if (size == 0) throw Error(ErrorCode::usage, "basis size must be at least one");
  sqrt_b_.resize(size + 1);
  for (std::size_t k = 0; k <= size; ++k) sqrt_b_[k] = std::sqrt(density_.recurrence_b(k));
  monic_norms_.resize(size);
  double norm = 1.0;
  for (std::size_t k = 0; k < size; ++k) {
    norm *= sqrt_b_[k];
    monic_norms_[k] = norm;
  }
}

double OrthonormalBasis::monic_norm(std::size_t i) const {
  if (i < 1 || i > size_) {
    throw Error(ErrorCode::usage,
                "basis index " + std::to_string(i) + " outside 1.." + std::to_string(size_));
  }
  return monic_norms_[i - 1];
}

Vector OrthonormalBasis::evaluate_all(double p) const {
  // sqrt(b_{k+1}) q_{k+1} = (p − a_k) q_k − sqrt(b_k) q_{k−1}
  Vector phi(size_);
  phi[0] = 1.0;
  double prev = 0.0;
  for (std::size_t k = 0; k + 1 < size_; ++k) {
    const double next =
        ((p - density_.recurrence_a(k)) * phi[k] - (k == 0 ? 0.0 : sqrt_b_[k] * prev)) /
        sqrt_b_[k + 1];
    prev = phi[k];
    phi[k + 1] = next;
  }
  return phi;
}

double OrthonormalBasis::evaluate(std::size_t i, double p) const {
  if (i < 1 || i > size_) {
    throw Error(ErrorCode::usage,
                "basis index " + std::to_string(i) + " outside 1.." + std::to_string(size_));
  }
  double prev = 0.0, cur = 1.0;
  for (std::size_t k = 0; k + 1 < i; ++k) {
    const double next =
        ((p - density_.recurrence_a(k)) * cur - (k == 0 ? 0.0 : sqrt_b_[k] * prev)) / sqrt_b_[k + 1];
    prev = cur;
    cur = next;
  }
  return cur;
}

// ---------------------------------------------------------------------------

double inner_product(const ScalarFunction& f, const ScalarFunction& g, const QuadratureRule& rule) {
  double s = 0.0;
  for (std::size_t k = 0; k < rule.size(); ++k) {
    const double p = rule.nodes()[k];
    s += rule.weights()[k] * f(p) * g(p);
  }
  return s;
}

Matrix basis_at_nodes(const OrthonormalBasis& basis, const QuadratureRule& rule) {
  Matrix table(basis.size(), rule.size());
  for (std::size_t k = 0; k < rule.size(); ++k) {
    const Vector phi = basis.evaluate_all(rule.nodes()[k]);
    for (std::size_t i = 0; i < basis.size(); ++i) table(i, k) = phi[i];
  }
  return table;
}

Matrix project(const VectorFunction& f, const OrthonormalBasis& basis, const QuadratureRule& rule) {
  const Matrix phi = basis_at_nodes(basis, rule);
  Matrix coeffs;
  for (std::size_t k = 0; k < rule.size(); ++k) {
    const Vector value = f(rule.nodes()[k]);
    if (k == 0) coeffs = Matrix(basis.size(), value.size());
    if (value.size() != coeffs.cols()) {
      throw Error(ErrorCode::usage, "project: function changed output dimension between nodes");
    }
    const double w = rule.weights()[k];
    for (std::size_t i = 0; i < basis.size(); ++i)
      for (std::size_t c = 0; c < value.size(); ++c) coeffs(i, c) += w * value[c] * phi(i, k);
  }
  return coeffs;
}

}  // namespace sgstab
