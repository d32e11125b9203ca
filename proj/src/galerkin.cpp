#include "sgstab/galerkin.hpp"

#include <cmath>
#include <string>

#include "sgstab/error.hpp"
#include "sgstab/matops.hpp"

namespace sgstab {

namespace {

void require_nodes(const OrthonormalBasis& basis, const QuadratureRule& rule) {
  if (rule.size() < basis.size()) {
    throw Error(ErrorCode::insufficient_quadrature,
                std::to_string(rule.size()) + " quadrature nodes cannot resolve " +
                    std::to_string(basis.size()) + " basis functions");
  }
}

void require_state(std::span<const double> v, std::size_t expected) {
  if (v.size() != expected) {
    throw Error(ErrorCode::usage, "coefficient vector has length " + std::to_string(v.size()) +
                                      ", expected " + std::to_string(expected));
  }
}

// Σ_j v_j Φ_j(p_k) for node k.
Vector state_at_node(std::span<const double> v, const Matrix& phi, std::size_t k, std::size_t n) {
  Vector x(n, 0.0);
  for (std::size_t j = 0; j < phi.rows(); ++j) {
    const double pj = phi(j, k);
    for (std::size_t c = 0; c < n; ++c) x[c] += v[j * n + c] * pj;
  }
  return x;
}

template <class NodeRhs>
Vector project_rhs(const Matrix& phi, const QuadratureRule& rule, std::size_t n,
                   std::span<const double> v, NodeRhs&& node_rhs) {
  const std::size_t m = phi.rows();
  Vector out(m * n, 0.0);
  for (std::size_t k = 0; k < rule.size(); ++k) {
    const Vector fx = node_rhs(k, state_at_node(v, phi, k, n));
    const double w = rule.weights()[k];
    for (std::size_t i = 0; i < m; ++i) {
      const double wi = w * phi(i, k);
      for (std::size_t c = 0; c < n; ++c) out[i * n + c] += wi * fx[c];
    }
  }
  return out;
}

// Adds Σ_k w_k G_k Φ_i(p_k) Φ_j(p_k) into every minor (i, j).
void accumulate_node_matrix(GalerkinMatrix& out, const Matrix& phi, double weight, std::size_t k,
                            const Matrix& node_matrix) {
  const std::size_t m = out.blocks(), n = out.block_size();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      out.matrix().add_scaled_block(i * n, j * n, weight * phi(i, k) * phi(j, k), node_matrix);
}

template <class NodeJac>
GalerkinMatrix project_jacobian(const Matrix& phi, const QuadratureRule& rule, std::size_t n,
                                std::span<const double> v, NodeJac&& node_jac) {
  GalerkinMatrix out(phi.rows(), n);
  for (std::size_t k = 0; k < rule.size(); ++k) {
    const Matrix jk = node_jac(k, state_at_node(v, phi, k, n));
    accumulate_node_matrix(out, phi, rule.weights()[k], k, jk);
  }
  return out;
}

std::string describe_node(std::size_t k, double p) {
  return "quadrature node " + std::to_string(k + 1) + " (p = " + std::to_string(p) + ")";
}

}  // namespace

// ---------------------------------------------------------------------------

GalerkinMatrix::GalerkinMatrix(std::size_t blocks, std::size_t block_size)
    : blocks_(blocks), block_size_(block_size), matrix_(blocks * block_size, blocks * block_size) {}

Matrix GalerkinMatrix::minor(std::size_t i, std::size_t j) const {
  if (i < 1 || j < 1 || i > blocks_ || j > blocks_) {
    throw Error(ErrorCode::usage, "minor index out of range");
  }
  return matrix_.block((i - 1) * block_size_, (j - 1) * block_size_, block_size_, block_size_);
}

StabilizedPoint stabilize_point(const Matrix& a, const Matrix& q, std::optional<double> p) {
  StabilizedPoint sp;
  sp.parameter = p;
  try {
    sp.lyapunov = lyapunov_solve(a, q);
    sp.factor = cholesky(sp.lyapunov);
  } catch (const Error& e) {
    if (!p) throw;
    throw Error(e.code(), e.message() + " at p = " + std::to_string(*p), e.index(), p);
  }
  sp.factor_inv_t = lower_triangular_inverse(sp.factor).transposed();
  sp.transformed = sp.factor.transposed() * a * sp.factor_inv_t;
  return sp;
}

GalerkinMatrix assemble_linear(const ParametricLinearSystem& sys, const OrthonormalBasis& basis,
                               const QuadratureRule& rule) {
  require_nodes(basis, rule);
  const Matrix phi = basis_at_nodes(basis, rule);
  GalerkinMatrix out(basis.size(), sys.dimension);
  for (std::size_t k = 0; k < rule.size(); ++k) {
    accumulate_node_matrix(out, phi, rule.weights()[k], k, sys.matrix(rule.nodes()[k]));
  }
  return out;
}

std::vector<StabilizedPoint> stabilize_nodes(const std::function<Matrix(double)>& a,
                                             const Matrix& q, const QuadratureRule& rule) {
  std::vector<StabilizedPoint> nodes;
  nodes.reserve(rule.size());
  for (std::size_t k = 0; k < rule.size(); ++k) {
    const double p = rule.nodes()[k];
    try {
      nodes.push_back(stabilize_point(a(p), q));
      nodes.back().parameter = p;
    } catch (const Error& e) {
      throw Error(e.code(), "stabilization failed at " + describe_node(k, p) + ": " + e.message(), k, p);
    }
  }
  return nodes;
}

GalerkinMatrix assemble_stabilized_linear(const ParametricLinearSystem& sys, const Matrix& q,
                                          const OrthonormalBasis& basis,
                                          const QuadratureRule& rule) {
  require_nodes(basis, rule);
  const std::vector<StabilizedPoint> nodes = stabilize_nodes(sys.matrix, q, rule);
  const Matrix phi = basis_at_nodes(basis, rule);
  GalerkinMatrix out(basis.size(), sys.dimension);
  for (std::size_t k = 0; k < rule.size(); ++k) {
    accumulate_node_matrix(out, phi, rule.weights()[k], k, nodes[k].transformed);
  }
  return out;
}

// ---------------------------------------------------------------------------

NonlinearGalerkin::NonlinearGalerkin(ParametricNonlinearSystem sys, OrthonormalBasis basis,
                                     QuadratureRule rule)
    : sys_(std::move(sys)), basis_(std::move(basis)), rule_(std::move(rule)) {
  require_nodes(basis_, rule_);
  phi_ = basis_at_nodes(basis_, rule_);
}

std::size_t NonlinearGalerkin::dimension() const noexcept {
  return basis_.size() * sys_.dimension;
}

Vector NonlinearGalerkin::rhs(std::span<const double> v) const {
  require_state(v, dimension());
  return project_rhs(phi_, rule_, sys_.dimension, v, [&](std::size_t k, const Vector& x) {
    return sys_.rhs(x, rule_.nodes()[k]);
  });
}

Matrix NonlinearGalerkin::jacobian(std::span<const double> v) const {
  require_state(v, dimension());
  return project_jacobian(phi_, rule_, sys_.dimension, v, [&](std::size_t k, const Vector& x) {
           return sys_.jacobian(x, rule_.nodes()[k]);
         }).matrix();
}

StabilizedNonlinearGalerkin::StabilizedNonlinearGalerkin(ParametricNonlinearSystem shifted,
                                                         const Matrix& q, OrthonormalBasis basis,
                                                         QuadratureRule rule)
    : sys_(std::move(shifted)), basis_(std::move(basis)), rule_(std::move(rule)) {
  if (!sys_.equilibrium) {
    throw Error(ErrorCode::usage, "stabilized projection needs a system with an equilibrium map");
  }
  require_nodes(basis_, rule_);
  phi_ = basis_at_nodes(basis_, rule_);
  nodes_ = stabilize_nodes([this](double p) { return equilibrium_jacobian(sys_, p); }, q, rule_);
  factor_t_.reserve(nodes_.size());
  for (const auto& node : nodes_) factor_t_.push_back(node.factor.transposed());
}

std::size_t StabilizedNonlinearGalerkin::dimension() const noexcept {
  return basis_.size() * sys_.dimension;
}

Vector StabilizedNonlinearGalerkin::rhs(std::span<const double> y) const {
  require_state(y, dimension());
  return project_rhs(phi_, rule_, sys_.dimension, y, [&](std::size_t k, const Vector& yk) {
    const Vector x = nodes_[k].factor_inv_t * yk;
    return factor_t_[k] * sys_.rhs(x, rule_.nodes()[k]);
  });
}

Matrix StabilizedNonlinearGalerkin::jacobian(std::span<const double> y) const {
  require_state(y, dimension());
  return project_jacobian(phi_, rule_, sys_.dimension, y, [&](std::size_t k, const Vector& yk) {
           const Vector x = nodes_[k].factor_inv_t * yk;
           return factor_t_[k] * sys_.jacobian(x, rule_.nodes()[k]) * nodes_[k].factor_inv_t;
         }).matrix();
}

Vector nonlinear_galerkin_rhs(const ParametricNonlinearSystem& sys, const OrthonormalBasis& basis,
                              const QuadratureRule& rule, std::span<const double> v) {
  return NonlinearGalerkin(sys, basis, rule).rhs(v);
}

Matrix nonlinear_galerkin_jacobian(const ParametricNonlinearSystem& sys,
                                   const OrthonormalBasis& basis, const QuadratureRule& rule,
                                   std::span<const double> v) {
  return NonlinearGalerkin(sys, basis, rule).jacobian(v);
}

Vector stabilized_nonlinear_rhs(const ParametricNonlinearSystem& shifted, const Matrix& q,
                                const OrthonormalBasis& basis, const QuadratureRule& rule,
                                std::span<const double> y) {
  return StabilizedNonlinearGalerkin(shifted, q, basis, rule).rhs(y);
}

Vector reconstruct(std::span<const double> v, const OrthonormalBasis& basis, double p) {
  const std::size_t m = basis.size();
  if (v.empty() || v.size() % m != 0) {
    throw Error(ErrorCode::usage, "coefficient vector length " + std::to_string(v.size()) +
                                      " is not a multiple of the basis size " + std::to_string(m));
  }
  const std::size_t n = v.size() / m;
  const Vector phi = basis.evaluate_all(p);
  Vector x(n, 0.0);
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t c = 0; c < n; ++c) x[c] += v[j * n + c] * phi[j];
  return x;
}

Vector project_equilibrium(const ParametricNonlinearSystem& sys, const OrthonormalBasis& basis,
                           const QuadratureRule& rule) {
  if (!sys.equilibrium) throw Error(ErrorCode::usage, "system has no equilibrium map");
  const Matrix coeffs = project(*sys.equilibrium, basis, rule);
  return {coeffs.data().begin(), coeffs.data().end()};
}

}  // namespace sgstab
