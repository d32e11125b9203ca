#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "sgstab/error.hpp"
#include "sgstab/experiment.hpp"
#include "sgstab/galerkin.hpp"
#include "sgstab/matops.hpp"
#include "sgstab/model.hpp"
#include "test_support.hpp"

using namespace sgstab;
using sgstab::testing::max_symmetric_eigenvalue;
using sgstab::testing::random_matrix;
using sgstab::testing::spectrum_distance;

namespace {

const int kC2[3][3] = {{128, 295, 165}, {-82, -266, -147}, {70, 43, 15}};
const int kC1[3][3] = {{-72, -199, -234}, {-59, 144, -210}, {296, 96, 146}};
const int kC0[3][3] = {{-32, 4, 46}, {270, -73, 286}, {-80, 8, -251}};

Matrix finite_difference(const std::function<Vector(std::span<const double>)>& f, const Vector& v,
                         double step = 1e-6) {
  const Vector f0 = f(v);
  Matrix j(f0.size(), v.size());
  for (std::size_t c = 0; c < v.size(); ++c) {
    Vector vp = v, vm = v;
    vp[c] += step;
    vm[c] -= step;
    const Vector fp = f(vp), fm = f(vm);
    for (std::size_t r = 0; r < f0.size(); ++r) j(r, c) = (fp[r] - fm[r]) / (2.0 * step);
  }
  return j;
}

Vector random_vector(std::mt19937_64& rng, std::size_t n, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Vector v(n);
  for (double& x : v) x = u(rng);
  return v;
}

const QuadratureRule& uniform20() {
  static const QuadratureRule rule(Density::uniform(), 20);
  return rule;
}

}  // namespace

// --- assemble_linear ----------------------------------------------------------

TEST(AssembleLinear, SingleBlockIsExpectation) {
  const GalerkinMatrix g =
      assemble_linear(paper_linear_system(), OrthonormalBasis(Density::uniform(), 1), uniform20());
  EXPECT_NEAR(g.matrix()(0, 0), 32.0 / 300.0, 1e-15);
  // E[p] = 0, E[p²] = 1/3
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      EXPECT_NEAR(g.matrix()(i, j), (kC2[i][j] / 3.0 + kC0[i][j]) / 100.0, 1e-14);
}

TEST(AssembleLinear, TwoBlocksAgainstAnalyticMoments) {
  // Φ₁ = 1, Φ₂ = √3 p; E[p²] = 1/3, E[p⁴] = 1/5, odd moments vanish.
  const GalerkinMatrix g =
      assemble_linear(paper_linear_system(), OrthonormalBasis(Density::uniform(), 2), uniform20());
  const Matrix m12 = g.minor(1, 2), m21 = g.minor(2, 1), m22 = g.minor(2, 2);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      const double off = std::sqrt(3.0) * kC1[i][j] / 300.0;
      EXPECT_NEAR(m12(i, j), off, 1e-14);
      EXPECT_NEAR(m21(i, j), off, 1e-14);
      EXPECT_NEAR(m22(i, j), (3.0 * kC2[i][j] / 5.0 + kC0[i][j]) / 100.0, 1e-14);
    }
}

TEST(AssembleLinear, ConstantMatrixGivesBlockDiagonal) {
  std::mt19937_64 rng(1);
  const Matrix a0 = random_matrix(rng, 3);
  const ParametricLinearSystem sys{3, [a0](double) { return a0; }};
  for (const Density d : {Density::uniform(), Density::beta(3.0, 2.0)}) {
    const GalerkinMatrix g = assemble_linear(sys, OrthonormalBasis(d, 5), QuadratureRule(d, 20));
    for (std::size_t i = 1; i <= 5; ++i)
      for (std::size_t j = 1; j <= 5; ++j) {
        const Matrix expected = i == j ? a0 : Matrix(3, 3);
        EXPECT_LE(max_abs_diff(g.minor(i, j), expected), 1e-13);
      }
  }
}

TEST(AssembleLinear, SymmetricInputGivesSymmetricMatrix) {
  const auto lin = paper_linear_system();
  const ParametricLinearSystem sym{3, [lin](double p) { return symmetric_part(lin.matrix(p)); }};
  const GalerkinMatrix g = assemble_linear(sym, OrthonormalBasis(Density::uniform(), 8), uniform20());
  EXPECT_LE(max_abs_diff(g.matrix(), g.matrix().transposed()), 1e-12);
}

TEST(AssembleLinear, MinorLayout) {
  GalerkinMatrix g(3, 2);
  g.matrix()(2, 5) = 7.0;  // block (2, 3), entry (1, 2)
  EXPECT_EQ(g.minor(2, 3)(0, 1), 7.0);
  EXPECT_THROW(g.minor(0, 1), Error);
  EXPECT_THROW(g.minor(1, 4), Error);
}

TEST(AssembleLinear, InsufficientQuadrature) {
  try {
    assemble_linear(paper_linear_system(), OrthonormalBasis(Density::uniform(), 6),
                    QuadratureRule(Density::uniform(), 5));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::insufficient_quadrature);
  }
}

TEST(AssembleLinear, NaiveProjectionUnstableForAllDegrees) {
  for (std::size_t m = 1; m <= 11; ++m) {
    const GalerkinMatrix g =
        assemble_linear(paper_linear_system(), OrthonormalBasis(Density::uniform(), m), uniform20());
    EXPECT_GT(spectral_abscissa(g.matrix()), 0.0) << "d=" << m - 1;
  }
}

TEST(AssembleLinear, InvariantUnderConstantTransformation) {
  std::mt19937_64 rng(77);
  Matrix t0 = random_matrix(rng, 3);
  for (std::size_t i = 0; i < 3; ++i) t0(i, i) += 4.0;
  const Matrix t0_inv = lu_solve(t0, Matrix::identity(3));
  const auto lin = paper_linear_system();
  const ParametricLinearSystem transformed{3, [&](double p) { return t0 * lin.matrix(p) * t0_inv; }};
  for (std::size_t m : {1u, 3u, 6u}) {
    const OrthonormalBasis basis(Density::uniform(), m);
    const Spectrum a = eigenvalues(assemble_linear(lin, basis, uniform20()).matrix());
    const Spectrum b = eigenvalues(assemble_linear(transformed, basis, uniform20()).matrix());
    EXPECT_LE(spectrum_distance(a, b), 1e-8);
  }
}

// --- stabilize_point ----------------------------------------------------------

TEST(StabilizePoint, NegativeIdentity) {
  const StabilizedPoint sp = stabilize_point(-1.0 * Matrix::identity(2), Matrix::identity(2));
  EXPECT_LE(max_abs_diff(sp.lyapunov, 0.5 * Matrix::identity(2)), 1e-15);
  EXPECT_LE(max_abs_diff(sp.factor, (1.0 / std::sqrt(2.0)) * Matrix::identity(2)), 1e-15);
  EXPECT_LE(max_abs_diff(sp.transformed, -1.0 * Matrix::identity(2)), 1e-15);
}

TEST(StabilizePoint, UpperTriangularExample) {
  const Matrix a{{-1.0, 4.0}, {0.0, -1.0}};
  const Matrix q = Matrix::identity(2);
  const StabilizedPoint sp = stabilize_point(a, q);
  EXPECT_LE(max_abs_diff(sp.lyapunov, Matrix{{0.5, 1.0}, {1.0, 4.5}}), 1e-14);
  const Matrix l_inv = lower_triangular_inverse(sp.factor);
  const Matrix sym = sp.transformed + sp.transformed.transposed();
  EXPECT_LE(max_abs_diff(sym, -1.0 * (l_inv * q * l_inv.transposed())), 1e-12);
  EXPECT_LT(max_symmetric_eigenvalue(symmetric_part(sp.transformed)), 0.0);
  // a itself has a symmetric part with a positive eigenvalue
  EXPECT_GT(max_symmetric_eigenvalue(symmetric_part(a)), 0.0);
}

TEST(StabilizePoint, UnstableMatrixFails) {
  EXPECT_THROW(stabilize_point(Matrix{{0.0, 1.0}, {-1.0, 0.0}}, Matrix::identity(2)), Error);
  try {
    stabilize_point(Matrix{{1.0, 0.0}, {0.0, -2.0}}, Matrix::identity(2), 0.25);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::not_positive_definite);
    EXPECT_EQ(e.parameter().value_or(0.0), 0.25);
  }
}

TEST(StabilizePoint, InvariantsAtEveryQuadratureNode) {
  const auto lin = paper_linear_system();
  const Matrix q = Matrix::identity(3);
  for (const Density d : {Density::uniform(), Density::beta(3.0, 2.0)}) {
    const QuadratureRule rule(d, 20);
    const auto nodes = stabilize_nodes(lin.matrix, q, rule);
    ASSERT_EQ(nodes.size(), 20u);
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      const Matrix a = lin.matrix(rule.nodes()[k]);
      const StabilizedPoint& sp = nodes[k];
      EXPECT_EQ(sp.parameter.value_or(NAN), rule.nodes()[k]);
      EXPECT_LE(max_norm(a.transposed() * sp.lyapunov + sp.lyapunov * a + q), 1e-10);
      EXPECT_LE(max_abs_diff(sp.factor * sp.factor.transposed(), sp.lyapunov),
                1e-12 * max_norm(sp.lyapunov));
      EXPECT_LE(max_abs_diff(sp.transformed, sp.factor.transposed() * a * sp.factor_inv_t), 1e-10);
      const Matrix l_inv = sp.factor_inv_t.transposed();
      EXPECT_LE(max_abs_diff(sp.transformed + sp.transformed.transposed(),
                             -1.0 * (l_inv * q * sp.factor_inv_t)),
                1e-9);
      EXPECT_LE(spectrum_distance(eigenvalues(a), eigenvalues(sp.transformed)), 1e-8);
      EXPECT_LT(max_symmetric_eigenvalue(symmetric_part(sp.transformed)), 0.0);
    }
  }
}

TEST(StabilizeNodes, FailureNamesTheNode) {
  const ParametricLinearSystem bad{2, [](double p) { return Matrix{{p, 0.0}, {0.0, -1.0}}; }};
  try {
    stabilize_nodes(bad.matrix, Matrix::identity(2), QuadratureRule(Density::uniform(), 4));
    FAIL();
  } catch (const Error& e) {
    // Nodes ascend; the first node with p > 0 is the third.
    EXPECT_EQ(e.index().value_or(99), 2u);
    EXPECT_GT(e.parameter().value_or(-1.0), 0.0);
    EXPECT_NE(std::string(e.what()).find("quadrature node 3"), std::string::npos);
  }
}

TEST(CholeskyFactor, SampledSmoothnessAlongParameter) {
  // Adjacent differences of L(p) scale like h: the ratio max|ΔL|/h stays put
  // when the grid is refined.
  const auto lin = paper_linear_system();
  auto lipschitz_estimate = [&](std::size_t points) {
    const auto grid = parameter_grid(points);
    const double h = grid[1] - grid[0];
    Matrix prev = stabilize_point(lin.matrix(grid[0]), Matrix::identity(3)).factor;
    double worst = 0.0;
    for (std::size_t i = 1; i < grid.size(); ++i) {
      Matrix cur = stabilize_point(lin.matrix(grid[i]), Matrix::identity(3)).factor;
      worst = std::max(worst, max_abs_diff(cur, prev));
      prev = std::move(cur);
    }
    return worst / h;
  };
  const double coarse = lipschitz_estimate(1001);
  const double fine = lipschitz_estimate(2001);
  EXPECT_TRUE(std::isfinite(coarse));
  EXPECT_NEAR(fine / coarse, 1.0, 0.05);
}

// --- assemble_stabilized_linear --------------------------------------------

TEST(AssembleStabilized, NegativeDefiniteForAllDegreesBothDensities) {
  for (const Density d : {Density::uniform(), Density::beta(3.0, 2.0)}) {
    const QuadratureRule rule(d, 20);
    for (std::size_t m = 1; m <= 11; ++m) {
      const GalerkinMatrix g = assemble_stabilized_linear(paper_linear_system(), Matrix::identity(3),
                                                          OrthonormalBasis(d, m), rule);
      EXPECT_LT(spectral_abscissa(g.matrix()), 0.0);
      EXPECT_LT(max_symmetric_eigenvalue(symmetric_part(g.matrix())), -1e-12);
    }
  }
}

TEST(AssembleStabilized, SingleBlockIsExpectedTransform) {
  const auto lin = paper_linear_system();
  const Matrix q = Matrix::identity(3);
  const GalerkinMatrix g = assemble_stabilized_linear(lin, q, OrthonormalBasis(Density::uniform(), 1), uniform20());
  Matrix expected(3, 3), expected_sym(3, 3);
  for (std::size_t k = 0; k < 20; ++k) {
    const StabilizedPoint sp = stabilize_point(lin.matrix(uniform20().nodes()[k]), q);
    expected.add_scaled_block(0, 0, uniform20().weights()[k], sp.transformed);
    const Matrix l_inv = sp.factor_inv_t.transposed();
    expected_sym.add_scaled_block(0, 0, -uniform20().weights()[k], l_inv * q * sp.factor_inv_t);
  }
  EXPECT_LE(max_abs_diff(g.matrix(), expected), 1e-13);
  EXPECT_LE(max_abs_diff(g.matrix() + g.matrix().transposed(), expected_sym), 1e-12);
  EXPECT_LT(max_symmetric_eigenvalue(expected_sym), 0.0);
}

// --- nonlinear ------------------------------------------------------------

TEST(NonlinearGalerkin, ShiftedRhsVanishesAtZero) {
  const auto shifted = shift_system(paper_quadratic_system());
  for (std::size_t m : {1u, 4u, 11u}) {
    const Vector zero(2 * m, 0.0);
    EXPECT_LE(max_norm(nonlinear_galerkin_rhs(shifted, OrthonormalBasis(Density::uniform(), m),
                                              uniform20(), zero)),
              1e-12);
  }
}

TEST(NonlinearGalerkin, LinearSystemMatchesLinearAssembly) {
  std::mt19937_64 rng(5);
  const auto lin = paper_linear_system();
  for (std::size_t m : {1u, 3u, 7u}) {
    const OrthonormalBasis basis(Density::uniform(), m);
    const Matrix a_hat = assemble_linear(lin, basis, uniform20()).matrix();
    const NonlinearGalerkin g(as_nonlinear(lin), basis, uniform20());
    const Vector v = random_vector(rng, 3 * m, 1.0);
    const Vector expected = a_hat * v;
    const Vector got = g.rhs(v);
    for (std::size_t i = 0; i < v.size(); ++i) EXPECT_NEAR(got[i], expected[i], 1e-12);
    EXPECT_LE(max_abs_diff(g.jacobian(v), a_hat), 1e-12);
  }
}

TEST(NonlinearGalerkin, JacobianMatchesFiniteDifferences) {
  std::mt19937_64 rng(6);
  const auto sys = paper_quadratic_system();
  for (std::size_t m : {1u, 2u, 4u, 7u}) {
    const NonlinearGalerkin g(sys, OrthonormalBasis(Density::uniform(), m), uniform20());
    const Vector v = random_vector(rng, 2 * m, 1.0);
    const Matrix fd = finite_difference([&](std::span<const double> x) { return g.rhs(x); }, v);
    EXPECT_LE(max_abs_diff(g.jacobian(v), fd), 1e-5) << "m=" << m;
  }
}

TEST(NonlinearGalerkin, RejectsWrongLengthAndTooFewNodes) {
  const NonlinearGalerkin g(paper_quadratic_system(), OrthonormalBasis(Density::uniform(), 3), uniform20());
  EXPECT_EQ(g.dimension(), 6u);
  EXPECT_THROW(g.rhs(Vector(5, 0.0)), Error);
  EXPECT_THROW(NonlinearGalerkin(paper_quadratic_system(), OrthonormalBasis(Density::uniform(), 4),
                                 QuadratureRule(Density::uniform(), 3)),
               Error);
}

TEST(StabilizedNonlinear, ZeroIsEquilibrium) {
  const auto shifted = shift_system(paper_quadratic_system());
  for (std::size_t m : {1u, 4u, 11u}) {
    const Vector zero(2 * m, 0.0);
    EXPECT_LE(max_norm(stabilized_nonlinear_rhs(shifted, Matrix::identity(2),
                                                OrthonormalBasis(Density::uniform(), m), uniform20(),
                                                zero)),
              1e-12);
  }
}

TEST(StabilizedNonlinear, LinearSystemMatchesStabilizedAssembly) {
  std::mt19937_64 rng(8);
  const auto lin = paper_linear_system();
  for (std::size_t m : {1u, 4u}) {
    const OrthonormalBasis basis(Density::uniform(), m);
    const Matrix b_hat =
        assemble_stabilized_linear(lin, Matrix::identity(3), basis, uniform20()).matrix();
    const StabilizedNonlinearGalerkin g(shift_system(as_nonlinear(lin)), Matrix::identity(3), basis,
                                        uniform20());
    const Vector y = random_vector(rng, 3 * m, 1.0);
    const Vector expected = b_hat * y;
    const Vector got = g.rhs(y);
    for (std::size_t i = 0; i < y.size(); ++i) EXPECT_NEAR(got[i], expected[i], 1e-12);
    EXPECT_LE(max_abs_diff(g.jacobian(y), b_hat), 1e-12);
  }
}

TEST(StabilizedNonlinear, JacobianMatchesFiniteDifferencesAndIsStableAtZero) {
  std::mt19937_64 rng(10);
  const auto shifted = shift_system(paper_quadratic_system());
  for (std::size_t m = 2; m <= 11; ++m) {
    const StabilizedNonlinearGalerkin g(shifted, Matrix::identity(2),
                                        OrthonormalBasis(Density::uniform(), m), uniform20());
    ASSERT_EQ(g.node_factors().size(), 20u);
    const Vector zero(2 * m, 0.0);
    EXPECT_LT(spectral_abscissa(g.jacobian(zero)), 0.0) << "d=" << m - 1;
    const Vector y = random_vector(rng, 2 * m, 0.1);
    const Matrix fd = finite_difference([&](std::span<const double> x) { return g.rhs(x); }, y);
    EXPECT_LE(max_abs_diff(g.jacobian(y), fd), 1e-5);
  }
}

// --- reconstruct ------------------------------------------------------------

TEST(Reconstruct, ConstantCoefficient) {
  const OrthonormalBasis basis(Density::beta(3.0, 2.0), 4);
  Vector v(8, 0.0);
  v[0] = 2.5;
  v[1] = -1.0;
  for (double p : {-0.9, 0.0, 0.6}) {
    const Vector x = reconstruct(v, basis, p);
    EXPECT_DOUBLE_EQ(x[0], 2.5);
    EXPECT_DOUBLE_EQ(x[1], -1.0);
  }
}

TEST(Reconstruct, ProjectedSineCosine) {
  const OrthonormalBasis basis(Density::uniform(), 6);
  const auto sys = paper_quadratic_system();
  const Vector v = project_equilibrium(sys, basis, uniform20());
  double err = 0.0;
  for (double p : parameter_grid(201)) {
    const Vector x = reconstruct(v, basis, p);
    err = std::max({err, std::abs(x[0] - std::sin(p)), std::abs(x[1] - std::cos(p))});
  }
  EXPECT_LT(err, 1e-3);
}

TEST(Reconstruct, DimensionMismatch) {
  const OrthonormalBasis basis(Density::uniform(), 3);
  EXPECT_THROW(reconstruct(Vector(7, 0.0), basis, 0.0), Error);
  EXPECT_THROW(reconstruct(Vector{}, basis, 0.0), Error);
}
