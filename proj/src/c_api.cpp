#include "sgstab.h"

#include <algorithm>
#include <cstring>
#include <memory>
#include <new>
#include <optional>
#include <string>

#include "sgstab/error.hpp"
#include "sgstab/experiment.hpp"
#include "sgstab/galerkin.hpp"
#include "sgstab/matops.hpp"
#include "sgstab/model.hpp"
#include "sgstab/odesolve.hpp"
#include "sgstab/orthopoly.hpp"

using namespace sgstab;

struct sgs_basis {
  OrthonormalBasis basis;
};

struct sgs_quadrature {
  QuadratureRule rule;
};

struct sgs_system {
  std::string name;
  std::size_t dimension;
  std::optional<ParametricLinearSystem> linear;
  ParametricNonlinearSystem nonlinear;
};

struct sgs_nonlinear_galerkin {
  std::size_t dimension;
  std::shared_ptr<const void> owner;
  VectorField rhs;
  JacobianField jacobian;
  Vector default_guess;
};

struct sgs_trajectory {
  Trajectory trajectory;
};

struct sgs_config {
  ExperimentConfig config;
};

namespace {

thread_local std::string g_last_error;

sgs_status to_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::usage: return SGS_ERR_USAGE;
    case ErrorCode::parameter_domain: return SGS_ERR_PARAMETER_DOMAIN;
    case ErrorCode::singular: return SGS_ERR_SINGULAR;
    case ErrorCode::not_positive_definite: return SGS_ERR_NOT_POSITIVE_DEFINITE;
    case ErrorCode::non_convergence: return SGS_ERR_NON_CONVERGENCE;
    case ErrorCode::no_unique_solution: return SGS_ERR_NO_UNIQUE_SOLUTION;
    case ErrorCode::insufficient_quadrature: return SGS_ERR_INSUFFICIENT_QUADRATURE;
    case ErrorCode::integration: return SGS_ERR_INTEGRATION;
    case ErrorCode::config: return SGS_ERR_CONFIG;
    case ErrorCode::io: return SGS_ERR_IO;
  }
  return SGS_ERR_INTERNAL;
}

sgs_status fail(sgs_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

template <class Fn>
sgs_status guarded(Fn&& fn) noexcept {
  try {
    g_last_error.clear();
    fn();
    return SGS_OK;
  } catch (const Error& e) {
    return fail(to_status(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(SGS_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(SGS_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(SGS_ERR_INTERNAL, "unknown exception");
  }
}

void require(const void* ptr, const char* what) {
  if (ptr == nullptr) throw Error(ErrorCode::usage, std::string(what) + " must not be NULL");
}

Matrix read_matrix(const double* data, std::size_t rows, std::size_t cols) {
  require(data, "matrix pointer");
  Matrix m(rows, cols);
  std::copy(data, data + rows * cols, m.data().begin());
  return m;
}

void write_matrix(const Matrix& m, double* out) {
  if (out != nullptr) std::copy(m.data().begin(), m.data().end(), out);
}

Density make_density(sgs_density_kind kind, double alpha, double beta) {
  switch (kind) {
    case SGS_DENSITY_UNIFORM: return Density::uniform();
    case SGS_DENSITY_BETA: return Density::beta(alpha, beta);
  }
  throw Error(ErrorCode::usage, "unknown density kind");
}

template <class Run>
sgs_status run_experiment(const sgs_config* config, Run&& run) {
  return guarded([&] {
    require(config, "config");
    run(config->config);
  });
}

}  // namespace

extern "C" {

SGS_API unsigned sgs_api_version(void) { return SGS_API_VERSION; }

SGS_API const char* sgs_status_name(sgs_status status) {
  switch (status) {
    case SGS_OK: return "ok";
    case SGS_ERR_USAGE: return "usage";
    case SGS_ERR_PARAMETER_DOMAIN: return "parameter-domain";
    case SGS_ERR_SINGULAR: return "singular";
    case SGS_ERR_NOT_POSITIVE_DEFINITE: return "not-positive-definite";
    case SGS_ERR_NON_CONVERGENCE: return "non-convergence";
    case SGS_ERR_NO_UNIQUE_SOLUTION: return "no-unique-solution";
    case SGS_ERR_INSUFFICIENT_QUADRATURE: return "insufficient-quadrature";
    case SGS_ERR_INTEGRATION: return "integration";
    case SGS_ERR_CONFIG: return "config";
    case SGS_ERR_IO: return "io";
    case SGS_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

SGS_API const char* sgs_last_error_message(void) { return g_last_error.c_str(); }

// Dense kernels --------------------------------------------------------------

SGS_API sgs_status sgs_lu_solve(const double* a, size_t n, const double* b, size_t k, double* x) {
  return guarded([&] {
    require(x, "x");
    write_matrix(lu_solve(read_matrix(a, n, n), read_matrix(b, n, k)), x);
  });
}

SGS_API sgs_status sgs_cholesky(const double* m, size_t n, double* l) {
  return guarded([&] {
    require(l, "l");
    write_matrix(cholesky(read_matrix(m, n, n)), l);
  });
}

SGS_API sgs_status sgs_eigenvalues(const double* a, size_t n, double* re, double* im) {
  return guarded([&] {
    require(re, "re");
    require(im, "im");
    const Spectrum s = eigenvalues(read_matrix(a, n, n));
    for (std::size_t i = 0; i < s.size(); ++i) {
      re[i] = s[i].real();
      im[i] = s[i].imag();
    }
  });
}

SGS_API sgs_status sgs_spectral_abscissa(const double* a, size_t n, double* abscissa) {
  return guarded([&] {
    require(abscissa, "abscissa");
    *abscissa = spectral_abscissa(read_matrix(a, n, n));
  });
}

SGS_API sgs_status sgs_lyapunov_solve(const double* a, const double* q, size_t n, double* m) {
  return guarded([&] {
    require(m, "m");
    write_matrix(lyapunov_solve(read_matrix(a, n, n), read_matrix(q, n, n)), m);
  });
}

SGS_API sgs_status sgs_stabilize_point(const double* a, const double* q, size_t n, double* m,
                                       double* l, double* b) {
  return guarded([&] {
    const StabilizedPoint sp = stabilize_point(read_matrix(a, n, n), read_matrix(q, n, n));
    write_matrix(sp.lyapunov, m);
    write_matrix(sp.factor, l);
    write_matrix(sp.transformed, b);
  });
}

// Bases and rules ------------------------------------------------------------

SGS_API sgs_status sgs_basis_create(sgs_density_kind kind, double alpha, double beta, size_t size,
                                    sgs_basis** out) {
  return guarded([&] {
    require(out, "out");
    *out = nullptr;
    *out = new sgs_basis{OrthonormalBasis(make_density(kind, alpha, beta), size)};
  });
}

SGS_API void sgs_basis_destroy(sgs_basis* basis) { delete basis; }

SGS_API size_t sgs_basis_size(const sgs_basis* basis) {
  return basis == nullptr ? 0 : basis->basis.size();
}

SGS_API sgs_status sgs_basis_evaluate(const sgs_basis* basis, size_t index, double p,
                                      double* value) {
  return guarded([&] {
    require(basis, "basis");
    require(value, "value");
    *value = basis->basis.evaluate(index, p);
  });
}

SGS_API sgs_status sgs_quadrature_create(sgs_density_kind kind, double alpha, double beta,
                                         size_t nodes, sgs_quadrature** out) {
  return guarded([&] {
    require(out, "out");
    *out = nullptr;
    *out = new sgs_quadrature{QuadratureRule(make_density(kind, alpha, beta), nodes)};
  });
}

SGS_API void sgs_quadrature_destroy(sgs_quadrature* rule) { delete rule; }

SGS_API size_t sgs_quadrature_size(const sgs_quadrature* rule) {
  return rule == nullptr ? 0 : rule->rule.size();
}

SGS_API sgs_status sgs_quadrature_get(const sgs_quadrature* rule, double* nodes, double* weights) {
  return guarded([&] {
    require(rule, "rule");
    if (nodes) std::copy(rule->rule.nodes().begin(), rule->rule.nodes().end(), nodes);
    if (weights) std::copy(rule->rule.weights().begin(), rule->rule.weights().end(), weights);
  });
}

// Systems --------------------------------------------------------------------

SGS_API sgs_status sgs_system_create_builtin(const char* name, sgs_system** out) {
  return guarded([&] {
    require(name, "name");
    require(out, "out");
    *out = nullptr;
    const std::string key(name);
    if (key == "paper-linear") {
      auto lin = paper_linear_system();
      *out = new sgs_system{key, lin.dimension, lin, as_nonlinear(lin)};
    } else if (key == "paper-quadratic") {
      auto sys = paper_quadratic_system();
      *out = new sgs_system{key, sys.dimension, std::nullopt, sys};
    } else {
      throw Error(ErrorCode::usage,
                  "unknown built-in system '" + key + "' (expected paper-linear or paper-quadratic)");
    }
  });
}

SGS_API void sgs_system_destroy(sgs_system* system) { delete system; }

SGS_API size_t sgs_system_dimension(const sgs_system* system) {
  return system == nullptr ? 0 : system->dimension;
}

SGS_API int sgs_system_is_linear(const sgs_system* system) {
  return system != nullptr && system->linear.has_value() ? 1 : 0;
}

SGS_API sgs_status sgs_system_matrix(const sgs_system* system, double p, double* a) {
  return guarded([&] {
    require(system, "system");
    require(a, "a");
    write_matrix(system->linear ? system->linear->matrix(p)
                                : equilibrium_jacobian(system->nonlinear, p),
                 a);
  });
}

// Galerkin -------------------------------------------------------------------

SGS_API sgs_status sgs_galerkin_assemble_linear(const sgs_system* system, const sgs_basis* basis,
                                                const sgs_quadrature* rule, int stabilized,
                                                double* out) {
  return guarded([&] {
    require(system, "system");
    require(basis, "basis");
    require(rule, "rule");
    require(out, "out");
    if (!system->linear) {
      throw Error(ErrorCode::usage, "system '" + system->name + "' is not linear");
    }
    const GalerkinMatrix g =
        stabilized ? assemble_stabilized_linear(*system->linear, Matrix::identity(system->dimension),
                                                basis->basis, rule->rule)
                   : assemble_linear(*system->linear, basis->basis, rule->rule);
    write_matrix(g.matrix(), out);
  });
}

SGS_API sgs_status sgs_nonlinear_galerkin_create(const sgs_system* system, const sgs_basis* basis,
                                                 const sgs_quadrature* rule, sgs_variant variant,
                                                 sgs_nonlinear_galerkin** out) {
  return guarded([&] {
    require(system, "system");
    require(basis, "basis");
    require(rule, "rule");
    require(out, "out");
    *out = nullptr;
    auto handle = std::make_unique<sgs_nonlinear_galerkin>();
    const ParametricNonlinearSystem& sys = system->nonlinear;
    switch (variant) {
      case SGS_VARIANT_ORIGINAL:
      case SGS_VARIANT_SHIFTED: {
        auto g = std::make_shared<NonlinearGalerkin>(
            variant == SGS_VARIANT_SHIFTED ? shift_system(sys) : sys, basis->basis, rule->rule);
        handle->rhs = [g](std::span<const double> v) { return g->rhs(v); };
        handle->jacobian = [g](std::span<const double> v) { return g->jacobian(v); };
        handle->dimension = g->dimension();
        handle->default_guess = variant == SGS_VARIANT_ORIGINAL
                                    ? project_equilibrium(sys, basis->basis, rule->rule)
                                    : Vector(g->dimension(), 0.0);
        handle->owner = g;
        break;
      }
      case SGS_VARIANT_STABILIZED: {
        auto g = std::make_shared<StabilizedNonlinearGalerkin>(
            shift_system(sys), Matrix::identity(system->dimension), basis->basis, rule->rule);
        handle->rhs = [g](std::span<const double> v) { return g->rhs(v); };
        handle->jacobian = [g](std::span<const double> v) { return g->jacobian(v); };
        handle->dimension = g->dimension();
        handle->default_guess = Vector(g->dimension(), 0.0);
        handle->owner = g;
        break;
      }
      default:
        throw Error(ErrorCode::usage, "unknown variant");
    }
    *out = handle.release();
  });
}

SGS_API void sgs_nonlinear_galerkin_destroy(sgs_nonlinear_galerkin* galerkin) { delete galerkin; }

SGS_API size_t sgs_nonlinear_galerkin_dimension(const sgs_nonlinear_galerkin* galerkin) {
  return galerkin == nullptr ? 0 : galerkin->dimension;
}

SGS_API sgs_status sgs_nonlinear_galerkin_rhs(const sgs_nonlinear_galerkin* galerkin,
                                              const double* v, double* out) {
  return guarded([&] {
    require(galerkin, "galerkin");
    require(v, "v");
    require(out, "out");
    const Vector r = galerkin->rhs(std::span<const double>(v, galerkin->dimension));
    std::copy(r.begin(), r.end(), out);
  });
}

SGS_API sgs_status sgs_nonlinear_galerkin_jacobian(const sgs_nonlinear_galerkin* galerkin,
                                                   const double* v, double* out) {
  return guarded([&] {
    require(galerkin, "galerkin");
    require(v, "v");
    require(out, "out");
    write_matrix(galerkin->jacobian(std::span<const double>(v, galerkin->dimension)), out);
  });
}

SGS_API sgs_status sgs_nonlinear_galerkin_equilibrium(const sgs_nonlinear_galerkin* galerkin,
                                                      const double* guess, double tolerance,
                                                      size_t max_iterations, double* root,
                                                      size_t* iterations, double* residual) {
  bool converged = true;
  const sgs_status status = guarded([&] {
    require(galerkin, "galerkin");
    require(root, "root");
    Vector x0 = guess ? Vector(guess, guess + galerkin->dimension) : galerkin->default_guess;
    NewtonOptions options;
    options.tolerance = tolerance;
    options.max_iterations = max_iterations;
    const NewtonReport report = newton_solve(galerkin->rhs, galerkin->jacobian, std::move(x0), options);
    std::copy(report.root.begin(), report.root.end(), root);
    if (iterations) *iterations = report.iterations;
    if (residual) *residual = report.residual;
    converged = report.converged;
    if (!converged) {
      g_last_error = "Newton stopped after " + std::to_string(report.iterations) +
                     " iterations with residual " + std::to_string(report.residual);
    }
  });
  if (status == SGS_OK && !converged) return SGS_ERR_NON_CONVERGENCE;
  return status;
}

SGS_API sgs_status sgs_nonlinear_galerkin_integrate(const sgs_nonlinear_galerkin* galerkin,
                                                    const double* x0, double t_end, double h,
                                                    sgs_trajectory** out) {
  return guarded([&] {
    require(galerkin, "galerkin");
    require(x0, "x0");
    require(out, "out");
    *out = nullptr;
    Trajectory t = trapezoidal_integrate(galerkin->rhs, galerkin->jacobian,
                                         Vector(x0, x0 + galerkin->dimension), t_end, h);
    *out = new sgs_trajectory{std::move(t)};
  });
}

SGS_API sgs_status sgs_reconstruct(const double* v, size_t len, const sgs_basis* basis, double p,
                                   double* out) {
  return guarded([&] {
    require(v, "v");
    require(basis, "basis");
    require(out, "out");
    const Vector x = reconstruct(std::span<const double>(v, len), basis->basis, p);
    std::copy(x.begin(), x.end(), out);
  });
}

SGS_API void sgs_trajectory_destroy(sgs_trajectory* trajectory) { delete trajectory; }

SGS_API size_t sgs_trajectory_length(const sgs_trajectory* trajectory) {
  return trajectory == nullptr ? 0 : trajectory->trajectory.times.size();
}

SGS_API size_t sgs_trajectory_state_dimension(const sgs_trajectory* trajectory) {
  if (trajectory == nullptr || trajectory->trajectory.states.empty()) return 0;
  return trajectory->trajectory.states.front().size();
}

SGS_API sgs_status sgs_trajectory_time(const sgs_trajectory* trajectory, size_t index, double* t) {
  return guarded([&] {
    require(trajectory, "trajectory");
    require(t, "t");
    if (index >= trajectory->trajectory.times.size()) {
      throw Error(ErrorCode::usage, "trajectory index out of range");
    }
    *t = trajectory->trajectory.times[index];
  });
}

SGS_API sgs_status sgs_trajectory_state(const sgs_trajectory* trajectory, size_t index,
                                        double* state) {
  return guarded([&] {
    require(trajectory, "trajectory");
    require(state, "state");
    if (index >= trajectory->trajectory.states.size()) {
      throw Error(ErrorCode::usage, "trajectory index out of range");
    }
    const Vector& x = trajectory->trajectory.states[index];
    std::copy(x.begin(), x.end(), state);
  });
}

// Experiments ----------------------------------------------------------------

SGS_API sgs_status sgs_config_load(const char* path, sgs_config** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = nullptr;
    *out = new sgs_config{parse_config(path)};
  });
}

SGS_API sgs_status sgs_config_parse(const char* json_text, sgs_config** out) {
  return guarded([&] {
    require(json_text, "json_text");
    require(out, "out");
    *out = nullptr;
    *out = new sgs_config{parse_config_text(json_text)};
  });
}

SGS_API void sgs_config_destroy(sgs_config* config) { delete config; }

SGS_API sgs_status sgs_config_set_output_dir(sgs_config* config, const char* dir) {
  return guarded([&] {
    require(config, "config");
    require(dir, "dir");
    config->config.output_dir = dir;
  });
}

SGS_API sgs_status sgs_run_abscissa_sweep(const sgs_config* config) {
  return run_experiment(config, [](const ExperimentConfig& c) { run_abscissa_sweep(c); });
}

SGS_API sgs_status sgs_run_eigenvalue_dump(const sgs_config* config) {
  return run_experiment(config, [](const ExperimentConfig& c) { run_eigenvalue_dump(c); });
}

SGS_API sgs_status sgs_run_equilibrium_study(const sgs_config* config) {
  return run_experiment(config, [](const ExperimentConfig& c) { run_equilibrium_study(c); });
}

SGS_API sgs_status sgs_run_ivp(const sgs_config* config) {
  return run_experiment(config, [](const ExperimentConfig& c) { run_ivp(c); });
}

}  // extern "C"
