#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sgstab/matops.hpp"
#include "sgstab/odesolve.hpp"
#include "sgstab/orthopoly.hpp"

namespace sgstab {

enum class SystemName { paper_linear, paper_quadratic };
enum class Variant { original, shifted, stabilized };

std::string_view to_string(SystemName s) noexcept;
std::string_view to_string(Variant v) noexcept;

struct IvpConfig {
  enum class Initial { near_equilibrium, unit_first_coefficient, explicit_vector };

  double t_end = 10.0;
  double step = 0.01;
  /// Unset means: unit-first-coefficient for the stabilized variant,
  /// near-equilibrium otherwise.
  std::optional<Initial> initial;
  Vector explicit_initial;
  double perturbation = 1e-3;
};

/// Declarative description of one experiment run, read from a JSON file.
struct ExperimentConfig {
  SystemName system = SystemName::paper_linear;
  Density density = Density::uniform();
  int degree_min = 0;
  int degree_max = 10;
  std::size_t quad_nodes = 20;
  Variant variant = Variant::original;
  std::optional<IvpConfig> ivp;
  std::filesystem::path output_dir = ".";
  NewtonOptions newton;
};

inline constexpr int kMaxDegree = 10;

/// Parses and validates a config; every violation is listed in the thrown
/// ErrorCode::config message.
ExperimentConfig parse_config_text(std::string_view json_text);
ExperimentConfig parse_config(const std::filesystem::path& path);

// In-memory results --------------------------------------------------------

struct AbscissaRow {
  int degree;
  double alpha_original;
  double alpha_stabilized;
};

struct EigenvalueSet {
  Variant variant;  // original or stabilized
  int degree;
  Spectrum spectrum;
};

struct EquilibriumResult {
  int degree;
  NewtonReport newton;  // Galerkin equilibrium of the original projection
  double alpha_original;
  double alpha_shifted;
  double alpha_stabilized;
};

std::vector<AbscissaRow> compute_abscissa_sweep(const ExperimentConfig& config);
std::vector<EigenvalueSet> compute_eigenvalue_dump(const ExperimentConfig& config);
std::vector<EquilibriumResult> compute_equilibrium_study(const ExperimentConfig& config);
/// Runs at degree_max with the configured variant.
Trajectory compute_ivp(const ExperimentConfig& config);

/// Uniform grid of `points` parameter values covering [-1, 1].
std::vector<double> parameter_grid(std::size_t points);
inline constexpr std::size_t kCurvePoints = 201;

// CSV artifacts ------------------------------------------------------------

/// Decimal rendering with 17 significant digits.
std::string format_number(double value);

std::filesystem::path run_abscissa_sweep(const ExperimentConfig& config);
std::filesystem::path run_eigenvalue_dump(const ExperimentConfig& config);
/// Writes equilibrium_curves.csv and equilibrium_abscissae.csv.
std::vector<std::filesystem::path> run_equilibrium_study(const ExperimentConfig& config);
std::filesystem::path run_ivp(const ExperimentConfig& config);

}  // namespace sgstab
