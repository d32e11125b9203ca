#include "sgstab/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>

#include <json.hpp>

#include "sgstab/error.hpp"
#include "sgstab/galerkin.hpp"
#include "sgstab/model.hpp"

namespace sgstab {

using json = nlohmann::json;

std::string_view to_string(SystemName s) noexcept {
  return s == SystemName::paper_linear ? "paper-linear" : "paper-quadratic";
}

std::string_view to_string(Variant v) noexcept {
  switch (v) {
    case Variant::original: return "original";
    case Variant::shifted: return "shifted";
    case Variant::stabilized: return "stabilized";
  }
  return "original";
}

// ---------------------------------------------------------------------------
// Config parsing

namespace {

class Violations {
 public:
  void add(std::string message) { items_.push_back(std::move(message)); }
  bool empty() const noexcept { return items_.empty(); }
  [[noreturn]] void raise() const {
    std::string text = std::to_string(items_.size()) + " violation(s)";
    for (const auto& item : items_) text += "\n  - " + item;
    throw Error(ErrorCode::config, text);
  }

 private:
  std::vector<std::string> items_;
};

std::optional<double> read_number(const json& obj, const char* key, Violations& v) {
  auto it = obj.find(key);
  if (it == obj.end()) return std::nullopt;
  if (!it->is_number()) {
    v.add(std::string("'") + key + "' must be a number");
    return std::nullopt;
  }
  const double x = it->get<double>();
  if (!std::isfinite(x)) {
    v.add(std::string("'") + key + "' must be finite");
    return std::nullopt;
  }
  return x;
}

std::optional<long long> read_integer(const json& obj, const char* key, Violations& v) {
  auto it = obj.find(key);
  if (it == obj.end()) return std::nullopt;
  if (!it->is_number_integer()) {
    v.add(std::string("'") + key + "' must be an integer");
    return std::nullopt;
  }
  return it->get<long long>();
}

std::optional<std::string> read_string(const json& obj, const char* key, Violations& v) {
  auto it = obj.find(key);
  if (it == obj.end()) return std::nullopt;
  if (!it->is_string()) {
    v.add(std::string("'") + key + "' must be a string");
    return std::nullopt;
  }
  return it->get<std::string>();
}

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where, Violations& v) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) v.add("unknown key '" + key + "'" + where);
  }
}

std::size_t system_dimension(SystemName s) { return s == SystemName::paper_linear ? 3 : 2; }

}  // namespace

ExperimentConfig parse_config_text(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::config, std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::config, "top level must be a JSON object");

  Violations v;
  ExperimentConfig cfg;
  reject_unknown_keys(doc,
                      {"system", "density", "alpha", "beta", "degree_min", "degree_max",
                       "quad_nodes", "variant", "ivp", "output_dir", "newton_tolerance",
                       "newton_max_iterations"},
                      "", v);

  bool system_ok = false;
  if (auto s = read_string(doc, "system", v)) {
    if (*s == "paper-linear") {
      cfg.system = SystemName::paper_linear;
      system_ok = true;
    } else if (*s == "paper-quadratic") {
      cfg.system = SystemName::paper_quadratic;
      system_ok = true;
    } else {
      v.add("unknown system '" + *s + "' (expected paper-linear or paper-quadratic)");
    }
  } else if (!doc.contains("system")) {
    v.add("missing required key 'system'");
  }

  const auto alpha = read_number(doc, "alpha", v);
  const auto beta = read_number(doc, "beta", v);
  if (auto d = read_string(doc, "density", v)) {
    if (*d == "uniform") {
      cfg.density = Density::uniform();
      if (doc.contains("alpha") || doc.contains("beta")) {
        v.add("'alpha'/'beta' are only valid with density 'beta'");
      }
    } else if (*d == "beta") {
      if (!doc.contains("alpha")) v.add("density 'beta' requires 'alpha'");
      if (!doc.contains("beta")) v.add("density 'beta' requires 'beta'");
      if (alpha && beta) {
        try {
          cfg.density = Density::beta(*alpha, *beta);
        } catch (const Error& e) {
          v.add(e.what());
        }
      }
    } else {
      v.add("unknown density '" + *d + "' (expected uniform or beta)");
    }
  } else if (!doc.contains("density")) {
    v.add("missing required key 'density'");
  }

  bool degrees_ok = true;
  if (auto dmin = read_integer(doc, "degree_min", v)) {
    if (*dmin < 0 || *dmin > kMaxDegree) {
      v.add("'degree_min' must lie in 0.." + std::to_string(kMaxDegree));
      degrees_ok = false;
    } else {
      cfg.degree_min = static_cast<int>(*dmin);
    }
  }
  if (auto dmax = read_integer(doc, "degree_max", v)) {
    if (*dmax < 0 || *dmax > kMaxDegree) {
      v.add("'degree_max' must lie in 0.." + std::to_string(kMaxDegree));
      degrees_ok = false;
    } else {
      cfg.degree_max = static_cast<int>(*dmax);
    }
  }
  if (degrees_ok && cfg.degree_min > cfg.degree_max) {
    v.add("'degree_min' must not exceed 'degree_max'");
  }
  if (auto k = read_integer(doc, "quad_nodes", v)) {
    if (*k < 1) {
      v.add("'quad_nodes' must be positive");
    } else {
      cfg.quad_nodes = static_cast<std::size_t>(*k);
    }
  }
  if (degrees_ok && cfg.quad_nodes < static_cast<std::size_t>(cfg.degree_max) + 1) {
    v.add("'quad_nodes' (" + std::to_string(cfg.quad_nodes) + ") must be at least degree_max + 1 (" +
          std::to_string(cfg.degree_max + 1) + ")");
  }

  if (auto var = read_string(doc, "variant", v)) {
    if (*var == "original") {
      cfg.variant = Variant::original;
    } else if (*var == "shifted") {
      cfg.variant = Variant::shifted;
    } else if (*var == "stabilized") {
      cfg.variant = Variant::stabilized;
    } else {
      v.add("unknown variant '" + *var + "' (expected original, shifted or stabilized)");
    }
  }

  if (auto tol = read_number(doc, "newton_tolerance", v)) {
    if (*tol > 0.0) {
      cfg.newton.tolerance = *tol;
    } else {
      v.add("'newton_tolerance' must be positive");
    }
  }
  if (auto it = read_integer(doc, "newton_max_iterations", v)) {
    if (*it >= 1) {
      cfg.newton.max_iterations = static_cast<std::size_t>(*it);
    } else {
      v.add("'newton_max_iterations' must be at least 1");
    }
  }

  if (auto out = read_string(doc, "output_dir", v)) cfg.output_dir = *out;

  if (auto it = doc.find("ivp"); it != doc.end()) {
    if (!it->is_object()) {
      v.add("'ivp' must be an object");
    } else {
      const json& ivp = *it;
      IvpConfig ic;
      reject_unknown_keys(ivp, {"t_end", "step", "initial", "perturbation"}, " in 'ivp'", v);
      if (auto t = read_number(ivp, "t_end", v)) ic.t_end = *t;
      if (auto h = read_number(ivp, "step", v)) ic.step = *h;
      if (auto pert = read_number(ivp, "perturbation", v)) ic.perturbation = *pert;
      if (!(ic.step > 0.0)) v.add("'ivp.step' must be positive");
      if (!(ic.t_end >= ic.step)) v.add("'ivp.t_end' must be at least 'ivp.step'");
      if (auto init = ivp.find("initial"); init != ivp.end()) {
        if (init->is_string()) {
          const auto s = init->get<std::string>();
          if (s == "near-equilibrium") {
            ic.initial = IvpConfig::Initial::near_equilibrium;
          } else if (s == "unit-first-coefficient") {
            ic.initial = IvpConfig::Initial::unit_first_coefficient;
          } else {
            v.add("unknown 'ivp.initial' '" + s +
                  "' (expected near-equilibrium, unit-first-coefficient or an array)");
          }
        } else if (init->is_array()) {
          bool numeric = true;
          for (const auto& x : *init) {
            if (!x.is_number() || !std::isfinite(x.get<double>())) {
              numeric = false;
              break;
            }
            ic.explicit_initial.push_back(x.get<double>());
          }
          if (!numeric) {
            v.add("'ivp.initial' array must contain finite numbers only");
          } else {
            ic.initial = IvpConfig::Initial::explicit_vector;
            if (system_ok && degrees_ok) {
              const std::size_t expected =
                  static_cast<std::size_t>(cfg.degree_max + 1) * system_dimension(cfg.system);
              if (ic.explicit_initial.size() != expected) {
                v.add("'ivp.initial' has " + std::to_string(ic.explicit_initial.size()) +
                      " entries, expected " + std::to_string(expected));
              }
            }
          }
        } else {
          v.add("'ivp.initial' must be a string or an array of numbers");
        }
      }
      cfg.ivp = ic;
    }
  }

  if (!v.empty()) v.raise();
  return cfg;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::config, "cannot open config file '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config_text(text.str());
}

// ---------------------------------------------------------------------------
// Computations

namespace {

void require_system(const ExperimentConfig& cfg, SystemName expected, const char* experiment) {
  if (cfg.system != expected) {
    throw Error(ErrorCode::config, std::string(experiment) + " requires system '" +
                                       std::string(to_string(expected)) + "', config names '" +
                                       std::string(to_string(cfg.system)) + "'");
  }
}

template <class Fn>
auto at_degree(int degree, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.code(), "degree " + std::to_string(degree) + ": " + e.message(), e.index(),
                e.parameter());
  }
}

NewtonReport galerkin_equilibrium(const NonlinearGalerkin& galerkin, const Vector& guess,
                                  const NewtonOptions& options, int degree) {
  NewtonReport report = newton_solve([&](std::span<const double> v) { return galerkin.rhs(v); },
                                     [&](std::span<const double> v) { return galerkin.jacobian(v); },
                                     guess, options);
  if (!report.converged) {
    throw Error(ErrorCode::non_convergence,
                "Newton iteration for the Galerkin equilibrium at degree " + std::to_string(degree) +
                    " stopped after " + std::to_string(report.iterations) +
                    " iterations with residual " + std::to_string(report.residual));
  }
  return report;
}

}  // namespace

std::vector<double> parameter_grid(std::size_t points) {
  std::vector<double> grid(points);
  if (points == 1) {
    grid[0] = 0.0;
    return grid;
  }
  const double denom = static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) grid[i] = -1.0 + 2.0 * static_cast<double>(i) / denom;
  grid.back() = 1.0;
  return grid;
}

std::vector<AbscissaRow> compute_abscissa_sweep(const ExperimentConfig& cfg) {
  require_system(cfg, SystemName::paper_linear, "abscissa-sweep");
  const ParametricLinearSystem sys = paper_linear_system();
  const QuadratureRule rule(cfg.density, cfg.quad_nodes);
  const Matrix q = Matrix::identity(sys.dimension);
  std::vector<AbscissaRow> rows;
  for (int d = cfg.degree_min; d <= cfg.degree_max; ++d) {
    rows.push_back(at_degree(d, [&] {
      const OrthonormalBasis basis(cfg.density, static_cast<std::size_t>(d) + 1);
      return AbscissaRow{
          d, spectral_abscissa(assemble_linear(sys, basis, rule).matrix()),
          spectral_abscissa(assemble_stabilized_linear(sys, q, basis, rule).matrix())};
    }));
  }
  return rows;
}

std::vector<EigenvalueSet> compute_eigenvalue_dump(const ExperimentConfig& cfg) {
  require_system(cfg, SystemName::paper_linear, "eigs");
  const ParametricLinearSystem sys = paper_linear_system();
  const QuadratureRule rule(cfg.density, cfg.quad_nodes);
  const Matrix q = Matrix::identity(sys.dimension);
  std::vector<EigenvalueSet> original, stabilized;
  for (int d = cfg.degree_min; d <= cfg.degree_max; ++d) {
    at_degree(d, [&] {
      const OrthonormalBasis basis(cfg.density, static_cast<std::size_t>(d) + 1);
      original.push_back({Variant::original, d, eigenvalues(assemble_linear(sys, basis, rule).matrix())});
      stabilized.push_back(
          {Variant::stabilized, d,
           eigenvalues(assemble_stabilized_linear(sys, q, basis, rule).matrix())});
      return 0;
    });
  }
  original.insert(original.end(), stabilized.begin(), stabilized.end());
  return original;
}

std::vector<EquilibriumResult> compute_equilibrium_study(const ExperimentConfig& cfg) {
  require_system(cfg, SystemName::paper_quadratic, "equilibrium");
  const ParametricNonlinearSystem sys = paper_quadratic_system();
  const ParametricNonlinearSystem shifted = shift_system(sys);
  const QuadratureRule rule(cfg.density, cfg.quad_nodes);
  const Matrix q = Matrix::identity(sys.dimension);
  std::vector<EquilibriumResult> results;
  for (int d = cfg.degree_min; d <= cfg.degree_max; ++d) {
    results.push_back(at_degree(d, [&] {
      const OrthonormalBasis basis(cfg.density, static_cast<std::size_t>(d) + 1);
      const NonlinearGalerkin original(sys, basis, rule);
      EquilibriumResult r{};
      r.degree = d;
      r.newton = galerkin_equilibrium(original, project_equilibrium(sys, basis, rule), cfg.newton, d);
      r.alpha_original = spectral_abscissa(original.jacobian(r.newton.root));

      const Vector zero(original.dimension(), 0.0);
      const NonlinearGalerkin shifted_galerkin(shifted, basis, rule);
      r.alpha_shifted = spectral_abscissa(shifted_galerkin.jacobian(zero));

      const StabilizedNonlinearGalerkin stabilized(shifted, q, basis, rule);
      r.alpha_stabilized = spectral_abscissa(stabilized.jacobian(zero));
      return r;
    }));
  }
  return results;
}

Trajectory compute_ivp(const ExperimentConfig& cfg) {
  require_system(cfg, SystemName::paper_quadratic, "ivp");
  if (!cfg.ivp) throw Error(ErrorCode::config, "ivp requires an 'ivp' block in the config");
  const IvpConfig& ivp = *cfg.ivp;
  const int d = cfg.degree_max;
  return at_degree(d, [&] {
    const ParametricNonlinearSystem sys = paper_quadratic_system();
    const OrthonormalBasis basis(cfg.density, static_cast<std::size_t>(d) + 1);
    const QuadratureRule rule(cfg.density, cfg.quad_nodes);
    const std::size_t dim = basis.size() * sys.dimension;

    VectorField rhs;
    JacobianField jac;
    Vector equilibrium(dim, 0.0);
    if (cfg.variant == Variant::stabilized) {
      auto g = std::make_shared<StabilizedNonlinearGalerkin>(shift_system(sys),
                                                             Matrix::identity(sys.dimension),
                                                             basis, rule);
      rhs = [g](std::span<const double> y) { return g->rhs(y); };
      jac = [g](std::span<const double> y) { return g->jacobian(y); };
    } else {
      auto g = std::make_shared<NonlinearGalerkin>(
          cfg.variant == Variant::shifted ? shift_system(sys) : sys, basis, rule);
      rhs = [g](std::span<const double> v) { return g->rhs(v); };
      jac = [g](std::span<const double> v) { return g->jacobian(v); };
      if (cfg.variant == Variant::original) {
        equilibrium = galerkin_equilibrium(*g, project_equilibrium(sys, basis, rule), cfg.newton, d).root;
      }
    }

    const auto initial = ivp.initial.value_or(cfg.variant == Variant::stabilized
                                                  ? IvpConfig::Initial::unit_first_coefficient
                                                  : IvpConfig::Initial::near_equilibrium);
    Vector x0(dim, 0.0);
    switch (initial) {
      case IvpConfig::Initial::near_equilibrium:
        x0 = equilibrium;
        x0[0] += ivp.perturbation;
        break;
      case IvpConfig::Initial::unit_first_coefficient:
        x0[0] = 1.0;
        break;
      case IvpConfig::Initial::explicit_vector:
        if (ivp.explicit_initial.size() != dim) {
          throw Error(ErrorCode::config, "explicit initial vector has wrong length");
        }
        x0 = ivp.explicit_initial;
        break;
    }
    NewtonOptions inner = cfg.newton;
    return trapezoidal_integrate(rhs, jac, std::move(x0), ivp.t_end, ivp.step, inner);
  });
}

// ---------------------------------------------------------------------------
// CSV output

std::string format_number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

namespace {

class CsvFile {
 public:
  CsvFile(const std::filesystem::path& dir, const std::string& name, const std::string& header)
      : path_(dir / name) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::io, "cannot create output directory '" + dir.string() + "'");
    buffer_ << header << '\n';
  }

  template <class... Ts>
  void row(const Ts&... fields) {
    bool first = true;
    ((buffer_ << (first ? "" : ",") << render(fields), first = false), ...);
    buffer_ << '\n';
  }

  std::filesystem::path commit() {
    std::ofstream out(path_, std::ios::binary | std::ios::trunc);
    out << buffer_.str();
    out.close();
    if (!out) throw Error(ErrorCode::io, "failed to write '" + path_.string() + "'");
    return path_;
  }

  void row_values(double lead, const Vector& values) {
    buffer_ << render(lead);
    for (double x : values) buffer_ << ',' << render(x);
    buffer_ << '\n';
  }

 private:
  static std::string render(double x) {
    if (!std::isfinite(x)) throw Error(ErrorCode::non_convergence, "non-finite value in CSV output");
    return format_number(x);
  }
  static std::string render(int x) { return std::to_string(x); }
  static std::string render(std::size_t x) { return std::to_string(x); }
  static std::string render(std::string_view s) { return std::string(s); }

  std::filesystem::path path_;
  std::ostringstream buffer_;
};

}  // namespace

std::filesystem::path run_abscissa_sweep(const ExperimentConfig& cfg) {
  const auto rows = compute_abscissa_sweep(cfg);
  CsvFile csv(cfg.output_dir, "abscissa_sweep.csv", "degree,alpha_original,alpha_stabilized");
  for (const auto& r : rows) csv.row(r.degree, r.alpha_original, r.alpha_stabilized);
  return csv.commit();
}

std::filesystem::path run_eigenvalue_dump(const ExperimentConfig& cfg) {
  const auto sets = compute_eigenvalue_dump(cfg);
  CsvFile csv(cfg.output_dir, "eigs.csv", "variant,degree,index,real,imag");
  for (const auto& set : sets)
    for (std::size_t i = 0; i < set.spectrum.size(); ++i)
      csv.row(to_string(set.variant), set.degree, i + 1, set.spectrum[i].real(),
              set.spectrum[i].imag());
  return csv.commit();
}

std::vector<std::filesystem::path> run_equilibrium_study(const ExperimentConfig& cfg) {
  const auto results = compute_equilibrium_study(cfg);
  CsvFile curves(cfg.output_dir, "equilibrium_curves.csv", "degree,p,x1,x2");
  CsvFile abscissae(cfg.output_dir, "equilibrium_abscissae.csv",
                    "degree,alpha_original,alpha_shifted,alpha_stabilized");
  const auto grid = parameter_grid(kCurvePoints);
  for (const auto& r : results) {
    const OrthonormalBasis basis(cfg.density, static_cast<std::size_t>(r.degree) + 1);
    for (double p : grid) {
      const Vector x = reconstruct(r.newton.root, basis, p);
      curves.row(r.degree, p, x[0], x[1]);
    }
    abscissae.row(r.degree, r.alpha_original, r.alpha_shifted, r.alpha_stabilized);
  }
  return {curves.commit(), abscissae.commit()};
}

std::filesystem::path run_ivp(const ExperimentConfig& cfg) {
  const Trajectory traj = compute_ivp(cfg);
  std::string header = "t";
  const std::size_t dim = traj.states.front().size();
  for (std::size_t i = 1; i <= dim; ++i) header += ",c" + std::to_string(i);
  CsvFile csv(cfg.output_dir, "ivp.csv", header);
  for (std::size_t k = 0; k < traj.times.size(); ++k) csv.row_values(traj.times[k], traj.states[k]);
  return csv.commit();
}

}  // namespace sgstab
