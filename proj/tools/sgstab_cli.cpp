// Experiment harness: reproduces the linear abscissa/eigenvalue studies and
// the nonlinear equilibrium/IVP studies as CSV files.
//
//   sgstab abscissa-sweep --config cfg.json [--output-dir DIR]
//   sgstab eigs           --config cfg.json [--output-dir DIR]
//   sgstab equilibrium    --config cfg.json [--output-dir DIR]
//   sgstab ivp            --config cfg.json [--output-dir DIR]
//
// Exit codes: 0 success, 2 config/usage error, 3 numerical failure.

#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "sgstab.h"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

int exit_code_for(sgs_status status) {
  switch (status) {
    case SGS_OK: return 0;
    case SGS_ERR_CONFIG:
    case SGS_ERR_USAGE:
    case SGS_ERR_PARAMETER_DOMAIN: return kExitConfig;
    default: return kExitNumerical;
  }
}

int report(sgs_status status, const char* stage) {
  if (status != SGS_OK) {
    std::fprintf(stderr, "sgstab: %s: %s\n", stage, sgs_last_error_message());
  }
  return exit_code_for(status);
}

struct Options {
  std::string config;
  std::string output_dir;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stability-preserving stochastic Galerkin experiments"};
  app.require_subcommand(1);

  struct Command {
    const char* name;
    const char* help;
    sgs_status (*run)(const sgs_config*);
  };
  const Command commands[] = {
      {"abscissa-sweep", "Spectral abscissae of the projected linear system per degree",
       sgs_run_abscissa_sweep},
      {"eigs", "All eigenvalues of the original and stabilized projections",
       sgs_run_eigenvalue_dump},
      {"equilibrium", "Galerkin equilibria of the quadratic system and their stability",
       sgs_run_equilibrium_study},
      {"ivp", "Trapezoidal-rule trajectory of the projected quadratic system", sgs_run_ivp},
  };

  Options opts;
  const Command* selected = nullptr;
  for (const auto& cmd : commands) {
    CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
    sub->add_option("--config", opts.config, "JSON experiment config")->required();
    sub->add_option("--output-dir", opts.output_dir, "Override the config's output_dir");
    sub->callback([&selected, &cmd] { selected = &cmd; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  sgs_config* config = nullptr;
  if (int rc = report(sgs_config_load(opts.config.c_str(), &config), "config"); rc != 0) return rc;
  if (!opts.output_dir.empty()) {
    if (int rc = report(sgs_config_set_output_dir(config, opts.output_dir.c_str()), "config");
        rc != 0) {
      sgs_config_destroy(config);
      return rc;
    }
  }
  const int rc = report(selected->run(config), selected->name);
  sgs_config_destroy(config);
  return rc;
}
