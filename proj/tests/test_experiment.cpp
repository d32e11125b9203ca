#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sgstab/error.hpp"
#include "sgstab/experiment.hpp"

using namespace sgstab;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("sgstab_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

std::string read_all(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  for (std::string cell; std::getline(ss, cell, ',');) out.push_back(cell);
  return out;
}

ErrorCode parse_error_code(const std::string& text, std::string* message = nullptr) {
  try {
    parse_config_text(text);
  } catch (const Error& e) {
    if (message) *message = e.what();
    return e.code();
  }
  return ErrorCode::usage;  // sentinel: no error raised
}

}  // namespace

TEST(ParseConfig, MinimalUsesDefaults) {
  const auto cfg = parse_config_text(R"({"system": "paper-linear", "density": "uniform"})");
  EXPECT_EQ(cfg.system, SystemName::paper_linear);
  EXPECT_EQ(cfg.density.kind(), Density::Kind::uniform);
  EXPECT_EQ(cfg.degree_min, 0);
  EXPECT_EQ(cfg.degree_max, 10);
  EXPECT_EQ(cfg.quad_nodes, 20u);
  EXPECT_EQ(cfg.variant, Variant::original);
  EXPECT_FALSE(cfg.ivp);
}

TEST(ParseConfig, BetaDensityAndIvp) {
  const auto cfg = parse_config_text(R"({
    "system": "paper-quadratic", "density": "beta", "alpha": 3, "beta": 2,
    "degree_max": 2, "variant": "stabilized",
    "ivp": {"t_end": 2.0, "step": 0.1, "initial": [1, 0, 0, 0, 0, 0]}})");
  EXPECT_EQ(cfg.density.kind(), Density::Kind::beta);
  EXPECT_DOUBLE_EQ(cfg.density.alpha(), 3.0);
  EXPECT_DOUBLE_EQ(cfg.density.beta(), 2.0);
  ASSERT_TRUE(cfg.ivp);
  EXPECT_EQ(cfg.ivp->initial, IvpConfig::Initial::explicit_vector);
  EXPECT_EQ(cfg.ivp->explicit_initial.size(), 6u);
}

TEST(ParseConfig, TooFewQuadratureNodes) {
  std::string msg;
  EXPECT_EQ(parse_error_code(R"({"system": "paper-linear", "density": "uniform", "quad_nodes": 5})", &msg),
            ErrorCode::config);
  EXPECT_NE(msg.find("quad_nodes"), std::string::npos);
}

TEST(ParseConfig, BetaParameterOutOfDomain) {
  std::string msg;
  EXPECT_EQ(parse_error_code(
                R"({"system": "paper-linear", "density": "beta", "alpha": -2, "beta": 1})", &msg),
            ErrorCode::config);
  EXPECT_NE(msg.find("alpha"), std::string::npos);
}

TEST(ParseConfig, RejectsBadInputs) {
  for (const char* text : {
           R"({"density": "uniform"})",
           R"({"system": "paper-linear"})",
           R"({"system": "lorenz", "density": "uniform"})",
           R"({"system": "paper-linear", "density": "uniform", "degree_max": 11})",
           R"({"system": "paper-linear", "density": "uniform", "degree_min": 4, "degree_max": 3})",
           R"({"system": "paper-linear", "density": "uniform", "alpha": 1})",
           R"({"system": "paper-linear", "density": "uniform", "colour": "red"})",
           R"({"system": "paper-linear", "density": "uniform", "ivp": {"dt": 0.1}})",
           R"({"system": "paper-linear", "density": "uniform", "degree_max": 1,
               "ivp": {"initial": [1, 2, 3]}})",
           R"({"system": "paper-linear", "density": "uniform", "degree_max": "four"})",
           R"([1, 2])",
           R"({"system": )",
       }) {
    EXPECT_EQ(parse_error_code(text), ErrorCode::config) << text;
  }
}

TEST(ParseConfig, ListsEveryViolation) {
  std::string msg;
  parse_error_code(R"({"system": "nope", "density": "uniform", "degree_max": 12, "extra": 1})", &msg);
  EXPECT_NE(msg.find("nope"), std::string::npos);
  EXPECT_NE(msg.find("degree_max"), std::string::npos);
  EXPECT_NE(msg.find("extra"), std::string::npos);
}

TEST(ParseConfig, MissingFile) {
  try {
    parse_config("/nonexistent/config.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::config);
  }
}

TEST(ParameterGrid, EndpointsAndSpacing) {
  const auto g = parameter_grid(201);
  ASSERT_EQ(g.size(), 201u);
  EXPECT_EQ(g.front(), -1.0);
  EXPECT_EQ(g.back(), 1.0);
  EXPECT_NEAR(g[100], 0.0, 1e-15);
}

TEST(FormatNumber, RoundTrips) {
  for (double x : {0.1, -1.0 / 3.0, 1e-300, 12345.6789}) EXPECT_EQ(std::stod(format_number(x)), x);
}

TEST(AbscissaSweep, CsvShapeAndSigns) {
  auto cfg = parse_config_text(R"({"system": "paper-linear", "density": "uniform"})");
  cfg.output_dir = scratch_dir("sweep");
  const fs::path path = run_abscissa_sweep(cfg);
  EXPECT_EQ(path.filename(), "abscissa_sweep.csv");
  const auto lines = read_lines(path);
  ASSERT_EQ(lines.size(), 12u);
  EXPECT_EQ(lines[0], "degree,alpha_original,alpha_stabilized");
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto cells = split(lines[r]);
    ASSERT_EQ(cells.size(), 3u);
    EXPECT_EQ(std::stoi(cells[0]), static_cast<int>(r) - 1);
    EXPECT_GT(std::stod(cells[1]), 0.0);
    EXPECT_LT(std::stod(cells[2]), 0.0);
  }
  const std::string first = read_all(path);
  run_abscissa_sweep(cfg);
  EXPECT_EQ(read_all(path), first);
}

TEST(AbscissaSweep, WrongSystemIsConfigError) {
  const auto cfg = parse_config_text(R"({"system": "paper-quadratic", "density": "uniform"})");
  try {
    compute_abscissa_sweep(cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::config);
  }
}

TEST(EigenvalueDump, RowsAndConjugatePairs) {
  auto cfg = parse_config_text(
      R"({"system": "paper-linear", "density": "beta", "alpha": 3, "beta": 2, "degree_max": 4})");
  cfg.output_dir = scratch_dir("eigs");
  const auto lines = read_lines(run_eigenvalue_dump(cfg));
  ASSERT_FALSE(lines.empty());
  EXPECT_EQ(lines[0], "variant,degree,index,real,imag");
  std::size_t expected_rows = 0;
  for (int d = 0; d <= 4; ++d) expected_rows += 2 * 3 * (d + 1);
  EXPECT_EQ(lines.size(), expected_rows + 1);

  const auto sets = compute_eigenvalue_dump(cfg);
  ASSERT_EQ(sets.size(), 10u);
  for (const auto& set : sets) {
    EXPECT_EQ(set.spectrum.size(), 3u * (set.degree + 1));
    for (const Complex& z : set.spectrum) {
      if (z.imag() == 0.0) continue;
      bool found = false;
      for (const Complex& w : set.spectrum) found |= (w == std::conj(z));
      EXPECT_TRUE(found);
    }
  }
  EXPECT_EQ(sets.front().variant, Variant::original);
  EXPECT_EQ(sets.back().variant, Variant::stabilized);
}

TEST(EquilibriumStudy, CsvShapes) {
  auto cfg = parse_config_text(
      R"({"system": "paper-quadratic", "density": "uniform", "degree_min": 1, "degree_max": 3})");
  cfg.output_dir = scratch_dir("equilibrium");
  const auto paths = run_equilibrium_study(cfg);
  ASSERT_EQ(paths.size(), 2u);
  const auto curves = read_lines(paths[0]);
  EXPECT_EQ(curves[0], "degree,p,x1,x2");
  EXPECT_EQ(curves.size(), 3 * kCurvePoints + 1);
  const auto abscissae = read_lines(paths[1]);
  EXPECT_EQ(abscissae[0], "degree,alpha_original,alpha_shifted,alpha_stabilized");
  ASSERT_EQ(abscissae.size(), 4u);
  for (std::size_t r = 1; r < abscissae.size(); ++r) {
    const auto cells = split(abscissae[r]);
    ASSERT_EQ(cells.size(), 4u);
    for (std::size_t c = 1; c < 4; ++c) EXPECT_TRUE(std::isfinite(std::stod(cells[c])));
    EXPECT_LT(std::stod(cells[3]), 0.0);
  }
  for (const auto& r : compute_equilibrium_study(cfg)) {
    EXPECT_TRUE(r.newton.converged);
    EXPECT_LT(r.newton.residual, 1e-10);
  }
}

TEST(Ivp, CsvColumnsAndStabilizedDecay) {
  auto cfg = parse_config_text(R"({"system": "paper-quadratic", "density": "uniform",
      "degree_min": 3, "degree_max": 3, "variant": "stabilized",
      "ivp": {"t_end": 1.0, "step": 0.01}})");
  cfg.output_dir = scratch_dir("ivp");
  const fs::path path = run_ivp(cfg);
  const auto lines = read_lines(path);
  ASSERT_EQ(lines.size(), 102u);
  EXPECT_EQ(lines[0], "t,c1,c2,c3,c4,c5,c6,c7,c8");
  EXPECT_EQ(split(lines[1]).size(), 9u);
  EXPECT_EQ(split(lines[1])[1], "1");
  const Trajectory t = compute_ivp(cfg);
  double first = 0.0, last = 0.0;
  for (double x : t.states.front()) first = std::max(first, std::abs(x));
  for (double x : t.states.back()) last = std::max(last, std::abs(x));
  EXPECT_LT(last, first);
}

TEST(Ivp, NearEquilibriumStartForOriginal) {
  const auto cfg = parse_config_text(R"({"system": "paper-quadratic", "density": "uniform",
      "degree_min": 2, "degree_max": 2, "ivp": {"t_end": 0.02, "step": 0.01}})");
  const Trajectory t = compute_ivp(cfg);
  ASSERT_EQ(t.states.size(), 3u);
  EXPECT_EQ(t.states.front().size(), 6u);
}

TEST(Ivp, MissingBlockIsConfigError) {
  const auto cfg = parse_config_text(R"({"system": "paper-quadratic", "density": "uniform"})");
  EXPECT_THROW(compute_ivp(cfg), Error);
}
