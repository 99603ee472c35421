#pragma once

#include <filesystem>
#include <string>

#include "sublin/solve.hpp"

namespace sublin {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string subcommand;  // certify | solve | subsolution | pstar | sweep | nonlinearity
  std::filesystem::path config_path;
  std::filesystem::path out_dir{"out"};
  int grid{2000};
  double quadrature_tol{1e-10};
  double solver_tol{1e-6};
  double p_bracket_tol{0.02};
  std::string sweep;  // FIELD:LO:HI:STEPS, empty if unused
};

/// Parse the JSON problem document (text form) into a Problem.
Problem parse_problem_text(const std::string& text);

struct ParsedConfig {
  Problem problem;
  std::optional<NonlinearitySpec> nonlinearity;
  int grid{2000};
  double quadrature_tol{1e-10};
  double solver_tol{1e-6};
  double p_bracket_tol{0.02};
};

ParsedConfig parse_config_file(const std::filesystem::path& path);

/// Execute a run; returns the process exit code (0 Exists/solved, 1 NotExists,
/// 2 Inconclusive, 3 input error) and writes report.json + CSV files.
int run(const RunConfig& config);

}  // namespace sublin
