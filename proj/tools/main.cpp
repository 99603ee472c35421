#include <CLI11.hpp>

#include "sublin/config.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "Certify, construct, and solve positive solutions of the sublinear "
      "Dirichlet problem -u'' + b u' + c u = m(x) u^p with sign-changing m"};
  app.require_subcommand(1);

  sublin::RunConfig cfg;
  std::string config_path;
  std::string out_dir = "out";

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "problem config (JSON)")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--grid", cfg.grid, "interior grid nodes");
    sub->add_option("--tol", cfg.solver_tol, "solver residual tolerance");
    sub->add_option("--sweep", cfg.sweep, "FIELD:LO:HI:STEPS parameter sweep");
  };

  for (const char* name : {"certify", "solve", "subsolution", "pstar", "sweep",
                           "nonlinearity"})
    add_common(app.add_subcommand(name));

  CLI11_PARSE(app, argc, argv);

  cfg.subcommand = app.get_subcommands().front()->get_name();
  cfg.config_path = config_path;
  cfg.out_dir = out_dir;
  return sublin::run(cfg);
}
