#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "stfem/runs.hpp"

namespace {

// Every value is kept as text and pushed through set_config_key so flag
// overrides and config-file lines are parsed identically.
struct CommonOpts {
  std::string config, method, problem, beta, levels, ref_factor, solver, out;
  CLI::Option *o_config{}, *o_method{}, *o_problem{}, *o_beta{}, *o_levels{}, *o_ref{},
      *o_solver{}, *o_out{};

  void attach(CLI::App* sub) {
    o_config = sub->add_option("--config", config, "key=value config file");
    o_method = sub->add_option("--method", method, "new_mixed | andreev | steinbach");
    o_problem = sub->add_option("--problem", problem, "smooth | singular");
    o_beta = sub->add_option("--beta", beta, "convection strength (>= 0)");
    o_levels = sub->add_option("--levels", levels, "comma-separated mesh levels");
    o_ref = sub->add_option("--ref-factor", ref_factor, "reference refinement factor");
    o_solver = sub->add_option("--solver", solver, "direct | schur_cg");
    o_out = sub->add_option("--out", out, "output file (default: stdout)");
  }

  stfem::RunConfig build() const {
    stfem::RunConfig cfg;
    if (o_config->count()) cfg = stfem::load_config_file(config);
    if (o_method->count()) stfem::set_config_key(cfg, "method", method);
    if (o_problem->count()) stfem::set_config_key(cfg, "problem", problem);
    if (o_beta->count()) stfem::set_config_key(cfg, "beta", beta);
    if (o_levels->count()) stfem::set_config_key(cfg, "levels", levels);
    if (o_ref->count()) stfem::set_config_key(cfg, "ref_factor", ref_factor);
    if (o_solver->count()) stfem::set_config_key(cfg, "solver", solver);
    if (o_out->count()) stfem::set_config_key(cfg, "out", out);
    return cfg;
  }
};

template <typename Fn>
int with_output(const stfem::RunConfig& cfg, Fn fn) {
  if (cfg.out.empty()) {
    fn(std::cout);
    return 0;
  }
  std::ofstream f(cfg.out);
  if (!f) throw std::runtime_error("cannot open output file: " + cfg.out);
  fn(f);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"space-time finite element solvers for the heat equation"};
  app.require_subcommand(1);

  CommonOpts c_conv, c_inf, c_solve;
  CLI::App* conv = app.add_subcommand("converge", "error sweep over mesh levels");
  c_conv.attach(conv);
  CLI::App* inf = app.add_subcommand("infsup", "discrete inf-sup table over mesh levels");
  c_inf.attach(inf);
  CLI::App* solve = app.add_subcommand("solve", "solve one level and dump coefficients");
  c_solve.attach(solve);
  int level = 0;
  solve->add_option("--level", level, "mesh level N")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (conv->parsed()) {
      const stfem::RunConfig cfg = c_conv.build();
      return with_output(cfg, [&](std::ostream& os) { stfem::cmd_converge(cfg, os, std::cout); });
    }
    if (inf->parsed()) {
      const stfem::RunConfig cfg = c_inf.build();
      return with_output(cfg, [&](std::ostream& os) { stfem::cmd_infsup(cfg, os); });
    }
    const stfem::RunConfig cfg = c_solve.build();
    return with_output(cfg, [&](std::ostream& os) { stfem::cmd_solve(cfg, level, os); });
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
