#pragma once

#include "stfem/stability.hpp"

#include <iosfwd>
#include <vector>

namespace stfem {

struct RunConfig {
  std::string method = "new_mixed";   // new_mixed | andreev | steinbach
  std::string problem = "smooth";     // smooth | singular
  double beta = 0.0;
  std::vector<int> levels = {8, 16, 32, 64, 128};  // temporal element counts, h_t = h_x
  int ref_factor = 4;
  std::string solver = "direct";      // direct | schur_cg
  std::string out;                    // output path; empty = stdout
};

// key=value lines, '#' starts a comment
RunConfig load_config_file(const std::string& path);
void set_config_key(RunConfig& cfg, const std::string& key, const std::string& value);
void validate_config(const RunConfig& cfg);

// trial space at level N: P1 in time x P1 zero-both in space, h_t = h_x = 1/N
SpaceTimeSpace make_trial_space(int N);
SpaceTimeSpace make_trial_space_zero_left(int N);
// test space for the mixed methods (new_mixed: P0 on the same temporal mesh;
// andreev: P1 on the once-dyadically refined temporal mesh)
SpaceTimeSpace make_test_space(const std::string& method, const SpaceTimeSpace& Xd);

ProblemDef make_problem(const RunConfig& cfg);

struct ConvergeRow {
  int N = 0;
  ErrorReport rep;
  double quasiopt_ratio = 0.0;
  double wall_seconds = 0.0;
};

std::vector<ConvergeRow> run_converge(const RunConfig& cfg);

// least-squares slope of y against x
double ls_slope(const std::vector<double>& x, const std::vector<double>& y);

void cmd_converge(const RunConfig& cfg, std::ostream& csv, std::ostream& summary);
void cmd_infsup(const RunConfig& cfg, std::ostream& csv);
void cmd_solve(const RunConfig& cfg, int level, std::ostream& out);

}  // namespace stfem
