#pragma once

#include "stfem/st_assembly.hpp"

#include <optional>
#include <string>

namespace stfem {

// Right-hand-side data in assembled form. The problem-driven builders fill
// this from quadrature; tests can seed it algebraically (e.g. g := B u).
struct Loads {
  Eigen::VectorXd on_test_Y;   // g(v), v in Y^delta
  Eigen::VectorXd on_trial_X;  // g(v), v in X^delta
  Eigen::VectorXd init_X;      // <u0, v(0,.)>, v in X^delta
};

Loads make_loads(const SpaceTimeSpace& Xd, const SpaceTimeSpace& Yd, const ProblemDef& problem);

// 2x2 block system [B11 B12; B21 B22][aux; u] = [rhs1; rhs2]. The square
// steinbach system is stored with an empty first block row/column (n1 = 0);
// it additionally carries the embedding X0 -> X and the lifting coefficients
// needed to reconstruct the full-space solution.
struct SaddleSystem {
  SpMat B11, B12, B21, B22;
  Eigen::VectorXd rhs1, rhs2;
  std::string label1, label2;
  bool symmetric = false;
  int n1 = 0, n2 = 0;
  std::string method;
  SpMat embed;           // steinbach only: X0 coefficients -> X coefficients
  Eigen::VectorXd lift;  // steinbach only: lifting of u0, coefficients over X
};

struct Solution {
  Eigen::VectorXd u_coeffs;  // over X^delta (steinbach: embed*w + lift)
  std::optional<Eigen::VectorXd> aux_coeffs;
  std::string method;
  double residual = 0.0;  // relative algebraic residual of the assembled system
  int iterations = 0;     // CG iterations (0 for direct)
};

struct SolverFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

SaddleSystem build_new_mixed(const SpaceTimeSpace& Xd, const SpaceTimeSpace& Yd,
                             const Loads& data, double beta);
SaddleSystem build_new_mixed(const SpaceTimeSpace& Xd, const SpaceTimeSpace& Yd,
                             const ProblemDef& problem);

SaddleSystem build_andreev(const SpaceTimeSpace& Xd, const SpaceTimeSpace& Yd,
                           const Loads& data, double beta);
SaddleSystem build_andreev(const SpaceTimeSpace& Xd, const SpaceTimeSpace& Yd,
                           const ProblemDef& problem);

// Xd0 must have a zero-left temporal factor. lift_x: coefficients of the
// initial datum over the spatial factor (zero vector for u0 = 0).
SaddleSystem build_steinbach(const SpaceTimeSpace& Xd0, const Loads& data, double beta,
                             const Eigen::VectorXd& lift_x);
SaddleSystem build_steinbach(const SpaceTimeSpace& Xd0, const ProblemDef& problem);

// Constant-in-time extension of spatial coefficients to the full space.
Eigen::VectorXd steinbach_lift(const SpaceTimeSpace& Xd, const Eigen::VectorXd& u0_coeffs);

Solution solve_direct(const SaddleSystem& sys);
Solution solve_schur_cg(const SaddleSystem& sys);

}  // namespace stfem
