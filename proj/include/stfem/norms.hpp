#pragma once

#include "stfem/systems.hpp"

namespace stfem {

struct ErrorReport {
  int dim_X = 0;
  double err_X = 0.0;
  double err_Y = 0.0;
  double err_T = 0.0;  // ||e(T,.)||_{L2}
  double err_0 = 0.0;  // ||e(0,.)||_{L2}
  std::optional<double> err_aux_Y;  // ||u - lambda||_Y when an aux unknown exists
  int ref_refinement = 0;
};

// sqrt(c' As c), the L2(I;V)-seminorm of the coefficient vector.
double y_norm(const SpaceTimeSpace& space, const Eigen::VectorXd& coeffs);

// sqrt(f' gram^{-1} f) for an SPD Gram matrix.
double dual_norm_discrete(const SpMat& gram, const Eigen::VectorXd& f);

// Error of a coefficient vector against the exact solution. err_X combines
// the Y-part, the dual norm of the time-derivative residual on a reference
// space (P0_t x P1_x, both factors ref_factor-refined), and the final-time
// trace: err_X = sqrt(err_Y^2 + dual^2 + err_T^2).
ErrorReport error_of_coeffs(const ProblemDef& problem, const Eigen::VectorXd& u_coeffs,
                            const SpaceTimeSpace& Xd, int ref_factor);

ErrorReport error_report(const ProblemDef& problem, const Solution& sol,
                         const SpaceTimeSpace& Xd, int ref_factor);
// As above; additionally measures ||u - aux||_Y over Yd when sol carries an
// aux unknown.
ErrorReport error_report(const ProblemDef& problem, const Solution& sol,
                         const SpaceTimeSpace& Xd, const SpaceTimeSpace& Yd, int ref_factor);

// ||u||_{X,Y^d}: Y-norm + discrete dual norm of dt(u) over Yd + final trace.
double mesh_dependent_norm(const Eigen::VectorXd& u_coeffs, const SpaceTimeSpace& Xd,
                           const SpaceTimeSpace& Yd);

// Minimizer over X^d of the (reference-space) X-norm distance to the exact
// solution, plus its error. Independent oracle for quasi-optimality ratios.
std::pair<Eigen::VectorXd, double> best_approx_xnorm(const ProblemDef& problem,
                                                     const SpaceTimeSpace& Xd, int ref_factor);

}  // namespace stfem
