#pragma once
#include "stfem/assembly1d.hpp"
#include "stfem/spacetime.hpp"

namespace stfem {

enum class StOp { As, Aa, Dt, B, C, Gamma0, GammaT };

// Kronecker assembly from 1D factors:
//   As      = M_t (x) A_x
//   Aa      = beta * M_t (x) N_x          (N_x the skew convection matrix)
//   Dt      = D_t (x) M_x
//   B       = Dt + M_t (x) (A_x + beta N_x)
//   C       = B - As
//   Gamma0  = e_0 e_0^T (x) M_x, GammaT likewise at t = T  (temporal trace values)
// Temporal factors may live on equal or nested partitions; the spatial factor
// must be the same space on both sides.
SpMat assemble_st(const SpaceTimeSpace& trial, const SpaceTimeSpace& test, StOp op, double beta);

// entry i = (Bu)(psi_i) = intint u_t psi + u_x psi_x + beta u_x psi, with u the
// prescribed exact solution; cells crossed by t = x are split along the line.
Eigen::VectorXd assemble_load(const SpaceTimeSpace& test, const ProblemDef& problem);

// entry i = <u0, psi_i(0,.)>_{L2(0,1)}
Eigen::VectorXd assemble_initial(const SpaceTimeSpace& test, const std::function<double(double)>& u0);

struct QPoint {
  double t, x, w;
};

// Quadrature for one space-time rectangle. Plain tensor Gauss (order n per
// direction), unless split_line is set and t = x crosses the cell, in which
// case the rectangle is clipped against the line and each polygon piece is
// fan-triangulated and integrated with a degree-5 triangle rule.
void cell_quadrature(double t0, double t1, double x0, double x1, bool split_line, int order,
                     std::vector<QPoint>& out);

}  // namespace stfem
