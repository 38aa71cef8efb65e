#pragma once
#include <functional>

#include "stfem/fespace.hpp"

namespace stfem {

// Prismatic tensor-product space: temporal factor on (0,T), spatial factor on
// (0,1) with zero boundary traces. Dof (k_t, k_x) -> k_t*spatial.dim + k_x.
struct SpaceTimeSpace {
  FESpace1D temporal;
  FESpace1D spatial;

  SpaceTimeSpace() = default;
  SpaceTimeSpace(FESpace1D t, FESpace1D x) : temporal(std::move(t)), spatial(std::move(x)) {
    if (spatial.family != Family::P1 || !spatial.zero_left || !spatial.zero_right)
      throw std::invalid_argument("SpaceTimeSpace: spatial factor must be zero-both P1");
  }

  int dim() const { return temporal.dim() * spatial.dim(); }
  int index(int kt, int kx) const { return kt * spatial.dim() + kx; }
};

struct ExactSolution {
  std::function<double(double, double)> value, dt, dx;  // (t, x)
  bool singular_line = false;  // solution kinked across t = x
};

struct ProblemDef {
  double T = 1.0;
  double beta = 0.0;  // convection coefficient; 0 = symmetric case
  ExactSolution exact;
  std::function<double(double)> u0;
};

// u(t,x) = exp(-2t) sin(pi x)
ProblemDef make_smooth_problem(double beta);
// u(t,x) = exp(-2t) |t - x| sin(pi x), kinked across the line t = x
ProblemDef make_singular_problem(double beta);

}  // namespace stfem
