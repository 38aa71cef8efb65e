#pragma once

#include "stfem/eig.hpp"
#include "stfem/norms.hpp"

namespace stfem {

struct InfSupResult {
  double gamma = 0.0;
  std::string method;  // "factorized" | "full" | "temporal-only" | "spatial-only"
  int kernel_dim = 0;  // dimension of the deflated d/dt kernel
  int iterations = 0;
  double residual = 0.0;
};

struct QuasiOptConstants {
  double rho = 0.0;
  double C = 0.0;
  double gamma_in = 0.0;
  double aa_norm_in = 0.0;
};

// inf-sup constant of the L2 pairing on Xx, V = H^1_0 vs its dual:
// sqrt of the smallest eigenvalue of (M A_x^{-1} M) q = lambda W q.
InfSupResult spatial_infsup(const FESpace1D& Xx);

// inf over u in Xt of ||P_{Yt} u'|| / ||u'||. The d/dt kernel (constants) is
// removed by parametrizing trial functions through their cellwise slopes.
InfSupResult temporal_infsup(const FESpace1D& Xt, const FESpace1D& Yt);

enum class InfSupMode { Factorized, Full };

// Factorized mode multiplies the temporal and spatial constants (exact for
// tensor-product pairs). Full mode solves the coupled eigenproblem with the
// reference-space dual norm of d/dt in the denominator.
InfSupResult spacetime_infsup(const SpaceTimeSpace& Xd, const SpaceTimeSpace& Yd, InfSupMode mode,
                              int ref_factor = 4);

// rho: root in [0,1) of gamma^2 (rho^2 - rho) + aa^2 (rho - 1) + rho = 0;
// C = (3 + aa^2)(sqrt(3) + aa) / ((1 - rho) gamma^2).
QuasiOptConstants quasiopt_constants(double gamma, double aa_norm);

// Largest singular value of the convection part as a map Y^d -> (Y^d)', by
// power iteration on Aa' G^{-1} Aa q = lambda G q with G the Y-Gram.
double aa_norm_estimate(const SpaceTimeSpace& Yd, double beta);

struct DegradationResult {
  double gamma_full = 0.0;    // inf over X^d of the stability ratio
  bool full_computed = false; // dense eigenproblem skipped above ~4000 dofs
  double zigzag_value = 0.0;  // ratio at the explicit zigzag candidate
  double g_norm_check = 0.0;  // ||G x|| from the assembled bidiagonal G (expect sqrt(h)/2)
};

// Degradation analysis of the unstabilized square scheme on a zero-left
// space with an even number of uniform temporal elements.
DegradationResult steinbach_degradation(const SpaceTimeSpace& Xd0);

}  // namespace stfem
