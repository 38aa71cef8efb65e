#include "stfem/stability.hpp"

#include <Eigen/SparseCholesky>
#include <unsupported/Eigen/KroneckerProduct>
#include <cmath>

namespace stfem {

namespace {

// Map cellwise slopes to P1 coefficients (value 0 at the left end). The image
// is a complement of the d/dt kernel, so pencils in slope variables are SPD.
SpMat slope_map(const FESpace1D& Xt) {
  if (Xt.family != Family::P1 || Xt.zero_right)
    throw std::invalid_argument("slope_map: needs P1 without a right constraint");
  const int m = Xt.part.cells();
  SpMat S(Xt.dim(), m);
  std::vector<Eigen::Triplet<double>> trip;
  for (int e = 0; e < m; ++e) {
    const double h = Xt.part.h(e);
    for (int j = 0; j < Xt.dim(); ++j)
      if (Xt.node_of(j) > e) trip.emplace_back(j, e, h);
  }
  S.setFromTriplets(trip.begin(), trip.end());
  return S;
}

// P' gram^{-1} P as a dense matrix, block column solves
Eigen::MatrixXd gram_through_inverse(const SpMat& P, const SpMat& gram) {
  Eigen::SimplicialLLT<SpMat> llt(gram);
  if (llt.info() != Eigen::Success)
    throw SolverFailure("gram_through_inverse: Gram not SPD");
  const int n = int(P.cols());
  Eigen::MatrixXd out(n, n);
  const int blk = 256;
  for (int c0 = 0; c0 < n; c0 += blk) {
    const int bc = std::min(blk, n - c0);
    const Eigen::MatrixXd Pd = Eigen::MatrixXd(P.middleCols(c0, bc));
    const Eigen::MatrixXd Z = llt.solve(Pd);
    out.middleCols(c0, bc) = P.transpose() * Z;
  }
  return 0.5 * (out + out.transpose());
}

InfSupResult from_eig(const EigResult& e, const std::string& method, int kernel_dim) {
  InfSupResult r;
  r.gamma = std::sqrt(std::max(0.0, e.value));
  r.method = method;
  r.kernel_dim = kernel_dim;
  r.iterations = e.iterations;
  r.residual = e.residual;
  return r;
}

}  // namespace

InfSupResult spatial_infsup(const FESpace1D& Xx) {
  if (Xx.family != Family::P1 || !Xx.zero_left || !Xx.zero_right)
    throw std::invalid_argument("spatial_infsup: needs a zero-both P1 space");
  const Eigen::MatrixXd M = Eigen::MatrixXd(operator_matrix(Xx, Form::Mass));
  const SpMat Ax = operator_matrix(Xx, Form::Stiffness);
  Eigen::SimplicialLLT<SpMat> llt(Ax);
  if (llt.info() != Eigen::Success) throw SolverFailure("spatial_infsup: stiffness not SPD");
  Eigen::MatrixXd A = M * llt.solve(M);
  A = (0.5 * (A + A.transpose())).eval();
  const Eigen::MatrixXd W = hminus1_gram(Xx);
  return from_eig(smallest_gen_eig(A, W), "spatial-only", 0);
}

InfSupResult temporal_infsup(const FESpace1D& Xt, const FESpace1D& Yt) {
  if (Xt.family != Family::P1 || Xt.zero_right)
    throw std::invalid_argument("temporal_infsup: trial factor must be P1 (no right constraint)");
  const bool p0_pair = Yt.family == Family::P0 && Yt.part == Xt.part;
  const bool refined_pair = Yt.family == Family::P1 && !Yt.zero_left && !Yt.zero_right &&
                            Xt.part.refines(Yt.part);
  if (!p0_pair && !refined_pair)
    throw std::invalid_argument(
        "temporal_infsup: test factor must be P0 on the same partition or P1 on a refinement");
  const SpMat S = slope_map(Xt);
  const SpMat G = pairing_matrix(Yt, Xt, PairKind::DerivOfTrial) * S;
  const SpMat My = operator_matrix(Yt, Form::Mass);
  Eigen::SimplicialLLT<SpMat> llt(My);
  if (llt.info() != Eigen::Success) throw SolverFailure("temporal_infsup: test mass not SPD");
  Eigen::MatrixXd A = Eigen::MatrixXd(G).transpose() * llt.solve(Eigen::MatrixXd(G));
  A = (0.5 * (A + A.transpose())).eval();
  const int m = Xt.part.cells();
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(m, m);
  for (int e = 0; e < m; ++e) K(e, e) = Xt.part.h(e);
  return from_eig(smallest_gen_eig(A, K), "temporal-only", Xt.zero_left ? 0 : 1);
}

InfSupResult spacetime_infsup(const SpaceTimeSpace& Xd, const SpaceTimeSpace& Yd, InfSupMode mode,
                              int ref_factor) {
  const int kdim = (Xd.temporal.zero_left ? 0 : 1) * Xd.spatial.dim();
  if (mode == InfSupMode::Factorized) {
    const InfSupResult t = temporal_infsup(Xd.temporal, Yd.temporal);
    const InfSupResult s = spatial_infsup(Xd.spatial);
    InfSupResult r;
    r.gamma = t.gamma * s.gamma;
    r.method = "factorized";
    r.kernel_dim = kdim;
    r.iterations = t.iterations + s.iterations;
    r.residual = std::max(t.residual, s.residual);
    return r;
  }
  const SpMat S = Eigen::kroneckerProduct(slope_map(Xd.temporal),
                                          SpMat(Eigen::MatrixXd::Identity(Xd.spatial.dim(),
                                                                          Xd.spatial.dim())
                                                    .sparseView()));
  const SpMat D = assemble_st(Xd, Yd, StOp::Dt, 0.0);
  const Eigen::MatrixXd N = gram_through_inverse(SpMat(D * S), assemble_st(Yd, Yd, StOp::As, 0.0));
  const SpaceTimeSpace Yref(FESpace1D(Xd.temporal.part.refined(ref_factor), Family::P0),
                            FESpace1D(Xd.spatial.part.refined(ref_factor), Family::P1, true, true));
  // cross-space pairing: spatial factors differ, so build it from the 1d pieces
  const SpMat Dref =
      Eigen::kroneckerProduct(pairing_matrix(Yref.temporal, Xd.temporal, PairKind::DerivOfTrial),
                              pairing_matrix(Yref.spatial, Xd.spatial, PairKind::Value))
          .eval();
  const Eigen::MatrixXd Mden =
      gram_through_inverse(SpMat(Dref * S), assemble_st(Yref, Yref, StOp::As, 0.0));
  return from_eig(smallest_gen_eig(N, Mden), "full", kdim);
}

QuasiOptConstants quasiopt_constants(double gamma, double aa_norm) {
  if (!(gamma > 0.0) || gamma > 1.0 + 1e-10 || aa_norm < 0.0)
    throw std::invalid_argument("quasiopt_constants: need 0 < gamma <= 1 and aa_norm >= 0");
  QuasiOptConstants q;
  q.gamma_in = gamma;
  q.aa_norm_in = aa_norm;
  const double g2 = gamma * gamma;
  const double a2 = aa_norm * aa_norm;
  if (aa_norm == 0.0) {
    q.rho = 0.0;
  } else {
    // gamma^2 rho^2 + (1 + a^2 - gamma^2) rho - a^2 = 0, stable plus-branch
    const double bcoef = 1.0 + a2 - g2;
    const double disc = bcoef * bcoef + 4.0 * g2 * a2;
    q.rho = 2.0 * a2 / (bcoef + std::sqrt(disc));
  }
  const double resid = g2 * (q.rho * q.rho - q.rho) + a2 * (q.rho - 1.0) + q.rho;
  if (!(q.rho >= 0.0 && q.rho < 1.0) || std::abs(resid) > 1e-12 * std::max(1.0, a2))
    throw std::logic_error("quasiopt_constants: no valid root in [0,1)");
  q.C = (3.0 + a2) * (std::sqrt(3.0) + aa_norm) / ((1.0 - q.rho) * g2);
  return q;
}

double aa_norm_estimate(const SpaceTimeSpace& Yd, double beta) {
  if (beta < 0.0) throw std::invalid_argument("aa_norm_estimate: beta >= 0");
  if (beta == 0.0) return 0.0;
  const SpMat Aa = assemble_st(Yd, Yd, StOp::Aa, beta);
  const SpMat G = assemble_st(Yd, Yd, StOp::As, beta);
  Eigen::SimplicialLLT<SpMat> llt(G);
  if (llt.info() != Eigen::Success) throw SolverFailure("aa_norm_estimate: Y-Gram not SPD");
  const SpMat AaT = SpMat(Aa.transpose());
  const EigResult e = largest_gen_eig(
      Yd.dim(), [&](const Eigen::VectorXd& x) { return Eigen::VectorXd(AaT * llt.solve(Aa * x)); },
      [&](const Eigen::VectorXd& x) { return Eigen::VectorXd(G * x); },
      [&](const Eigen::VectorXd& x) { return Eigen::VectorXd(llt.solve(x)); }, 1e-8);
  return std::sqrt(std::max(0.0, e.value));
}

DegradationResult steinbach_degradation(const SpaceTimeSpace& Xd0) {
  const FESpace1D& Tt = Xd0.temporal;
  const FESpace1D& Tx = Xd0.spatial;
  if (Tt.family != Family::P1 || !Tt.zero_left || Tt.zero_right)
    throw std::invalid_argument("steinbach_degradation: temporal factor must be zero-left P1");
  const int m = Tt.part.cells();
  if (m % 2 != 0)
    throw std::invalid_argument("steinbach_degradation: even temporal element count required");
  const double h = Tt.part.h(0);
  for (int e = 0; e < m; ++e)
    if (std::abs(Tt.part.h(e) - h) > 1e-12 * h)
      throw std::invalid_argument("steinbach_degradation: uniform temporal partition required");

  DegradationResult out;

  // bidiagonal unit check: G[j,i] = (1/h) * integral of hat_j over cell i,
  // evaluated at the normalized alternating-slope vector
  const SpMat Mcr = pairing_matrix(FESpace1D(Tt.part, Family::P0), Tt, PairKind::Value);
  Eigen::VectorXd xvec(m);
  for (int i = 0; i < m; ++i) xvec[i] = std::sqrt(h) * (i % 2 == 0 ? 1.0 : -1.0);
  out.g_norm_check = ((1.0 / h) * (SpMat(Mcr.transpose()) * xvec)).norm();

  // zigzag candidate z = z_t (x) z_x with z_x the interpolant of sin(pi x);
  // every norm involved factorizes into exact 1D pieces
  Eigen::VectorXd zt = Eigen::VectorXd::Zero(Tt.dim());
  for (int j = 0; j < Tt.dim(); ++j) zt[j] = (Tt.node_of(j) % 2 == 1) ? h : 0.0;
  Eigen::VectorXd s(m);
  for (int i = 0; i < m; ++i) s[i] = (i % 2 == 0 ? 1.0 : -1.0);
  Eigen::VectorXd zx(Tx.dim());
  for (int k = 0; k < Tx.dim(); ++k) zx[k] = std::sin(M_PI * Tx.part.pts[Tx.node_of(k)]);

  const SpMat Mt = operator_matrix(Tt, Form::Mass);
  const SpMat Ax = operator_matrix(Tx, Form::Stiffness);
  const SpMat Mx = operator_matrix(Tx, Form::Mass);
  const Eigen::MatrixXd W = hminus1_gram(Tx);

  const double zt_l2sq = zt.dot(Mt * zt);
  const double zx_h1sq = zx.dot(Ax * zx);
  const double zx_l2sq = zx.dot(Mx * zx);
  const double zx_dualsq = zx.dot(W * zx);
  const double y_sq = zt_l2sq * zx_h1sq;
  const double ztT = zt[Tt.dim() - 1];  // z_t(T), zero for even element count
  const double trace_sq = ztT * ztT * zx_l2sq;
  double dzt_l2sq = 0.0;
  for (int i = 0; i < m; ++i) dzt_l2sq += Tt.part.h(i) * s[i] * s[i];

  const Eigen::VectorXd dt_vec = SpMat(Mcr.transpose()) * s;  // functional of dt(z_t) on hats
  const Eigen::VectorXd mx_vec = Mx * zx;
  Eigen::SimplicialLLT<SpMat> lltMt(Mt);
  Eigen::SimplicialLLT<SpMat> lltAx(Ax);
  if (lltMt.info() != Eigen::Success || lltAx.info() != Eigen::Success)
    throw SolverFailure("steinbach_degradation: 1D Gram factorization failed");
  const double sup_sq = dt_vec.dot(lltMt.solve(dt_vec)) * mx_vec.dot(lltAx.solve(mx_vec));
  const double dual_true_sq = dzt_l2sq * zx_dualsq;

  out.zigzag_value =
      std::sqrt((y_sq + sup_sq + trace_sq) / (y_sq + dual_true_sq + trace_sq));

  if (Xd0.dim() <= 4000) {
    // inf of the same ratio over all of X^d (reference-space X-norm below)
    const SpMat As = assemble_st(Xd0, Xd0, StOp::As, 0.0);
    const SpMat GT = assemble_st(Xd0, Xd0, StOp::GammaT, 0.0);
    const SpMat D = assemble_st(Xd0, Xd0, StOp::Dt, 0.0);
    Eigen::MatrixXd A_md = Eigen::MatrixXd(As + GT) + gram_through_inverse(D, As);

    const int rf = 4;
    const SpaceTimeSpace Yref(FESpace1D(Tt.part.refined(rf), Family::P0),
                              FESpace1D(Tx.part.refined(rf), Family::P1, true, true));
    const SpMat D0ref = pairing_matrix(Yref.temporal, Tt, PairKind::DerivOfTrial);
    const SpMat McrossR = pairing_matrix(Yref.spatial, Tx, PairKind::Value);
    SpMat invHt(Yref.temporal.dim(), Yref.temporal.dim());
    for (int k = 0; k < Yref.temporal.dim(); ++k)
      invHt.insert(k, k) = 1.0 / Yref.temporal.part.h(k);
    const SpMat Kdt = SpMat(D0ref.transpose()) * invHt * D0ref;
    const SpMat Axr = operator_matrix(Yref.spatial, Form::Stiffness);
    Eigen::SimplicialLLT<SpMat> lltAxr(Axr);
    const Eigen::MatrixXd McD = Eigen::MatrixXd(McrossR);
    const Eigen::MatrixXd Kdx = McD.transpose() * lltAxr.solve(McD);
    Eigen::MatrixXd B_X = Eigen::MatrixXd(As + GT) +
                          Eigen::kroneckerProduct(Eigen::MatrixXd(Kdt), Kdx);
    A_md = (0.5 * (A_md + A_md.transpose())).eval();
    B_X = (0.5 * (B_X + B_X.transpose())).eval();
    const EigResult e = smallest_gen_eig(A_md, B_X);
    out.gamma_full = std::sqrt(std::max(0.0, e.value));
    out.full_computed = true;
  }
  return out;
}

}  // namespace stfem
