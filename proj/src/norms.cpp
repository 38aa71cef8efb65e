#include "stfem/norms.hpp"

#include <Eigen/SparseCholesky>
#include <unsupported/Eigen/KroneckerProduct>
#include <cmath>

namespace stfem {

namespace {

struct StEval {
  double v, dt, dx;
};

// value/derivatives of a tensor FE expansion on a known cell pair (et, ex)
StEval st_eval(const SpaceTimeSpace& S, const Eigen::VectorXd& c, int et, int ex, double t,
               double x) {
  int td[2], tc, xd[2], xc;
  S.temporal.dofs_on_cell(et, td, tc);
  S.spatial.dofs_on_cell(ex, xd, xc);
  StEval r{0.0, 0.0, 0.0};
  for (int a = 0; a < tc; ++a) {
    const double tv = S.temporal.family == Family::P0 ? 1.0 : S.temporal.basis_value(td[a], t);
    const double tdv =
        S.temporal.family == Family::P1 ? S.temporal.basis_deriv_on_cell(td[a], et) : 0.0;
    for (int b = 0; b < xc; ++b) {
      const double xv = S.spatial.basis_value(xd[b], x);
      const double cc = c[S.index(td[a], xd[b])];
      r.v += cc * tv * xv;
      r.dt += cc * tdv * xv;
      r.dx += cc * tv * S.spatial.basis_deriv_on_cell(xd[b], ex);
    }
  }
  return r;
}

// spatial coefficients of the time slice u(s, .)
Eigen::VectorXd temporal_slice(const SpaceTimeSpace& S, const Eigen::VectorXd& c, double s) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(S.spatial.dim());
  for (int kt = 0; kt < S.temporal.dim(); ++kt) {
    const double w = S.temporal.basis_value(kt, s);
    if (w == 0.0) continue;
    for (int kx = 0; kx < S.spatial.dim(); ++kx) out[kx] += w * c[S.index(kt, kx)];
  }
  return out;
}

double y_err_sq(const ProblemDef& p, const SpaceTimeSpace& S, const Eigen::VectorXd& c) {
  double acc = 0.0;
  std::vector<QPoint> qp;
  for (int et = 0; et < S.temporal.part.cells(); ++et) {
    for (int ex = 0; ex < S.spatial.part.cells(); ++ex) {
      cell_quadrature(S.temporal.part.pts[et], S.temporal.part.pts[et + 1],
                      S.spatial.part.pts[ex], S.spatial.part.pts[ex + 1],
                      p.exact.singular_line, 5, qp);
      for (const QPoint& q : qp) {
        const double d = p.exact.dx(q.t, q.x) - st_eval(S, c, et, ex, q.t, q.x).dx;
        acc += q.w * d * d;
      }
    }
  }
  return acc;
}

double trace_err_sq(const ProblemDef& p, const SpaceTimeSpace& S, const Eigen::VectorXd& c,
                    double s) {
  const Eigen::VectorXd cs = temporal_slice(S, c, s);
  const FESpace1D& Sx = S.spatial;
  std::vector<double> gx, gw;
  gauss_rule(5, gx, gw);
  double acc = 0.0;
  for (int ex = 0; ex < Sx.part.cells(); ++ex) {
    const double x0 = Sx.part.pts[ex], x1 = Sx.part.pts[ex + 1];
    double splits[3] = {x0, x1, x1};
    int nseg = 1;
    if (p.exact.singular_line && s > x0 && s < x1) {
      splits[1] = s;
      splits[2] = x1;
      nseg = 2;
    }
    int xd[2], xc;
    Sx.dofs_on_cell(ex, xd, xc);
    for (int seg = 0; seg < nseg; ++seg) {
      const double a = splits[seg], h = splits[seg + 1] - splits[seg];
      for (std::size_t q = 0; q < gx.size(); ++q) {
        const double x = a + h * gx[q];
        double fe = 0.0;
        for (int b = 0; b < xc; ++b) fe += cs[xd[b]] * Sx.basis_value(xd[b], x);
        const double d = p.exact.value(s, x) - fe;
        acc += h * gw[q] * d * d;
      }
    }
  }
  return acc;
}

SpaceTimeSpace make_yref(const SpaceTimeSpace& Xd, int rf) {
  return SpaceTimeSpace(FESpace1D(Xd.temporal.part.refined(rf), Family::P0),
                        FESpace1D(Xd.spatial.part.refined(rf), Family::P1, true, true));
}

// load over Yref of dt(u_exact) - dt(FE expansion c on Xd); c may be null
Eigen::VectorXd dt_residual_load(const ProblemDef& p, const SpaceTimeSpace& Yref,
                                 const SpaceTimeSpace* Xd, const Eigen::VectorXd* c, int rf) {
  Eigen::VectorXd F = Eigen::VectorXd::Zero(Yref.dim());
  std::vector<QPoint> qp;
  for (int et = 0; et < Yref.temporal.part.cells(); ++et) {
    const int et_c = et / rf;
    for (int ex = 0; ex < Yref.spatial.part.cells(); ++ex) {
      const int ex_c = ex / rf;
      cell_quadrature(Yref.temporal.part.pts[et], Yref.temporal.part.pts[et + 1],
                      Yref.spatial.part.pts[ex], Yref.spatial.part.pts[ex + 1],
                      p.exact.singular_line, 5, qp);
      int xd[2], xc;
      Yref.spatial.dofs_on_cell(ex, xd, xc);
      for (const QPoint& q : qp) {
        double val = p.exact.dt(q.t, q.x);
        if (c) val -= st_eval(*Xd, *c, et_c, ex_c, q.t, q.x).dt;
        for (int b = 0; b < xc; ++b)
          F[Yref.index(et, xd[b])] += q.w * val * Yref.spatial.basis_value(xd[b], q.x);
      }
    }
  }
  return F;
}

// ||F||^2 in the dual of Yref: As on Yref is diag(h_t) x A_x, so per-slab solves
double dual_norm_on_ref_sq(const SpaceTimeSpace& Yref, const Eigen::VectorXd& F) {
  const SpMat Axr = operator_matrix(Yref.spatial, Form::Stiffness);
  Eigen::SimplicialLLT<SpMat> llt(Axr);
  if (llt.info() != Eigen::Success)
    throw SolverFailure("dual_norm_on_ref_sq: reference stiffness not SPD");
  const int dx = Yref.spatial.dim();
  double acc = 0.0;
  for (int kt = 0; kt < Yref.temporal.dim(); ++kt) {
    const Eigen::VectorXd fk = F.segment(kt * dx, dx);
    acc += fk.dot(llt.solve(fk)) / Yref.temporal.part.h(kt);
  }
  return acc;
}

}  // namespace

double y_norm(const SpaceTimeSpace& space, const Eigen::VectorXd& coeffs) {
  if (coeffs.size() != space.dim()) throw std::invalid_argument("y_norm: coefficient size mismatch");
  const SpMat As = assemble_st(space, space, StOp::As, 0.0);
  return std::sqrt(std::max(0.0, coeffs.dot(As * coeffs)));
}

double dual_norm_discrete(const SpMat& gram, const Eigen::VectorXd& f) {
  if (gram.rows() != f.size()) throw std::invalid_argument("dual_norm_discrete: size mismatch");
  Eigen::SimplicialLLT<SpMat> llt(gram);
  if (llt.info() != Eigen::Success) throw SolverFailure("dual_norm_discrete: Gram not SPD");
  return std::sqrt(std::max(0.0, f.dot(llt.solve(f))));
}

ErrorReport error_of_coeffs(const ProblemDef& p, const Eigen::VectorXd& u_coeffs,
                            const SpaceTimeSpace& Xd, int ref_factor) {
  if (ref_factor < 2) throw std::invalid_argument("error_of_coeffs: ref_factor >= 2 required");
  if (u_coeffs.size() != Xd.dim())
    throw std::invalid_argument("error_of_coeffs: coefficient size mismatch");
  ErrorReport rep;
  rep.dim_X = Xd.dim();
  rep.ref_refinement = ref_factor;
  rep.err_Y = std::sqrt(y_err_sq(p, Xd, u_coeffs));
  rep.err_T = std::sqrt(trace_err_sq(p, Xd, u_coeffs, Xd.temporal.part.length()));
  rep.err_0 = std::sqrt(trace_err_sq(p, Xd, u_coeffs, 0.0));
  const SpaceTimeSpace Yref = make_yref(Xd, ref_factor);
  const Eigen::VectorXd F = dt_residual_load(p, Yref, &Xd, &u_coeffs, ref_factor);
  const double dual2 = dual_norm_on_ref_sq(Yref, F);
  rep.err_X = std::sqrt(rep.err_Y * rep.err_Y + dual2 + rep.err_T * rep.err_T);
  return rep;
}

ErrorReport error_report(const ProblemDef& p, const Solution& sol, const SpaceTimeSpace& Xd,
                         int ref_factor) {
  return error_of_coeffs(p, sol.u_coeffs, Xd, ref_factor);
}

ErrorReport error_report(const ProblemDef& p, const Solution& sol, const SpaceTimeSpace& Xd,
                         const SpaceTimeSpace& Yd, int ref_factor) {
  ErrorReport rep = error_of_coeffs(p, sol.u_coeffs, Xd, ref_factor);
  if (sol.aux_coeffs) rep.err_aux_Y = std::sqrt(y_err_sq(p, Yd, *sol.aux_coeffs));
  return rep;
}

double mesh_dependent_norm(const Eigen::VectorXd& u_coeffs, const SpaceTimeSpace& Xd,
                           const SpaceTimeSpace& Yd) {
  const SpMat As_yy = assemble_st(Yd, Yd, StOp::As, 0.0);
  const SpMat D = assemble_st(Xd, Yd, StOp::Dt, 0.0);
  const double mid = dual_norm_discrete(As_yy, D * u_coeffs);
  const double yn = y_norm(Xd, u_coeffs);
  const Eigen::VectorXd cT = temporal_slice(Xd, u_coeffs, Xd.temporal.part.length());
  const SpMat Mx = operator_matrix(Xd.spatial, Form::Mass);
  const double tr2 = cT.dot(Mx * cT);
  return std::sqrt(yn * yn + mid * mid + tr2);
}

std::pair<Eigen::VectorXd, double> best_approx_xnorm(const ProblemDef& p,
                                                     const SpaceTimeSpace& Xd, int ref_factor) {
  if (ref_factor < 4) throw std::invalid_argument("best_approx_xnorm: ref_factor >= 4 required");
  const SpaceTimeSpace Yref = make_yref(Xd, ref_factor);
  const FESpace1D& Tt = Xd.temporal;
  const FESpace1D& Tx = Xd.spatial;
  const double T = Tt.part.length();

  // X-norm Gram on X^d: Y-part and final trace exactly, dual part through the
  // reference space (Kronecker-factorized)
  const SpMat As = assemble_st(Xd, Xd, StOp::As, 0.0);
  const SpMat GT = assemble_st(Xd, Xd, StOp::GammaT, 0.0);
  const SpMat D0ref = pairing_matrix(Yref.temporal, Tt, PairKind::DerivOfTrial);
  const SpMat Mcross = pairing_matrix(Yref.spatial, Tx, PairKind::Value);
  SpMat invHt(Yref.temporal.dim(), Yref.temporal.dim());
  for (int k = 0; k < Yref.temporal.dim(); ++k)
    invHt.insert(k, k) = 1.0 / Yref.temporal.part.h(k);
  const SpMat Kdt = SpMat(D0ref.transpose()) * invHt * D0ref;

  const SpMat Axr = operator_matrix(Yref.spatial, Form::Stiffness);
  Eigen::SimplicialLLT<SpMat> llt_ref(Axr);
  if (llt_ref.info() != Eigen::Success)
    throw SolverFailure("best_approx_xnorm: reference stiffness not SPD");
  const Eigen::MatrixXd Mc = Eigen::MatrixXd(Mcross);
  const Eigen::MatrixXd Kdx_dense = Mc.transpose() * llt_ref.solve(Mc);
  SpMat Kdx(Tx.dim(), Tx.dim());
  {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(std::size_t(Tx.dim()) * Tx.dim());
    for (int i = 0; i < Tx.dim(); ++i)
      for (int j = 0; j < Tx.dim(); ++j) trip.emplace_back(i, j, Kdx_dense(i, j));
    Kdx.setFromTriplets(trip.begin(), trip.end());
  }
  SpMat G = As + GT + SpMat(Eigen::kroneckerProduct(Kdt, Kdx));
  G.makeCompressed();

  // right-hand side <u, chi>_X for each basis function chi of X^d
  Eigen::VectorXd b = Eigen::VectorXd::Zero(Xd.dim());
  {  // Y-part: integral of du/dx times dchi/dx
    std::vector<QPoint> qp;
    for (int et = 0; et < Tt.part.cells(); ++et) {
      for (int ex = 0; ex < Tx.part.cells(); ++ex) {
        cell_quadrature(Tt.part.pts[et], Tt.part.pts[et + 1], Tx.part.pts[ex],
                        Tx.part.pts[ex + 1], p.exact.singular_line, 5, qp);
        int td[2], tc, xd[2], xc;
        Tt.dofs_on_cell(et, td, tc);
        Tx.dofs_on_cell(ex, xd, xc);
        for (const QPoint& q : qp) {
          const double ux = p.exact.dx(q.t, q.x);
          for (int a = 0; a < tc; ++a) {
            const double tv = Tt.basis_value(td[a], q.t);
            for (int bq = 0; bq < xc; ++bq)
              b[Xd.index(td[a], xd[bq])] +=
                  q.w * ux * tv * Tx.basis_deriv_on_cell(xd[bq], ex);
          }
        }
      }
    }
  }
  {  // final-time trace part
    std::vector<double> gx, gw;
    gauss_rule(5, gx, gw);
    Eigen::VectorXd mT = Eigen::VectorXd::Zero(Tx.dim());
    for (int ex = 0; ex < Tx.part.cells(); ++ex) {
      const double a = Tx.part.pts[ex], h = Tx.part.h(ex);
      int xd[2], xc;
      Tx.dofs_on_cell(ex, xd, xc);
      for (std::size_t q = 0; q < gx.size(); ++q) {
        const double x = a + h * gx[q];
        const double w = h * gw[q] * p.exact.value(T, x);
        for (int bq = 0; bq < xc; ++bq) mT[xd[bq]] += w * Tx.basis_value(xd[bq], x);
      }
    }
    for (int kt = 0; kt < Tt.dim(); ++kt) {
      const double w = Tt.basis_value(kt, T);
      if (w == 0.0) continue;
      for (int kx = 0; kx < Tx.dim(); ++kx) b[Xd.index(kt, kx)] += w * mT[kx];
    }
  }
  {  // dual part: (Dref)' As_ref^{-1} F_u, slab by slab
    const Eigen::VectorXd Fu = dt_residual_load(p, Yref, nullptr, nullptr, ref_factor);
    const int dxr = Yref.spatial.dim();
    Eigen::MatrixXd Wr(Tx.dim(), Yref.temporal.dim());
    for (int r = 0; r < Yref.temporal.dim(); ++r) {
      const Eigen::VectorXd zr =
          llt_ref.solve(Fu.segment(r * dxr, dxr)) / Yref.temporal.part.h(r);
      Wr.col(r) = Mc.transpose() * zr;
    }
    for (int k = 0; k < D0ref.outerSize(); ++k)
      for (SpMat::InnerIterator it(D0ref, k); it; ++it)
        for (int kx = 0; kx < Tx.dim(); ++kx)
          b[Xd.index(int(it.col()), kx)] += it.value() * Wr(kx, int(it.row()));
  }

  Eigen::SimplicialLLT<SpMat> llt_g(G);
  if (llt_g.info() != Eigen::Success)
    throw SolverFailure("best_approx_xnorm: X-norm Gram not SPD");
  const Eigen::VectorXd c = llt_g.solve(b);
  const double err = error_of_coeffs(p, c, Xd, ref_factor).err_X;
  return {c, err};
}

}  // namespace stfem
