#include "stfem/assembly1d.hpp"

#include <array>
#include <cmath>

namespace stfem {

void gauss_rule(int n, std::vector<double>& x, std::vector<double>& w) {
  // abscissae/weights on [-1,1], mapped to [0,1]
  static const std::array<std::vector<double>, 8> xs = {{
      {},
      {0.0},
      {-0.5773502691896257645091488, 0.5773502691896257645091488},
      {-0.7745966692414833770358531, 0.0, 0.7745966692414833770358531},
      {-0.8611363115940525752239465, -0.3399810435848562648026658, 0.3399810435848562648026658,
       0.8611363115940525752239465},
      {-0.9061798459386639927976269, -0.5384693101056830910363144, 0.0,
       0.5384693101056830910363144, 0.9061798459386639927976269},
      {-0.9324695142031520278123016, -0.6612093864662645136613996, -0.2386191860831969086305017,
       0.2386191860831969086305017, 0.6612093864662645136613996, 0.9324695142031520278123016},
      {-0.9491079123427585245261897, -0.7415311855993944398638648, -0.4058451513773971669066064,
       0.0, 0.4058451513773971669066064, 0.7415311855993944398638648,
       0.9491079123427585245261897},
  }};
  static const std::array<std::vector<double>, 8> ws = {{
      {},
      {2.0},
      {1.0, 1.0},
      {0.5555555555555555555555556, 0.8888888888888888888888889, 0.5555555555555555555555556},
      {0.3478548451374538573730639, 0.6521451548625461426269361, 0.6521451548625461426269361,
       0.3478548451374538573730639},
      {0.2369268850561890875142640, 0.4786286704993664680412915, 0.5688888888888888888888889,
       0.4786286704993664680412915, 0.2369268850561890875142640},
      {0.1713244923791703450402961, 0.3607615730481386075698335, 0.4679139345726910473898703,
       0.4679139345726910473898703, 0.3607615730481386075698335, 0.1713244923791703450402961},
      {0.1294849661688696932706114, 0.2797053914892766679014678, 0.3818300505051189449503698,
       0.4179591836734693877551020, 0.3818300505051189449503698, 0.2797053914892766679014678,
       0.1294849661688696932706114},
  }};
  if (n < 1 || n > 7) throw std::invalid_argument("gauss_rule: n in 1..7");
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    x[i] = 0.5 * (xs[n][i] + 1.0);
    w[i] = 0.5 * ws[n][i];
  }
}

SpMat operator_matrix(const FESpace1D& sp, Form form) {
  if (sp.family == Family::P0 && form != Form::Mass)
    throw std::invalid_argument("operator_matrix: stiffness/convection need P1");
  const int d = sp.dim();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(4 * sp.part.cells());
  if (sp.family == Family::P0) {
    for (int e = 0; e < sp.part.cells(); ++e) trip.emplace_back(e, e, sp.part.h(e));
  } else {
    for (int e = 0; e < sp.part.cells(); ++e) {
      const double h = sp.part.h(e);
      int dofs[2], c;
      sp.dofs_on_cell(e, dofs, c);
      for (int a = 0; a < c; ++a) {
        for (int b = 0; b < c; ++b) {
          const int i = dofs[a], j = dofs[b];
          // local = which end of the cell the node sits on (0 = left)
          const int la = (sp.node_of(i) == e) ? 0 : 1;
          const int lb = (sp.node_of(j) == e) ? 0 : 1;
          double v = 0.0;
          switch (form) {
            case Form::Mass: v = (la == lb) ? h / 3.0 : h / 6.0; break;
            case Form::Stiffness: v = (la == lb ? 1.0 : -1.0) / h; break;
            case Form::Convection: v = (lb == 0 ? -0.5 : 0.5); break;  // phi_j' const, int phi_i = h/2
          }
          trip.emplace_back(i, j, v);
        }
      }
    }
  }
  SpMat M(d, d);
  M.setFromTriplets(trip.begin(), trip.end());
  return M;
}

namespace {

// partitions equal -> 0; trial refines test (test finer) -> +1; test refines trial -> -1
int nesting_direction(const Partition1D& test, const Partition1D& trial) {
  if (test == trial) return 0;
  if (trial.refines(test)) return +1;
  if (test.refines(trial)) return -1;
  throw std::invalid_argument("pairing_matrix: partitions neither equal nor nested");
}

}  // namespace

SpMat pairing_matrix(const FESpace1D& test, const FESpace1D& trial, PairKind kind) {
  if (kind == PairKind::DerivOfTrial && trial.family != Family::P1)
    throw std::invalid_argument("pairing_matrix: derivative pairing needs P1 trial");
  const int dir = nesting_direction(test.part, trial.part);
  const Partition1D& fine = (dir >= 0) ? test.part : trial.part;

  std::vector<double> gx, gw;
  gauss_rule(2, gx, gw);  // integrands are degree <= 2 per fine cell

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(4 * fine.cells());
  for (int e = 0; e < fine.cells(); ++e) {
    const double a = fine.pts[e], b = fine.pts[e + 1];
    const double mid = 0.5 * (a + b), len = b - a;
    const int et = (dir >= 0) ? e : test.part.find_cell(mid);
    const int er = (dir <= 0) ? e : trial.part.find_cell(mid);
    int ti[2], tc, ri[2], rc;
    test.dofs_on_cell(et, ti, tc);
    trial.dofs_on_cell(er, ri, rc);
    for (int q = 0; q < int(gx.size()); ++q) {
      const double x = a + len * gx[q];
      const double wq = len * gw[q];
      for (int s = 0; s < tc; ++s) {
        const double tv = test.basis_value(ti[s], x);
        if (tv == 0.0 && test.family == Family::P1) continue;
        for (int r = 0; r < rc; ++r) {
          const double rv = (kind == PairKind::Value) ? trial.basis_value(ri[r], x)
                                                      : trial.basis_deriv_on_cell(ri[r], er);
          trip.emplace_back(ti[s], ri[r], wq * tv * rv);
        }
      }
    }
  }
  SpMat M(test.dim(), trial.dim());
  M.setFromTriplets(trip.begin(), trip.end());
  return M;
}

SpMat prolongation_matrix(const FESpace1D& fine, const FESpace1D& coarse) {
  if (fine.family != coarse.family)
    throw std::invalid_argument("prolongation_matrix: family mismatch");
  if (!coarse.part.refines(fine.part))
    throw std::invalid_argument("prolongation_matrix: fine partition must refine coarse");
  std::vector<Eigen::Triplet<double>> trip;
  if (fine.family == Family::P0) {
    for (int e = 0; e < fine.part.cells(); ++e) {
      const double mid = 0.5 * (fine.part.pts[e] + fine.part.pts[e + 1]);
      trip.emplace_back(e, coarse.part.find_cell(mid), 1.0);
    }
  } else {
    if (coarse.zero_left != fine.zero_left || coarse.zero_right != fine.zero_right)
      throw std::invalid_argument("prolongation_matrix: constraint mismatch");
    for (int jf = 0; jf < fine.dim(); ++jf) {
      const double xn = fine.part.pts[fine.node_of(jf)];
      const int ec = coarse.part.find_cell(xn);
      int ci[2], cc;
      coarse.dofs_on_cell(ec, ci, cc);
      for (int s = 0; s < cc; ++s) {
        const double v = coarse.basis_value(ci[s], xn);
        if (v != 0.0) trip.emplace_back(jf, ci[s], v);
      }
    }
  }
  SpMat P(fine.dim(), coarse.dim());
  P.setFromTriplets(trip.begin(), trip.end());
  return P;
}

Eigen::MatrixXd hminus1_gram(const FESpace1D& sp) {
  if (sp.family != Family::P1 || !sp.zero_left || !sp.zero_right)
    throw std::invalid_argument("hminus1_gram: needs zero-both P1 space");
  const int d = sp.dim();
  const int ne = sp.part.cells();
  const double L = sp.part.length();
  const auto& pts = sp.part.pts;

  // F_k(x) = int_0^x phi_k: piecewise quadratic; store cell-start values, then
  // w_k'(x) = c_k - F_k(x) with c_k = (1/L)*0 shifted so that int_0^L w_k' = 0
  // ... i.e. w_k'(0) = c_k = (int_0^L F_k)/L ensures w_k(L) = 0.
  Eigen::MatrixXd F0(ne + 1, d);  // F_k at breakpoints
  F0.setZero();
  Eigen::VectorXd ck(d);
  auto phi_on_cell = [&](int k, int e, double& val_l, double& val_r) {
    val_l = sp.basis_value(k, pts[e]);
    val_r = sp.basis_value(k, pts[e + 1]);
  };
  for (int k = 0; k < d; ++k) {
    double acc = 0.0, iF = 0.0;
    for (int e = 0; e < ne; ++e) {
      const double h = sp.part.h(e);
      double vl, vr;
      phi_on_cell(k, e, vl, vr);
      F0(e, k) = acc;
      // int F over this cell: F(x) = acc + vl*s + (vr-vl)/(2h)*s^2, s = x - pts[e]
      iF += acc * h + vl * h * h / 2.0 + (vr - vl) * h * h / 6.0;
      acc += 0.5 * (vl + vr) * h;
    }
    F0(ne, k) = acc;
    ck[k] = iF / L;
  }

  std::vector<double> gx, gw;
  gauss_rule(4, gx, gw);
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(d, d);
  std::vector<double> wp(d);  // w_k'(x) at one quad point, all k
  for (int e = 0; e < ne; ++e) {
    const double h = sp.part.h(e);
    for (int q = 0; q < int(gx.size()); ++q) {
      const double s = h * gx[q];
      const double wq = h * gw[q];
      for (int k = 0; k < d; ++k) {
        double vl, vr;
        phi_on_cell(k, e, vl, vr);
        const double Fx = F0(e, k) + vl * s + 0.5 * (vr - vl) * s * s / h;
        wp[k] = ck[k] - Fx;
      }
      for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) W(i, j) += wq * wp[i] * wp[j];
    }
  }
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < i; ++j) W(i, j) = W(j, i);
  return W;
}

}  // namespace stfem
