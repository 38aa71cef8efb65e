#include "stfem/st_assembly.hpp"

#include <unsupported/Eigen/KroneckerProduct>
#include <cmath>

namespace stfem {

ProblemDef make_smooth_problem(double beta) {
  ProblemDef p;
  p.beta = beta;
  const double pi = M_PI;
  p.exact.value = [pi](double t, double x) { return std::exp(-2.0 * t) * std::sin(pi * x); };
  p.exact.dt = [pi](double t, double x) { return -2.0 * std::exp(-2.0 * t) * std::sin(pi * x); };
  p.exact.dx = [pi](double t, double x) { return pi * std::exp(-2.0 * t) * std::cos(pi * x); };
  p.exact.singular_line = false;
  p.u0 = [pi](double x) { return std::sin(pi * x); };
  return p;
}

ProblemDef make_singular_problem(double beta) {
  ProblemDef p;
  p.beta = beta;
  const double pi = M_PI;
  auto sgn = [](double s) { return s > 0.0 ? 1.0 : (s < 0.0 ? -1.0 : 0.0); };
  p.exact.value = [pi](double t, double x) {
    return std::exp(-2.0 * t) * std::abs(t - x) * std::sin(pi * x);
  };
  p.exact.dt = [pi, sgn](double t, double x) {
    return std::exp(-2.0 * t) * (sgn(t - x) - 2.0 * std::abs(t - x)) * std::sin(pi * x);
  };
  p.exact.dx = [pi, sgn](double t, double x) {
    return std::exp(-2.0 * t) *
           (-sgn(t - x) * std::sin(pi * x) + std::abs(t - x) * pi * std::cos(pi * x));
  };
  p.exact.singular_line = true;
  p.u0 = [pi](double x) { return x * std::sin(pi * x); };
  return p;
}

namespace {

SpMat temporal_trace(const FESpace1D& test_t, const FESpace1D& trial_t, double s) {
  Eigen::VectorXd et(test_t.dim()), er(trial_t.dim());
  for (int i = 0; i < test_t.dim(); ++i) et[i] = test_t.basis_value(i, s);
  for (int j = 0; j < trial_t.dim(); ++j) er[j] = trial_t.basis_value(j, s);
  return SpMat((et * er.transpose()).sparseView());
}

bool same_space(const FESpace1D& a, const FESpace1D& b) {
  return a.family == b.family && a.zero_left == b.zero_left && a.zero_right == b.zero_right &&
         a.part == b.part;
}

}  // namespace

SpMat assemble_st(const SpaceTimeSpace& trial, const SpaceTimeSpace& test, StOp op, double beta) {
  if (!same_space(trial.spatial, test.spatial))
    throw std::invalid_argument("assemble_st: spatial factors must coincide");
  const FESpace1D& Xt = trial.temporal;
  const FESpace1D& Yt = test.temporal;
  const SpMat Ax = operator_matrix(trial.spatial, Form::Stiffness);
  const SpMat Mx = operator_matrix(trial.spatial, Form::Mass);

  auto Mt = [&] { return pairing_matrix(Yt, Xt, PairKind::Value); };
  auto Dt = [&] { return pairing_matrix(Yt, Xt, PairKind::DerivOfTrial); };

  SpMat out;
  switch (op) {
    case StOp::As: out = Eigen::kroneckerProduct(Mt(), Ax); break;
    case StOp::Aa: {
      const SpMat Nx = operator_matrix(trial.spatial, Form::Convection);
      out = beta * Eigen::kroneckerProduct(Mt(), Nx);
      break;
    }
    case StOp::Dt: out = Eigen::kroneckerProduct(Dt(), Mx); break;
    case StOp::B: {
      const SpMat Nx = operator_matrix(trial.spatial, Form::Convection);
      const SpMat Sx = Ax + SpMat(beta * Nx);
      out = SpMat(Eigen::kroneckerProduct(Dt(), Mx)) + SpMat(Eigen::kroneckerProduct(Mt(), Sx));
      break;
    }
    case StOp::C: {
      const SpMat Nx = operator_matrix(trial.spatial, Form::Convection);
      out = SpMat(Eigen::kroneckerProduct(Dt(), Mx)) +
            SpMat(beta * Eigen::kroneckerProduct(Mt(), Nx));
      break;
    }
    case StOp::Gamma0: out = Eigen::kroneckerProduct(temporal_trace(Yt, Xt, 0.0), Mx); break;
    case StOp::GammaT:
      out = Eigen::kroneckerProduct(temporal_trace(Yt, Xt, Xt.part.length()), Mx);
      break;
  }
  out.makeCompressed();
  return out;
}

namespace {

// degree-5 rule on the reference triangle, weights sum to 1
constexpr int kTriPts = 7;
const double kTriW[kTriPts] = {0.225,
                               0.13239415278850618,  0.13239415278850618, 0.13239415278850618,
                               0.12593918054482715,  0.12593918054482715, 0.12593918054482715};
const double kTriA[kTriPts] = {1.0 / 3.0, 0.059715871789769820, 0.47014206410511509,
                               0.47014206410511509, 0.79742698535308732, 0.10128650732345634,
                               0.10128650732345634};
const double kTriB[kTriPts] = {1.0 / 3.0, 0.47014206410511509, 0.059715871789769820,
                               0.47014206410511509, 0.10128650732345634, 0.79742698535308732,
                               0.10128650732345634};

void triangle_points(const double (&tv)[3], const double (&xv)[3], std::vector<QPoint>& out) {
  const double area =
      0.5 * std::abs((tv[1] - tv[0]) * (xv[2] - xv[0]) - (tv[2] - tv[0]) * (xv[1] - xv[0]));
  if (area < 1e-30) return;
  for (int q = 0; q < kTriPts; ++q) {
    const double l0 = kTriA[q], l1 = kTriB[q], l2 = 1.0 - l0 - l1;
    out.push_back({l0 * tv[0] + l1 * tv[1] + l2 * tv[2],
                   l0 * xv[0] + l1 * xv[1] + l2 * xv[2], kTriW[q] * area});
  }
}

// clip polygon (t,x) against sign*(t-x) >= 0
void clip_polygon(const std::vector<std::pair<double, double>>& poly, double sign,
                  std::vector<std::pair<double, double>>& out) {
  out.clear();
  const int n = int(poly.size());
  for (int i = 0; i < n; ++i) {
    const auto& a = poly[i];
    const auto& b = poly[(i + 1) % n];
    const double fa = sign * (a.first - a.second);
    const double fb = sign * (b.first - b.second);
    if (fa >= 0.0) out.push_back(a);
    if ((fa > 0.0 && fb < 0.0) || (fa < 0.0 && fb > 0.0)) {
      const double s = fa / (fa - fb);
      out.emplace_back(a.first + s * (b.first - a.first), a.second + s * (b.second - a.second));
    }
  }
}

}  // namespace

void cell_quadrature(double t0, double t1, double x0, double x1, bool split_line, int order,
                     std::vector<QPoint>& out) {
  out.clear();
  const bool crossed = split_line && (t1 > x0) && (x1 > t0);
  if (!crossed) {
    static thread_local std::vector<double> gx, gw;
    static thread_local int cached = -1;
    if (cached != order) {
      gauss_rule(order, gx, gw);
      cached = order;
    }
    const double ht = t1 - t0, hx = x1 - x0;
    for (int a = 0; a < order; ++a)
      for (int b = 0; b < order; ++b)
        out.push_back({t0 + ht * gx[a], x0 + hx * gx[b], ht * hx * gw[a] * gw[b]});
    return;
  }
  const std::vector<std::pair<double, double>> rect = {{t0, x0}, {t1, x0}, {t1, x1}, {t0, x1}};
  std::vector<std::pair<double, double>> piece;
  for (double sign : {+1.0, -1.0}) {
    clip_polygon(rect, sign, piece);
    for (std::size_t k = 2; k < piece.size(); ++k) {
      const double tv[3] = {piece[0].first, piece[k - 1].first, piece[k].first};
      const double xv[3] = {piece[0].second, piece[k - 1].second, piece[k].second};
      triangle_points(tv, xv, out);
    }
  }
}

Eigen::VectorXd assemble_load(const SpaceTimeSpace& test, const ProblemDef& problem) {
  const FESpace1D& Tt = test.temporal;
  const FESpace1D& Tx = test.spatial;
  Eigen::VectorXd g = Eigen::VectorXd::Zero(test.dim());
  std::vector<QPoint> qp;
  const double beta = problem.beta;
  for (int et = 0; et < Tt.part.cells(); ++et) {
    for (int ex = 0; ex < Tx.part.cells(); ++ex) {
      cell_quadrature(Tt.part.pts[et], Tt.part.pts[et + 1], Tx.part.pts[ex], Tx.part.pts[ex + 1],
                      problem.exact.singular_line, 5, qp);
      int td[2], tc, xd[2], xc;
      Tt.dofs_on_cell(et, td, tc);
      Tx.dofs_on_cell(ex, xd, xc);
      for (const QPoint& q : qp) {
        const double ut = problem.exact.dt(q.t, q.x);
        const double ux = problem.exact.dx(q.t, q.x);
        for (int a = 0; a < tc; ++a) {
          const double tau = Tt.basis_value(td[a], q.t);
          for (int b = 0; b < xc; ++b) {
            const double sig = Tx.basis_value(xd[b], q.x);
            const double sigx = Tx.basis_deriv_on_cell(xd[b], ex);
            g[test.index(td[a], xd[b])] +=
                q.w * (ut * tau * sig + ux * tau * sigx + beta * ux * tau * sig);
          }
        }
      }
    }
  }
  return g;
}

Eigen::VectorXd assemble_initial(const SpaceTimeSpace& test,
                                 const std::function<double(double)>& u0) {
  const FESpace1D& Tt = test.temporal;
  const FESpace1D& Tx = test.spatial;
  if (Tt.family != Family::P1)
    throw std::invalid_argument("assemble_initial: temporal factor needs a trace at t=0");
  Eigen::VectorXd m = Eigen::VectorXd::Zero(Tx.dim());
  std::vector<double> gx, gw;
  gauss_rule(5, gx, gw);
  for (int ex = 0; ex < Tx.part.cells(); ++ex) {
    const double a = Tx.part.pts[ex], h = Tx.part.h(ex);
    int xd[2], xc;
    Tx.dofs_on_cell(ex, xd, xc);
    for (int q = 0; q < int(gx.size()); ++q) {
      const double x = a + h * gx[q];
      const double w = h * gw[q] * u0(x);
      for (int b = 0; b < xc; ++b) m[xd[b]] += w * Tx.basis_value(xd[b], x);
    }
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(test.dim());
  for (int kt = 0; kt < Tt.dim(); ++kt) {
    const double e0 = Tt.basis_value(kt, 0.0);
    if (e0 == 0.0) continue;
    for (int kx = 0; kx < Tx.dim(); ++kx) out[test.index(kt, kx)] = e0 * m[kx];
  }
  return out;
}

}  // namespace stfem
