#include "stfem/systems.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <cmath>
#include <vector>

namespace stfem {

Loads make_loads(const SpaceTimeSpace& Xd, const SpaceTimeSpace& Yd, const ProblemDef& problem) {
  Loads d;
  d.on_test_Y = assemble_load(Yd, problem);
  d.on_trial_X = assemble_load(Xd, problem);
  d.init_X = assemble_initial(Xd, problem.u0);
  return d;
}

namespace {

void check_sizes(const SpaceTimeSpace& Xd, const SpaceTimeSpace& Yd, const Loads& d) {
  if (d.on_test_Y.size() != Yd.dim() || d.on_trial_X.size() != Xd.dim() ||
      d.init_X.size() != Xd.dim())
    throw std::invalid_argument("system build: load vector sizes do not match the spaces");
}

SpMat embedding_matrix(const SpaceTimeSpace& full, const SpaceTimeSpace& constrained) {
  const int dx = full.spatial.dim();
  SpMat E(full.dim(), constrained.dim());
  std::vector<Eigen::Triplet<double>> trip;
  for (int j = 0; j < constrained.temporal.dim(); ++j) {
    const int node = constrained.temporal.node_of(j);
    const int jf = full.temporal.dof_at_node(node);
    for (int k = 0; k < dx; ++k)
      trip.emplace_back(jf * dx + k, j * dx + k, 1.0);
  }
  E.setFromTriplets(trip.begin(), trip.end());
  return E;
}

}  // namespace

SaddleSystem build_new_mixed(const SpaceTimeSpace& Xd, const SpaceTimeSpace& Yd,
                             const Loads& data, double beta) {
  if (Xd.temporal.family != Family::P1 || Xd.temporal.zero_left)
    throw std::invalid_argument("build_new_mixed: trial temporal factor must be P1, free at t=0");
  check_sizes(Xd, Yd, data);
  SaddleSystem s;
  s.method = "new_mixed";
  s.label1 = "lambda";
  s.label2 = "u";
  s.symmetric = true;
  s.n1 = Yd.dim();
  s.n2 = Xd.dim();
  s.B11 = assemble_st(Yd, Yd, StOp::As, beta);
  s.B12 = assemble_st(Xd, Yd, StOp::C, beta);
  s.B21 = SpMat(s.B12.transpose());
  const SpMat As_xx = assemble_st(Xd, Xd, StOp::As, beta);
  const SpMat Gt = assemble_st(Xd, Xd, StOp::GammaT, beta);
  s.B22 = SpMat(-(As_xx + Gt));
  s.rhs1 = data.on_test_Y;
  s.rhs2 = -(data.on_trial_X + data.init_X);
  return s;
}

SaddleSystem build_new_mixed(const SpaceTimeSpace& Xd, const SpaceTimeSpace& Yd,
                             const ProblemDef& problem) {
  return build_new_mixed(Xd, Yd, make_loads(Xd, Yd, problem), problem.beta);
}

SaddleSystem build_andreev(const SpaceTimeSpace& Xd, const SpaceTimeSpace& Yd,
                           const Loads& data, double beta) {
  if (Yd.temporal.family != Family::P1 || Yd.temporal.zero_left || Yd.temporal.zero_right ||
      !(Yd.temporal.part == Xd.temporal.part.refined(2)))
    throw std::invalid_argument(
        "build_andreev: test temporal factor must be unconstrained P1 on the once-dyadically "
        "refined partition (X^d must embed into Y^d)");
  check_sizes(Xd, Yd, data);
  SaddleSystem s;
  s.method = "andreev";
  s.label1 = "mu";
  s.label2 = "u";
  s.symmetric = true;
  s.n1 = Yd.dim();
  s.n2 = Xd.dim();
  s.B11 = assemble_st(Yd, Yd, StOp::As, beta);
  s.B12 = assemble_st(Xd, Yd, StOp::B, beta);
  s.B21 = SpMat(s.B12.transpose());
  s.B22 = SpMat(-assemble_st(Xd, Xd, StOp::Gamma0, beta));
  s.rhs1 = data.on_test_Y;
  s.rhs2 = -data.init_X;
  return s;
}

SaddleSystem build_andreev(const SpaceTimeSpace& Xd, const SpaceTimeSpace& Yd,
                           const ProblemDef& problem) {
  return build_andreev(Xd, Yd, make_loads(Xd, Yd, problem), problem.beta);
}

SaddleSystem build_steinbach(const SpaceTimeSpace& Xd0, const Loads& data, double beta,
                             const Eigen::VectorXd& lift_x) {
  if (!Xd0.temporal.zero_left || Xd0.temporal.family != Family::P1)
    throw std::invalid_argument("build_steinbach: temporal factor must be P1 with zero-left");
  if (lift_x.size() != Xd0.spatial.dim())
    throw std::invalid_argument("build_steinbach: lifting coefficients do not match the spatial factor");
  const FESpace1D full_t(Xd0.temporal.part, Family::P1);
  const SpaceTimeSpace Xfull(full_t, Xd0.spatial);
  if (data.on_trial_X.size() != Xfull.dim())
    throw std::invalid_argument("build_steinbach: load vector size does not match the full space");
  SaddleSystem s;
  s.method = "steinbach";
  s.label2 = "u";
  s.symmetric = false;
  s.n1 = 0;
  s.n2 = Xd0.dim();
  s.embed = embedding_matrix(Xfull, Xd0);
  s.lift = steinbach_lift(Xfull, lift_x);
  s.B22 = assemble_st(Xd0, Xd0, StOp::B, beta);
  const SpMat Bcross = assemble_st(Xfull, Xd0, StOp::B, beta);
  s.rhs2 = SpMat(s.embed.transpose()) * data.on_trial_X - Bcross * s.lift;
  return s;
}

SaddleSystem build_steinbach(const SpaceTimeSpace& Xd0, const ProblemDef& problem) {
  // The lifting is the nodal interpolant of u0 in the spatial factor; that
  // requires u0 to vanish at both ends of (0,1).
  if (std::abs(problem.u0(0.0)) > 1e-12 || std::abs(problem.u0(1.0)) > 1e-12)
    throw std::invalid_argument(
        "build_steinbach: u0 has no conforming spatial representation (nonzero boundary values)");
  const FESpace1D& Sx = Xd0.spatial;
  Eigen::VectorXd lift_x(Sx.dim());
  for (int k = 0; k < Sx.dim(); ++k) lift_x[k] = problem.u0(Sx.part.pts[Sx.node_of(k)]);
  const FESpace1D full_t(Xd0.temporal.part, Family::P1);
  const SpaceTimeSpace Xfull(full_t, Xd0.spatial);
  Loads d;
  d.on_trial_X = assemble_load(Xfull, problem);
  return build_steinbach(Xd0, d, problem.beta, lift_x);
}

Eigen::VectorXd steinbach_lift(const SpaceTimeSpace& Xd, const Eigen::VectorXd& u0_coeffs) {
  if (u0_coeffs.size() != Xd.spatial.dim())
    throw std::invalid_argument("steinbach_lift: coefficient length does not match the spatial factor");
  Eigen::VectorXd out(Xd.dim());
  for (int kt = 0; kt < Xd.temporal.dim(); ++kt)
    for (int kx = 0; kx < Xd.spatial.dim(); ++kx) out[Xd.index(kt, kx)] = u0_coeffs[kx];
  return out;
}

namespace {

SpMat assemble_full(const SaddleSystem& s) {
  if (s.n1 == 0) return s.B22;
  SpMat K(s.n1 + s.n2, s.n1 + s.n2);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(s.B11.nonZeros() + s.B12.nonZeros() + s.B21.nonZeros() + s.B22.nonZeros());
  auto add = [&trip](const SpMat& m, int r0, int c0) {
    for (int k = 0; k < m.outerSize(); ++k)
      for (SpMat::InnerIterator it(m, k); it; ++it)
        trip.emplace_back(r0 + int(it.row()), c0 + int(it.col()), it.value());
  };
  add(s.B11, 0, 0);
  add(s.B12, 0, s.n1);
  add(s.B21, s.n1, 0);
  add(s.B22, s.n1, s.n1);
  K.setFromTriplets(trip.begin(), trip.end());
  return K;
}

double relative_residual(const SpMat& K, const Eigen::VectorXd& x, const Eigen::VectorXd& r) {
  const double rn = r.norm();
  return rn > 0.0 ? (K * x - r).norm() / rn : (K * x).norm();
}

Solution finish(const SaddleSystem& s, const Eigen::VectorXd& w, double residual, int iters) {
  Solution sol;
  sol.method = s.method;
  sol.residual = residual;
  sol.iterations = iters;
  if (s.n1 == 0) {
    sol.u_coeffs = s.embed.size() > 0 ? Eigen::VectorXd(s.embed * w + s.lift) : w;
  } else {
    sol.aux_coeffs = w.head(s.n1);
    sol.u_coeffs = w.tail(s.n2);
  }
  return sol;
}

}  // namespace

Solution solve_direct(const SaddleSystem& sys) {
  const SpMat K = assemble_full(sys);
  Eigen::VectorXd rhs(K.rows());
  if (sys.n1 > 0)
    rhs << sys.rhs1, sys.rhs2;
  else
    rhs = sys.rhs2;
  Eigen::SparseLU<SpMat> lu;
  lu.compute(K);
  if (lu.info() != Eigen::Success)
    throw SolverFailure("solve_direct: factorization failed (matrix numerically singular, dim " +
                        std::to_string(K.rows()) + ")");
  const Eigen::VectorXd x = lu.solve(rhs);
  const double res = relative_residual(K, x, rhs);
  if (!(res <= 1e-8))
    throw SolverFailure("solve_direct: relative residual " + std::to_string(res) +
                        " exceeds tolerance (ill-conditioned factorization)");
  return finish(sys, x, res, 0);
}

Solution solve_schur_cg(const SaddleSystem& sys) {
  if (sys.n1 == 0 || !sys.symmetric)
    throw std::invalid_argument("solve_schur_cg: needs a symmetric 2x2 saddle system");
  Eigen::SimplicialLLT<SpMat> llt;
  llt.compute(sys.B11);
  if (llt.info() != Eigen::Success)
    throw SolverFailure("solve_schur_cg: (1,1) block is not SPD");
  auto apply_s = [&](const Eigen::VectorXd& u) -> Eigen::VectorXd {
    return sys.B21 * llt.solve(sys.B12 * u) - sys.B22 * u;
  };
  const Eigen::VectorXd rhs_s = sys.B21 * llt.solve(sys.rhs1) - sys.rhs2;

  Eigen::VectorXd x = Eigen::VectorXd::Zero(sys.n2);
  Eigen::VectorXd r = rhs_s;
  double rs = r.squaredNorm();
  const double tol = 1e-10 * std::sqrt(rs);
  const int maxit = int(10.0 * std::sqrt(double(sys.n1 + sys.n2))) + 1;
  int it = 0;
  if (std::sqrt(rs) > 0.0) {
    Eigen::VectorXd p = r;
    for (it = 1; it <= maxit; ++it) {
      const Eigen::VectorXd q = apply_s(p);
      const double pq = p.dot(q);
      if (!(pq > 0.0))
        throw SolverFailure("solve_schur_cg: Schur complement lost positivity (Ritz check)");
      const double alpha = rs / pq;
      x += alpha * p;
      r -= alpha * q;
      const double rs_new = r.squaredNorm();
      if (std::sqrt(rs_new) <= tol) break;
      p = r + (rs_new / rs) * p;
      rs = rs_new;
      if (it == maxit)
        throw SolverFailure("solve_schur_cg: no convergence in " + std::to_string(maxit) +
                            " iterations");
    }
  }
  const Eigen::VectorXd aux = llt.solve(sys.rhs1 - sys.B12 * x);
  Eigen::VectorXd full(sys.n1 + sys.n2);
  full << aux, x;
  Eigen::VectorXd rhs(sys.n1 + sys.n2);
  rhs << sys.rhs1, sys.rhs2;
  const double res = relative_residual(assemble_full(sys), full, rhs);
  return finish(sys, full, res, it);
}

}  // namespace stfem
