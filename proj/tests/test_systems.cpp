#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "doctest.h"
#include "stfem/systems.hpp"

using namespace stfem;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

SpaceTimeSpace trial_space(int N) {
  return SpaceTimeSpace(FESpace1D(Partition1D::uniform(N), Family::P1),
                        FESpace1D(Partition1D::uniform(N), Family::P1, true, true));
}

SpaceTimeSpace zero_left_space(int N) {
  return SpaceTimeSpace(FESpace1D(Partition1D::uniform(N), Family::P1, true, false),
                        FESpace1D(Partition1D::uniform(N), Family::P1, true, true));
}

SpaceTimeSpace p0_pair(const SpaceTimeSpace& Xd) {
  return SpaceTimeSpace(FESpace1D(Xd.temporal.part, Family::P0), Xd.spatial);
}

SpaceTimeSpace andreev_pair(const SpaceTimeSpace& Xd) {
  return SpaceTimeSpace(FESpace1D(Xd.temporal.part.refined(2), Family::P1), Xd.spatial);
}

VectorXd random_vec(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g;
  VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = g(rng);
  return v;
}

Loads seed_loads(const SpaceTimeSpace& Xd, const SpaceTimeSpace& Yd, const VectorXd& c,
                 double beta) {
  Loads d;
  d.on_test_Y = assemble_st(Xd, Yd, StOp::B, beta) * c;
  d.on_trial_X = assemble_st(Xd, Xd, StOp::B, beta) * c;
  d.init_X = assemble_st(Xd, Xd, StOp::Gamma0, 0.0) * c;
  return d;
}

int total_nnz(const SaddleSystem& s) {
  return int(s.B11.nonZeros() + s.B12.nonZeros() + s.B21.nonZeros() + s.B22.nonZeros());
}

// Y-norm of u^delta - lambda^delta across the two factor spaces
double gap_y_norm(const SpaceTimeSpace& Xd, const SpaceTimeSpace& Yd, const VectorXd& u,
                  const VectorXd& lam) {
  const SpMat Axx = assemble_st(Xd, Xd, StOp::As, 0.0);
  const SpMat Ayy = assemble_st(Yd, Yd, StOp::As, 0.0);
  const SpMat Ayx = assemble_st(Xd, Yd, StOp::As, 0.0);
  const double sq = u.dot(Axx * u) - 2.0 * lam.dot(Ayx * u) + lam.dot(Ayy * lam);
  return std::sqrt(std::max(0.0, sq));
}

}  // namespace

TEST_CASE("new_mixed blocks: C off-diagonal, -(As+GammaT) lower right, symmetric") {
  const SpaceTimeSpace Xd = trial_space(4);
  const SpaceTimeSpace Yd = p0_pair(Xd);
  const ProblemDef p = make_smooth_problem(0.0);
  const SaddleSystem s = build_new_mixed(Xd, Yd, p);
  REQUIRE(s.n1 == Yd.dim());
  REQUIRE(s.n2 == Xd.dim());
  CHECK(s.symmetric);
  CHECK(MatrixXd(s.B11 - assemble_st(Yd, Yd, StOp::As, 0.0)).norm() == 0.0);
  CHECK(MatrixXd(s.B12 - assemble_st(Xd, Yd, StOp::Dt, 0.0)).norm() == 0.0);  // C = Dt at beta 0
  CHECK(MatrixXd(s.B21 - SpMat(s.B12.transpose())).norm() == 0.0);
  const SpMat want = assemble_st(Xd, Xd, StOp::As, 0.0) + assemble_st(Xd, Xd, StOp::GammaT, 0.0);
  CHECK(MatrixXd(s.B22 + want).norm() <= 1e-14 * MatrixXd(want).norm());
}

TEST_CASE("system sparsity: new_mixed has about half the nonzeros of andreev") {
  const SpaceTimeSpace Xd = trial_space(32);
  const ProblemDef p = make_smooth_problem(0.0);
  const double ratio = double(total_nnz(build_new_mixed(Xd, p0_pair(Xd), p))) /
                       double(total_nnz(build_andreev(Xd, andreev_pair(Xd), p)));
  CHECK(ratio >= 0.42);
  CHECK(ratio <= 0.58);
}

TEST_CASE("andreev structure: zero initial datum, low-rank corner block") {
  const SpaceTimeSpace Xd = trial_space(4);
  const SpaceTimeSpace Yd = andreev_pair(Xd);
  ProblemDef p = make_smooth_problem(0.0);
  p.u0 = [](double) { return 0.0; };
  const SaddleSystem s = build_andreev(Xd, Yd, p);
  CHECK(s.rhs2.norm() == 0.0);
  CHECK(s.symmetric);
  CHECK(Eigen::FullPivLU<MatrixXd>(MatrixXd(s.B22)).rank() == Xd.spatial.dim());
}

TEST_CASE("andreev rejects test spaces that do not refine the trial partition") {
  const SpaceTimeSpace Xd = trial_space(4);
  const ProblemDef p = make_smooth_problem(0.0);
  CHECK_THROWS_AS(build_andreev(Xd, trial_space(4), p), std::invalid_argument);
  const SpaceTimeSpace Y3(FESpace1D(Xd.temporal.part.refined(3), Family::P1), Xd.spatial);
  CHECK_THROWS_AS(build_andreev(Xd, Y3, p), std::invalid_argument);
}

TEST_CASE("steinbach: nonsymmetric matrix, boundary-incompatible data rejected") {
  const SpaceTimeSpace X0 = zero_left_space(4);
  const SaddleSystem s = build_steinbach(X0, make_smooth_problem(0.0));
  CHECK(MatrixXd(s.B22 - SpMat(s.B22.transpose())).norm() > 0.0);
  CHECK(s.n1 == 0);

  ProblemDef bad = make_smooth_problem(0.0);
  bad.u0 = [](double x) { return x; };  // u0(1) != 0: no conforming lift
  CHECK_THROWS_AS(build_steinbach(X0, bad), std::invalid_argument);
}

TEST_CASE("steinbach with zero initial datum has the plain load as rhs") {
  const SpaceTimeSpace X0 = zero_left_space(5);
  ProblemDef p = make_singular_problem(0.0);  // u0 = |0-x| sin(pi x) -> replaced below
  p.u0 = [](double) { return 0.0; };
  const SaddleSystem s = build_steinbach(X0, p);
  const VectorXd g = assemble_load(X0, p);
  CHECK((s.rhs2 - g).norm() <= 1e-14 * g.norm());
}

TEST_CASE("steinbach lift is the constant-in-time extension") {
  const SpaceTimeSpace Xd = trial_space(5);
  CHECK(steinbach_lift(Xd, VectorXd::Zero(Xd.spatial.dim())).norm() == 0.0);
  const VectorXd ux = random_vec(Xd.spatial.dim(), 3);
  const VectorXd lift = steinbach_lift(Xd, ux);
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int k = 0; k < 8; ++k) {
    const double t = u01(rng), x = u01(rng);
    double want = 0.0;
    for (int kx = 0; kx < Xd.spatial.dim(); ++kx) want += ux[kx] * Xd.spatial.basis_value(kx, x);
    double got = 0.0;
    for (int kt = 0; kt < Xd.temporal.dim(); ++kt)
      for (int kx = 0; kx < Xd.spatial.dim(); ++kx)
        got += lift[Xd.index(kt, kx)] * Xd.temporal.basis_value(kt, t) *
               Xd.spatial.basis_value(kx, x);
    CHECK(got == doctest::Approx(want).epsilon(1e-13));
  }
  const SpaceTimeSpace Y0 = p0_pair(Xd);
  CHECK((assemble_st(Xd, Y0, StOp::Dt, 0.0) * lift).norm() <= 1e-13);
}

TEST_CASE("consistency: seeded exact solution is reproduced") {
  const SpaceTimeSpace Xd = trial_space(6);
  const VectorXd c = random_vec(Xd.dim(), 7);

  SUBCASE("new_mixed at beta = 0") {
    const SpaceTimeSpace Yd = p0_pair(Xd);
    const Solution s = solve_direct(build_new_mixed(Xd, Yd, seed_loads(Xd, Yd, c, 0.0), 0.0));
    CHECK((s.u_coeffs - c).lpNorm<Eigen::Infinity>() <= 1e-9);
  }
  SUBCASE("andreev at beta = 0 and beta = 100") {
    const SpaceTimeSpace Yd = andreev_pair(Xd);
    for (double beta : {0.0, 100.0}) {
      const Solution s = solve_direct(build_andreev(Xd, Yd, seed_loads(Xd, Yd, c, beta), beta));
      CHECK((s.u_coeffs - c).lpNorm<Eigen::Infinity>() <= 1e-9);
    }
  }
  SUBCASE("steinbach at beta = 0 and beta = 100") {
    const SpaceTimeSpace X0 = zero_left_space(6);
    const SpaceTimeSpace Xf = trial_space(6);
    const VectorXd lift_x = random_vec(Xf.spatial.dim(), 11);
    SpMat embed(Xf.dim(), X0.dim());  // zero-left drops the kt = 0 row of dofs
    for (int kt = 1; kt < Xf.temporal.dim(); ++kt)
      for (int kx = 0; kx < Xf.spatial.dim(); ++kx)
        embed.insert(Xf.index(kt, kx), X0.index(kt - 1, kx)) = 1.0;
    const VectorXd w = random_vec(X0.dim(), 13);
    const VectorXd target = embed * w + steinbach_lift(Xf, lift_x);
    for (double beta : {0.0, 100.0}) {
      Loads d;
      d.on_trial_X = assemble_st(Xf, Xf, StOp::B, beta) * target;
      const Solution s = solve_direct(build_steinbach(X0, d, beta, lift_x));
      CHECK((s.u_coeffs - target).lpNorm<Eigen::Infinity>() <= 1e-9);
    }
  }
}

TEST_CASE("solve_direct: identity system and random SPD system vs dense oracle") {
  SaddleSystem id;
  id.n1 = 0;
  id.n2 = 6;
  id.method = "steinbach";
  id.label2 = "u";
  SpMat I(6, 6);
  I.setIdentity();
  id.B22 = I;
  id.rhs2 = random_vec(6, 19);
  const Solution si = solve_direct(id);
  CHECK((si.u_coeffs - id.rhs2).norm() <= 1e-14 * id.rhs2.norm());

  const int n = 50;
  MatrixXd Ad = MatrixXd::Zero(n, n);
  std::mt19937 rng(23);
  std::normal_distribution<double> g;
  for (int i = 0; i < n; ++i) {
    Ad(i, i) = 4.0;
    if (i + 1 < n) Ad(i, i + 1) = Ad(i + 1, i) = g(rng) * 0.5;
    if (i + 7 < n) Ad(i, i + 7) = Ad(i + 7, i) = g(rng) * 0.3;
  }
  SaddleSystem sys;
  sys.n1 = 0;
  sys.n2 = n;
  sys.method = "steinbach";
  sys.B22 = Ad.sparseView();
  sys.rhs2 = random_vec(n, 29);
  const Solution s = solve_direct(sys);
  const VectorXd oracle = Ad.partialPivLu().solve(sys.rhs2);
  CHECK((s.u_coeffs - oracle).norm() <= 1e-10 * oracle.norm());
  CHECK(s.residual <= 1e-10);
}

TEST_CASE("solve_direct reports small residuals on the real systems") {
  const SpaceTimeSpace Xd = trial_space(4);
  const ProblemDef p = make_smooth_problem(0.0);
  const Solution s = solve_direct(build_new_mixed(Xd, p0_pair(Xd), p));
  CHECK(s.residual <= 1e-10);
  CHECK(s.aux_coeffs.has_value());
  CHECK(s.aux_coeffs->size() == p0_pair(Xd).dim());
}

TEST_CASE("solve_direct throws on singular systems") {
  SaddleSystem sys;
  sys.n1 = 0;
  sys.n2 = 3;
  sys.method = "steinbach";
  MatrixXd Ad = MatrixXd::Zero(3, 3);
  Ad(0, 0) = 1.0;
  Ad(1, 1) = 1.0;  // third row/col identically zero
  sys.B22 = Ad.sparseView();
  sys.rhs2 = VectorXd::Ones(3);
  CHECK_THROWS_AS(solve_direct(sys), SolverFailure);
}

TEST_CASE("schur_cg agrees with direct and its operator is positive") {
  const ProblemDef p = make_smooth_problem(0.0);
  const SpaceTimeSpace Xd = trial_space(8);

  for (bool andreev : {false, true}) {
    const SpaceTimeSpace Yd = andreev ? andreev_pair(Xd) : p0_pair(Xd);
    const SaddleSystem sys =
        andreev ? build_andreev(Xd, Yd, p) : build_new_mixed(Xd, Yd, p);
    const Solution d = solve_direct(sys);
    const Solution c = solve_schur_cg(sys);
    CHECK((d.u_coeffs - c.u_coeffs).lpNorm<Eigen::Infinity>() <= 1e-8);
    CHECK((*d.aux_coeffs - *c.aux_coeffs).lpNorm<Eigen::Infinity>() <= 1e-8);
    CHECK(c.iterations > 0);

    Eigen::SimplicialLLT<SpMat> llt(sys.B11);
    REQUIRE(llt.info() == Eigen::Success);
    for (int k = 0; k < 10; ++k) {
      const VectorXd x = random_vec(sys.n2, 100 + k);
      const VectorXd Sx = sys.B21 * llt.solve(sys.B12 * x) - sys.B22 * x;
      CHECK(x.dot(Sx) > 0.0);
    }
  }
}

TEST_CASE("schur_cg: zero rhs gives zero solution; steinbach is rejected") {
  const SpaceTimeSpace Xd = trial_space(4);
  const SpaceTimeSpace Yd = p0_pair(Xd);
  ProblemDef zero;
  zero.exact.value = [](double, double) { return 0.0; };
  zero.exact.dt = [](double, double) { return 0.0; };
  zero.exact.dx = [](double, double) { return 0.0; };
  zero.u0 = [](double) { return 0.0; };
  const Solution s = solve_schur_cg(build_new_mixed(Xd, Yd, zero));
  CHECK(s.u_coeffs.norm() == 0.0);
  CHECK(s.aux_coeffs->norm() == 0.0);

  const SaddleSystem st = build_steinbach(zero_left_space(4), make_smooth_problem(0.0));
  CHECK_THROWS_AS(solve_schur_cg(st), std::invalid_argument);
}

TEST_CASE("the auxiliary gap ||u - lambda||_Y shrinks under refinement") {
  for (bool smooth : {true, false}) {
    const ProblemDef p = smooth ? make_smooth_problem(0.0) : make_singular_problem(0.0);
    double prev = -1.0;
    for (int N : {8, 16, 32}) {
      const SpaceTimeSpace Xd = trial_space(N);
      const SpaceTimeSpace Yd = p0_pair(Xd);
      const Solution s = solve_direct(build_new_mixed(Xd, Yd, p));
      const double gap = gap_y_norm(Xd, Yd, s.u_coeffs, *s.aux_coeffs);
      if (prev >= 0.0) CHECK(gap <= 1.05 * prev);
      prev = gap;
    }
  }
}
