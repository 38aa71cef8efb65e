#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "stfem/stability.hpp"

using namespace stfem;

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

SpaceTimeSpace refined_pair(const SpaceTimeSpace& Xd) {
  return SpaceTimeSpace(FESpace1D(Xd.temporal.part.refined(2), Family::P1), Xd.spatial);
}

}  // namespace

TEST_CASE("spatial inf-sup: one interior node is solvable by hand") {
  // dim 1: gamma^2 = (M^2/A) / W with M = 1/3, A = 4, W = 1/30 -> 5/6
  const InfSupResult r = spatial_infsup(FESpace1D(Partition1D::uniform(2), Family::P1, true, true));
  CHECK(r.gamma == doctest::Approx(std::sqrt(5.0 / 6.0)).epsilon(1e-9));
  CHECK(r.method == "spatial-only");
}

TEST_CASE("spatial inf-sup is nearly mesh-size independent on uniform meshes") {
  const double frozen[4] = {0.873201141381, 0.873201141381, 0.873059663249, 0.872876127186};
  int i = 0;
  for (int n : {8, 16, 32, 64}) {
    const InfSupResult r =
        spatial_infsup(FESpace1D(Partition1D::uniform(n), Family::P1, true, true));
    CHECK(r.gamma == doctest::Approx(frozen[i++]).epsilon(1e-9));
    CHECK(r.gamma <= 1.0 + 1e-12);
    CHECK(std::abs(r.gamma - frozen[0]) <= 0.001 * frozen[0]);
  }
  CHECK_THROWS_AS(spatial_infsup(FESpace1D(Partition1D::uniform(4), Family::P0)),
                  std::invalid_argument);
}

TEST_CASE("temporal inf-sup: piecewise-constant test pair is exact") {
  for (int N : {4, 8, 16}) {
    const FESpace1D Xt(Partition1D::uniform(N), Family::P1);
    const InfSupResult r = temporal_infsup(Xt, FESpace1D(Xt.part, Family::P0));
    CHECK(std::abs(r.gamma - 1.0) <= 1e-10);
    CHECK(r.kernel_dim == 1);
  }
  // a single element also projects its (one-dimensional) slope exactly
  const FESpace1D X1(Partition1D::uniform(1), Family::P1);
  CHECK(std::abs(temporal_infsup(X1, FESpace1D(X1.part, Family::P0)).gamma - 1.0) <= 1e-12);
}

TEST_CASE("temporal inf-sup: refined continuous pair stays above sqrt(3)/2") {
  const double frozen[3] = {0.882327747424, 0.870175182581, 0.0};
  int i = 0;
  for (int N : {4, 8, 16}) {
    const FESpace1D Xt(Partition1D::uniform(N), Family::P1);
    const InfSupResult r = temporal_infsup(Xt, FESpace1D(Xt.part.refined(2), Family::P1));
    CHECK(r.gamma >= std::sqrt(3.0 / 4.0) - 1e-8);
    CHECK(r.gamma <= 1.0 + 1e-12);
    if (frozen[i] != 0.0) CHECK(r.gamma == doctest::Approx(frozen[i]).epsilon(1e-9));
    ++i;
  }
}

TEST_CASE("space-time factorized mode multiplies the 1d constants") {
  const SpaceTimeSpace Xd = trial_space(8);
  for (const SpaceTimeSpace& Yd : {p0_pair(Xd), refined_pair(Xd)}) {
    const InfSupResult f = spacetime_infsup(Xd, Yd, InfSupMode::Factorized);
    const double t = temporal_infsup(Xd.temporal, Yd.temporal).gamma;
    const double s = spatial_infsup(Xd.spatial).gamma;
    CHECK(std::abs(f.gamma - t * s) <= 1e-10);
    CHECK(f.kernel_dim == Xd.spatial.dim());
  }
  const SpaceTimeSpace X0 = zero_left_space(4);
  CHECK(spacetime_infsup(X0, p0_pair(X0), InfSupMode::Factorized).kernel_dim == 0);
}

TEST_CASE("space-time full mode: frozen values, bounded by one") {
  const double frozen_p0[3] = {0.886794708047, 0.886794708047, 0.886045180016};
  int i = 0;
  for (int N : {4, 8, 16}) {
    const SpaceTimeSpace Xd = trial_space(N);
    const InfSupResult full = spacetime_infsup(Xd, p0_pair(Xd), InfSupMode::Full);
    const InfSupResult fact = spacetime_infsup(Xd, p0_pair(Xd), InfSupMode::Factorized);
    CHECK(full.gamma == doctest::Approx(frozen_p0[i]).epsilon(1e-9));
    CHECK(full.gamma >= fact.gamma - 1e-6);
    CHECK(full.gamma <= 1.0 + 1e-10);
    ++i;
  }
  const double frozen_ref[2] = {0.782443577178, 0.771666746987};
  i = 0;
  for (int N : {4, 8}) {
    const SpaceTimeSpace Xd = trial_space(N);
    const InfSupResult full = spacetime_infsup(Xd, refined_pair(Xd), InfSupMode::Full);
    CHECK(full.gamma == doctest::Approx(frozen_ref[i]).epsilon(1e-9));
    ++i;
  }
}

TEST_CASE("quasi-optimality constants: symmetric case closed form, root residual") {
  const QuasiOptConstants q0 = quasiopt_constants(0.5, 0.0);
  CHECK(q0.rho == 0.0);
  CHECK(q0.C == doctest::Approx(3.0 * std::sqrt(3.0) / 0.25).epsilon(1e-12));
  CHECK(quasiopt_constants(0.873201141381, 0.0).C ==
        doctest::Approx(6.81480279188).epsilon(1e-9));

  std::mt19937 rng(71);
  std::uniform_real_distribution<double> ug(0.05, 1.0), ua(0.0, 50.0);
  for (int k = 0; k < 20; ++k) {
    const double g = ug(rng), a = ua(rng);
    const QuasiOptConstants q = quasiopt_constants(g, a);
    CHECK(q.rho >= 0.0);
    CHECK(q.rho < 1.0);
    const double res = g * g * (q.rho * q.rho - q.rho) + a * a * (q.rho - 1.0) + q.rho;
    CHECK(std::abs(res) <= 1e-12 * (1.0 + a * a));
    const double want = (3.0 + a * a) * (std::sqrt(3.0) + a) / ((1.0 - q.rho) * g * g);
    CHECK(q.C == doctest::Approx(want).epsilon(1e-12));
  }

  CHECK_THROWS_AS(quasiopt_constants(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(quasiopt_constants(1.5, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(quasiopt_constants(0.5, -1.0), std::invalid_argument);
}

TEST_CASE("convection norm estimate: zero case, scaling, frozen value") {
  const SpaceTimeSpace Xd = trial_space(8);
  const SpaceTimeSpace Yd = refined_pair(Xd);
  CHECK(aa_norm_estimate(Yd, 0.0) == 0.0);
  const double a1 = aa_norm_estimate(Yd, 50.0);
  const double a2 = aa_norm_estimate(Yd, 100.0);
  CHECK(a2 == doctest::Approx(2.0 * a1).epsilon(1e-6));
  CHECK(a2 == doctest::Approx(15.0888347644).epsilon(1e-6));
  CHECK_THROWS_AS(aa_norm_estimate(Yd, -1.0), std::invalid_argument);
}

TEST_CASE("square-scheme degradation: exact load norm, decaying candidate ratio") {
  double prev_zig = 2.0;
  const double frozen_zig[2] = {0.86419745029, 0.640355220772};
  const double frozen_full[2] = {0.740131929382, 0.427002918977};
  int i = 0;
  for (int N : {4, 8, 16}) {
    const SpaceTimeSpace X0 = zero_left_space(N);
    const DegradationResult d = steinbach_degradation(X0);
    const double h = 1.0 / N;
    CHECK(std::abs(d.g_norm_check - 0.5 * std::sqrt(h)) <= 1e-12);
    CHECK(d.zigzag_value < prev_zig);
    prev_zig = d.zigzag_value;
    if (d.full_computed) CHECK(d.gamma_full <= d.zigzag_value + 1e-12);
    if (i < 2) {
      CHECK(d.zigzag_value == doctest::Approx(frozen_zig[i]).epsilon(1e-9));
      REQUIRE(d.full_computed);
      CHECK(d.gamma_full == doctest::Approx(frozen_full[i]).epsilon(1e-9));
    }
    ++i;
  }
}

TEST_CASE("square-scheme degradation rejects unsuitable spaces") {
  CHECK_THROWS_AS(steinbach_degradation(trial_space(4)), std::invalid_argument);
  CHECK_THROWS_AS(steinbach_degradation(zero_left_space(5)), std::invalid_argument);
}
