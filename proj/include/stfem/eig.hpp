#pragma once

#include <Eigen/Dense>
#include <functional>

namespace stfem {

struct EigResult {
  double value = 0.0;
  Eigen::VectorXd vector;
  int iterations = 0;   // 0 for the direct dense path
  double residual = 0.0;  // ||A v - value B v|| / ||A v||
};

// Smallest eigenvalue of the symmetric pencil A v = lambda B v.
// A symmetric positive semi-definite, B symmetric positive definite.
// Dense Cholesky reduction to a standard symmetric problem; deterministic.
EigResult smallest_gen_eig(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);

using ApplyFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

// Largest eigenvalue of A v = lambda B v by power iteration on B^{-1}A,
// matrix-free. B SPD, A symmetric positive semi-definite. The start vector
// is a fixed deterministic sequence so reruns are bit-identical.
EigResult largest_gen_eig(int n, const ApplyFn& apply_a, const ApplyFn& apply_b,
                          const ApplyFn& solve_b, double tol = 1e-8, int maxit = 50000);

}  // namespace stfem
