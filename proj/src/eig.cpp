#include "stfem/eig.hpp"

#include <cmath>
#include <stdexcept>

namespace stfem {

EigResult smallest_gen_eig(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  if (A.rows() != A.cols() || B.rows() != B.cols() || A.rows() != B.rows())
    throw std::invalid_argument("smallest_gen_eig: dimension mismatch");
  Eigen::LLT<Eigen::MatrixXd> llt(B);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("smallest_gen_eig: right Gram is not SPD");
  const Eigen::MatrixXd L = llt.matrixL();
  Eigen::MatrixXd C = L.triangularView<Eigen::Lower>().solve(A);
  C = L.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd(C.transpose())).eval();
  C = (0.5 * (C + C.transpose())).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("smallest_gen_eig: eigensolver failed");
  EigResult r;
  r.value = es.eigenvalues()(0);
  const Eigen::VectorXd y = es.eigenvectors().col(0);
  r.vector = L.transpose().triangularView<Eigen::Upper>().solve(y);
  const double num = (A * r.vector - r.value * (B * r.vector)).norm();
  const double den = (A * r.vector).norm();
  r.residual = den > 0.0 ? num / den : num;
  return r;
}

EigResult largest_gen_eig(int n, const ApplyFn& apply_a, const ApplyFn& apply_b,
                          const ApplyFn& solve_b, double tol, int maxit) {
  EigResult r;
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x[i] = 1.0 + 0.5 * std::sin(3.0 * i + 1.0);
  x /= std::sqrt(x.dot(apply_b(x)));
  double lambda = x.dot(apply_a(x));
  if (!(lambda > 0.0)) {  // zero (or negative-semidefinite) numerator: norm is 0
    r.value = 0.0;
    r.vector = x;
    return r;
  }
  for (int it = 1; it <= maxit; ++it) {
    const Eigen::VectorXd y = solve_b(apply_a(x));
    const double yby = y.dot(apply_b(y));
    if (!(yby > 0.0)) {
      r.value = 0.0;
      r.vector = x;
      r.iterations = it;
      return r;
    }
    x = y / std::sqrt(yby);
    const double newl = x.dot(apply_a(x));
    const double change = std::abs(newl - lambda) / std::max(newl, 1e-300);
    lambda = newl;
    if (it >= 2 && change <= tol) {
      r.iterations = it;
      break;
    }
    if (it == maxit) throw std::runtime_error("largest_gen_eig: power iteration stagnated");
  }
  r.value = lambda;
  r.vector = x;
  const Eigen::VectorXd ax = apply_a(x);
  const double num = (ax - lambda * apply_b(x)).norm();
  r.residual = ax.norm() > 0.0 ? num / ax.norm() : num;
  return r;
}

}  // namespace stfem
