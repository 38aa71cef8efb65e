#pragma once
#include <Eigen/Dense>

#include "stfem/partition.hpp"

namespace stfem {

enum class Family { P1, P0 };

// Scalar 1D finite element space on a Partition1D.
// P1: continuous piecewise linears, nodal hat basis; optional zero traces at
// the left/right endpoint (constrained dofs are dropped, not zeroed rows).
// P0: piecewise constants, unit characteristic function per cell.
struct FESpace1D {
  Partition1D part;
  Family family = Family::P1;
  bool zero_left = false;
  bool zero_right = false;

  FESpace1D() = default;
  FESpace1D(Partition1D p, Family f, bool zl = false, bool zr = false)
      : part(std::move(p)), family(f), zero_left(zl), zero_right(zr) {
    if (f == Family::P0 && (zl || zr))
      throw std::invalid_argument("FESpace1D: trace constraints require P1");
  }

  int dim() const {
    if (family == Family::P0) return part.cells();
    return int(part.pts.size()) - (zero_left ? 1 : 0) - (zero_right ? 1 : 0);
  }

  // P1 only: mesh node carrying dof j
  int node_of(int j) const { return j + (zero_left ? 1 : 0); }
  // P1 only: dof at mesh node (or -1 if constrained)
  int dof_at_node(int n) const {
    if (zero_left && n == 0) return -1;
    if (zero_right && n == int(part.pts.size()) - 1) return -1;
    return n - (zero_left ? 1 : 0);
  }

  double basis_value(int j, double x) const {
    if (family == Family::P0) {
      int e = part.find_cell(x);
      return e == j ? 1.0 : 0.0;
    }
    int n = node_of(j);
    double xn = part.pts[n];
    if (x <= xn) {
      if (n == 0) return x >= xn ? 1.0 : 0.0;
      double xl = part.pts[n - 1];
      return x <= xl ? 0.0 : (x - xl) / (xn - xl);
    }
    if (n == int(part.pts.size()) - 1) return 0.0;
    double xr = part.pts[n + 1];
    return x >= xr ? 0.0 : (xr - x) / (xr - xn);
  }

  // P1: derivative of basis j on cell e (constant there)
  double basis_deriv_on_cell(int j, int e) const {
    if (family != Family::P1) throw std::invalid_argument("basis_deriv_on_cell: P1 only");
    int n = node_of(j);
    if (e == n - 1) return 1.0 / part.h(e);
    if (e == n) return -1.0 / part.h(e);
    return 0.0;
  }

  // dofs supported on cell e (at most 2)
  void dofs_on_cell(int e, int out[2], int& count) const {
    count = 0;
    if (family == Family::P0) {
      out[count++] = e;
      return;
    }
    int d = dof_at_node(e);
    if (d >= 0) out[count++] = d;
    d = dof_at_node(e + 1);
    if (d >= 0) out[count++] = d;
  }

  // expansion value at x; P0 uses the left-element convention at breakpoints
  double evaluate_one(const Eigen::VectorXd& coeffs, double x) const {
    if (coeffs.size() != dim()) throw std::invalid_argument("evaluate: coefficient size mismatch");
    if (x < part.pts.front() - 1e-14 || x > part.pts.back() + 1e-14)
      throw std::invalid_argument("evaluate: point outside interval");
    int e = part.find_cell(x);
    if (family == Family::P0) {
      if (e > 0 && x == part.pts[e]) e -= 1;  // left-element convention at breakpoints
      return coeffs[e];
    }
    double v = 0.0;
    int dofs[2], c;
    dofs_on_cell(e, dofs, c);
    for (int k = 0; k < c; ++k) v += coeffs[dofs[k]] * basis_value(dofs[k], x);
    return v;
  }

  std::vector<double> evaluate(const Eigen::VectorXd& coeffs, const std::vector<double>& xs) const {
    std::vector<double> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = evaluate_one(coeffs, xs[i]);
    return out;
  }
};

}  // namespace stfem
