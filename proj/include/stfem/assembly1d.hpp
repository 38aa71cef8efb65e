#pragma once
#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "stfem/fespace.hpp"

namespace stfem {

using SpMat = Eigen::SparseMatrix<double>;

enum class Form { Mass, Stiffness, Convection };

// entry (i,j) = int b(phi_j, phi_i), b in {v*w, v'*w', v'*w}; exact element integrals
SpMat operator_matrix(const FESpace1D& space, Form form);

enum class PairKind { Value, DerivOfTrial };

// entry (i,j) = int phi_j psi_i   (Value)
//             = int phi_j' psi_i  (DerivOfTrial; trial must be P1)
// test/trial partitions must be equal or nested (either direction); integration
// runs over the finer partition's cells so kinks of the finer basis are respected.
SpMat pairing_matrix(const FESpace1D& test, const FESpace1D& trial, PairKind kind);

// coefficients of coarse basis functions expanded in the fine space
// (fine.dim x coarse.dim); coarse partition must be refined by fine's.
SpMat prolongation_matrix(const FESpace1D& fine, const FESpace1D& coarse);

// Exact dual Gram W[i,j] = <phi_i, phi_j>_{H^-1(0,L)} for a zero-both P1 space:
// W[i,j] = int w_i' w_j' with -w_k'' = phi_k, w_k(0) = w_k(L) = 0, each w_k a
// piecewise cubic obtained in closed form; products integrated by 4-pt Gauss per cell.
Eigen::MatrixXd hminus1_gram(const FESpace1D& space);

// n-point Gauss-Legendre rule on [0,1] (n = 1..7)
void gauss_rule(int n, std::vector<double>& x, std::vector<double>& w);

}  // namespace stfem
