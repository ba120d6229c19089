// linalg.hpp: Dense and sparse non-Hermitian eigensolvers, bordered kernel solve

#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace ermea {

using cplx = std::complex<double>;
using SpMat = Eigen::SparseMatrix<cplx>;

// All eigenvalues of a general complex matrix (LAPACK zgeev).
Eigen::VectorXcd dense_eigenvalues(Eigen::MatrixXcd A);

// Eigenpairs with right eigenvectors (columns), zgeev.
void dense_eigen(Eigen::MatrixXcd A, Eigen::VectorXcd& values, Eigen::MatrixXcd& vectors);

struct ShiftInvertResult {
    Eigen::VectorXcd values;  // sorted by |lambda| ascending
    Eigen::MatrixXcd vectors; // empty unless requested
    int iterations = 0;
};

// The nev eigenvalues of A closest to `shift`, by implicitly restarted Arnoldi on (A - shift)^{-1}.
ShiftInvertResult shift_invert_eigs(const SpMat& A, int nev, cplx shift, bool want_vectors = false,
                                    double tol = 1e-13, int max_iter = 3000);

// Solve [[A, t^H], [t, 0]] [x; l] = [0; 1] (kernel vector normalized by t x = 1).
Eigen::VectorXcd bordered_kernel_solve(const SpMat& A, const Eigen::VectorXcd& t);

} // namespace ermea
