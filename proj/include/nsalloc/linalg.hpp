// SPDX-License-Identifier: Apache-2.0
//
// Dense small-matrix primitives for the allocator: SVD with a deterministic
// column-sign convention, right pseudo-inverse, least-squares inverse,
// orthonormal null-space basis, tolerance-based rank, and an augmented
// generalized inverse for rank-deficient wide matrices.
//
// All functions are pure; problem sizes are tens of entries, so everything
// is dense and no attempt is made at large-scale performance.

#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

namespace nsalloc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// A numerical kernel failed (non-finite data, no convergence, blown budget).
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input violates a rank precondition; the caller picked the wrong inverse.
struct SingularMatrixError : NumericalError {
    using NumericalError::NumericalError;
};

// Caller invoked an operation whose contract excludes this input shape/rank.
struct ContractViolation : std::logic_error {
    using std::logic_error::logic_error;
};

struct SvdResult {
    Matrix U;                // full (rows x rows), orthonormal columns
    Vector singular_values;  // nonincreasing, length min(rows, cols)
    Matrix V;                // full (cols x cols), orthonormal columns
};

// Full SVD M = U * diag(sv) * V^T with signs fixed so the largest-magnitude
// entry of each U column is positive (paired V columns flipped in tandem;
// surplus columns of the wider factor normalized independently).
SvdResult svd(const Matrix& M);

// Default rank tolerance: max(rows, cols) * machine-eps * sigma_max.
double default_rank_tol(const Matrix& M, const Vector& singular_values);

// Number of singular values above tol; tol < 0 selects the default.
int rank_with_tol(const Matrix& M, double tol = -1.0);

// M^T (M M^T)^{-1} for full-row-rank n x m, m >= n. M * result = I; applied
// to a vector it yields the minimum-l2-norm solution of M u = v.
Matrix pinv_right(const Matrix& M);

// (M^T M)^{-1} M^T for full-column-rank n x q, q < n. result * v minimizes
// the l2 residual of M x = v.
Matrix lsq_inverse(const Matrix& M);

// Orthonormal basis N (m x (m-n)) of ker(B) for full-row-rank B, m > n:
// B * N = 0 and N^T N = I, so every row submatrix of N has singular values
// in [0, 1].
Matrix null_space(const Matrix& B);

// Generalized inverse for a rank-deficient n x p matrix (rank r < n): the
// matrix is augmented with the last n-r left singular vectors to restore
// full row rank, the right pseudo-inverse of the augmented matrix is taken,
// and the first p rows are returned. Satisfies Bbar * G * Bbar = Bbar.
Matrix singular_inverse(const Matrix& Bbar);

// Index-set gathers (the solver partitions by saturated/free index sets).
Matrix select_columns(const Matrix& M, const std::vector<int>& idx);
Matrix select_rows(const Matrix& M, const std::vector<int>& idx);
Vector select(const Vector& v, const std::vector<int>& idx);

}  // namespace nsalloc
