// SPDX-License-Identifier: Apache-2.0

#include "nsalloc/linalg.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace nsalloc {

namespace {

void require_finite(const Matrix& M, const char* who) {
    if (!M.allFinite())
        throw NumericalError(std::string(who) + ": non-finite input entry");
}

// Flip column i of M so its largest-magnitude entry is positive.
// Returns true when a flip happened.
bool normalize_column_sign(Matrix& M, Eigen::Index i) {
    Eigen::Index k;
    M.col(i).cwiseAbs().maxCoeff(&k);
    if (M(k, i) < 0.0) {
        M.col(i) = -M.col(i);
        return true;
    }
    return false;
}

}  // namespace

SvdResult svd(const Matrix& M) {
    require_finite(M, "svd");
    Eigen::JacobiSVD<Matrix> dec(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
    if (dec.info() != Eigen::Success)
        throw NumericalError("svd: decomposition did not converge");

    SvdResult out{dec.matrixU(), dec.singularValues(), dec.matrixV()};
    if (!out.U.allFinite() || !out.V.allFinite() || !out.singular_values.allFinite())
        throw NumericalError("svd: non-finite factor produced");

    const Eigen::Index paired = std::min(M.rows(), M.cols());
    for (Eigen::Index i = 0; i < paired; ++i) {
        if (normalize_column_sign(out.U, i)) out.V.col(i) = -out.V.col(i);
    }
    // Surplus columns (beyond the paired block) have no partner; give each a
    // deterministic sign on its own.
    for (Eigen::Index i = paired; i < out.U.cols(); ++i) normalize_column_sign(out.U, i);
    for (Eigen::Index i = paired; i < out.V.cols(); ++i) normalize_column_sign(out.V, i);
    return out;
}

double default_rank_tol(const Matrix& M, const Vector& singular_values) {
    const double smax = singular_values.size() ? singular_values(0) : 0.0;
    return static_cast<double>(std::max(M.rows(), M.cols())) *
           std::numeric_limits<double>::epsilon() * smax;
}

int rank_with_tol(const Matrix& M, double tol) {
    const SvdResult s = svd(M);
    if (tol < 0.0) tol = default_rank_tol(M, s.singular_values);
    int r = 0;
    for (Eigen::Index i = 0; i < s.singular_values.size(); ++i)
        if (s.singular_values(i) > tol) ++r;
    return r;
}

Matrix pinv_right(const Matrix& M) {
    require_finite(M, "pinv_right");
    const auto n = M.rows();
    if (M.cols() < n)
        throw ContractViolation("pinv_right: needs at least as many columns as rows");
    if (rank_with_tol(M) < n)
        throw SingularMatrixError("pinv_right: input is not full row rank");
    const Matrix gram = M * M.transpose();
    return M.transpose() * gram.ldlt().solve(Matrix::Identity(n, n));
}

Matrix lsq_inverse(const Matrix& M) {
    require_finite(M, "lsq_inverse");
    const auto q = M.cols();
    if (rank_with_tol(M) < q)
        throw SingularMatrixError("lsq_inverse: input is not full column rank");
    const Matrix gram = M.transpose() * M;
    return gram.ldlt().solve(Matrix::Identity(q, q)) * M.transpose();
}

Matrix null_space(const Matrix& B) {
    const auto n = B.rows();
    const auto m = B.cols();
    if (m <= n) throw ContractViolation("null_space: needs more columns than rows");
    if (rank_with_tol(B) < n)
        throw SingularMatrixError("null_space: input is not full row rank");
    return svd(B).V.rightCols(m - n);
}

Matrix singular_inverse(const Matrix& Bbar) {
    require_finite(Bbar, "singular_inverse");
    const auto n = Bbar.rows();
    const auto p = Bbar.cols();
    const SvdResult s = svd(Bbar);
    const double tol = default_rank_tol(Bbar, s.singular_values);
    int r = 0;
    for (Eigen::Index i = 0; i < s.singular_values.size(); ++i)
        if (s.singular_values(i) > tol) ++r;
    if (r >= n)
        throw ContractViolation("singular_inverse: input already has full row rank");

    Matrix aug(n, p + (n - r));
    aug.leftCols(p) = Bbar;
    aug.rightCols(n - r) = s.U.rightCols(n - r);
    const Matrix gram = aug * aug.transpose();
    const Matrix P = aug.transpose() * gram.ldlt().solve(Matrix::Identity(n, n));
    return P.topRows(p);
}

Matrix select_columns(const Matrix& M, const std::vector<int>& idx) {
    Matrix out(M.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i)
        out.col(static_cast<Eigen::Index>(i)) = M.col(idx[i]);
    return out;
}

Matrix select_rows(const Matrix& M, const std::vector<int>& idx) {
    Matrix out(static_cast<Eigen::Index>(idx.size()), M.cols());
    for (std::size_t i = 0; i < idx.size(); ++i)
        out.row(static_cast<Eigen::Index>(i)) = M.row(idx[i]);
    return out;
}

Vector select(const Vector& v, const std::vector<int>& idx) {
    Vector out(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i)
        out(static_cast<Eigen::Index>(i)) = v(idx[i]);
    return out;
}

}  // namespace nsalloc
