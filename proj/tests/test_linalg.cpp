// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

#include "nsalloc/linalg.hpp"

using namespace nsalloc;

namespace {

Matrix reference_b() {
    Matrix B(3, 5);
    B << 1, 1, 1, 1, 1,
         1, 1, 1, 0, 0,
         1, 0, 0, 0, 0;
    return B;
}

bool close(const Matrix& a, const Matrix& b, double tol) {
    return a.rows() == b.rows() && a.cols() == b.cols() &&
           (a - b).cwiseAbs().maxCoeff() <= tol;
}

Matrix random_matrix(std::mt19937& rng, int r, int c) {
    std::normal_distribution<double> gauss;
    Matrix m(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) m(i, j) = gauss(rng);
    return m;
}

}  // namespace

TEST_CASE("singular values of the reference matrix are 1+sqrt(3), 1, sqrt(3)-1") {
    const auto s = svd(reference_b()).singular_values;
    REQUIRE(s.size() == 3);
    const double r3 = std::sqrt(3.0);
    CHECK(s(0) == doctest::Approx(1.0 + r3).epsilon(1e-12));
    CHECK(s(1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s(2) == doctest::Approx(r3 - 1.0).epsilon(1e-12));
}

TEST_CASE("singular values match an independent symmetric eigensolve of B*B^T") {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 2 + trial % 4;
        const int m = n + 1 + trial % 3;
        const Matrix B = random_matrix(rng, n, m);
        const Vector s = svd(B).singular_values;
        Eigen::SelfAdjointEigenSolver<Matrix> eig(B * B.transpose());
        Vector lam = eig.eigenvalues();  // ascending
        for (int i = 0; i < n; ++i)
            CHECK(s(i) == doctest::Approx(std::sqrt(std::max(0.0, lam(n - 1 - i))))
                              .epsilon(1e-9));
    }
}

TEST_CASE("svd reconstructs the input and keeps orthonormal factors") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 60; ++trial) {
        const int r = 1 + trial % 6;
        const int c = 1 + (trial / 2) % 7;
        Matrix M = random_matrix(rng, r, c);
        if (trial % 5 == 0 && c >= 2) M.col(c - 1) = M.col(0);  // rank drop
        const SvdResult f = svd(M);
        Matrix S = Matrix::Zero(r, c);
        for (int i = 0; i < std::min(r, c); ++i) S(i, i) = f.singular_values(i);
        const double scale = std::max(1.0, M.norm());
        CHECK((f.U * S * f.V.transpose() - M).norm() / scale <= 1e-9);
        CHECK(close(f.U.transpose() * f.U, Matrix::Identity(r, r), 1e-12));
        CHECK(close(f.V.transpose() * f.V, Matrix::Identity(c, c), 1e-12));
    }
}

TEST_CASE("svd sign convention is deterministic") {
    std::mt19937 rng(23);
    const Matrix M = random_matrix(rng, 4, 6);
    const SvdResult a = svd(M);
    const SvdResult b = svd(M);
    CHECK(close(a.U, b.U, 0.0));
    CHECK(close(a.V, b.V, 0.0));
    // Anchor entries (largest magnitude per shared column) are positive.
    for (int i = 0; i < 4; ++i) {
        Eigen::Index at;
        a.U.col(i).cwiseAbs().maxCoeff(&at);
        CHECK(a.U(at, i) > 0.0);
    }
}

TEST_CASE("rank_with_tol on known ranks") {
    CHECK(rank_with_tol(Matrix::Identity(4, 4)) == 4);
    CHECK(rank_with_tol(Matrix::Zero(3, 5)) == 0);
    CHECK(rank_with_tol(reference_b()) == 3);
    Matrix M(3, 3);
    M << 1, 2, 3,
         2, 4, 6,
         1, 0, 1;
    CHECK(rank_with_tol(M) == 2);
    CHECK(rank_with_tol(M, 10.0) == 0);  // explicit tolerance wins
}

TEST_CASE("pinv_right reproduces the minimum-norm preimage") {
    const Matrix B = reference_b();
    const Matrix G = pinv_right(B);
    CHECK(close(B * G, Matrix::Identity(3, 3), 1e-12));
    Vector v(3);
    v << 1.4, 1, -1;
    Vector expected(5);
    expected << -1, 1, 1, 0.2, 0.2;
    CHECK(close(G * v, expected, 1e-12));
    // Minimum-norm property: the preimage is orthogonal to ker(B).
    const Matrix N = null_space(B);
    CHECK((N.transpose() * (G * v)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("pinv_right rejects rank-deficient and tall inputs") {
    Matrix flat(2, 4);
    flat << 1, 2, 1, 2,
            2, 4, 2, 4;  // rank 1
    CHECK_THROWS_AS((void)pinv_right(flat), SingularMatrixError);
    CHECK_THROWS_AS((void)pinv_right(Matrix::Identity(4, 2)), ContractViolation);
}

TEST_CASE("lsq_inverse solves tall full-column-rank blocks") {
    Matrix M(3, 2);
    M << 1, 1,
         1, 0,
         1, 0;
    Matrix expected(2, 3);
    expected << 0, 0.5, 0.5,
                1, -0.5, -0.5;
    CHECK(close(lsq_inverse(M), expected, 1e-12));
    CHECK(close(lsq_inverse(M) * M, Matrix::Identity(2, 2), 1e-12));

    Matrix dep(3, 2);
    dep << 1, 2,
           1, 2,
           1, 2;
    CHECK_THROWS_AS((void)lsq_inverse(dep), SingularMatrixError);
}

TEST_CASE("null_space spans ker(B) with orthonormal columns") {
    std::mt19937 rng(3);
    for (const Matrix& B : {reference_b(), random_matrix(rng, 3, 8)}) {
        const int m = static_cast<int>(B.cols());
        const int n = static_cast<int>(B.rows());
        const Matrix N = null_space(B);
        CHECK(N.rows() == m);
        CHECK(N.cols() == m - n);
        CHECK((B * N).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK(close(N.transpose() * N, Matrix::Identity(m - n, m - n), 1e-12));
    }
    CHECK_THROWS_AS((void)null_space(Matrix::Identity(3, 3)), ContractViolation);
}

TEST_CASE("singular_inverse repairs the rank-deficient free block") {
    Matrix B_F(3, 3);
    B_F << 1, 1, 1,
           1, 0, 0,
           1, 0, 0;  // rank 2
    Matrix expected(3, 3);
    expected << 0, 0.5, 0.5,
                0.5, -0.25, -0.25,
                0.5, -0.25, -0.25;
    CHECK(close(singular_inverse(B_F), expected, 1e-12));
    CHECK_THROWS_AS((void)singular_inverse(reference_b()), ContractViolation);
}

TEST_CASE("singular_inverse output maps the attainable component exactly") {
    std::mt19937 rng(31);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 3 + trial % 3;
        const int p = 1 + trial % (n + 1);
        Matrix M = random_matrix(rng, n, p);
        if (p >= 2) M.col(p - 1) = 2.0 * M.col(0);  // force rank < min(n, p)
        if (rank_with_tol(M) >= n) continue;
        const Matrix P = singular_inverse(M);
        CHECK(P.rows() == p);
        CHECK(P.cols() == n);
        // M * P * M == M: the repaired inverse acts as identity on range(M).
        CHECK((M * P * M - M).cwiseAbs().maxCoeff() <= 1e-9);
    }
}

TEST_CASE("row deletion never increases the extreme singular values") {
    // Holds for matrices with more rows than columns: dropping a row
    // subtracts a rank-one PSD term from M^T M.
    std::mt19937 rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        const int cols = 1 + trial % 3;
        const int rows = cols + 1 + trial % 5;
        const Matrix M = random_matrix(rng, rows, cols);
        const Vector s = svd(M).singular_values;
        const int drop = trial % rows;
        Matrix M2(rows - 1, cols);
        int at = 0;
        for (int r = 0; r < rows; ++r)
            if (r != drop) M2.row(at++) = M.row(r);
        const Vector s2 = svd(M2).singular_values;
        CHECK(s2.maxCoeff() <= s.maxCoeff() + 1e-12);
        CHECK(s2.minCoeff() <= s.minCoeff() + 1e-12);
    }
}

TEST_CASE("selection helpers pick rows, columns, and entries by index list") {
    const Matrix B = reference_b();
    const Matrix cols = select_columns(B, {0, 3, 4});
    CHECK(cols.cols() == 3);
    CHECK(cols(0, 1) == 1.0);
    CHECK(cols(1, 1) == 0.0);
    const Matrix rows = select_rows(B, {2});
    CHECK(rows.rows() == 1);
    CHECK(rows(0, 0) == 1.0);
    Vector v(5);
    v << 10, 20, 30, 40, 50;
    const Vector picked = select(v, {1, 4});
    CHECK(picked(0) == 20.0);
    CHECK(picked(1) == 50.0);
}
