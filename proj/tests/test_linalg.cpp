#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <sstream>
#include <vector>

#include "rootiter/linalg.hpp"

using namespace rootiter;
using namespace rootiter::linalg;

namespace {

ComplexMatrix random_matrix(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    ComplexMatrix A(n, n);
    for (auto& z : A.data) z = Complex(u(rng), u(rng));
    return A;
}

}  // namespace

TEST_CASE("matmul basics") {
    const ComplexMatrix A = random_matrix(4, 1);
    CHECK(approx_equal(matmul(A, ComplexMatrix::identity(4)), A, 0.0));
    CHECK(approx_equal(matmul(ComplexMatrix::identity(4), A), A, 0.0));

    ComplexMatrix N(2, 2);
    N(0, 1) = 1.0;
    CHECK(norm(matmul(N, N), NormKind::inf) == 0.0);
}

TEST_CASE("LU solve and inverse") {
    const ComplexMatrix B = random_matrix(3, 2);
    CHECK(approx_equal(lu_solve(lu_factor(ComplexMatrix::identity(3)), B), B, 1e-15));

    const ComplexMatrix D = ComplexMatrix::diagonal({2.0, 4.0});
    const ComplexMatrix X = lu_solve(lu_factor(D), ComplexMatrix::identity(2));
    CHECK(std::abs(X(0, 0) - Complex(0.5, 0.0)) <= 1e-15);
    CHECK(std::abs(X(1, 1) - Complex(0.25, 0.0)) <= 1e-15);

    // Round trip: B = A X, solve recovers X.
    const ComplexMatrix A = random_matrix(5, 3);
    const ComplexMatrix X5 = random_matrix(5, 4);
    const ComplexMatrix X5r = lu_solve(lu_factor(A), matmul(A, X5));
    CHECK(approx_equal(X5r, X5, 1e-10));

    CHECK(approx_equal(matmul(A, inverse(A)), ComplexMatrix::identity(5), 1e-12));

    ComplexMatrix S(2, 2);
    S(0, 0) = S(0, 1) = S(1, 0) = S(1, 1) = 1.0;
    CHECK_THROWS_AS(lu_solve(lu_factor(S), ComplexMatrix::identity(2)), SingularMatrixError);
}

TEST_CASE("norms") {
    CHECK(norm(ComplexMatrix::identity(7), NormKind::inf) == 1.0);
    CHECK(norm(ComplexMatrix::diagonal({{3.0, 0.0}, {0.0, -4.0}}), NormKind::fro) ==
          doctest::Approx(5.0).epsilon(1e-15));

    // Rank-1 u v^H has the single singular value ||u||_2 ||v||_2.
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> un(-1.0, 1.0);
    const int n = 6;
    std::vector<Complex> u(n), v(n);
    double nu = 0.0, nv = 0.0;
    for (int i = 0; i < n; ++i) {
        u[i] = Complex(un(rng), un(rng));
        v[i] = Complex(un(rng), un(rng));
        nu += std::norm(u[i]);
        nv += std::norm(v[i]);
    }
    ComplexMatrix R(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) R(i, j) = u[i] * std::conj(v[j]);
    CHECK(norm(R, NormKind::two_est) ==
          doctest::Approx(std::sqrt(nu * nv)).epsilon(1e-6));

    // Homogeneity in the scalar factor.
    const ComplexMatrix A = random_matrix(4, 5);
    for (auto which : {NormKind::inf, NormKind::fro})
        CHECK(norm(Complex(-2.5, 0.0) * A, which) ==
              doctest::Approx(2.5 * norm(A, which)).epsilon(1e-14));
}

TEST_CASE("extreme eigenvalue magnitudes") {
    auto [lo, hi] = eig_extremes_estimate(ComplexMatrix::diagonal({1e-6, 1.0, 1e3}));
    CHECK(lo == doctest::Approx(1e-6).epsilon(0.01));
    CHECK(hi == doctest::Approx(1e3).epsilon(0.01));

    auto [clo, chi] = eig_extremes_estimate(Complex(0.7, 0.0) *
                                            ComplexMatrix::identity(3));
    CHECK(clo == doctest::Approx(0.7).epsilon(1e-6));
    CHECK(chi == doctest::Approx(0.7).epsilon(1e-6));
}

TEST_CASE("Kronecker product") {
    CHECK(approx_equal(kron(ComplexMatrix::identity(2), ComplexMatrix::identity(3)),
                       ComplexMatrix::identity(6), 0.0));
    CHECK(approx_equal(kron(ComplexMatrix::diagonal({3.0, 5.0}), ComplexMatrix::identity(2)),
                       ComplexMatrix::diagonal({3.0, 3.0, 5.0, 5.0}), 0.0));

    const ComplexMatrix A = random_matrix(2, 21), B = random_matrix(2, 22);
    const ComplexMatrix C = random_matrix(2, 23), D = random_matrix(2, 24);
    CHECK(approx_equal(matmul(kron(A, B), kron(C, D)), kron(matmul(A, C), matmul(B, D)),
                       1e-13));
}

TEST_CASE("test matrix construction") {
    // Constant spectrum 1: A and its root are exactly the identity.
    const TestMatrixPair unit = build_test_matrix(
        TestMatrixKind::hermitian_pd, std::vector<Complex>(4, Complex(1.0, 0.0)), 1.0, 3);
    CHECK(approx_equal(unit.A, ComplexMatrix::identity(4), 1e-14));
    CHECK(approx_equal(unit.root, ComplexMatrix::identity(4), 1e-14));

    // Hermitian PD: exactly Hermitian, root^p reproduces A.
    std::vector<Complex> spec;
    for (int i = 0; i < 6; ++i) spec.emplace_back(std::pow(10.0, -3.0 * (5 - i) / 5.0), 0.0);
    const TestMatrixPair h = build_test_matrix(TestMatrixKind::hermitian_pd, spec, 1.0, 3, 42);
    CHECK(approx_equal(h.A, h.A.adjoint(), 0.0));
    CHECK(approx_equal(matmul(matmul(h.root, h.root), h.root), h.A,
                       1e-12 * norm(h.A, NormKind::inf)));

    // Diagonalizable with spectrum in the sector |arg z| <= 0.9 pi.
    std::vector<Complex> sector;
    for (int i = 0; i < 5; ++i)
        sector.push_back(std::polar(1.0 + 0.3 * i, 0.9 * 3.141592653589793 * (i - 2) / 2.0));
    const TestMatrixPair d =
        build_test_matrix(TestMatrixKind::diagonalizable, sector, 10.0, 2, 7);
    CHECK(norm(matmul(d.root, d.root) - d.A, NormKind::inf) <=
          1e-10 * norm(d.A, NormKind::inf));
}

TEST_CASE("Matrix Market round trip is bit-exact") {
    ComplexMatrix A = random_matrix(3, 99);
    A(0, 0) = Complex(1e-300, -7.125);
    A(2, 1) = Complex(9.87654321098765432e200, 0.0);
    std::ostringstream os;
    write_matrix_market(os, A);
    std::istringstream is(os.str());
    const ComplexMatrix B = parse_matrix_market(is);
    REQUIRE(B.rows == 3);
    REQUIRE(B.cols == 3);
    CHECK(A.data == B.data);

    std::istringstream bad("%%MatrixMarket matrix coordinate real general\n1 1\n0\n");
    CHECK_THROWS_AS(parse_matrix_market(bad), ParseError);
}
