#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rootiter/errors.hpp"

namespace rootiter::linalg {

using Complex = std::complex<double>;

/// Dense complex matrix, row-major storage.
struct ComplexMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<Complex> data;

    ComplexMatrix() = default;
    ComplexMatrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c) {
        if (r <= 0 || c <= 0) throw DimensionError("matrix dimensions must be positive");
    }

    Complex& operator()(int i, int j) { return data[static_cast<std::size_t>(i) * cols + j]; }
    const Complex& operator()(int i, int j) const {
        return data[static_cast<std::size_t>(i) * cols + j];
    }

    static ComplexMatrix identity(int n);
    static ComplexMatrix diagonal(const std::vector<Complex>& d);

    ComplexMatrix transpose() const;
    ComplexMatrix adjoint() const;
};

ComplexMatrix operator+(const ComplexMatrix& A, const ComplexMatrix& B);
ComplexMatrix operator-(const ComplexMatrix& A, const ComplexMatrix& B);
ComplexMatrix operator*(Complex c, const ComplexMatrix& A);

bool approx_equal(const ComplexMatrix& A, const ComplexMatrix& B, double tol);

ComplexMatrix matmul(const ComplexMatrix& A, const ComplexMatrix& B);

/// Partial-pivoting LU factorization, combined storage.
struct LUFactors {
    ComplexMatrix lu;
    std::vector<int> piv;
    bool singular = false;
};

LUFactors lu_factor(const ComplexMatrix& A);
/// Solves A X = B from the factorization. Throws SingularMatrixError when a
/// pivot magnitude fell below 1e-300 during factorization.
ComplexMatrix lu_solve(const LUFactors& lu, const ComplexMatrix& B);
ComplexMatrix inverse(const ComplexMatrix& A);

enum class NormKind { inf, fro, two_est };

/// inf: max row sum (exact); fro: Frobenius (exact); two_est: power iteration
/// on A^H A to relative 1e-6, capped at 200 iterations.
double norm(const ComplexMatrix& A, NormKind which);

/// Magnitudes of the extreme eigenvalues: power iteration for the largest,
/// inverse power iteration on an LU of A for the smallest.
std::pair<double, double> eig_extremes_estimate(const ComplexMatrix& A);

/// Kronecker product; throws CapacityError when the result exceeds 4096x4096.
ComplexMatrix kron(const ComplexMatrix& A, const ComplexMatrix& B);

enum class TestMatrixKind { hermitian_pd, diagonalizable, jordan_like };

/// A = V diag(spectrum) V^{-1} plus the reference root V diag(spectrum^{1/p}) V^{-1}
/// from principal scalar roots. hermitian_pd uses a random unitary V (spectrum
/// must be real positive); diagonalizable uses V with 2-norm condition close to
/// `conditioning`; jordan_like pushes V toward the defective limit by clustering
/// singular values. Deterministic for a fixed seed.
struct TestMatrixPair {
    ComplexMatrix A;
    ComplexMatrix root;
};
TestMatrixPair build_test_matrix(TestMatrixKind kind, const std::vector<Complex>& spectrum,
                                 double conditioning, int p, std::uint64_t seed = 12345);

/// Matrix Market "array complex general" I/O. write/parse round-trip is
/// bit-exact for finite entries (17 significant digits).
void write_matrix_market(std::ostream& os, const ComplexMatrix& A);
ComplexMatrix parse_matrix_market(std::istream& is);
void save_matrix_market(const std::string& path, const ComplexMatrix& A);
ComplexMatrix load_matrix_market(const std::string& path);

}  // namespace rootiter::linalg
