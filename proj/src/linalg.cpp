#include "rootiter/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

namespace rootiter::linalg {

namespace {

void require_same_shape(const ComplexMatrix& A, const ComplexMatrix& B) {
    if (A.rows != B.rows || A.cols != B.cols)
        throw DimensionError("matrix dimensions do not match");
}

double vec_norm2(const std::vector<Complex>& v) {
    double s = 0.0;
    for (const auto& x : v) s += std::norm(x);
    return std::sqrt(s);
}

std::vector<Complex> mat_vec(const ComplexMatrix& A, const std::vector<Complex>& v) {
    std::vector<Complex> w(A.rows, Complex(0.0));
    for (int i = 0; i < A.rows; ++i) {
        Complex acc = 0.0;
        for (int j = 0; j < A.cols; ++j) acc += A(i, j) * v[j];
        w[i] = acc;
    }
    return w;
}

std::vector<Complex> adjoint_vec(const ComplexMatrix& A, const std::vector<Complex>& v) {
    std::vector<Complex> w(A.cols, Complex(0.0));
    for (int i = 0; i < A.rows; ++i)
        for (int j = 0; j < A.cols; ++j) w[j] += std::conj(A(i, j)) * v[i];
    return w;
}

std::vector<Complex> random_unit_vector(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<Complex> v(n);
    for (auto& x : v) x = Complex(g(rng), g(rng));
    const double nv = vec_norm2(v);
    for (auto& x : v) x /= nv;
    return v;
}

// Magnitude of the dominant eigenvalue via normalized power iteration; the
// geometric mean of the trailing growth factors absorbs the oscillation that
// complex-conjugate dominant pairs induce.
double power_magnitude(const std::function<std::vector<Complex>(const std::vector<Complex>&)>& apply,
                       int n, std::mt19937_64& rng) {
    std::vector<Complex> v = random_unit_vector(n, rng);
    std::vector<double> growth;
    growth.reserve(1000);
    double est = 0.0;
    for (int it = 0; it < 1000; ++it) {
        std::vector<Complex> w = apply(v);
        const double nw = vec_norm2(w);
        if (!(nw > 0.0) || !std::isfinite(nw))
            throw SingularMatrixError("power iteration collapsed");
        growth.push_back(nw);
        for (auto& x : w) x /= nw;
        v = std::move(w);
        // a two-step mean converges even when a conjugate pair dominates
        if (it >= 1) {
            const double next = std::sqrt(growth[it] * growth[it - 1]);
            if (it >= 2 && std::abs(next - est) <= 1e-12 * next) return next;
            est = next;
        }
    }
    return est;
}

// Unitary factor of a complex Gaussian matrix by modified Gram-Schmidt.
ComplexMatrix random_unitary(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<std::vector<Complex>> cols(n, std::vector<Complex>(n));
    for (auto& c : cols)
        for (auto& x : c) x = Complex(g(rng), g(rng));
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < j; ++i) {
            Complex dot = 0.0;
            for (int k = 0; k < n; ++k) dot += std::conj(cols[i][k]) * cols[j][k];
            for (int k = 0; k < n; ++k) cols[j][k] -= dot * cols[i][k];
        }
        const double nv = vec_norm2(cols[j]);
        for (auto& x : cols[j]) x /= nv;
    }
    ComplexMatrix Q(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) Q(i, j) = cols[j][i];
    return Q;
}

std::string next_content_line(std::istream& is, long& lineno) {
    std::string line;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::size_t pos = line.find_first_not_of(" \t");
        if (pos == std::string::npos) continue;
        if (line[pos] == '%') continue;
        return line;
    }
    throw ParseError("unexpected end of file", lineno);
}

}  // namespace

ComplexMatrix ComplexMatrix::identity(int n) {
    ComplexMatrix I(n, n);
    for (int i = 0; i < n; ++i) I(i, i) = 1.0;
    return I;
}

ComplexMatrix ComplexMatrix::diagonal(const std::vector<Complex>& d) {
    const int n = static_cast<int>(d.size());
    ComplexMatrix D(n, n);
    for (int i = 0; i < n; ++i) D(i, i) = d[i];
    return D;
}

ComplexMatrix ComplexMatrix::transpose() const {
    ComplexMatrix T(cols, rows);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) T(j, i) = (*this)(i, j);
    return T;
}

ComplexMatrix ComplexMatrix::adjoint() const {
    ComplexMatrix T(cols, rows);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) T(j, i) = std::conj((*this)(i, j));
    return T;
}

ComplexMatrix operator+(const ComplexMatrix& A, const ComplexMatrix& B) {
    require_same_shape(A, B);
    ComplexMatrix C = A;
    for (std::size_t i = 0; i < C.data.size(); ++i) C.data[i] += B.data[i];
    return C;
}

ComplexMatrix operator-(const ComplexMatrix& A, const ComplexMatrix& B) {
    require_same_shape(A, B);
    ComplexMatrix C = A;
    for (std::size_t i = 0; i < C.data.size(); ++i) C.data[i] -= B.data[i];
    return C;
}

ComplexMatrix operator*(Complex c, const ComplexMatrix& A) {
    ComplexMatrix C = A;
    for (auto& x : C.data) x *= c;
    return C;
}

bool approx_equal(const ComplexMatrix& A, const ComplexMatrix& B, double tol) {
    if (A.rows != B.rows || A.cols != B.cols) return false;
    for (std::size_t i = 0; i < A.data.size(); ++i)
        if (std::abs(A.data[i] - B.data[i]) > tol) return false;
    return true;
}

ComplexMatrix matmul(const ComplexMatrix& A, const ComplexMatrix& B) {
    if (A.cols != B.rows) throw DimensionError("inner dimensions do not match");
    ComplexMatrix C(A.rows, B.cols);
    for (int i = 0; i < A.rows; ++i)
        for (int k = 0; k < A.cols; ++k) {
            const Complex aik = A(i, k);
            if (aik == Complex(0.0)) continue;
            for (int j = 0; j < B.cols; ++j) C(i, j) += aik * B(k, j);
        }
    return C;
}

LUFactors lu_factor(const ComplexMatrix& A) {
    if (A.rows != A.cols) throw DimensionError("LU requires a square matrix");
    const int n = A.rows;
    LUFactors f{A, std::vector<int>(n), false};
    for (int i = 0; i < n; ++i) f.piv[i] = i;
    for (int k = 0; k < n; ++k) {
        int piv = k;
        double best = std::abs(f.lu(k, k));
        for (int i = k + 1; i < n; ++i) {
            const double m = std::abs(f.lu(i, k));
            if (m > best) {
                best = m;
                piv = i;
            }
        }
        if (best < 1e-300) {
            f.singular = true;
            return f;
        }
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(f.lu(k, j), f.lu(piv, j));
            std::swap(f.piv[k], f.piv[piv]);
        }
        const Complex d = f.lu(k, k);
        for (int i = k + 1; i < n; ++i) {
            const Complex m = f.lu(i, k) / d;
            f.lu(i, k) = m;
            if (m == Complex(0.0)) continue;
            for (int j = k + 1; j < n; ++j) f.lu(i, j) -= m * f.lu(k, j);
        }
    }
    return f;
}

ComplexMatrix lu_solve(const LUFactors& f, const ComplexMatrix& B) {
    if (f.singular) throw SingularMatrixError("LU factorization is singular");
    const int n = f.lu.rows;
    if (B.rows != n) throw DimensionError("right-hand side dimension mismatch");
    ComplexMatrix X(n, B.cols);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < B.cols; ++j) X(i, j) = B(f.piv[i], j);
    // forward substitution, unit lower triangle
    for (int k = 0; k < n; ++k)
        for (int i = k + 1; i < n; ++i) {
            const Complex m = f.lu(i, k);
            if (m == Complex(0.0)) continue;
            for (int j = 0; j < B.cols; ++j) X(i, j) -= m * X(k, j);
        }
    // back substitution
    for (int k = n - 1; k >= 0; --k) {
        const Complex d = f.lu(k, k);
        for (int j = 0; j < B.cols; ++j) X(k, j) /= d;
        for (int i = 0; i < k; ++i) {
            const Complex m = f.lu(i, k);
            if (m == Complex(0.0)) continue;
            for (int j = 0; j < B.cols; ++j) X(i, j) -= m * X(k, j);
        }
    }
    return X;
}

ComplexMatrix inverse(const ComplexMatrix& A) {
    return lu_solve(lu_factor(A), ComplexMatrix::identity(A.rows));
}

double norm(const ComplexMatrix& A, NormKind which) {
    switch (which) {
        case NormKind::inf: {
            double best = 0.0;
            for (int i = 0; i < A.rows; ++i) {
                double s = 0.0;
                for (int j = 0; j < A.cols; ++j) s += std::abs(A(i, j));
                best = std::max(best, s);
            }
            return best;
        }
        case NormKind::fro: {
            double s = 0.0;
            for (const auto& x : A.data) s += std::norm(x);
            return std::sqrt(s);
        }
        case NormKind::two_est: {
            std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
            std::vector<Complex> v = random_unit_vector(A.cols, rng);
            double sigma = 0.0;
            for (int it = 0; it < 200; ++it) {
                std::vector<Complex> w = adjoint_vec(A, mat_vec(A, v));
                const double nw = vec_norm2(w);
                if (nw == 0.0) return 0.0;
                const double next = std::sqrt(nw);
                for (auto& x : w) x /= nw;
                v = std::move(w);
                if (it > 0 && std::abs(next - sigma) <= 1e-6 * next) return next;
                sigma = next;
            }
            return sigma;
        }
    }
    return 0.0;
}

std::pair<double, double> eig_extremes_estimate(const ComplexMatrix& A) {
    if (A.rows != A.cols) throw DimensionError("eigenvalue estimate requires a square matrix");
    std::mt19937_64 rng(0xc2b2ae3d27d4eb4full);
    const double max_mag =
        power_magnitude([&](const std::vector<Complex>& v) { return mat_vec(A, v); }, A.rows, rng);
    LUFactors f = lu_factor(A);
    if (f.singular) throw SingularMatrixError("matrix is singular");
    const double inv_mag = power_magnitude(
        [&](const std::vector<Complex>& v) {
            ComplexMatrix b(A.rows, 1);
            for (int i = 0; i < A.rows; ++i) b(i, 0) = v[i];
            ComplexMatrix x = lu_solve(f, b);
            return std::vector<Complex>(x.data.begin(), x.data.end());
        },
        A.rows, rng);
    return {1.0 / inv_mag, max_mag};
}

ComplexMatrix kron(const ComplexMatrix& A, const ComplexMatrix& B) {
    if (static_cast<long>(A.rows) * B.rows > 4096 || static_cast<long>(A.cols) * B.cols > 4096)
        throw CapacityError("Kronecker product exceeds the 4096 dimension cap");
    ComplexMatrix C(A.rows * B.rows, A.cols * B.cols);
    for (int i = 0; i < A.rows; ++i)
        for (int j = 0; j < A.cols; ++j) {
            const Complex a = A(i, j);
            if (a == Complex(0.0)) continue;
            for (int k = 0; k < B.rows; ++k)
                for (int l = 0; l < B.cols; ++l) C(i * B.rows + k, j * B.cols + l) = a * B(k, l);
        }
    return C;
}

TestMatrixPair build_test_matrix(TestMatrixKind kind, const std::vector<Complex>& spectrum,
                                 double conditioning, int p, std::uint64_t seed) {
    const int n = static_cast<int>(spectrum.size());
    if (n == 0) throw DimensionError("empty spectrum");
    if (p < 1) throw DomainError("p must be positive");
    for (const auto& lam : spectrum) {
        if (lam.imag() == 0.0 && lam.real() <= 0.0)
            throw InvalidSpectrumError("eigenvalue on the closed negative real axis");
        if (kind == TestMatrixKind::hermitian_pd && (lam.imag() != 0.0 || lam.real() <= 0.0))
            throw InvalidSpectrumError("hermitian_pd requires a real positive spectrum");
    }
    std::vector<Complex> roots(n);
    for (int i = 0; i < n; ++i) roots[i] = std::pow(spectrum[i], 1.0 / p);

    std::mt19937_64 rng(seed);
    const ComplexMatrix D = ComplexMatrix::diagonal(spectrum);
    const ComplexMatrix Dr = ComplexMatrix::diagonal(roots);

    ComplexMatrix V(n, n), Vinv(n, n);
    if (kind == TestMatrixKind::hermitian_pd) {
        // Random signed permutation: exactly unitary AND exactly applicable,
        // so A keeps the prescribed spectrum to the last bit. A dense unitary
        // similarity would perturb tiny eigenvalues at absolute roundoff,
        // destroying them relatively and making the reference root meaningless.
        std::vector<int> perm(n);
        for (int i = 0; i < n; ++i) perm[i] = i;
        std::shuffle(perm.begin(), perm.end(), rng);
        const Complex phases[4] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
        std::uniform_int_distribution<int> pick(0, 3);
        for (int j = 0; j < n; ++j) V(perm[j], j) = phases[pick(rng)];
        Vinv = V.adjoint();
    } else {
        // V = Q1 diag(s) Q2 with prescribed singular values, so cond_2(V) is
        // exactly `conditioning` and the inverse is available in closed form.
        const ComplexMatrix Q1 = random_unitary(n, rng);
        const ComplexMatrix Q2 = random_unitary(n, rng);
        const double cond = std::max(conditioning, 1.0);
        std::vector<Complex> s(n), sinv(n);
        for (int i = 0; i < n; ++i) {
            double si;
            if (kind == TestMatrixKind::diagonalizable) {
                const double t = (n == 1) ? 0.0 : static_cast<double>(i) / (n - 1);
                si = std::pow(cond, -t);
            } else {
                // jordan_like: one collapsed direction, the rest well separated
                si = (i == n - 1) ? 1.0 / cond : 1.0;
            }
            s[i] = si;
            sinv[i] = 1.0 / si;
        }
        V = matmul(matmul(Q1, ComplexMatrix::diagonal(s)), Q2);
        Vinv = matmul(matmul(Q2.adjoint(), ComplexMatrix::diagonal(sinv)), Q1.adjoint());
    }
    TestMatrixPair out;
    out.A = matmul(matmul(V, D), Vinv);
    out.root = matmul(matmul(V, Dr), Vinv);
    if (kind == TestMatrixKind::hermitian_pd) {
        // symmetrize away the unitary round-off
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < i; ++j) {
                const Complex avg = 0.5 * (out.A(i, j) + std::conj(out.A(j, i)));
                out.A(i, j) = avg;
                out.A(j, i) = std::conj(avg);
            }
        for (int i = 0; i < n; ++i) out.A(i, i) = out.A(i, i).real();
    }
    return out;
}

void write_matrix_market(std::ostream& os, const ComplexMatrix& A) {
    os << "%%MatrixMarket matrix array complex general\n";
    os << A.rows << " " << A.cols << "\n";
    char buf[64];
    for (int j = 0; j < A.cols; ++j)
        for (int i = 0; i < A.rows; ++i) {
            const Complex& x = A(i, j);
            std::snprintf(buf, sizeof buf, "%.17g %.17g\n", x.real(), x.imag());
            os << buf;
        }
}

ComplexMatrix parse_matrix_market(std::istream& is) {
    long lineno = 0;
    std::string banner;
    if (!std::getline(is, banner)) throw ParseError("empty file", 0);
    ++lineno;
    if (!banner.empty() && banner.back() == '\r') banner.pop_back();
    {
        std::istringstream hs(banner);
        std::string tag, object, format, field, symmetry;
        hs >> tag >> object >> format >> field >> symmetry;
        if (tag != "%%MatrixMarket" || object != "matrix" || format != "array" ||
            field != "complex" || symmetry != "general")
            throw ParseError("expected header '%%MatrixMarket matrix array complex general'",
                             lineno);
    }
    std::string dims = next_content_line(is, lineno);
    int rows = 0, cols = 0;
    {
        std::istringstream ds(dims);
        if (!(ds >> rows >> cols) || rows <= 0 || cols <= 0)
            throw ParseError("invalid dimension line", lineno);
        std::string extra;
        if (ds >> extra) throw ParseError("trailing tokens on dimension line", lineno);
    }
    ComplexMatrix A(rows, cols);
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i) {
            std::string entry = next_content_line(is, lineno);
            const char* s = entry.c_str();
            char* end = nullptr;
            const double re = std::strtod(s, &end);
            if (end == s) throw ParseError("invalid entry", lineno);
            s = end;
            const double im = std::strtod(s, &end);
            if (end == s) throw ParseError("entry is missing the imaginary part", lineno);
            while (*end == ' ' || *end == '\t') ++end;
            if (*end != '\0') throw ParseError("trailing tokens on entry line", lineno);
            A(i, j) = Complex(re, im);
        }
    return A;
}

void save_matrix_market(const std::string& path, const ComplexMatrix& A) {
    std::ofstream os(path);
    if (!os) throw Error("cannot open for writing: " + path);
    write_matrix_market(os, A);
}

ComplexMatrix load_matrix_market(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error("cannot open: " + path);
    return parse_matrix_market(is);
}

}  // namespace rootiter::linalg
