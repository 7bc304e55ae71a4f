#include "rootiter/polyrat.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include <boost/multiprecision/cpp_int.hpp>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace rootiter::polyrat {

namespace {

using Rational = boost::multiprecision::cpp_rational;

Rational poch_q(const Rational& beta, int m) {
    Rational acc = 1;
    for (int i = 0; i < m; ++i) acc *= beta + i;
    return acc;
}

// Exact monomial coefficients of sum_j basis[j] * (1-z)^j.
std::vector<Rational> expand_one_minus_z_basis(const std::vector<Rational>& basis) {
    const std::size_t n = basis.size();
    std::vector<Rational> mono(n, Rational(0));
    // (1-z)^j = sum_k binom(j,k) (-1)^k z^k
    std::vector<Rational> binom_row{Rational(1)};
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k <= j; ++k) {
            Rational term = basis[j] * binom_row[k];
            if (k % 2 == 1) term = -term;
            mono[k] += term;
        }
        // next row of Pascal's triangle
        std::vector<Rational> next(j + 2, Rational(0));
        for (std::size_t k = 0; k <= j; ++k) {
            next[k] += binom_row[k];
            next[k + 1] += binom_row[k];
        }
        binom_row = std::move(next);
    }
    return mono;
}

std::vector<double> to_double(const std::vector<Rational>& v) {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = static_cast<double>(v[i]);
    return out;
}

}  // namespace

void Polynomial::trim() {
    while (!c_.empty() && c_.back() == 0.0) c_.pop_back();
}

double Polynomial::eval(double z) const {
    double acc = 0.0;
    for (std::size_t i = c_.size(); i-- > 0;) acc = acc * z + c_[i];
    return acc;
}

Complex Polynomial::eval(Complex z) const {
    Complex acc = 0.0;
    for (std::size_t i = c_.size(); i-- > 0;) acc = acc * z + c_[i];
    return acc;
}

Polynomial Polynomial::derivative() const {
    if (c_.size() <= 1) return Polynomial();
    std::vector<double> d(c_.size() - 1);
    for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * static_cast<double>(i);
    return Polynomial(std::move(d));
}

Polynomial Polynomial::from_negated_roots(const std::vector<double>& shifts, double scale) {
    std::vector<double> c{scale};
    for (double s : shifts) {
        c.push_back(0.0);
        for (std::size_t i = c.size() - 1; i > 0; --i) c[i] = c[i - 1] + c[i] * s;
        c[0] *= s;
    }
    return Polynomial(std::move(c));
}

void RationalFunction::canonicalize() {
    if (den.is_zero()) throw DegenerateError("rational function has zero denominator");
    const double d1 = den.eval(1.0);
    if (std::abs(d1) < 1e-300) throw DegenerateError("denominator vanishes at z = 1");
    std::vector<double> nc = num.coeffs(), dc = den.coeffs();
    for (double& x : nc) x /= d1;
    for (double& x : dc) x /= d1;
    num = Polynomial(std::move(nc));
    den = Polynomial(std::move(dc));
}

RationalFunction make_rational(Polynomial num, Polynomial den, int m, int l) {
    RationalFunction r{std::move(num), std::move(den), m, l};
    if (r.num.degree() > m || r.den.degree() > l)
        throw DegenerateError("polynomial degrees exceed declared type");
    r.canonicalize();
    return r;
}

Complex PartialFractions::eval(Complex z) const {
    Complex acc = a0;
    for (const auto& [a, b] : terms) acc += a / (z + b);
    return acc;
}

double eval_poly(const Polynomial& p, double z) { return p.eval(z); }
Complex eval_poly(const Polynomial& p, Complex z) { return p.eval(z); }

Complex eval_rational(const RationalFunction& r, Complex z) {
    const Complex d = r.den.eval(z);
    if (std::abs(d) < 1e-300) throw PoleError("rational function evaluated at a pole");
    return r.num.eval(z) / d;
}

double eval_rational(const RationalFunction& r, double z) {
    const double d = r.den.eval(z);
    if (std::abs(d) < 1e-300) throw PoleError("rational function evaluated at a pole");
    return r.num.eval(z) / d;
}

double pochhammer(double beta, int m) {
    double acc = 1.0;
    for (int i = 0; i < m; ++i) acc *= beta + static_cast<double>(i);
    return acc;
}

RationalFunction pade_coeffs(int m, int l, int p) {
    if (m < 0 || l < 0 || p < 2) throw DomainError("pade_coeffs requires m,l >= 0 and p >= 2");
    if (m + l > 60) throw CapacityError("pade_coeffs implemented for m + l <= 60");

    const Rational ip(1, p);  // 1/p

    std::vector<Rational> num_basis(m + 1);
    for (int j = 0; j <= m; ++j) {
        Rational fact = 1;
        for (int i = 2; i <= j; ++i) fact *= i;
        num_basis[j] = poch_q(Rational(-m), j) * poch_q(-ip - l, j) / (fact * poch_q(Rational(-l - m), j));
    }

    std::vector<Rational> den_basis(l + 1);
    for (int j = 0; j <= l; ++j) {
        Rational fact = 1;
        for (int i = 2; i <= j; ++i) fact *= i;
        den_basis[j] = poch_q(ip, j) * poch_q(ip - m, m) * poch_q(Rational(j - l - m), m) /
                       (fact * poch_q(Rational(-l - m), m) * poch_q(ip + j - m, m));
    }

    Polynomial num(to_double(expand_one_minus_z_basis(num_basis)));
    Polynomial den(to_double(expand_one_minus_z_basis(den_basis)));
    return make_rational(std::move(num), std::move(den), m, l);
}

std::vector<Complex> poly_roots(const Polynomial& p) {
    const int n = p.degree();
    if (n < 1) throw DegenerateError("poly_roots requires degree >= 1");

    const auto& c = p.coeffs();
    Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 0; i < n; ++i) comp(i, n - 1) = -c[i] / c[n];
    for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;

    // Parlett-Reinsch style diagonal balancing in powers of 2.
    for (int sweep = 0; sweep < 8; ++sweep) {
        bool changed = false;
        for (int i = 0; i < n; ++i) {
            double rnorm = 0, cnorm = 0;
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                rnorm += std::abs(comp(i, j));
                cnorm += std::abs(comp(j, i));
            }
            if (rnorm == 0 || cnorm == 0) continue;
            double f = 1.0;
            while (cnorm < rnorm / 2) { cnorm *= 2; rnorm /= 2; f *= 2; }
            while (cnorm > rnorm * 2) { cnorm /= 2; rnorm *= 2; f /= 2; }
            if (f != 1.0) {
                changed = true;
                for (int j = 0; j < n; ++j) { comp(i, j) /= f; comp(j, i) *= f; }
            }
        }
        if (!changed) break;
    }

    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(comp, /*computeEigenvectors=*/false);
    std::vector<Complex> roots(solver.eigenvalues().data(), solver.eigenvalues().data() + n);

    // One Newton polish per root.
    const Polynomial dp = p.derivative();
    for (auto& r : roots) {
        const Complex pv = p.eval(r);
        const Complex dv = dp.eval(r);
        if (std::abs(dv) > 1e-300) {
            const Complex cand = r - pv / dv;
            if (std::abs(p.eval(cand)) < std::abs(pv)) r = cand;
        }
    }

    // Symmetrize conjugate pairs (real coefficients).
    double scale = 0.0;
    for (const auto& r : roots) scale = std::max(scale, std::abs(r));
    const double imag_tol = 1e-12 * std::max(1.0, scale);
    std::vector<bool> used(roots.size(), false);
    for (std::size_t i = 0; i < roots.size(); ++i) {
        if (used[i]) continue;
        if (std::abs(roots[i].imag()) <= imag_tol) {
            roots[i] = Complex(roots[i].real(), 0.0);
            used[i] = true;
            continue;
        }
        std::size_t best = i;
        double best_dist = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < roots.size(); ++j) {
            if (j == i || used[j]) continue;
            const double d = std::abs(roots[j] - std::conj(roots[i]));
            if (d < best_dist) { best_dist = d; best = j; }
        }
        if (best != i && best_dist < 1e-6 * std::max(1.0, std::abs(roots[i]))) {
            const Complex avg = 0.5 * (roots[i] + std::conj(roots[best]));
            roots[i] = avg;
            roots[best] = std::conj(avg);
            used[i] = used[best] = true;
        } else {
            used[i] = true;
        }
    }

    std::sort(roots.begin(), roots.end(), [](const Complex& a, const Complex& b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return roots;
}

PartialFractions to_partial_fractions(const RationalFunction& h, double sep_tol) {
    if (h.den.degree() < 1) {
        if (h.num.degree() > 0) throw DegenerateError("numerator degree exceeds denominator degree");
        if (h.den.is_zero()) throw DegenerateError("zero denominator");
        PartialFractions pf;
        pf.a0 = Complex(h.num.coeff(0) / h.den.coeff(0), 0.0);
        return pf;
    }
    std::vector<Complex> roots = poly_roots(h.den);
    std::vector<Complex> negs(roots.size());
    for (std::size_t i = 0; i < roots.size(); ++i) negs[i] = -roots[i];
    return to_partial_fractions(h, negs, sep_tol);
}

PartialFractions to_partial_fractions(const RationalFunction& h,
                                      const std::vector<Complex>& pole_negations,
                                      double sep_tol) {
    const int dn = h.num.degree(), dd = h.den.degree();
    if (dn > dd) throw DegenerateError("numerator degree exceeds denominator degree");

    double scale = 0.0;
    for (const auto& b : pole_negations) scale = std::max(scale, std::abs(b));
    scale = std::max(scale, 1e-300);
    for (std::size_t i = 0; i < pole_negations.size(); ++i)
        for (std::size_t j = i + 1; j < pole_negations.size(); ++j)
            if (std::abs(pole_negations[i] - pole_negations[j]) <= sep_tol * scale)
                throw MultiplePoleError("denominator roots not simple within separation tolerance");

    PartialFractions pf;
    pf.a0 = (dn == dd) ? Complex(h.num.coeff(dn) / h.den.coeff(dd), 0.0) : Complex(0.0, 0.0);

    const Polynomial dden = h.den.derivative();
    pf.terms.reserve(pole_negations.size());
    for (const auto& b : pole_negations) {
        const Complex z0 = -b;
        const Complex d = dden.eval(z0);
        if (std::abs(d) < 1e-300) throw MultiplePoleError("vanishing derivative at denominator root");
        pf.terms.emplace_back(h.num.eval(z0) / d, b);
    }
    return pf;
}

Polynomial derivative(const Polynomial& p) { return p.derivative(); }

}  // namespace rootiter::polyrat
