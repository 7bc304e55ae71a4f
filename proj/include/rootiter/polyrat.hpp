#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "rootiter/errors.hpp"

namespace rootiter::polyrat {

using Complex = std::complex<double>;

/// Real-coefficient polynomial, coefficients in ascending monomial order.
/// The zero polynomial has empty coefficient storage and degree -1;
/// otherwise the highest stored coefficient is nonzero.
class Polynomial {
  public:
    Polynomial() = default;
    explicit Polynomial(std::vector<double> coeffs) : c_(std::move(coeffs)) { trim(); }

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    const std::vector<double>& coeffs() const { return c_; }
    double coeff(std::size_t j) const { return j < c_.size() ? c_[j] : 0.0; }

    double eval(double z) const;
    Complex eval(Complex z) const;
    Polynomial derivative() const;

    /// Monomial expansion of scale * prod_j (z + shifts[j]).
    static Polynomial from_negated_roots(const std::vector<double>& shifts, double scale);

  private:
    void trim();
    std::vector<double> c_;
};

/// Ratio of two real polynomials with a declared type (m, l).
/// Canonical normalization: den(1) = 1 (and den(1) > 0 before normalizing).
struct RationalFunction {
    Polynomial num;
    Polynomial den;
    int type_m = 0;
    int type_l = 0;

    /// Rescales num and den so that den(1) = 1. Throws DegenerateError if
    /// den(1) is zero or den is the zero polynomial.
    void canonicalize();
};

RationalFunction make_rational(Polynomial num, Polynomial den, int m, int l);

/// a0 + sum_j a_j / (z + b_j)
struct PartialFractions {
    Complex a0{0.0, 0.0};
    std::vector<std::pair<Complex, Complex>> terms;  // (a_j, b_j)

    Complex eval(Complex z) const;
};

double eval_poly(const Polynomial& p, double z);
Complex eval_poly(const Polynomial& p, Complex z);

/// num(z)/den(z). Throws PoleError when |den(z)| < 1e-300.
Complex eval_rational(const RationalFunction& r, Complex z);
double eval_rational(const RationalFunction& r, double z);

/// Type-(m,l) Pade approximant P_{m,l,p} of z^{1/p} at z = 1, expanded into
/// the canonical monomial representation with exact rational accumulation.
/// Throws CapacityError for m + l > 60.
RationalFunction pade_coeffs(int m, int l, int p);

/// Rising factorial (beta)_m = beta (beta+1) ... (beta+m-1).
double pochhammer(double beta, int m);

/// All complex roots (with multiplicity) via balanced companion-matrix
/// eigenvalues, polished by one Newton step. Throws DegenerateError for
/// zero or constant input.
std::vector<Complex> poly_roots(const Polynomial& p);

/// Partial fraction expansion of h = num/den with deg num <= deg den and
/// simple denominator roots (pairwise separation > sep_tol * root scale).
/// Throws MultiplePoleError when the separation check fails.
PartialFractions to_partial_fractions(const RationalFunction& h, double sep_tol = 1e-8);

/// Expansion with externally supplied (trusted) denominator roots, given as
/// b_j with den(-b_j) = 0. Used when the caller tracks roots exactly.
PartialFractions to_partial_fractions(const RationalFunction& h,
                                      const std::vector<Complex>& pole_negations,
                                      double sep_tol = 1e-8);

Polynomial derivative(const Polynomial& p);

}  // namespace rootiter::polyrat
