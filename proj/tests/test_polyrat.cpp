#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>

#include "rootiter/polyrat.hpp"

using namespace rootiter;
using namespace rootiter::polyrat;

TEST_CASE("polynomial evaluation") {
    CHECK(eval_poly(Polynomial({1.0}), 5.0) == 1.0);
    const Complex z{3.0, 4.0};
    CHECK(eval_poly(Polynomial({0.0, 1.0}), z) == z);
    CHECK(eval_poly(Polynomial({1.0, 2.0, 1.0}), 2.0) == 9.0);
}

TEST_CASE("polynomial derivative") {
    CHECK(Polynomial({7.0}).derivative().is_zero());
    const Polynomial d = Polynomial({0.0, 0.0, 1.0}).derivative();
    CHECK(d.degree() == 1);
    CHECK(d.coeff(0) == 0.0);
    CHECK(d.coeff(1) == 2.0);
    CHECK(Polynomial({1.0, 2.0, 1.0}).derivative().eval(2.0) == 6.0);
}

TEST_CASE("from_negated_roots expands the factored form") {
    const Polynomial q = Polynomial::from_negated_roots({1.0, 2.0}, 3.0);
    for (double z : {-0.5, 0.0, 1.3, 4.0})
        CHECK(q.eval(z) == doctest::Approx(3.0 * (z + 1.0) * (z + 2.0)));
}

TEST_CASE("rational evaluation and pole detection") {
    RationalFunction one = make_rational(Polynomial({1.0}), Polynomial({1.0}), 0, 0);
    CHECK(eval_rational(one, 17.25) == 1.0);

    RationalFunction r = make_rational(Polynomial({1.0, 3.0}), Polynomial({3.0, 1.0}), 1, 1);
    CHECK(eval_rational(r, 1.0) == doctest::Approx(1.0));
    CHECK_THROWS_AS(eval_rational(r, -3.0), PoleError);
}

TEST_CASE("Pade approximants of z^{1/p} at z = 1") {
    // (0,0): empty products leave the constant 1.
    const RationalFunction c = pade_coeffs(0, 0, 5);
    CHECK(eval_rational(c, 0.37) == doctest::Approx(1.0));

    // (1,1), p=2 is (1+3z)/(3+z) up to the den(1)=1 normalization.
    const RationalFunction r = pade_coeffs(1, 1, 2);
    CHECK(r.num.coeff(1) == doctest::Approx(3.0 * r.num.coeff(0)));
    CHECK(r.den.coeff(0) == doctest::Approx(3.0 * r.den.coeff(1)));
    CHECK(eval_rational(r, 1.0) == doctest::Approx(1.0));

    // (1,0) is the truncated Taylor series 1 + (z-1)/p.
    for (int p : {2, 3, 7}) {
        const RationalFunction t = pade_coeffs(1, 0, p);
        for (double z : {0.5, 1.0, 2.0})
            CHECK(eval_rational(t, z) == doctest::Approx(1.0 + (z - 1.0) / p));
    }
}

TEST_CASE("Pade defect order: r(1+t) - (1+t)^{1/p} = O(t^{m+l+1})") {
    for (auto [m, l, p] : {std::tuple{2, 2, 3}, {3, 2, 5}, {4, 4, 2}}) {
        const RationalFunction r = pade_coeffs(m, l, p);
        const int N = m + l + 1;
        // Halving t must shrink the defect by about 2^{-N}. t is kept large
        // enough that c t^N stays well above double roundoff.
        const double t1 = (N > 6) ? 0.2 : 1e-2, t2 = t1 / 2.0;
        const double d1 = std::abs(eval_rational(r, 1.0 + t1) - std::pow(1.0 + t1, 1.0 / p));
        const double d2 = std::abs(eval_rational(r, 1.0 + t2) - std::pow(1.0 + t2, 1.0 / p));
        CHECK(d2 / d1 == doctest::Approx(std::pow(0.5, N)).epsilon(N > 6 ? 0.25 : 0.05));
    }
}

TEST_CASE("Pade degree cap") {
    CHECK_THROWS_AS(pade_coeffs(31, 31, 3), CapacityError);
}

TEST_CASE("pochhammer") {
    CHECK(pochhammer(0.37, 0) == 1.0);
    CHECK(pochhammer(1.0 / 3.0, 3) == doctest::Approx(28.0 / 27.0));
    CHECK(pochhammer(1.0, 5) == doctest::Approx(120.0));
}

TEST_CASE("poly_roots on known polynomials") {
    auto r1 = poly_roots(Polynomial({-2.0, 1.0}));
    REQUIRE(r1.size() == 1);
    CHECK(std::abs(r1[0] - Complex(2.0, 0.0)) < 1e-14);

    auto r2 = poly_roots(Polynomial({1.0, 0.0, 1.0}));
    REQUIRE(r2.size() == 2);
    std::sort(r2.begin(), r2.end(),
              [](Complex a, Complex b) { return a.imag() < b.imag(); });
    CHECK(std::abs(r2[0] - Complex(0.0, -1.0)) < 1e-14);
    CHECK(std::abs(r2[1] - Complex(0.0, 1.0)) < 1e-14);

    auto r3 = poly_roots(pade_coeffs(1, 1, 2).den);
    REQUIRE(r3.size() == 1);
    CHECK(std::abs(r3[0] - Complex(-3.0, 0.0)) < 1e-13);

    CHECK_THROWS_AS(poly_roots(Polynomial({4.0})), DegenerateError);
}

TEST_CASE("partial fractions") {
    // h = 1: a0 = 1, no pole terms.
    const PartialFractions triv =
        to_partial_fractions(make_rational(Polynomial({1.0}), Polynomial({1.0}), 0, 0));
    CHECK(triv.a0 == Complex(1.0, 0.0));
    CHECK(triv.terms.empty());

    // h = (3+z)/(1+3z) = 1/3 + (8/9)/(z + 1/3).
    const PartialFractions pf =
        to_partial_fractions(make_rational(Polynomial({3.0, 1.0}), Polynomial({1.0, 3.0}), 1, 1));
    CHECK(pf.a0.real() == doctest::Approx(1.0 / 3.0));
    REQUIRE(pf.terms.size() == 1);
    CHECK(pf.terms[0].first.real() == doctest::Approx(8.0 / 9.0));
    CHECK(pf.terms[0].second.real() == doctest::Approx(1.0 / 3.0));

    // Sampling invariant: the expansion of 1/P_{1,1,3} agrees with the ratio.
    const RationalFunction P = pade_coeffs(1, 1, 3);
    const RationalFunction Q = make_rational(P.den, P.num, 1, 1);
    const PartialFractions qf = to_partial_fractions(Q);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int i = 0; i < 20; ++i) {
        const Complex z{u(rng), u(rng)};
        CHECK(std::abs(qf.eval(z) - eval_rational(Q, z)) <=
              1e-12 * (1.0 + std::abs(eval_rational(Q, z))));
    }

    // Double pole rejected.
    CHECK_THROWS_AS(
        to_partial_fractions(make_rational(Polynomial({0.0, 1.0}), Polynomial({1.0, 2.0, 1.0}), 1, 2)),
        MultiplePoleError);
}
