#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "rootiter/minimax.hpp"

using namespace rootiter;
using namespace rootiter::minimax;
using polyrat::eval_rational;

namespace {

MinimaxResult solve(int m, int l, int p, double alpha) {
    ApproxProblem prob;
    prob.m = m;
    prob.l = l;
    prob.p = p;
    prob.alpha = alpha;
    return solve_minimax(prob);
}

double rel_err(const MinimaxResult& res, int p, double z) {
    return (eval_rational(res.r, z) - std::pow(z, 1.0 / p)) / std::pow(z, 1.0 / p);
}

}  // namespace

TEST_CASE("type (0,0): best constant is 2a/(1+a) with level (1-a)/(1+a)") {
    for (double a : {0.1, 0.5, 0.9})
        for (int p : {2, 3, 5}) {
            const MinimaxResult res = solve(0, 0, p, a);
            CHECK(res.E == doctest::Approx((1.0 - a) / (1.0 + a)).epsilon(1e-12));
            CHECK(eval_rational(res.r, 0.3) ==
                  doctest::Approx(2.0 * a / (1.0 + a)).epsilon(1e-12));
            // r_hat = r/(1-E) is the constant 1, tangent at z = 1.
            CHECK(eval_rational(normalize_rhat(res), 0.42) == doctest::Approx(1.0));
        }
}

TEST_CASE("type (1,0) and (0,1) match the closed forms") {
    for (int p : {2, 3, 5})
        for (double a : {0.1, 0.5, 0.9}) {
            const MinimaxResult r10 = solve(1, 0, p, a);
            const polyrat::RationalFunction c10 = rhat_10(p, a);
            CHECK(std::abs(r10.r.num.coeff(0) - (1.0 - r10.E) * c10.num.coeff(0)) <= 1e-10);
            CHECK(std::abs(r10.r.num.coeff(1) - (1.0 - r10.E) * c10.num.coeff(1)) <= 1e-10);

            // Both sides are canonical (den(1) = 1), so r/(1-E) keeps the
            // denominator and rescales the numerator only.
            const MinimaxResult r01 = solve(0, 1, p, a);
            const polyrat::RationalFunction c01 = rhat_01(p, a);
            CHECK(std::abs(r01.r.num.coeff(0) / (1.0 - r01.E) - c01.num.coeff(0)) <= 1e-10);
            CHECK(std::abs(r01.r.den.coeff(0) - c01.den.coeff(0)) <= 1e-10);
            CHECK(std::abs(r01.r.den.coeff(1) - c01.den.coeff(1)) <= 1e-10);
        }
}

TEST_CASE("rhat_10 closed form, p=2, a=0.25: r_hat(z) = 0.25 + z") {
    const polyrat::RationalFunction r = rhat_10(2, 0.25);
    CHECK(r.num.coeff(0) == doctest::Approx(0.25).epsilon(1e-13));
    CHECK(r.num.coeff(1) == doctest::Approx(1.0).epsilon(1e-13));
    // Interior tangency at z = mu^p = 0.25: r_hat = 0.5 = sqrt(0.25).
    CHECK(eval_rational(r, 0.25) == doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("rhat_01 endpoint symmetry: equal relative error at both ends") {
    for (int p : {2, 3})
        for (double a : {0.25, 0.6}) {
            const polyrat::RationalFunction r = rhat_01(p, a);
            auto re = [&](double z) {
                return (eval_rational(r, z) - std::pow(z, 1.0 / p)) / std::pow(z, 1.0 / p);
            };
            CHECK(re(std::pow(a, p)) == doctest::Approx(re(1.0)).epsilon(1e-12));
        }
}

TEST_CASE("equioscillation on m+l+2 alternating nodes") {
    const MinimaxResult res = solve(2, 1, 3, 0.25);
    REQUIRE(res.nodes.size() == 5);
    for (std::size_t i = 0; i + 1 < res.nodes.size(); ++i)
        CHECK(res.nodes[i] < res.nodes[i + 1]);
    int sign = res.sign0;
    for (double z : res.nodes) {
        CHECK(rel_err(res, 3, z) * sign == doctest::Approx(res.E).epsilon(1e-8));
        sign = -sign;
    }
    CHECK(res.certified_lower <= res.E);
    CHECK(res.E - res.certified_lower <= 1e-10 * res.E);
}

TEST_CASE("equioscillation_count") {
    CHECK(equioscillation_count([](double) { return 0.7; }, 0.0, 1.0, 1e-6) == 1);
    const MinimaxResult res = solve(1, 1, 2, 0.1);
    CHECK(equioscillation_count([&](double z) { return rel_err(res, 2, z); }, 0.01, 1.0,
                                1e-6) == 4);
}

TEST_CASE("alpha_next") {
    CHECK(alpha_next(0.77, 0.0) == 1.0);
    for (double a : {0.2, 0.5, 0.8})
        CHECK(alpha_next(a, (1.0 - a) / (1.0 + a)) == doctest::Approx(a).epsilon(1e-15));
}

TEST_CASE("asymptotic contraction constant") {
    CHECK(asymptotic_C(2, 2, 3) == doctest::Approx(7.0 / 288.0).epsilon(1e-13));
    for (int p : {2, 3, 5})
        CHECK(asymptotic_C(1, 0, p) == doctest::Approx((p - 1) / 4.0).epsilon(1e-13));
    for (int m = 1; m <= 6; ++m)
        for (int l : {m - 1, m})
            CHECK(asymptotic_C(m, l, 2) ==
                  doctest::Approx(std::pow(4.0, -(m + l))).epsilon(1e-15));
}

TEST_CASE("Pade defect coefficient") {
    for (int p : {2, 3, 5})
        CHECK(pade_error_coeff(0, 0, p) == doctest::Approx(-1.0 / p).epsilon(1e-12));
    // |c_f| for (1,1,2) against a finite-difference estimate of the cubic
    // defect of (1+3z)/(3+z) - sqrt(z) at z = 1.
    const polyrat::RationalFunction P = polyrat::pade_coeffs(1, 1, 2);
    const double t = 1e-2;
    const double fd = (eval_rational(P, 1.0 + t) - std::sqrt(1.0 + t)) / (t * t * t);
    CHECK(std::abs(pade_error_coeff(1, 1, 2)) == doctest::Approx(std::abs(fd)).epsilon(0.05));
}

TEST_CASE("factored representation agrees with the monomial one") {
    const MinimaxResult res = solve(3, 3, 5, 0.2);
    REQUIRE(res.has_factored);
    for (double z : {0.05, 0.2, 0.63, 1.0})
        CHECK(res.factored.eval(z) == doctest::Approx(eval_rational(res.r, z)).epsilon(1e-11));
    const FactoredRational rh = normalize_rhat_factored(res);
    for (double z : {0.05, 0.63})
        CHECK(rh.eval(z) ==
              doctest::Approx(eval_rational(normalize_rhat(res), z)).epsilon(1e-11));
}

TEST_CASE("solve cache returns a stable reference") {
    const MinimaxResult& a = solve_minimax_cached(2, 2, 3, 0.3);
    const MinimaxResult& b = solve_minimax_cached(2, 2, 3, 0.3);
    CHECK(&a == &b);
    CHECK(a.E == doctest::Approx(solve(2, 2, 3, 0.3).E).epsilon(1e-12));
}

TEST_CASE("wide intervals solve to a certified level") {
    // alpha^p spans 12 decades; the factored representation keeps this stable.
    const MinimaxResult res = solve(4, 4, 3, 1e-4);
    CHECK(res.E > 0.0);
    CHECK(res.E < 1.0);
    CHECK(res.certified_lower >= 0.99 * res.E);
    // Spot-check the level on a coarse grid.
    for (int i = 0; i <= 40; ++i) {
        const double z = std::pow(10.0, -12.0 * (40 - i) / 40.0);
        CHECK(std::abs(rel_err(res, 3, z)) <= res.E * (1.0 + 1e-6) + 1e-15);
    }
}
