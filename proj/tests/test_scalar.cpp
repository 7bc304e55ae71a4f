#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <sstream>
#include <vector>

#include "rootiter/scalar.hpp"

using namespace rootiter;
using namespace rootiter::scalar;

namespace {

// Worst relative error of f~_k against z^{1/p} on [alpha^p, 1], log grid.
double grid_level(const ScalarIterState& st, double alpha0, int points = 4001) {
    const double lo = std::log(std::pow(alpha0, st.p));
    double worst = 0.0;
    for (int i = 0; i < points; ++i) {
        const double z = std::exp(lo * (points - 1 - i) / (points - 1));
        const Complex f = eval_f_tilde(st, Complex(z, 0.0));
        worst = std::max(worst, std::abs(f - std::pow(z, 1.0 / st.p)) / std::pow(z, 1.0 / st.p));
    }
    return worst;
}

}  // namespace

TEST_CASE("eps_recursion start and first step") {
    const auto eps = eps_recursion(1, 0, 2, 1.0 / 3.0, 1);
    REQUIRE(eps.size() == 2);
    CHECK(eps[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    // eps_1 is the optimal (1,0) level on [alpha_0^2, 1] with alpha_0 = 0.5.
    minimax::ApproxProblem prob;
    prob.m = 1;
    prob.l = 0;
    prob.p = 2;
    prob.alpha = 0.5;
    CHECK(eps[1] == doctest::Approx(minimax::solve_minimax(prob).E).epsilon(1e-10));
}

TEST_CASE("ratio table approaches the contraction constant") {
    const RatioTable t = ratio_table(2, 2, 3, 0.04, 4);
    CHECK(t.C == doctest::Approx(7.0 / 288.0).epsilon(1e-13));
    REQUIRE(t.rows.size() == 5);
    CHECK(t.rows[0].ratio == 0.0);
    // Find the last reliable row with k >= 2 and compare its ratio to C.
    double last_ratio = 0.0;
    for (const auto& row : t.rows)
        if (row.k >= 2 && !row.unreliable) last_ratio = row.ratio;
    CHECK(last_ratio == doctest::Approx(7.0 / 288.0).epsilon(0.10));
    // Sub-noise levels are flagged rather than trusted.
    CHECK(t.rows.back().unreliable);
}

TEST_CASE("scalar_step fixed point and closed forms") {
    // z = 1, f = 1: the step returns r_hat(1); in the Pade limit exactly 1.
    auto [f_pade, a_pade] = scalar_step({1.0, 0.0}, {1.0, 0.0}, 1.0, 2, 2, 3);
    CHECK(std::abs(f_pade - 1.0) <= 1e-14);
    CHECK(a_pade == 1.0);

    // (1,0), p=2, alpha=0.25: the step applies r_hat(z) = 0.25 + z, the
    // mu-scaled Newton map (1/p)((p-1)mu + z/mu^{p-1}) with mu = 0.5.
    const double eps1 = eps_recursion(1, 0, 2, (1.0 - 0.25) / (1.0 + 0.25), 1)[1];
    for (double z : {0.1, 0.5, 0.9}) {
        auto [f, a] = scalar_step({z, 0.0}, {1.0, 0.0}, 0.25, 1, 0, 2);
        CHECK(std::abs(f - (0.25 + z)) <= 1e-12);
        CHECK(a == doctest::Approx((1.0 - eps1) / (1.0 + eps1)).epsilon(1e-10));
    }
}

TEST_CASE("eps_k equals the measured level of f~_k") {
    const double alpha = 0.3;
    for (auto [m, l, p] : {std::tuple{1, 1, 2}, {2, 1, 3}}) {
        const auto eps = eps_recursion(m, l, p, (1.0 - alpha) / (1.0 + alpha), 2);
        ScalarIterState st = init_scalar_state(m, l, p, alpha);
        for (int k = 1; k <= 2; ++k) {
            advance(st);
            CHECK(std::abs(st.eps_k - eps[k]) <= 1e-9);
            CHECK(std::abs(grid_level(st, alpha) - eps[k]) <= 1e-9);
            // alpha/eps duality at every step.
            CHECK(std::abs(st.alpha_k - (1.0 - st.eps_k) / (1.0 + st.eps_k)) <= 1e-12);
        }
    }
}

TEST_CASE("alternation count of f~_k is (m+l+1)^k + 1") {
    const double alpha = 0.3;
    for (auto [m, l, p] : {std::tuple{1, 1, 2}, {2, 1, 3}}) {
        ScalarIterState st = init_scalar_state(m, l, p, alpha);
        for (int k = 1; k <= 2; ++k) {
            advance(st);
            const int expected = static_cast<int>(std::pow(m + l + 1, k)) + 1;
            auto err = [&](double z) {
                const Complex f = eval_f_tilde(st, Complex(z, 0.0));
                return (f.real() - std::pow(z, 1.0 / p)) / std::pow(z, 1.0 / p);
            };
            // Loose level tolerance: at eps_2 ~ 1e-11 the evaluation noise is
            // a visible fraction of the level.
            CHECK(minimax::equioscillation_count(err, std::pow(alpha, p), 1.0, 0.2,
                                                 expected) == expected);
        }
    }
}

TEST_CASE("p=2 step composition stays minimax-optimal") {
    // For p = 2 the composed iterate f~_2 of the (1,1) iteration is itself the
    // best type-(4,4) approximant: its level matches the direct solve.
    const double alpha = 0.3;
    ScalarIterState st = init_scalar_state(1, 1, 2, alpha);
    advance(st);
    advance(st);
    minimax::ApproxProblem prob;
    prob.m = 4;
    prob.l = 4;
    prob.p = 2;
    prob.alpha = alpha;
    const double direct = minimax::solve_minimax(prob).E;
    CHECK(grid_level(st, alpha) == doctest::Approx(direct).epsilon(1e-6));
}

TEST_CASE("region sampling") {
    RegionRequest req;
    req.lo_log10 = -2.0;
    req.hi_log10 = 0.0;
    req.lo_arg = 0.0;
    req.hi_arg = 0.0;
    req.n_abs = 41;
    req.n_arg = 1;

    // Real z in [alpha^p, 1] converge by the k that eps_recursion certifies.
    const double alpha = std::pow(10.0, -2.0 / 3.0);
    const auto eps = eps_recursion(2, 2, 3, (1.0 - alpha) / (1.0 + alpha), 4);
    int k_needed = 4;
    for (int k = 0; k <= 4; ++k)
        if (eps[k] <= 1e-12) {
            k_needed = k;
            break;
        }
    const RegionGrid g =
        region_sample(req, k_needed, 1e-12, alpha, 2, 2, 3, IterMode::minimax);
    for (int v : g.k_converged) CHECK(v >= 0);
    for (int v : g.rotation_index) CHECK(v == -1);

    // Odd p, negative real axis: iterates stay real, never the principal root.
    RegionRequest neg = req;
    neg.lo_arg = neg.hi_arg = 3.141592653589793;
    const RegionGrid gn = region_sample(neg, 6, 1e-10, alpha, 2, 2, 3, IterMode::minimax);
    for (int v : gn.k_converged) CHECK(v == -1);

    // Determinism across calls.
    const RegionGrid g2 =
        region_sample(req, k_needed, 1e-12, alpha, 2, 2, 3, IterMode::minimax);
    CHECK(g.k_converged == g2.k_converged);
    CHECK(g.rotation_index == g2.rotation_index);

    std::ostringstream os;
    write_region_csv(os, gn);
    CHECK(os.str().substr(0, 41) == "log10_abs,arg,k_converged,rotation_index\n");
}
