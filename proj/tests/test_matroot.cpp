#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <sstream>
#include <vector>

#include "rootiter/linalg.hpp"
#include "rootiter/matroot.hpp"
#include "rootiter/scalar.hpp"

using namespace rootiter;
using namespace rootiter::matroot;
using linalg::Complex;
using linalg::ComplexMatrix;

TEST_CASE("identity and scaled identity are immediate") {
    IterationConfig cfg;
    cfg.p = 3;
    const RootResult ri = compute_root(ComplexMatrix::identity(4), cfg);
    CHECK(ri.termination == Termination::converged);
    CHECK(linalg::approx_equal(ri.Y_tilde, ComplexMatrix::identity(4), 1e-13));
    CHECK(linalg::approx_equal(ri.Z_tilde, ComplexMatrix::identity(4), 1e-13));

    const double c = 7.0;
    const RootResult rc = compute_root(Complex(c, 0.0) * ComplexMatrix::identity(3), cfg);
    const ComplexMatrix ref = Complex(std::cbrt(c), 0.0) * ComplexMatrix::identity(3);
    CHECK(reference_relative_error(rc, ref) <= 1e-13);
    CHECK(reference_relative_error({ref, ref, 0, Termination::converged}, ref) == 0.0);
    ComplexMatrix twice = Complex(2.0, 0.0) * ref;
    CHECK(reference_relative_error({twice, twice, 0, Termination::converged}, ref) ==
          doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("termination rule") {
    IterationConfig cfg;
    cfg.p = 2;
    cfg.m = 1;
    cfg.l = 1;
    cfg.Delta = 1e-15;
    const double thr = 2.0 * std::cbrt(1e-15 / std::pow(4.0, -2.0));
    CHECK(termination_threshold(cfg) == doctest::Approx(thr).epsilon(1e-13));
    CHECK(termination_check(ComplexMatrix::identity(3), cfg));
    ComplexMatrix off = ComplexMatrix::identity(3);
    off(0, 1) = 2.0 * thr;
    CHECK_FALSE(termination_check(off, cfg));
}

TEST_CASE("wide Hermitian PD spectrum: few minimax steps, more Pade steps") {
    std::vector<Complex> spec;
    for (int i = 0; i < 10; ++i) spec.emplace_back(std::pow(10.0, -15.0 * (9 - i) / 9.0), 0.0);
    const linalg::TestMatrixPair pair =
        linalg::build_test_matrix(linalg::TestMatrixKind::hermitian_pd, spec, 1.0, 3, 321);

    IterationConfig cfg;
    cfg.p = 3;
    cfg.m = 8;
    cfg.l = 8;
    const RootResult rm = compute_root(pair.A, cfg);
    CHECK(rm.termination == Termination::converged);
    CHECK(rm.iters <= 2);
    CHECK(reference_relative_error(rm, pair.root) <= 1e-12);

    cfg.mode = Mode::pade;
    const RootResult rp = compute_root(pair.A, cfg);
    CHECK(rp.termination == Termination::converged);
    CHECK(rp.iters >= 4);
    CHECK(reference_relative_error(rp, pair.root) <= 1e-12);
}

TEST_CASE("diagonal trajectories match the scalar recursion") {
    // Two steps; a third would round alpha_k to exactly 1 in doubles.
    const double alpha = 0.3;
    const int k_steps = 2;
    for (auto [m, l] : {std::pair{1, 1}, {2, 2}})
        for (int p : {2, 3, 5}) {
            const std::vector<Complex> lam = {
                {std::pow(alpha, p), 0.0}, {0.1, 0.0}, {0.47, 0.0}, {1.0, 0.0}};
            const ComplexMatrix A = ComplexMatrix::diagonal(lam);

            IterationConfig cfg;
            cfg.p = p;
            cfg.m = m;
            cfg.l = l;
            cfg.tau_override = 1.0;
            cfg.alpha0_override = alpha;
            cfg.alpha_pade_switch = 1.0;  // stay in minimax mode throughout
            cfg.Delta = 1e-300;           // never satisfied: run exactly k_steps
            cfg.max_iters = k_steps;
            const RootResult res = compute_root(A, cfg);
            REQUIRE(res.iters == k_steps);

            scalar::ScalarIterState st = scalar::init_scalar_state(m, l, p, alpha);
            for (int k = 0; k < k_steps; ++k) scalar::advance(st);
            for (int i = 0; i < 4; ++i) {
                // Y~ = f~^{1-p} z and Z~ = 1/f~ entrywise on a diagonal input.
                const Complex ft = scalar::eval_f_tilde(st, lam[i]);
                CHECK(std::abs(res.Y_tilde(i, i) - std::pow(ft, 1 - p) * lam[i]) <=
                      1e-12 * std::abs(res.Y_tilde(i, i)));
                CHECK(std::abs(res.Z_tilde(i, i) - 1.0 / ft) <=
                      1e-12 * std::abs(res.Z_tilde(i, i)));
            }
        }
}

TEST_CASE("Pade mode on a diagonal input equals the scalar alpha=1 limit") {
    const std::vector<Complex> lam = {{0.2, 0.0}, {0.8, 0.0}, {1.5, 0.0}};
    const int p = 3, k_steps = 4;
    IterationConfig cfg;
    cfg.p = p;
    cfg.m = 2;
    cfg.l = 2;
    cfg.mode = Mode::pade;
    cfg.tau_override = 1.0;
    cfg.Delta = 1e-300;
    cfg.max_iters = k_steps;
    const RootResult res = compute_root(ComplexMatrix::diagonal(lam), cfg);
    REQUIRE(res.iters == k_steps);
    for (int i = 0; i < 3; ++i) {
        Complex f{1.0, 0.0};
        for (int k = 0; k < k_steps; ++k)
            f = scalar::scalar_step(lam[i], f, 1.0, 2, 2, p).first;
        CHECK(std::abs(res.Y_tilde(i, i) - std::pow(f, 1 - p) * lam[i]) <=
              1e-12 * std::abs(res.Y_tilde(i, i)));
        CHECK(std::abs(res.Z_tilde(i, i) - 1.0 / f) <= 1e-12 * std::abs(res.Z_tilde(i, i)));
    }
}

TEST_CASE("Newton specializations") {
    const ComplexMatrix A = ComplexMatrix::diagonal({{4.0, 0.0}});
    const RootResult rn = newton_scaled_root(A, 2);
    CHECK(std::abs(rn.Y_tilde(0, 0) - 2.0) <= 1e-13 * 2.0);
    const RootResult ri = inverse_newton_scaled_root(A, 2);
    CHECK(std::abs(ri.Z_tilde(0, 0) - 0.5) <= 1e-13 * 0.5);

    const RootResult rI = newton_scaled_root(ComplexMatrix::identity(3), 5);
    CHECK(linalg::approx_equal(rI.Y_tilde, ComplexMatrix::identity(3), 1e-14));
}

TEST_CASE("per-step operation counts fit the flop model") {
    // Per iteration the model is (6 + 2m + beta log2(p-1)) n^3 flops with
    // beta in [1,2], counting a product or an inversion as 2 n^3.
    std::vector<Complex> spec;
    for (int i = 0; i < 6; ++i) spec.emplace_back(0.05 + 0.19 * i, 0.0);
    for (int p : {3, 5}) {
        const linalg::TestMatrixPair pair =
            linalg::build_test_matrix(linalg::TestMatrixKind::hermitian_pd, spec, 1.0, p, 5);
        IterationConfig cfg;
        cfg.p = p;
        cfg.m = 4;
        cfg.l = 4;
        const RootResult res = compute_root(pair.A, cfg);
        REQUIRE(res.iters >= 2);
        const TraceRow& row = res.trace[1];
        const double flops = 2.0 * (row.matmuls + row.inversions);
        const double beta = (flops - 6.0 - 2.0 * cfg.m) / std::log2(p - 1.0);
        CHECK(beta >= 0.9);
        CHECK(beta <= 2.1);
    }
}

TEST_CASE("condition number of the p-th root") {
    for (int p : {2, 3, 5})
        for (double c : {0.1, 1.0, 7.0})
            for (int n : {2, 4}) {
                const ComplexMatrix A = Complex(c, 0.0) * ComplexMatrix::identity(n);
                const ComplexMatrix X =
                    Complex(std::pow(c, 1.0 / p), 0.0) * ComplexMatrix::identity(n);
                CHECK(condition_number_kappa_p(A, X, p) ==
                      doctest::Approx(1.0 / p).epsilon(1e-8));
            }
    // p = 1 boundary: the identity map has condition number 1.
    const ComplexMatrix A = ComplexMatrix::diagonal({{2.0, 0.0}, {5.0, 0.0}});
    CHECK(condition_number_kappa_p(A, A, 1) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("Frechet step-map idempotency") {
    linalg::ComplexMatrix B(3, 3);
    const double vals[9] = {0.9, -0.2, 0.4, 0.1, 1.3, -0.5, -0.3, 0.2, 0.8};
    for (int i = 0; i < 9; ++i) B.data[i] = vals[i];
    const FrechetDefect d = frechet_idempotency_defect(B, 2, 2, 3);
    CHECK(d.idempotency <= 1e-4);
    CHECK(d.agreement <= 1e-4);
}

TEST_CASE("branch-cut spectra never yield a spurious principal root") {
    // The principal root is undefined for eigenvalues on the negative real
    // axis. The iteration may diverge, stall, or land on a rotated p-th root;
    // what it must not do is report convergence with Y~^p far from A.
    IterationConfig cfg;
    cfg.p = 3;
    cfg.m = 2;
    cfg.l = 2;
    const ComplexMatrix A = ComplexMatrix::diagonal({{-1.0, 0.0}, {0.5, 0.0}});
    try {
        const RootResult res = compute_root(A, cfg);
        // For odd p the real branch (-1)^{1/3} = -1 is a valid limit.
        if (res.termination == Termination::converged)
            CHECK(res.residual_defining <= 1e-10);
    } catch (const DivergenceError&) {
    } catch (const SingularMatrixError&) {
    }
}

TEST_CASE("trace CSV format") {
    IterationConfig cfg;
    cfg.p = 2;
    const RootResult res = compute_root(ComplexMatrix::diagonal({{4.0, 0.0}}), cfg);
    std::ostringstream os;
    write_trace_csv(os, res);
    CHECK(os.str().substr(0, 28) == "k,alpha,residual_inf,mode\n0,");
}
