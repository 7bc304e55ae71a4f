#include "rootiter/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <random>
#include <vector>

#include "rootiter/linalg.hpp"
#include "rootiter/matroot.hpp"
#include "rootiter/minimax.hpp"
#include "rootiter/scalar.hpp"

namespace rootiter::selftest {

namespace {

using Complex = std::complex<double>;
using linalg::ComplexMatrix;

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

Check run_guarded(const char* name, const std::function<Check()>& body) {
    try {
        Check c = body();
        c.name = name;
        return c;
    } catch (const std::exception& e) {
        return {name, false, std::string("exception: ") + e.what()};
    }
}

// eps0 such that the two-step recursion bottoms out near `target`, found by
// inverting eps2 ~ C^{N+1} eps0^{N^2} and correcting against the real solver.
double pick_eps0(int m, int l, int p, double target) {
    const double C = minimax::asymptotic_C(m, l, p);
    const int N = m + l + 1;
    double eps0 = std::pow(target / std::pow(C, N + 1), 1.0 / (N * double(N)));
    eps0 = std::min(eps0, 0.9);
    for (int tries = 0; tries < 8; ++tries) {
        const double eps2 = scalar::eps_recursion(m, l, p, eps0, 2)[2];
        if (eps2 > 1e-14 && eps2 < 1e-8) return eps0;
        // move eps0 along the model to bring eps2 to target
        eps0 *= std::pow(target / eps2, 1.0 / (N * double(N)));
        eps0 = std::min(eps0, 0.9);
    }
    return eps0;
}

Check contraction_ratios() {
    const int cases[3][3] = {{1, 1, 13}, {2, 2, 3}, {3, 3, 5}};
    std::string detail;
    for (const auto& c : cases) {
        const int m = c[0], l = c[1], p = c[2];
        const double eps0 = pick_eps0(m, l, p, 1e-11);
        const auto table = scalar::ratio_table(m, l, p, eps0, 2);
        if (table.rows[2].unreliable || table.rows[2].eps <= 1e-14)
            return {"", false, fmt("(%d,%d,%d): eps2=%.3g unreliable", m, l, p, table.rows[2].eps)};
        const double rel = std::abs(table.rows[2].ratio / table.C - 1.0);
        detail += fmt("(%d,%d,%d) ratio/C-1=%.2e  ", m, l, p, rel);
        if (rel > 0.10) return {"", false, detail};
    }
    const double c223 = minimax::asymptotic_C(2, 2, 3);
    if (std::abs(c223 - 7.0 / 288.0) > 1e-15 * (7.0 / 288.0))
        return {"", false, fmt("C(2,2,3)=%.17g != 7/288", c223)};
    return {"", true, detail + "C(2,2,3)=7/288"};
}

Check p2_constants() {
    double worst = 0.0;
    for (int m = 1; m <= 6; ++m)
        for (int l : {m - 1, m}) {
            const double C = minimax::asymptotic_C(m, l, 2);
            worst = std::max(worst, std::abs(C * std::pow(4.0, m + l) - 1.0));
        }
    return {"", worst <= 1e-15, fmt("max |C(m,l,2) 4^(m+l) - 1| = %.2e", worst)};
}

// max over a log-spaced grid of the relative error of the k-step iterate
double grid_max_err(const scalar::ScalarIterState& st, int k, double zlo, double zhi, int n,
                    double rescale) {
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z =
            zlo * std::pow(zhi / zlo, (n == 1) ? 0.0 : double(i) / (n - 1)) * rescale;
        const Complex root = std::pow(Complex(z, 0.0), 1.0 / st.p);
        const Complex f = scalar::eval_f_tilde(st, Complex(z, 0.0), k);
        worst = std::max(worst, std::abs(f - root) / std::abs(root));
    }
    return worst;
}

Check iteration_separation() {
    const int p = 3, m = 8, l = 8;
    const double alpha = std::pow(10.0, -16.0 / 3.0), delta = 1e-14;
    scalar::ScalarIterState mini = scalar::init_scalar_state(m, l, p, alpha);
    for (int i = 0; i < 2; ++i) scalar::advance(mini);
    const double err_mini = grid_max_err(mini, 2, 1e-16, 1.0, 200, 1.0);

    scalar::ScalarIterState pade = scalar::init_scalar_state(m, l, p, 1.0, true);
    for (int i = 0; i < 5; ++i) scalar::advance(pade);
    const double rescale = std::pow(alpha, -0.5 * p);
    const double err_p3 = grid_max_err(pade, 3, 1e-16, 1.0, 200, rescale);
    const double err_p5 = grid_max_err(pade, 5, 1e-16, 1.0, 200, rescale);

    const bool ok = err_mini <= delta && err_p3 > delta && err_p5 <= delta;
    return {"", ok,
            fmt("minimax k=2 err=%.2e; pade k=3 err=%.2e, k=5 err=%.2e", err_mini, err_p3,
                err_p5)};
}

Check equioscillation_law() {
    std::string detail;
    for (int p : {2, 3})
        for (auto [m, l] : {std::pair{1, 1}, {2, 1}})
            for (int k : {1, 2}) {
                const double alpha = 0.3;
                scalar::ScalarIterState st = scalar::init_scalar_state(m, l, p, alpha);
                for (int i = 0; i < k; ++i) scalar::advance(st);
                auto err = [&](double z) {
                    const Complex f = scalar::eval_f_tilde(st, Complex(z, 0.0), k);
                    const double root = std::pow(z, 1.0 / p);
                    return (f.real() - root) / root;
                };
                const int expect = static_cast<int>(std::pow(m + l + 1, k)) + 1;
                const double a = std::pow(alpha, p);
                const int count = minimax::equioscillation_count(err, a, 1.0, 0.2, expect);
                if (count != expect)
                    return {"", false,
                            fmt("(%d,%d,p=%d,k=%d): %d alternations, want %d", m, l, p, k,
                                count, expect)};
                // endpoints attain the extremal level
                double emax = 0.0;
                for (int i = 0; i <= 4000; ++i)
                    emax = std::max(emax, std::abs(err(a * std::pow(1.0 / a, i / 4000.0))));
                if (std::abs(err(a)) < emax - 1e-9 || std::abs(err(1.0)) < emax - 1e-9)
                    return {"", false,
                            fmt("(%d,%d,p=%d,k=%d): endpoint not extremal (%.2e %.2e vs %.2e)",
                                m, l, p, k, std::abs(err(a)), std::abs(err(1.0)), emax)};
            }
    return {"", true, "all counts (m+l+1)^k+1, endpoints extremal"};
}

double coeff_distance(const polyrat::RationalFunction& a, const polyrat::RationalFunction& b) {
    double d = 0.0, scale = 0.0;
    const int dn = std::max(a.num.degree(), b.num.degree());
    const int dd = std::max(a.den.degree(), b.den.degree());
    for (int j = 0; j <= dn; ++j) {
        d = std::max(d, std::abs(a.num.coeff(j) - b.num.coeff(j)));
        scale = std::max({scale, std::abs(a.num.coeff(j)), std::abs(b.num.coeff(j))});
    }
    for (int j = 0; j <= dd; ++j) {
        d = std::max(d, std::abs(a.den.coeff(j) - b.den.coeff(j)));
        scale = std::max({scale, std::abs(a.den.coeff(j)), std::abs(b.den.coeff(j))});
    }
    return d / scale;
}

Check low_order_closed_forms() {
    double worst = 0.0;
    for (int p : {2, 3, 5})
        for (double alpha : {0.1, 0.5, 0.9})
            for (auto [m, l] : {std::pair{1, 0}, {0, 1}}) {
                minimax::ApproxProblem prob;
                prob.m = m;
                prob.l = l;
                prob.p = p;
                prob.alpha = alpha;
                const minimax::MinimaxResult res = minimax::solve_minimax(prob);
                polyrat::RationalFunction want =
                    (m == 1) ? minimax::rhat_10(p, alpha) : minimax::rhat_01(p, alpha);
                std::vector<double> nc = want.num.coeffs();
                for (double& x : nc) x *= 1.0 - res.E;
                want.num = polyrat::Polynomial(nc);
                worst = std::max(worst, coeff_distance(res.r, want));
            }
    return {"", worst <= 1e-10, fmt("max closed-form coefficient gap %.2e", worst)};
}

Check pade_limit_monotone() {
    for (auto [m, l, p] : {std::tuple{1, 1, 3}, {2, 2, 3}}) {
        const polyrat::RationalFunction P = polyrat::pade_coeffs(m, l, p);
        double prev = -1.0;
        for (double alpha : {0.9, 0.99, 0.999}) {
            minimax::ApproxProblem prob;
            prob.m = m;
            prob.l = l;
            prob.p = p;
            prob.alpha = alpha;
            const double d = coeff_distance(minimax::solve_minimax(prob).r, P);
            if (prev >= 0.0 && d >= prev)
                return {"", false,
                        fmt("(%d,%d,%d): distance %.3e at alpha=%g not below %.3e", m, l, p, d,
                            alpha, prev)};
            prev = d;
        }
    }
    return {"", true, "coefficient distance to the Pade limit strictly decreasing"};
}

Check hermitian_bounds() {
    std::string detail;
    for (int p : {2, 3, 5}) {
        const int n = 10;
        const double alpha = std::pow(10.0, -4.0 / p);  // spectrum [1e-4, 1]
        std::vector<Complex> spec(n);
        for (int i = 0; i < n; ++i)
            spec[i] = std::pow(10.0, -4.0 + 4.0 * i / (n - 1));
        const linalg::TestMatrixPair tm =
            linalg::build_test_matrix(linalg::TestMatrixKind::hermitian_pd, spec, 1.0, p);
        const ComplexMatrix root_inv = linalg::inverse(tm.root);
        const ComplexMatrix I = ComplexMatrix::identity(n);

        matroot::IterationConfig cfg;
        cfg.p = p;
        cfg.m = 2;
        cfg.l = 2;
        cfg.tau_override = 1.0;
        cfg.alpha0_override = alpha;

        const auto eps = scalar::eps_recursion(2, 2, p, (1.0 - alpha) / (1.0 + alpha), 4);
        for (int k = 1; k <= 3; ++k) {
            const double a_k = (1.0 - eps[k]) / (1.0 + eps[k]);
            if (a_k > cfg.alpha_pade_switch) break;  // only pre-switch steps
            matroot::IterationConfig probe = cfg;
            probe.max_iters = k;
            probe.Delta = 1e-300;  // disable early termination, stop at exactly k steps
            probe.alpha_pade_switch = 1.0;
            const matroot::RootResult r = matroot::compute_root(tm.A, probe);
            const double ynorm = linalg::norm(linalg::matmul(r.Y_tilde, root_inv) - I,
                                              linalg::NormKind::two_est);
            const double znorm = linalg::norm(linalg::matmul(r.Z_tilde, tm.root) - I,
                                              linalg::NormKind::two_est);
            const double ybound =
                (std::pow(1.0 + eps[k], p - 1) - 1.0) / std::pow(1.0 - eps[k], p - 1);
            const double zbound = eps[k] / (1.0 - eps[k]);
            if (ynorm > ybound * (1.0 + 1e-6) + 1e-13 || znorm > zbound * (1.0 + 1e-6) + 1e-13)
                return {"", false,
                        fmt("p=%d k=%d: Y %.3e vs %.3e, Z %.3e vs %.3e", p, k, ynorm, ybound,
                            znorm, zbound)};
        }
        const matroot::RootResult full = matroot::compute_root(tm.A, cfg);
        const double relerr = matroot::reference_relative_error(full, tm.root);
        detail += fmt("p=%d relerr=%.1e  ", p, relerr);
        if (relerr > 1e-12) return {"", false, detail};
    }
    return {"", true, detail + "bounds hold at every pre-switch step"};
}

Check frechet_stability() {
    std::mt19937_64 rng(0x51E5A9D0C3B2F871ull);
    std::normal_distribution<double> gauss(0.0, 1.0);
    double worst_idem = 0.0, worst_agree = 0.0;
    for (int t = 0; t < 5; ++t) {
        ComplexMatrix B(3, 3);
        for (auto& x : B.data) x = Complex(gauss(rng), gauss(rng));
        for (auto [m, l] : {std::pair{1, 1}, {2, 2}})
            for (int p : {2, 3}) {
                const matroot::FrechetDefect d = matroot::frechet_idempotency_defect(B, m, l, p);
                worst_idem = std::max(worst_idem, d.idempotency);
                worst_agree = std::max(worst_agree, d.agreement);
            }
    }
    return {"", worst_idem <= 1e-4 && worst_agree <= 1e-4,
            fmt("max idempotency defect %.2e, closed-form agreement %.2e", worst_idem,
                worst_agree)};
}

Check kappa_identity() {
    double worst = 0.0;
    for (double c : {0.1, 1.0, 7.0})
        for (int p : {2, 3, 5})
            for (int n : {2, 4}) {
                const ComplexMatrix A = Complex(c, 0.0) * ComplexMatrix::identity(n);
                const ComplexMatrix X =
                    Complex(std::pow(c, 1.0 / p), 0.0) * ComplexMatrix::identity(n);
                const double kappa = matroot::condition_number_kappa_p(A, X, p);
                worst = std::max(worst, std::abs(kappa * p - 1.0));
            }
    return {"", worst <= 1e-8, fmt("max |kappa(cI) p - 1| = %.2e", worst)};
}

Check forward_stability() {
    const double u = std::ldexp(1.0, -53);
    int passes = 0, total = 0, divergences = 0, hpd_divergences = 0;
    double kmin = 1e300, kmax = 0.0;
    std::string fails;
    for (int t = 0; t < 20; ++t) {
        const int p = (t % 3 == 0) ? 2 : (t % 3 == 1) ? 3 : 5;
        const int n = 8;
        const bool hermitian = (t % 2 == 0);
        // magnitude spread grows across the corpus to sweep kappa over 1e0-1e8
        const double spread = 13.0 * t / 19.0;
        std::vector<Complex> spec(n);
        for (int i = 0; i < n; ++i) {
            const double mag = std::pow(10.0, -spread * i / (n - 1));
            const double arg =
                hermitian ? 0.0 : (0.6 * M_PI) * (2.0 * i / (n - 1) - 1.0) * (t % 5) / 4.0;
            spec[i] = mag * Complex(std::cos(arg), std::sin(arg));
        }
        const auto kind = hermitian ? linalg::TestMatrixKind::hermitian_pd
                                    : linalg::TestMatrixKind::diagonalizable;
        const linalg::TestMatrixPair tm =
            linalg::build_test_matrix(kind, spec, 5.0, p, 977 + 31 * t);
        matroot::IterationConfig cfg;
        cfg.p = p;
        cfg.m = 4;
        cfg.l = 4;
        ++total;
        try {
            const matroot::RootResult r = matroot::compute_root(tm.A, cfg);
            const double kappa = matroot::condition_number_kappa_p(tm.A, r.Y_tilde, p);
            kmin = std::min(kmin, kappa);
            kmax = std::max(kmax, kappa);
            const double relerr = matroot::reference_relative_error(r, tm.root);
            if (relerr <= 100.0 * u * kappa)
                ++passes;
            else
                fails += fmt("[t=%d err=%.1e bound=%.1e] ", t, relerr, 100.0 * u * kappa);
        } catch (const DivergenceError&) {
            ++divergences;
            if (hermitian) ++hpd_divergences;
        }
    }
    const bool ok = passes >= 18 && hpd_divergences == 0;
    return {"", ok,
            fmt("%d/%d within 100 u kappa, %d divergences (%d Hermitian PD), kappa in "
                "[%.1e, %.1e] %s",
                passes, total, divergences, hpd_divergences, kmin, kmax, fails.c_str())};
}

}  // namespace

std::vector<Check> run_selftest() {
    return {
        run_guarded("contraction-ratio-approaches-C", contraction_ratios),
        run_guarded("p2-constant-closed-form", p2_constants),
        run_guarded("iteration-count-separation", iteration_separation),
        run_guarded("equioscillation-law", equioscillation_law),
        run_guarded("low-order-closed-forms", low_order_closed_forms),
        run_guarded("pade-limit-monotone", pade_limit_monotone),
        run_guarded("hermitian-pd-error-bounds", hermitian_bounds),
        run_guarded("frechet-idempotency", frechet_stability),
        run_guarded("condition-number-identity", kappa_identity),
        run_guarded("forward-stability-proxy", forward_stability),
    };
}

}  // namespace rootiter::selftest
