#include "rootiter/matroot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <random>

#include "rootiter/polyrat.hpp"

namespace rootiter::matroot {

namespace {

using polyrat::PartialFractions;
using polyrat::Polynomial;
using polyrat::RationalFunction;

struct OpCounter {
    long matmuls = 0;
    long inversions = 0;
};

ComplexMatrix counted_matmul(const ComplexMatrix& A, const ComplexMatrix& B, OpCounter& ops) {
    ++ops.matmuls;
    return linalg::matmul(A, B);
}

// M^e by binary powering, e >= 0.
ComplexMatrix mat_pow(const ComplexMatrix& M, int e, OpCounter& ops) {
    ComplexMatrix acc = ComplexMatrix::identity(M.rows);
    if (e == 0) return acc;
    ComplexMatrix base = M;
    bool acc_is_identity = true;
    while (true) {
        if (e & 1) {
            if (acc_is_identity) {
                acc = base;
                acc_is_identity = false;
            } else {
                acc = counted_matmul(acc, base, ops);
            }
        }
        e >>= 1;
        if (e == 0) break;
        base = counted_matmul(base, base, ops);
    }
    return acc;
}

ComplexMatrix poly_at_matrix(const Polynomial& q, const ComplexMatrix& M, OpCounter& ops) {
    const auto& c = q.coeffs();
    ComplexMatrix acc(M.rows, M.cols);
    if (c.empty()) return acc;
    for (int i = 0; i < M.rows; ++i) acc(i, i) = c.back();
    for (std::size_t i = c.size() - 1; i-- > 0;) {
        acc = counted_matmul(acc, M, ops);
        for (int d = 0; d < M.rows; ++d) acc(d, d) += c[i];
    }
    return acc;
}

}  // namespace

PartialFractions h_partial_fractions(int m, int l, int p, double alpha) {
    if (alpha >= 1.0) {
        const RationalFunction P = polyrat::pade_coeffs(m, l, p);
        const RationalFunction h = polyrat::make_rational(P.den, P.num, l, m);
        return polyrat::to_partial_fractions(h);
    }
    const minimax::MinimaxResult& res = minimax::solve_minimax_cached(m, l, p, alpha);
    if (!res.has_factored) {
        const RationalFunction rh = minimax::normalize_rhat(res);
        return polyrat::to_partial_fractions(polyrat::make_rational(rh.den, rh.num, l, m));
    }
    const minimax::FactoredRational rh = minimax::normalize_rhat_factored(res);
    // h = (1/scale) prod (z + pole_shift) / prod (z + zero_shift)
    PartialFractions pf;
    pf.a0 = 1.0 / rh.scale;
    const auto& zs = rh.zero_shifts;
    const auto& ps = rh.pole_shifts;
    for (std::size_t j = 0; j < zs.size(); ++j) {
        double num = 1.0 / rh.scale, den = 1.0;
        for (double s : ps) num *= s - zs[j];
        for (std::size_t i = 0; i < zs.size(); ++i)
            if (i != j) den *= zs[i] - zs[j];
        pf.terms.emplace_back(Complex(num / den, 0.0), Complex(zs[j], 0.0));
    }
    return pf;
}

namespace {

// h(M) = r_hat(M)^{-1} by direct rational evaluation; used when l != m.
ComplexMatrix h_direct(int m, int l, int p, double alpha, const ComplexMatrix& M,
                       OpCounter& ops) {
    RationalFunction rh = (alpha >= 1.0) ? polyrat::pade_coeffs(m, l, p)
                                         : minimax::normalize_rhat(
                                               minimax::solve_minimax_cached(m, l, p, alpha));
    const ComplexMatrix N = poly_at_matrix(rh.num, M, ops);
    const ComplexMatrix D = poly_at_matrix(rh.den, M, ops);
    ++ops.inversions;
    linalg::LUFactors f = linalg::lu_factor(N);
    if (f.singular) throw SingularMatrixError("r_hat(Z Y) is singular");
    return linalg::lu_solve(f, D);
}

double current_E(int m, int l, int p, double alpha) {
    return minimax::solve_minimax_cached(m, l, p, alpha).E;
}

void validate(const IterationConfig& cfg) {
    if (cfg.p < 2) throw DomainError("p must be at least 2");
    if (cfg.m < 0 || cfg.l < 0 || (cfg.m == 0 && cfg.l == 0))
        throw DomainError("(m,l) must be nonzero");
    if (!(cfg.Delta > 0.0)) throw DomainError("Delta must be positive");
    if (!(cfg.alpha_pade_switch > 0.0 && cfg.alpha_pade_switch <= 1.0))
        throw DomainError("alpha_pade_switch must lie in (0,1]");
}

RootResult finish(ComplexMatrix Y, ComplexMatrix Z, double alpha, double tau, int iters,
                  Termination term, const ComplexMatrix& A, std::vector<TraceRow> trace,
                  OpCounter& ops, int p) {
    const double sy = std::pow(tau, 1.0 / p) * std::pow((1.0 + alpha) / (2.0 * alpha), p - 1);
    const double sz = std::pow(tau, -1.0 / p) * (1.0 + alpha) / (2.0 * alpha);
    RootResult res;
    res.Y_tilde = Complex(sy, 0.0) * Y;
    res.Z_tilde = Complex(sz, 0.0) * Z;
    res.iters = iters;
    res.termination = term;
    res.trace = std::move(trace);
    res.residual_inverse_pair =
        linalg::norm(counted_matmul(res.Z_tilde, res.Y_tilde, ops) -
                         ComplexMatrix::identity(A.rows),
                     linalg::NormKind::inf);
    res.residual_defining =
        linalg::norm(mat_pow(res.Y_tilde, p, ops) - A, linalg::NormKind::inf) /
        linalg::norm(A, linalg::NormKind::inf);
    res.matmul_count = ops.matmuls;
    res.inversion_count = ops.inversions;
    return res;
}

std::pair<double, double> scaling_parameters(const ComplexMatrix& A,
                                             const IterationConfig& cfg) {
    double lo, hi;
    if (cfg.tau_override && cfg.alpha0_override) {
        // overrides supply (tau, alpha0) directly
        return {*cfg.tau_override, *cfg.alpha0_override};
    }
    std::tie(lo, hi) = linalg::eig_extremes_estimate(A);
    if (cfg.mode == Mode::pade) {
        const double tau = cfg.tau_override.value_or(std::sqrt(lo * hi));
        return {tau, 1.0};
    }
    const double tau = cfg.tau_override.value_or(hi);
    const double alpha =
        cfg.alpha0_override.value_or(std::pow(lo / hi, 1.0 / cfg.p));
    return {tau, std::min(alpha, 1.0)};
}

}  // namespace

double termination_threshold(const IterationConfig& cfg) {
    const double C = minimax::asymptotic_C(cfg.m, cfg.l, cfg.p);
    return cfg.p *
           std::pow(cfg.Delta / ((cfg.p - 1) * C), 1.0 / (cfg.m + cfg.l + 1));
}

bool termination_check(const ComplexMatrix& ZY_product, const IterationConfig& cfg) {
    const ComplexMatrix I = ComplexMatrix::identity(ZY_product.rows);
    return linalg::norm(ZY_product - I, linalg::NormKind::inf) <= termination_threshold(cfg);
}

RootResult compute_root(const ComplexMatrix& A, const IterationConfig& cfg) {
    validate(cfg);
    if (A.rows != A.cols) throw DimensionError("compute_root requires a square matrix");
    const int n = A.rows;
    const int p = cfg.p;
    OpCounter ops;

    auto [tau, alpha] = scaling_parameters(A, cfg);
    bool pade_now = cfg.mode == Mode::pade || alpha >= 1.0;
    if (pade_now) alpha = 1.0;

    ComplexMatrix Y = Complex(1.0 / tau, 0.0) * A;
    ComplexMatrix Z = ComplexMatrix::identity(n);
    const ComplexMatrix I = ComplexMatrix::identity(n);
    std::vector<TraceRow> trace;
    const double threshold = termination_threshold(cfg);

    int k = 0;
    Termination term = Termination::max_iters;
    // The rule certifies that the step FOLLOWING a small residual lands below
    // Delta, so convergence is declared one step after the threshold is met.
    double residual_prev = std::numeric_limits<double>::infinity();
    while (true) {
        const long mm0 = ops.matmuls, inv0 = ops.inversions;
        const ComplexMatrix M = (k == 0) ? Y : counted_matmul(Z, Y, ops);
        const double pair_scale = std::pow((1.0 + alpha) / (2.0 * alpha), p);
        const double residual =
            linalg::norm(Complex(pair_scale, 0.0) * M - I, linalg::NormKind::inf);

        TraceRow row;
        row.k = k;
        row.alpha = alpha;
        row.residual_inf = residual;
        row.mode = pade_now ? "pade" : "minimax";

        if (residual_prev <= threshold || residual == 0.0) {
            trace.push_back(std::move(row));
            term = Termination::converged;
            break;
        }
        if (k >= cfg.max_iters) {
            trace.push_back(std::move(row));
            term = Termination::max_iters;
            break;
        }
        residual_prev = residual;

        if (!pade_now && alpha > cfg.alpha_pade_switch) {
            pade_now = true;
            alpha = 1.0;
            row.mode = "pade";
        }

        ComplexMatrix Q(n, n);
        if (cfg.m == cfg.l) {
            const PartialFractions pf =
                h_partial_fractions(cfg.m, cfg.l, p, pade_now ? 1.0 : alpha);
            ComplexMatrix W(n, n);
            for (const auto& [aj, bj] : pf.terms) {
                ComplexMatrix S = M;
                for (int d = 0; d < n; ++d) S(d, d) += bj;
                ++ops.inversions;
                linalg::LUFactors f = linalg::lu_factor(S);
                if (f.singular)
                    throw SingularMatrixError("Z Y + b_j I is singular in the inner solve");
                W = W + aj * linalg::lu_solve(f, I);
            }
            Q = W;
            for (int d = 0; d < n; ++d) Q(d, d) += pf.a0;
        } else {
            Q = h_direct(cfg.m, cfg.l, p, pade_now ? 1.0 : alpha, M, ops);
        }

        Y = counted_matmul(Y, mat_pow(Q, p - 1, ops), ops);
        Z = counted_matmul(Q, Z, ops);
        if (!pade_now) {
            const double E = current_E(cfg.m, cfg.l, p, alpha);
            alpha = minimax::alpha_next(alpha, E);
        }
        if (linalg::norm(Y, linalg::NormKind::inf) > 1e100)
            throw DivergenceError("coupled iteration diverged");

        row.matmuls = static_cast<int>(ops.matmuls - mm0);
        row.inversions = static_cast<int>(ops.inversions - inv0);
        trace.push_back(std::move(row));
        ++k;
    }
    return finish(std::move(Y), std::move(Z), alpha, tau, k, term, A, std::move(trace), ops, p);
}

RootResult newton_scaled_root(const ComplexMatrix& A, int p, double tol, int max_iters) {
    if (A.rows != A.cols) throw DimensionError("square matrix required");
    if (p < 2) throw DomainError("p must be at least 2");
    OpCounter ops;
    auto [lo, hi] = linalg::eig_extremes_estimate(A);
    const double tau = hi;
    double alpha = std::min(std::pow(lo / hi, 1.0 / p), 1.0);
    const ComplexMatrix B = Complex(1.0 / tau, 0.0) * A;
    ComplexMatrix X = ComplexMatrix::identity(A.rows);
    std::vector<TraceRow> trace;
    Termination term = Termination::max_iters;
    int k = 0;
    for (; k < max_iters; ++k) {
        const double mu =
            (alpha < 1.0 - 1e-9)
                ? std::pow((alpha - std::pow(alpha, p)) / ((p - 1) * (1.0 - alpha)), 1.0 / p)
                : 1.0;
        const ComplexMatrix muX = Complex(mu, 0.0) * X;
        ++ops.inversions;
        linalg::LUFactors f = linalg::lu_factor(mat_pow(muX, p - 1, ops));
        if (f.singular) throw SingularMatrixError("Newton iterate is singular");
        const ComplexMatrix Xn =
            Complex(1.0 / p, 0.0) *
            (Complex(static_cast<double>(p - 1), 0.0) * muX + linalg::lu_solve(f, B));
        const double step = linalg::norm(Xn - X, linalg::NormKind::inf);
        const double size = linalg::norm(Xn, linalg::NormKind::inf);
        alpha = std::min(
            p * alpha / ((p - 1) * mu + std::pow(mu, 1 - p) * std::pow(alpha, p)), 1.0);
        X = Xn;
        trace.push_back({k, alpha, step / size, "newton", 0, 0});
        if (linalg::norm(X, linalg::NormKind::inf) > 1e100)
            throw DivergenceError("Newton iteration diverged");
        if (step <= tol * size) {
            term = Termination::converged;
            ++k;
            break;
        }
    }
    RootResult res;
    res.Y_tilde =
        Complex(std::pow(tau, 1.0 / p) * 2.0 * alpha / (1.0 + alpha), 0.0) * X;
    res.Z_tilde = linalg::inverse(res.Y_tilde);
    ++ops.inversions;
    res.iters = k;
    res.termination = term;
    res.trace = std::move(trace);
    res.residual_inverse_pair = linalg::norm(
        counted_matmul(res.Z_tilde, res.Y_tilde, ops) - ComplexMatrix::identity(A.rows),
        linalg::NormKind::inf);
    res.residual_defining =
        linalg::norm(mat_pow(res.Y_tilde, p, ops) - A, linalg::NormKind::inf) /
        linalg::norm(A, linalg::NormKind::inf);
    res.matmul_count = ops.matmuls;
    res.inversion_count = ops.inversions;
    return res;
}

RootResult inverse_newton_scaled_root(const ComplexMatrix& A, int p, double tol,
                                      int max_iters) {
    if (A.rows != A.cols) throw DimensionError("square matrix required");
    if (p < 2) throw DomainError("p must be at least 2");
    OpCounter ops;
    auto [lo, hi] = linalg::eig_extremes_estimate(A);
    const double tau = hi;
    double alpha = std::min(std::pow(lo / hi, 1.0 / p), 1.0);
    const ComplexMatrix B = Complex(1.0 / tau, 0.0) * A;
    ComplexMatrix Z = ComplexMatrix::identity(A.rows);
    std::vector<TraceRow> trace;
    Termination term = Termination::max_iters;
    int k = 0;
    for (; k < max_iters; ++k) {
        const double nu =
            (alpha < 1.0 - 1e-9)
                ? std::pow((p + 1) * (1.0 - alpha) / (1.0 - std::pow(alpha, p + 1)), 1.0 / p)
                : 1.0;
        const ComplexMatrix nuZ = Complex(nu, 0.0) * Z;
        const ComplexMatrix Zn =
            Complex(1.0 / p, 0.0) *
            (Complex(static_cast<double>(p + 1), 0.0) * nuZ -
             counted_matmul(mat_pow(nuZ, p + 1, ops), B, ops));
        const double step = linalg::norm(Zn - Z, linalg::NormKind::inf);
        const double size = linalg::norm(Zn, linalg::NormKind::inf);
        alpha = std::min(
            alpha * ((p + 1) * nu - std::pow(nu, p + 1) * std::pow(alpha, p)) / p, 1.0);
        Z = Zn;
        trace.push_back({k, alpha, step / size, "inverse-newton", 0, 0});
        if (linalg::norm(Z, linalg::NormKind::inf) > 1e100)
            throw DivergenceError("inverse Newton iteration diverged");
        if (step <= tol * size) {
            term = Termination::converged;
            ++k;
            break;
        }
    }
    RootResult res;
    res.Z_tilde =
        Complex(std::pow(tau, -1.0 / p) * (1.0 + alpha) / (2.0 * alpha), 0.0) * Z;
    res.Y_tilde = linalg::inverse(res.Z_tilde);
    ++ops.inversions;
    res.iters = k;
    res.termination = term;
    res.trace = std::move(trace);
    res.residual_inverse_pair = linalg::norm(
        counted_matmul(res.Z_tilde, res.Y_tilde, ops) - ComplexMatrix::identity(A.rows),
        linalg::NormKind::inf);
    res.residual_defining =
        linalg::norm(mat_pow(res.Y_tilde, p, ops) - A, linalg::NormKind::inf) /
        linalg::norm(A, linalg::NormKind::inf);
    res.matmul_count = ops.matmuls;
    res.inversion_count = ops.inversions;
    return res;
}

double condition_number_kappa_p(const ComplexMatrix& A, const ComplexMatrix& X, int p) {
    if (A.rows != A.cols || X.rows != X.cols || A.rows != X.rows)
        throw DimensionError("condition number requires matching square matrices");
    if (p < 1) throw DomainError("p must be positive");
    const long n2 = static_cast<long>(A.rows) * A.rows;
    if (n2 > 4096) throw CapacityError("Kronecker sum exceeds the 4096 dimension cap");
    OpCounter ops;
    std::vector<ComplexMatrix> powers{ComplexMatrix::identity(X.rows)};
    for (int j = 1; j < p; ++j) powers.push_back(counted_matmul(powers.back(), X, ops));
    ComplexMatrix K(static_cast<int>(n2), static_cast<int>(n2));
    for (int j = 1; j <= p; ++j)
        K = K + linalg::kron(powers[p - j].transpose(), powers[j - 1]);
    linalg::LUFactors f = linalg::lu_factor(K);
    if (f.singular) throw SingularMatrixError("Kronecker sum is singular");
    const ComplexMatrix Kinv = linalg::lu_solve(f, ComplexMatrix::identity(K.rows));
    return linalg::norm(A, linalg::NormKind::fro) / linalg::norm(X, linalg::NormKind::fro) *
           linalg::norm(Kinv, linalg::NormKind::two_est);
}

FrechetDefect frechet_idempotency_defect(const ComplexMatrix& B, int m, int l, int p,
                                         double h_fd) {
    if (B.rows != B.cols) throw DimensionError("square matrix required");
    if (p < 2) throw DomainError("p must be at least 2");
    const int n = B.rows;
    OpCounter ops;
    const ComplexMatrix Binv = linalg::inverse(B);
    const RationalFunction P = polyrat::pade_coeffs(m, l, p);
    const double h = (h_fd > 0.0) ? h_fd : 1e-6 * linalg::norm(B, linalg::NormKind::inf);

    auto Qof = [&](const ComplexMatrix& M) {
        const ComplexMatrix N = poly_at_matrix(P.num, M, ops);
        const ComplexMatrix D = poly_at_matrix(P.den, M, ops);
        linalg::LUFactors f = linalg::lu_factor(N);
        if (f.singular) throw SingularMatrixError("Pade numerator singular at Z Y");
        return linalg::lu_solve(f, D);
    };
    auto g = [&](const ComplexMatrix& Y, const ComplexMatrix& Z) {
        const ComplexMatrix Q = Qof(counted_matmul(Z, Y, ops));
        return std::make_pair(counted_matmul(Y, mat_pow(Q, p - 1, ops), ops),
                              counted_matmul(Q, Z, ops));
    };
    auto L_fd = [&](const ComplexMatrix& E, const ComplexMatrix& F) {
        const Complex ch(h, 0.0);
        auto [Yp, Zp] = g(B + ch * E, Binv + ch * F);
        auto [Ym, Zm] = g(B - ch * E, Binv - ch * F);
        const Complex inv2h(1.0 / (2.0 * h), 0.0);
        return std::make_pair(inv2h * (Yp - Ym), inv2h * (Zp - Zm));
    };
    auto L_closed = [&](const ComplexMatrix& E, const ComplexMatrix& F) {
        const Complex ip(1.0 / p, 0.0), pm1(static_cast<double>(p - 1), 0.0);
        const ComplexMatrix first = ip * (E - pm1 * counted_matmul(counted_matmul(B, F, ops), B, ops));
        const ComplexMatrix second =
            ip * (pm1 * F - counted_matmul(counted_matmul(Binv, E, ops), Binv, ops));
        return std::make_pair(first, second);
    };
    auto pair_norm = [](const std::pair<ComplexMatrix, ComplexMatrix>& pr) {
        return std::max(linalg::norm(pr.first, linalg::NormKind::inf),
                        linalg::norm(pr.second, linalg::NormKind::inf));
    };

    std::mt19937_64 rng(0xB5297A4D3F84D5B5ull);
    std::normal_distribution<double> gauss(0.0, 1.0);
    FrechetDefect out;
    for (int dir = 0; dir < 5; ++dir) {
        ComplexMatrix E(n, n), F(n, n);
        for (auto& x : E.data) x = Complex(gauss(rng), gauss(rng));
        for (auto& x : F.data) x = Complex(gauss(rng), gauss(rng));
        const double dn = pair_norm({E, F});
        auto L1 = L_fd(E, F);
        auto L2 = L_fd(L1.first, L1.second);
        auto La = L_closed(E, F);
        out.idempotency = std::max(
            out.idempotency, pair_norm({L2.first - L1.first, L2.second - L1.second}) / dn);
        out.agreement = std::max(
            out.agreement, pair_norm({L1.first - La.first, L1.second - La.second}) / dn);
    }
    return out;
}

double reference_relative_error(const RootResult& result,
                                const ComplexMatrix& A_root_reference) {
    if (result.Y_tilde.rows != A_root_reference.rows ||
        result.Y_tilde.cols != A_root_reference.cols)
        throw DimensionError("reference dimensions do not match");
    return linalg::norm(result.Y_tilde - A_root_reference, linalg::NormKind::inf) /
           linalg::norm(A_root_reference, linalg::NormKind::inf);
}

void write_trace_csv(std::ostream& os, const RootResult& result) {
    os << "k,alpha,residual_inf,mode\n";
    char buf[96];
    for (const auto& row : result.trace) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,", row.k, row.alpha, row.residual_inf);
        os << buf << row.mode << "\n";
    }
}

}  // namespace rootiter::matroot
