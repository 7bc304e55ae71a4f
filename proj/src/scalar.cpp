#include "rootiter/scalar.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <thread>

#include "rootiter/errors.hpp"

namespace rootiter::scalar {

namespace {

StepFactor make_factor(int m, int l, int p, double alpha) {
    StepFactor sf;
    sf.alpha = alpha;
    if (alpha >= 1.0) {
        sf.rhat = polyrat::pade_coeffs(m, l, p);
        sf.has_factored = false;
    } else {
        const minimax::MinimaxResult& res = minimax::solve_minimax_cached(m, l, p, alpha);
        sf.rhat = minimax::normalize_rhat(res);
        if (res.has_factored) {
            sf.factored = minimax::normalize_rhat_factored(res);
            sf.has_factored = true;
        }
    }
    return sf;
}

int worker_count(std::size_t cells) {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* env = std::getenv("ROOTITER_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1) hw = std::min<unsigned>(hw, static_cast<unsigned>(cap));
    }
    return static_cast<int>(std::min<std::size_t>(hw, std::max<std::size_t>(cells / 64, 1)));
}

}  // namespace

Complex StepFactor::eval(Complex w) const {
    if (has_factored) return factored.eval(w);
    return polyrat::eval_rational(rhat, w);
}

ScalarIterState init_scalar_state(int m, int l, int p, double alpha, bool pade_mode) {
    if (m < 0 || l < 0 || (m == 0 && l == 0)) throw DomainError("(m,l) must be nonzero");
    if (p < 2) throw DomainError("p must be at least 2");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in (0,1]");
    ScalarIterState st;
    st.m = m;
    st.l = l;
    st.p = p;
    st.pade = pade_mode || alpha >= 1.0;
    st.alpha_k = st.pade ? 1.0 : alpha;
    st.eps_k = (1.0 - st.alpha_k) / (1.0 + st.alpha_k);
    return st;
}

void advance(ScalarIterState& st) {
    if (st.alpha_k >= 1.0) st.pade = true;  // eps below resolution, Pade limit
    StepFactor sf = make_factor(st.m, st.l, st.p, st.pade ? 1.0 : st.alpha_k);
    if (st.pade) {
        st.factors.push_back(std::move(sf));
        ++st.k;
        return;
    }
    const minimax::MinimaxResult& res =
        minimax::solve_minimax_cached(st.m, st.l, st.p, st.alpha_k);
    st.factors.push_back(std::move(sf));
    ++st.k;
    st.eps_k = res.E;
    st.alpha_k = minimax::alpha_next(st.alpha_k, res.E);
}

Complex eval_f(const ScalarIterState& st, Complex z, int j) {
    if (j < 0) j = st.k;
    if (j > st.k) throw DomainError("iterate index exceeds completed steps");
    Complex f = 1.0;
    for (int i = 0; i < j; ++i) {
        const Complex w = z / std::pow(f, st.p);
        f *= st.factors[i].eval(w);
        if (!std::isfinite(f.real()) || !std::isfinite(f.imag()) || std::abs(f) > 1e150)
            throw DivergenceError("scalar iterate overflowed");
    }
    return f;
}

Complex eval_f_tilde(const ScalarIterState& st, Complex z, int j) {
    if (j < 0) j = st.k;
    // alpha_j along the trajectory: factors[j].alpha is alpha_{j-1}
    const double aj = (j == st.k) ? st.alpha_k : st.factors[j].alpha;
    return (2.0 * aj / (1.0 + aj)) * eval_f(st, z, j);
}

std::pair<Complex, double> scalar_step(Complex z, Complex f, double alpha, int m, int l, int p) {
    if (f == Complex(0.0)) throw DomainError("scalar_step requires f != 0");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in (0,1]");
    const StepFactor sf = make_factor(m, l, p, alpha);
    const Complex w = z / std::pow(f, p);
    const Complex f_next = f * sf.eval(w);
    if (!std::isfinite(f_next.real()) || !std::isfinite(f_next.imag()) ||
        std::abs(f_next) > 1e150)
        throw DivergenceError("scalar iterate overflowed");
    double alpha_n;
    if (alpha >= 1.0) {
        alpha_n = 1.0;
    } else {
        const minimax::MinimaxResult& res = minimax::solve_minimax_cached(m, l, p, alpha);
        alpha_n = minimax::alpha_next(alpha, res.E);
    }
    return {f_next, alpha_n};
}

std::vector<double> eps_recursion(int m, int l, int p, double eps0, int K) {
    if (!(eps0 > 0.0 && eps0 < 1.0)) throw DomainError("eps0 must lie in (0,1)");
    if (m == 0 && l == 0) throw DomainError("(m,l) = (0,0) does not contract");
    std::vector<double> eps{eps0};
    eps.reserve(K + 1);
    const double C = minimax::asymptotic_C(m, l, p);
    for (int k = 0; k < K; ++k) {
        const double e = eps.back();
        const double alpha = (1.0 - e) / (1.0 + e);
        if (!(e > 0.0) || alpha >= 1.0) {
            // eps below the resolution of alpha; continue with the asymptote
            eps.push_back(C * std::pow(e, m + l + 1));
            continue;
        }
        eps.push_back(minimax::solve_minimax_cached(m, l, p, alpha).E);
    }
    return eps;
}

RatioTable ratio_table(int m, int l, int p, double eps0, int K) {
    const std::vector<double> eps = eps_recursion(m, l, p, eps0, K);
    RatioTable t;
    t.C = minimax::asymptotic_C(m, l, p);
    const int order = m + l + 1;
    for (int k = 0; k <= K; ++k) {
        RatioRow row;
        row.k = k;
        row.eps = eps[k];
        if (k > 0 && eps[k - 1] > 0.0) row.ratio = eps[k] / std::pow(eps[k - 1], order);
        row.unreliable = eps[k] < 1e-15;
        t.rows.push_back(row);
    }
    return t;
}

RegionGrid region_sample(const RegionRequest& req, int k, double delta, double alpha, int m,
                         int l, int p, IterMode mode) {
    if (!(delta > 0.0)) throw DomainError("delta must be positive");
    if (req.n_abs < 1 || req.n_arg < 1) throw DomainError("grid resolution must be positive");

    ScalarIterState st = init_scalar_state(m, l, p, alpha, mode == IterMode::pade);
    for (int i = 0; i < k; ++i) advance(st);
    // scale factors 2 alpha_j / (1 + alpha_j) per iterate
    std::vector<double> tilde_scale(k + 1);
    for (int j = 0; j <= k; ++j) {
        const double aj = (j == st.k) ? st.alpha_k : st.factors[j].alpha;
        tilde_scale[j] = 2.0 * aj / (1.0 + aj);
    }
    // Pade mode studies the iteration on z / alpha^{p/2}
    const double rescale = (mode == IterMode::pade) ? std::pow(alpha, -0.5 * p) : 1.0;

    RegionGrid grid;
    grid.req = req;
    const std::size_t cells = static_cast<std::size_t>(req.n_abs) * req.n_arg;
    grid.k_converged.assign(cells, -1);
    grid.rotation_index.assign(cells, -1);

    auto coord = [](double lo, double hi, int n, int i) {
        return (n == 1) ? lo : lo + (hi - lo) * static_cast<double>(i) / (n - 1);
    };

    auto classify_cell = [&](int ia, int ja) {
        const double la = coord(req.lo_log10, req.hi_log10, req.n_abs, ia);
        const double th = coord(req.lo_arg, req.hi_arg, req.n_arg, ja);
        const Complex z = std::pow(10.0, la) * Complex(std::cos(th), std::sin(th)) * rescale;
        const Complex root = std::pow(z, 1.0 / p);
        const double rmag = std::abs(root);
        const std::size_t idx = static_cast<std::size_t>(ia) * req.n_arg + ja;
        Complex f = 1.0;
        bool overflowed = false;
        for (int j = 0; j <= k; ++j) {
            if (std::abs(tilde_scale[j] * f - root) <= delta * rmag) {
                grid.k_converged[idx] = j;
                return;
            }
            if (j == k) break;
            const Complex w = z / std::pow(f, p);
            f *= st.factors[j].eval(w);
            if (!std::isfinite(f.real()) || !std::isfinite(f.imag()) || std::abs(f) > 1e100) {
                overflowed = true;
                break;
            }
        }
        if (!overflowed) {
            const Complex ft = tilde_scale[k] * f;
            for (int j = 1; j < p; ++j) {
                const double phi = 2.0 * M_PI * j / p;
                const Complex rot = root * Complex(std::cos(phi), std::sin(phi));
                if (std::abs(ft - rot) <= delta * rmag) {
                    grid.rotation_index[idx] = j;
                    break;
                }
            }
        }
    };

    const int nw = worker_count(cells);
    if (nw <= 1) {
        for (int ia = 0; ia < req.n_abs; ++ia)
            for (int ja = 0; ja < req.n_arg; ++ja) classify_cell(ia, ja);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(nw);
        for (int w = 0; w < nw; ++w)
            pool.emplace_back([&, w] {
                for (int ia = w; ia < req.n_abs; ia += nw)
                    for (int ja = 0; ja < req.n_arg; ++ja) classify_cell(ia, ja);
            });
        for (auto& t : pool) t.join();
    }
    return grid;
}

void write_region_csv(std::ostream& os, const RegionGrid& grid) {
    os << "log10_abs,arg,k_converged,rotation_index\n";
    const auto& req = grid.req;
    char buf[96];
    for (int ia = 0; ia < req.n_abs; ++ia)
        for (int ja = 0; ja < req.n_arg; ++ja) {
            const double la = (req.n_abs == 1)
                                  ? req.lo_log10
                                  : req.lo_log10 + (req.hi_log10 - req.lo_log10) *
                                                       static_cast<double>(ia) / (req.n_abs - 1);
            const double th = (req.n_arg == 1)
                                  ? req.lo_arg
                                  : req.lo_arg + (req.hi_arg - req.lo_arg) *
                                                     static_cast<double>(ja) / (req.n_arg - 1);
            const std::size_t idx = static_cast<std::size_t>(ia) * req.n_arg + ja;
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%d,", la, th, grid.k_converged[idx]);
            os << buf;
            if (grid.rotation_index[idx] >= 0) os << grid.rotation_index[idx];
            os << "\n";
        }
}

}  // namespace rootiter::scalar
