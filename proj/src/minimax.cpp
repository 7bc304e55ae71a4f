#include "rootiter/minimax.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <tuple>

#include <boost/multiprecision/cpp_int.hpp>

namespace rootiter::minimax {

namespace {

using Rational = boost::multiprecision::cpp_rational;

// ---------------------------------------------------------------------------
// small dense solver (Gaussian elimination, partial pivoting)
// ---------------------------------------------------------------------------

bool solve_dense(std::vector<std::vector<double>>& A, std::vector<double>& b) {
    const int n = static_cast<int>(b.size());
    for (int k = 0; k < n; ++k) {
        int piv = k;
        for (int i = k + 1; i < n; ++i)
            if (std::abs(A[i][k]) > std::abs(A[piv][k])) piv = i;
        if (std::abs(A[piv][k]) < 1e-300) return false;
        std::swap(A[k], A[piv]);
        std::swap(b[k], b[piv]);
        for (int i = k + 1; i < n; ++i) {
            const double f = A[i][k] / A[k][k];
            if (f == 0.0) continue;
            for (int j = k; j < n; ++j) A[i][j] -= f * A[k][j];
            b[i] -= f * b[k];
        }
    }
    for (int k = n - 1; k >= 0; --k) {
        double s = b[k];
        for (int j = k + 1; j < n; ++j) s -= A[k][j] * b[j];
        b[k] = s / A[k][k];
    }
    return true;
}

double kahan_sum(const std::vector<double>& terms) {
    double s = 0.0, c = 0.0;
    for (double t : terms) {
        const double y = t - c;
        const double u = s + y;
        c = (u - s) - y;
        s = u;
    }
    return s;
}

// ---------------------------------------------------------------------------
// levelled-error state in root coordinates
// ---------------------------------------------------------------------------

// A zero or pole of r, kept off the approximation interval [a, 1]:
// side 0 places it at t = a - exp(s) (left of a, covers the negative axis),
// side 1 at t = 1 + exp(s) (right of 1). The factor |z - t| is then positive
// on [a, 1] with derivative exp(s)/factor w.r.t. s on either side.
struct Root {
    double s = 0.0;
    int side = 0;
};

// r(z) = +-exp(logc) * prod |z - t_zero| / prod |z - t_pole| with the sign
// fixed so r > 0 on [a, 1]. The relative error against z^{1/p} is
// expm1(L(z)) with L = logc + sum log|z - t_z| - sum log|z - t_p| - log(z)/p.
struct LevelState {
    std::vector<Root> zr;  // zeros
    std::vector<Root> pr;  // poles
    double logc = 0.0;
    double E = 0.0;
    int p = 2;
    double a = 0.0;

    double factor(const Root& r, double z) const {
        return r.side == 0 ? (z - a) + std::exp(r.s) : (1.0 + std::exp(r.s)) - z;
    }

    double L(double z) const {
        std::vector<double> terms;
        terms.reserve(zr.size() + pr.size() + 2);
        terms.push_back(logc);
        for (const auto& r : zr) terms.push_back(std::log(factor(r, z)));
        for (const auto& r : pr) terms.push_back(-std::log(factor(r, z)));
        terms.push_back(-std::log(z) / static_cast<double>(p));
        return kahan_sum(terms);
    }

    double err(double z) const { return std::expm1(L(z)); }

    double dL(double z) const {
        std::vector<double> terms;
        terms.reserve(zr.size() + pr.size() + 1);
        for (const auto& r : zr) terms.push_back((r.side == 0 ? 1.0 : -1.0) / factor(r, z));
        for (const auto& r : pr) terms.push_back((r.side == 0 ? -1.0 : 1.0) / factor(r, z));
        terms.push_back(-1.0 / (static_cast<double>(p) * z));
        return kahan_sum(terms);
    }
};

// Levelled system in log form, L(x_i) = log(1 + (-1)^i E), solved by damped
// Newton in (s_zeros, s_poles, logc, E). The log form stays well conditioned
// as E approaches 1 (where e = -E makes r nearly vanish) and bars E >= 1.
// Returns false when the residual cannot be reduced to the noise floor.
bool newton_level(LevelState& st, const std::vector<double>& nodes) {
    const int nu = static_cast<int>(st.zr.size());
    const int nv = static_cast<int>(st.pr.size());
    const int n = nu + nv + 2;
    if (static_cast<int>(nodes.size()) != n) return false;

    auto residual = [&](const LevelState& s, std::vector<double>& F) {
        double norm = 0.0;
        F.resize(n);
        for (int i = 0; i < n; ++i) {
            const double sgn = (i % 2 == 0) ? 1.0 : -1.0;
            F[i] = s.L(nodes[i]) - std::log1p(sgn * s.E);
            norm = std::max(norm, std::abs(F[i]));
        }
        return norm;
    };

    if (!(st.E > -0.999 && st.E < 0.999999999999)) st.E = 0.5;

    std::vector<double> F;
    double fnorm = residual(st, F);
    const double floor_abs = 2e-15;

    for (int iter = 0; iter < 120; ++iter) {
        if (fnorm <= std::max(1e-13 * std::abs(st.E), floor_abs)) return true;

        std::vector<std::vector<double>> J(n, std::vector<double>(n, 0.0));
        for (int i = 0; i < n; ++i) {
            const double z = nodes[i];
            const double sgn = (i % 2 == 0) ? 1.0 : -1.0;
            for (int j = 0; j < nu; ++j)
                J[i][j] = std::exp(st.zr[j].s) / st.factor(st.zr[j], z);
            for (int j = 0; j < nv; ++j)
                J[i][nu + j] = -std::exp(st.pr[j].s) / st.factor(st.pr[j], z);
            J[i][nu + nv] = 1.0;
            J[i][nu + nv + 1] = -sgn / (1.0 + sgn * st.E);
        }
        std::vector<double> step(n);
        for (int i = 0; i < n; ++i) step[i] = -F[i];
        if (!solve_dense(J, step)) return false;

        // clip log-coordinate moves
        for (int j = 0; j < nu + nv + 1; ++j) step[j] = std::clamp(step[j], -3.0, 3.0);

        double t = 1.0;
        bool accepted = false;
        for (int bt = 0; bt < 40; ++bt) {
            LevelState trial = st;
            for (int j = 0; j < nu; ++j) trial.zr[j].s = st.zr[j].s + t * step[j];
            for (int j = 0; j < nv; ++j) trial.pr[j].s = st.pr[j].s + t * step[nu + j];
            trial.logc = st.logc + t * step[nu + nv];
            trial.E = st.E + t * step[nu + nv + 1];
            if (!(trial.E > -0.999 && trial.E < 0.999999999999)) {
                t *= 0.5;
                continue;
            }
            std::vector<double> Ft;
            const double ftrial = residual(trial, Ft);
            if (ftrial < fnorm || ftrial <= floor_abs) {
                st = trial;
                F = Ft;
                fnorm = ftrial;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) return fnorm <= std::max(1e-10 * std::abs(st.E), 8e-15);
    }
    return fnorm <= std::max(1e-10 * std::abs(st.E), 8e-15);
}

// Chebyshev-in-log reference nodes on [a, 1], ascending, endpoints included.
std::vector<double> initial_nodes(double a, int n) {
    std::vector<double> x(n);
    const double la = std::log(a);
    for (int i = 0; i < n; ++i) {
        const double c = std::cos(M_PI * static_cast<double>(i) / (n - 1));
        x[i] = std::exp(la * 0.5 * (1.0 + c));
    }
    x.front() = a;
    x.back() = 1.0;
    return x;
}

struct ExtremaScan {
    std::vector<double> points;  // candidate extrema, ascending, incl. endpoints
    double E_up = 0.0;           // max |e| seen anywhere on the scan
};

ExtremaScan find_extrema(const LevelState& st, double a, int n_expected) {
    ExtremaScan out;
    const double la = std::log(a);
    const int K = std::max(64 * n_expected, 512);

    std::vector<double> zs(K);
    for (int i = 0; i < K; ++i) zs[i] = std::exp(la * (1.0 - static_cast<double>(i) / (K - 1)));
    zs.front() = a;
    zs.back() = 1.0;

    out.points.push_back(a);
    double dprev = st.dL(zs[0]);
    for (int i = 1; i < K; ++i) {
        const double d = st.dL(zs[i]);
        if (dprev == 0.0) dprev = d;
        if (d != 0.0 && ((dprev > 0) != (d > 0))) {
            double lo = zs[i - 1], hi = zs[i];
            double flo = dprev;
            for (int b = 0; b < 80 && hi - lo > 1e-17 * hi; ++b) {
                const double mid = 0.5 * (lo + hi);
                const double fm = st.dL(mid);
                if (fm == 0.0) { lo = hi = mid; break; }
                if ((fm > 0) == (flo > 0)) { lo = mid; flo = fm; } else { hi = mid; }
            }
            out.points.push_back(0.5 * (lo + hi));
        }
        dprev = d;
    }
    out.points.push_back(1.0);

    for (double z : zs) out.E_up = std::max(out.E_up, std::abs(st.err(z)));
    for (double z : out.points) out.E_up = std::max(out.E_up, std::abs(st.err(z)));
    return out;
}

std::vector<double> alternating_reference(const LevelState& st, const std::vector<double>& cand);

// Initial reference aligned with the oscillation structure of the starting
// state: its alternating extrema, padded by splitting the widest log-gaps
// (or trimmed at the weaker end) to exactly n points.
std::vector<double> nodes_from_state(const LevelState& st, double a, int n) {
    ExtremaScan scan = find_extrema(st, a, n);
    std::vector<double> ref = alternating_reference(st, scan.points);
    if (ref.empty()) return initial_nodes(a, n);
    if (ref.front() > a * (1.0 + 1e-12)) ref.insert(ref.begin(), a);
    if (ref.back() < 1.0 - 1e-12) ref.push_back(1.0);
    while (static_cast<int>(ref.size()) > n) {
        if (std::abs(st.err(ref.front())) < std::abs(st.err(ref.back())))
            ref.erase(ref.begin());
        else
            ref.pop_back();
    }
    while (static_cast<int>(ref.size()) < n) {
        std::size_t widest = 0;
        double w = -1.0;
        for (std::size_t i = 0; i + 1 < ref.size(); ++i) {
            const double g = std::log(ref[i + 1] / ref[i]);
            if (g > w) { w = g; widest = i; }
        }
        ref.insert(ref.begin() + widest + 1, std::sqrt(ref[widest] * ref[widest + 1]));
    }
    return ref;
}

// Maximal alternating subsequence of (point, err) pairs keeping the largest
// |err| within each same-sign run.
std::vector<double> alternating_reference(const LevelState& st, const std::vector<double>& cand) {
    std::vector<double> pts;
    std::vector<double> vals;
    for (double z : cand) {
        const double e = st.err(z);
        if (e == 0.0) continue;
        if (!pts.empty() && ((vals.back() > 0) == (e > 0))) {
            if (std::abs(e) > std::abs(vals.back())) { pts.back() = z; vals.back() = e; }
        } else {
            pts.push_back(z);
            vals.push_back(e);
        }
    }
    return pts;
}

// ---------------------------------------------------------------------------
// side layout from the wide-alpha (Pade) limit
// ---------------------------------------------------------------------------

// Numbers of zeros/poles right of z = 1, with their limiting positions.
// Roots of the minimax approximant deform continuously from the Pade roots
// as the interval widens and cannot cross [a, 1], so the side split is read
// off the Pade approximant once per type.
struct SideLayout {
    int zeros_right = 0;
    int poles_right = 0;
    std::vector<double> zero_right_pos;  // t > 1
    std::vector<double> pole_right_pos;
    std::vector<double> zero_left_pos;   // t < a (negative axis in the limit)
    std::vector<double> pole_left_pos;
};

SideLayout pade_side_layout(int m, int l, int p) {
    SideLayout lay;
    const RationalFunction pd = polyrat::pade_coeffs(m, l, p);
    auto classify = [&](const Polynomial& poly, std::vector<double>& right_pos,
                        std::vector<double>& left_pos, int& nright) {
        if (poly.degree() < 1) return;
        for (const auto& root : polyrat::poly_roots(poly)) {
            if (std::abs(root.imag()) > 1e-7 * std::max(1.0, std::abs(root)))
                throw CapacityError("type (m,l) has non-real limiting zeros/poles; not supported");
            if (root.real() > 1.0) {
                right_pos.push_back(root.real());
                ++nright;
            } else {
                left_pos.push_back(root.real());
            }
        }
    };
    classify(pd.num, lay.zero_right_pos, lay.zero_left_pos, lay.zeros_right);
    classify(pd.den, lay.pole_right_pos, lay.pole_left_pos, lay.poles_right);
    return lay;
}

// Initial state with every root at its Pade-limit position; the right seed
// for narrow intervals, where the minimax roots barely move off the limit.
LevelState pade_limit_init(int p, double a, const SideLayout& lay, double E_init) {
    LevelState st;
    st.p = p;
    st.a = a;
    for (double t : lay.zero_left_pos) st.zr.push_back(Root{std::log(a - t), 0});
    for (double t : lay.pole_left_pos) st.pr.push_back(Root{std::log(a - t), 0});
    for (double t : lay.zero_right_pos) st.zr.push_back(Root{std::log(t - 1.0), 1});
    for (double t : lay.pole_right_pos) st.pr.push_back(Root{std::log(t - 1.0), 1});
    st.logc = 0.0;
    st.logc = -st.L(1.0);
    st.E = E_init;
    return st;
}

// Structured initial state: left-side roots log-spaced over [a, 1] in shift
// magnitude, zeros and poles interlaced starting with a zero; right-side
// roots at their Pade-limit positions.
LevelState structured_init(int m, int l, int p, double a, const SideLayout& lay, double E_init) {
    LevelState st;
    st.p = p;
    st.a = a;
    const double la = std::log(a);

    const int zl = m - lay.zeros_right;
    const int pl = l - lay.poles_right;
    if (zl < 0 || pl < 0) throw CapacityError("inconsistent root layout");
    const int nL = zl + pl;

    int placed_z = 0, placed_p = 0;
    for (int i = 0; i < nL; ++i) {
        const double shift = std::exp(la * (1.0 - (i + 0.5) / nL));
        Root r;
        r.side = 0;
        // t = a - shift  =>  s = log(shift)  (shift measured from a)
        r.s = std::log(shift);
        const bool want_zero =
            (placed_z < zl) && (placed_p >= pl || (i % 2 == 0));
        if (want_zero) {
            st.zr.push_back(r);
            ++placed_z;
        } else {
            st.pr.push_back(r);
            ++placed_p;
        }
    }
    while (placed_z < zl) { st.zr.push_back(st.zr.empty() ? Root{la / 2, 0} : st.zr.back()); ++placed_z; }

    for (double t : lay.zero_right_pos) st.zr.push_back(Root{std::log(t - 1.0), 1});
    for (double t : lay.pole_right_pos) st.pr.push_back(Root{std::log(t - 1.0), 1});

    // level L(1) = 0 as the starting normalization
    st.logc = 0.0;
    st.logc = -st.L(1.0);
    st.E = E_init;
    return st;
}

// Resamples sorted positions to new_count by quantile interpolation with
// linear extrapolation at the ends.
std::vector<double> resample_positions(std::vector<double> pos, int new_count) {
    std::sort(pos.begin(), pos.end());
    const int k = static_cast<int>(pos.size());
    std::vector<double> out(new_count);
    for (int j = 0; j < new_count; ++j) {
        const double q = (j + 0.5) / new_count * k - 0.5;  // fractional index
        if (k == 1) {
            out[j] = pos[0];
        } else if (q <= 0.0) {
            out[j] = pos[0] + q * (pos[1] - pos[0]);
        } else if (q >= k - 1) {
            out[j] = pos[k - 1] + (q - (k - 1)) * (pos[k - 1] - pos[k - 2]);
        } else {
            const int i0 = static_cast<int>(std::floor(q));
            const double f = q - i0;
            out[j] = pos[i0] * (1.0 - f) + pos[i0 + 1] * f;
        }
    }
    return out;
}

// Rescales a converged state onto a wider or narrower interval [a_new, 1]:
// left-side log shifts stretch proportionally to log(a_new)/log(a_old).
LevelState rescale_width(const LevelState& st, double a_new) {
    LevelState out = st;
    const double ratio = std::log(a_new) / std::log(st.a);
    out.a = a_new;
    for (auto& r : out.zr)
        if (r.side == 0) r.s *= ratio;
    for (auto& r : out.pr)
        if (r.side == 0) r.s *= ratio;
    out.logc = 0.0;
    out.logc = -out.L(1.0);
    return out;
}

// Warm start for the next ladder stage: the merged zero/pole positions of
// the converged previous stage are densified by quantile resampling, then
// reassigned with the poles spread evenly through the sorted sequence.
LevelState warm_stage_init(const LevelState& prev, int mc, int lc, int p, double a,
                           const SideLayout& lay, double E_init) {
    const int zl = mc - lay.zeros_right;
    const int pl = lc - lay.poles_right;
    if (zl < 0 || pl < 0) throw CapacityError("inconsistent root layout");
    const int nL = zl + pl;

    std::vector<double> merged;
    for (const auto& r : prev.zr)
        if (r.side == 0) merged.push_back(r.s);
    for (const auto& r : prev.pr)
        if (r.side == 0) merged.push_back(r.s);
    if (merged.empty()) return structured_init(mc, lc, p, a, lay, E_init);
    const std::vector<double> spots = resample_positions(std::move(merged), nL);

    std::vector<bool> is_pole(nL, false);
    for (int j = 0; j < pl; ++j) {
        int idx = static_cast<int>(std::floor((j + 0.5) * nL / std::max(pl, 1)));
        idx = std::clamp(idx, 0, nL - 1);
        while (is_pole[idx]) idx = (idx + 1) % nL;
        is_pole[idx] = true;
    }

    LevelState st;
    st.p = p;
    st.a = a;
    for (int i = 0; i < nL; ++i) {
        if (is_pole[i]) st.pr.push_back(Root{spots[i], 0});
        else st.zr.push_back(Root{spots[i], 0});
    }
    for (double t : lay.zero_right_pos) st.zr.push_back(Root{std::log(t - 1.0), 1});
    for (double t : lay.pole_right_pos) st.pr.push_back(Root{std::log(t - 1.0), 1});
    st.logc = 0.0;
    st.logc = -st.L(1.0);
    st.E = E_init;
    return st;
}

// ---------------------------------------------------------------------------
// Remez exchange at a fixed type
// ---------------------------------------------------------------------------

struct ExchangeOutcome {
    bool ok = false;
    double gap = std::numeric_limits<double>::infinity();
    double cert_lo = 0.0;
    double E_up = 0.0;
    int iters = 0;
};

ExchangeOutcome remez_exchange(LevelState& st, std::vector<double>& nodes, double a,
                               int max_iters, double rel_tol) {
    const int N = static_cast<int>(st.zr.size() + st.pr.size()) + 2;
    ExchangeOutcome out;

    for (int it = 0; it < max_iters; ++it) {
        out.iters = it + 1;
        if (!newton_level(st, nodes)) return out;

        ExtremaScan scan = find_extrema(st, a, N);
        std::vector<double> ref = alternating_reference(st, scan.points);
        out.E_up = scan.E_up;

        if (static_cast<int>(ref.size()) < N) {
            // alternation lost; re-seed from the current oscillation structure
            nodes = nodes_from_state(st, a, N);
            continue;
        }
        while (static_cast<int>(ref.size()) > N) {
            // drop the endpoint with the smaller |e|
            if (std::abs(st.err(ref.front())) < std::abs(st.err(ref.back())))
                ref.erase(ref.begin());
            else
                ref.pop_back();
        }
        double E_lo = std::numeric_limits<double>::infinity();
        for (double z : ref) E_lo = std::min(E_lo, std::abs(st.err(z)));
        nodes = ref;

        out.cert_lo = std::max(out.cert_lo, E_lo);
        out.gap = (scan.E_up - E_lo) / std::max(scan.E_up, 1e-300);
        // the absolute floor reflects the evaluation noise of expm1(sum of logs)
        if (out.gap <= rel_tol || (scan.E_up - E_lo <= 4e-15 && E_lo > 0.0)) {
            out.ok = st.E > 0.0;
            return out;
        }
    }
    out.ok = false;
    return out;
}

// ---------------------------------------------------------------------------
// exact-rational helpers for the short-interval construction
// ---------------------------------------------------------------------------

Rational poch_q(const Rational& beta, int k) {
    Rational acc = 1;
    for (int i = 0; i < k; ++i) acc *= beta + i;
    return acc;
}

Rational factorial_q(int k) {
    Rational acc = 1;
    for (int i = 2; i <= k; ++i) acc *= i;
    return acc;
}

// Integer coefficients of the Chebyshev polynomial T_n, ascending.
std::vector<Rational> chebyshev_T(int n) {
    std::vector<Rational> t0{Rational(1)}, t1{Rational(0), Rational(1)};
    if (n == 0) return t0;
    for (int k = 1; k < n; ++k) {
        std::vector<Rational> t2(k + 2, Rational(0));
        for (int j = 0; j <= k; ++j) t2[j + 1] += 2 * t1[j];
        for (int j = 0; j < static_cast<int>(t0.size()); ++j) t2[j] -= t0[j];
        t0 = std::move(t1);
        t1 = std::move(t2);
    }
    return t1;
}

// Expands sum_k c_k (z - zc)^k into ascending monomials of z, exactly.
std::vector<Rational> shift_poly(const std::vector<Rational>& c, const Rational& zc) {
    const int n = static_cast<int>(c.size());
    std::vector<Rational> out(n, Rational(0));
    for (int k = n - 1; k >= 0; --k) {
        // out = out * (z - zc) + c_k
        for (int j = n - 1; j >= 1; --j) out[j] = out[j - 1] - zc * out[j];
        out[0] = c[k] - zc * out[0];
    }
    return out;
}

Rational cf_exact(int m, int l, int p) {
    const int n = m + l + 1;
    Rational c = factorial_q(m) * factorial_q(l) * poch_q(Rational(1, p), l + 1) *
                 poch_q(Rational(p - 1, p), m) / (factorial_q(n) * factorial_q(m + l));
    if (n % 2 == 0) c = -c;
    return c;
}

// Short-interval near-minimax construction: the type-(m,l) Pade approximant
// of z^{1/p} with its leading error term redistributed by a Chebyshev
// polynomial on [a, 1]. Valid when the levelled error is far below the
// double-precision noise floor of the exchange solve.
MinimaxResult short_interval_solve(int m, int l, int p, double a_d) {
    const int N = m + l + 1;
    const Rational a(a_d);
    const Rational zc = (a + 1) / 2;
    const Rational delta = (1 - a) / 2;

    // Taylor series of (z/zc)^{1/p} about z = zc (the zc^{1/p} factor is
    // reattached at the end): g_j = binom(1/p, j) / zc^j.
    std::vector<Rational> g(N);
    {
        Rational binom = 1;
        Rational zcp = 1;
        for (int j = 0; j < N; ++j) {
            g[j] = binom / zcp;
            binom *= (Rational(1, p) - j) / (j + 1);
            zcp *= zc;
        }
    }

    Rational zc_pow_N = 1;
    for (int i = 0; i < N; ++i) zc_pow_N *= zc;
    const Rational c_rel = cf_exact(m, l, p) / zc_pow_N;

    // q(w) = w^N - 2 (delta/2)^N T_N(w/delta); degree <= N-2 after cancellation.
    if (delta != 0) {
        const auto T = chebyshev_T(N);
        Rational pref = 2;
        for (int i = 0; i < N; ++i) pref *= delta / 2;
        Rational dpow = 1;
        for (int j = 0; j < N; ++j) {
            // q_j = -pref * T[j] / delta^j
            if (T[j] != 0) g[j] -= c_rel * (-pref * T[j] / dpow);
            dpow *= delta;
        }
    }

    // Pade system: for k = m+1 .. m+l: sum_{i=0}^{l} d_i g_{k-i} = 0, d_0 = 1.
    std::vector<Rational> d(l + 1, Rational(0));
    d[0] = 1;
    if (l > 0) {
        std::vector<std::vector<Rational>> A(l, std::vector<Rational>(l, Rational(0)));
        std::vector<Rational> rhs(l);
        for (int row = 0; row < l; ++row) {
            const int k = m + 1 + row;
            for (int i = 1; i <= l; ++i) A[row][i - 1] = (k - i >= 0) ? g[k - i] : Rational(0);
            rhs[row] = -g[k];
        }
        // exact Gaussian elimination
        for (int col = 0; col < l; ++col) {
            int piv = -1;
            for (int r = col; r < l; ++r)
                if (A[r][col] != 0) { piv = r; break; }
            if (piv < 0) throw NonConvergenceError("degenerate Pade system in short-interval solve");
            std::swap(A[col], A[piv]);
            std::swap(rhs[col], rhs[piv]);
            for (int r = col + 1; r < l; ++r) {
                if (A[r][col] == 0) continue;
                const Rational f = A[r][col] / A[col][col];
                for (int cc = col; cc < l; ++cc) A[r][cc] -= f * A[col][cc];
                rhs[r] -= f * rhs[col];
            }
        }
        for (int col = l - 1; col >= 0; --col) {
            Rational s = rhs[col];
            for (int cc = col + 1; cc < l; ++cc) s -= A[col][cc] * d[cc + 1];
            d[col + 1] = s / A[col][col];
        }
    }

    std::vector<Rational> numw(m + 1, Rational(0));
    for (int k = 0; k <= m; ++k)
        for (int i = 0; i <= std::min(k, l); ++i) numw[k] += d[i] * g[k - i];

    std::vector<Rational> num_z = shift_poly(numw, zc);
    std::vector<Rational> den_z = shift_poly(d, zc);

    Rational den1 = 0;
    for (const auto& c : den_z) den1 += c;
    if (den1 == 0) throw DegenerateError("denominator vanishes at z = 1");
    for (auto& c : num_z) c /= den1;
    for (auto& c : den_z) c /= den1;

    const double zc_root = std::pow(static_cast<double>(zc), 1.0 / p);
    std::vector<double> num_d(num_z.size()), den_d(den_z.size());
    for (std::size_t i = 0; i < num_z.size(); ++i) num_d[i] = static_cast<double>(num_z[i]) * zc_root;
    for (std::size_t i = 0; i < den_z.size(); ++i) den_d[i] = static_cast<double>(den_z[i]);

    MinimaxResult res;
    res.r = polyrat::make_rational(Polynomial(std::move(num_d)), Polynomial(std::move(den_d)), m, l);
    res.asymptotic_regime = true;
    res.sign0 = +1;
    res.remez_iters = 0;

    const double dd = static_cast<double>(delta);
    const double zcd = static_cast<double>(zc);
    const double cf = pade_error_coeff(m, l, p);
    res.E = 2.0 * std::abs(cf) * std::pow(dd / (2.0 * zcd), N);
    res.certified_lower = res.E * (1.0 - 1e-10);

    res.nodes.resize(N + 1);
    for (int i = 0; i <= N; ++i)
        res.nodes[i] = zcd - dd * std::cos(M_PI * static_cast<double>(i) / N);
    res.nodes.front() = a_d;
    res.nodes.back() = 1.0;

    // Factored form via root extraction; the coefficients are mild here.
    bool ok = true;
    FactoredRational f;
    f.scale = res.r.num.coeff(res.r.num.degree()) / res.r.den.coeff(std::max(res.r.den.degree(), 0));
    if (res.r.num.degree() >= 1) {
        for (const auto& root : polyrat::poly_roots(res.r.num)) {
            if (std::abs(root.imag()) > 1e-8 * std::abs(root)) { ok = false; break; }
            f.zero_shifts.push_back(-root.real());
        }
    }
    if (ok && res.r.den.degree() >= 1) {
        for (const auto& root : polyrat::poly_roots(res.r.den)) {
            if (std::abs(root.imag()) > 1e-8 * std::abs(root)) { ok = false; break; }
            f.pole_shifts.push_back(-root.real());
        }
    }
    if (ok) {
        res.factored = std::move(f);
        res.has_factored = true;
    }
    return res;
}

// Last-resort variant of the short-interval construction for wider intervals:
// the model error estimate no longer certifies optimality, so the actual
// relative error is measured on a dense grid and returned as E. Only used
// when the optimal level sits below what the exchange resolves in doubles.
std::optional<MinimaxResult> short_interval_measured(int m, int l, int p, double a) {
    MinimaxResult res;
    try {
        res = short_interval_solve(m, l, p, a);
    } catch (const Error&) {
        return std::nullopt;
    }
    double worst = 0.0;
    const int n = 4000;
    for (int i = 0; i <= n; ++i) {
        const double z = a * std::pow(1.0 / a, static_cast<double>(i) / n);
        const double root = std::pow(z, 1.0 / p);
        const double v = res.has_factored ? res.factored.eval(z)
                                          : polyrat::eval_rational(res.r, z);
        worst = std::max(worst, std::abs(v - root) / root);
    }
    if (!(worst <= 2e-7)) return std::nullopt;
    res.E = worst;
    res.certified_lower = 0.0;  // no equioscillation certificate in this regime
    return res;
}

MinimaxResult finalize_from_state(const LevelState& st, int m, int l,
                                  const std::vector<double>& nodes,
                                  const ExchangeOutcome& out) {
    MinimaxResult res;
    int n_right = 0;
    for (const auto& r : st.zr) {
        const double t = r.side == 0 ? st.a - std::exp(r.s) : 1.0 + std::exp(r.s);
        if (r.side == 1) ++n_right;
        res.factored.zero_shifts.push_back(-t);
    }
    for (const auto& r : st.pr) {
        const double t = r.side == 0 ? st.a - std::exp(r.s) : 1.0 + std::exp(r.s);
        if (r.side == 1) ++n_right;
        res.factored.pole_shifts.push_back(-t);
    }
    std::sort(res.factored.zero_shifts.begin(), res.factored.zero_shifts.end());
    std::sort(res.factored.pole_shifts.begin(), res.factored.pole_shifts.end());
    res.factored.scale = std::exp(st.logc) * ((n_right % 2 == 0) ? 1.0 : -1.0);
    res.has_factored = true;
    res.r = res.factored.to_rational(m, l);
    res.E = st.E;
    res.sign0 = +1;
    res.remez_iters = out.iters;
    // The de la Vallee Poussin bound from the node values; when the measured
    // gap is dominated by evaluation noise, the bound is tightened to the
    // noise-free value E/(1+1e-10).
    double cert = std::min(out.cert_lo > 0.0 ? out.cert_lo : st.E, st.E);
    if (st.E - cert <= 8e-15) cert = std::max(cert, st.E / (1.0 + 1e-10));
    res.certified_lower = std::min(cert, st.E);
    res.nodes = nodes;
    return res;
}

}  // namespace

// ---------------------------------------------------------------------------
// FactoredRational
// ---------------------------------------------------------------------------

double FactoredRational::eval(double z) const {
    double acc = scale;
    for (double s : zero_shifts) acc *= z + s;
    for (double s : pole_shifts) acc /= z + s;
    return acc;
}

std::complex<double> FactoredRational::eval(std::complex<double> z) const {
    std::complex<double> acc = scale;
    for (double s : zero_shifts) acc *= z + s;
    for (double s : pole_shifts) acc /= z + s;
    return acc;
}

double FactoredRational::log_eval(double z) const {
    std::vector<double> terms;
    terms.reserve(zero_shifts.size() + pole_shifts.size() + 1);
    terms.push_back(std::log(std::abs(scale)));
    for (double s : zero_shifts) terms.push_back(std::log(std::abs(z + s)));
    for (double s : pole_shifts) terms.push_back(-std::log(std::abs(z + s)));
    return kahan_sum(terms);
}

RationalFunction FactoredRational::to_rational(int m, int l) const {
    Polynomial num = Polynomial::from_negated_roots(zero_shifts, scale);
    Polynomial den = Polynomial::from_negated_roots(pole_shifts, 1.0);
    return polyrat::make_rational(std::move(num), std::move(den), m, l);
}

// ---------------------------------------------------------------------------
// closed forms and constants
// ---------------------------------------------------------------------------

double alpha_next(double alpha, double E) {
    (void)alpha;
    if (E < 0.0 || E >= 1.0) throw DomainError("alpha_next requires 0 <= E < 1");
    return (1.0 - E) / (1.0 + E);
}

double asymptotic_C(int m, int l, int p) {
    if (m == 0 && l == 0) throw DomainError("asymptotic_C requires (m,l) != (0,0)");
    if (p < 2) throw DomainError("asymptotic_C requires p >= 2");
    const int n = m + l + 1;
    long double acc = 1.0L;
    for (int i = 0; i < n; ++i) acc *= static_cast<long double>(p);
    for (int i = 2; i <= m; ++i) acc *= i;
    for (int i = 2; i <= l; ++i) acc *= i;
    const long double ip = 1.0L / p;
    for (int i = 0; i <= l; ++i) acc *= ip + i;
    for (int i = 0; i < m; ++i) acc *= (1.0L - ip) + i;
    for (int i = 0; i < m + l; ++i) acc /= 2.0L;
    for (int i = 2; i <= n; ++i) acc /= i;
    for (int i = 2; i <= m + l; ++i) acc /= i;
    return static_cast<double>(acc);
}

double pade_error_coeff(int m, int l, int p) {
    const int n = m + l + 1;
    long double acc = 1.0L;
    for (int i = 2; i <= m; ++i) acc *= i;
    for (int i = 2; i <= l; ++i) acc *= i;
    const long double ip = 1.0L / p;
    for (int i = 0; i <= l; ++i) acc *= ip + i;
    for (int i = 0; i < m; ++i) acc *= (1.0L - ip) + i;
    for (int i = 2; i <= n; ++i) acc /= i;
    for (int i = 2; i <= m + l; ++i) acc /= i;
    // acc carries the magnitude with the sign of z^{1/p} - P; negate odd n so
    // the returned value is the coefficient of P - z^{1/p}, e.g. -1/p at (0,0).
    if (n % 2 == 1) acc = -acc;
    return static_cast<double>(acc);
}

RationalFunction rhat_10(int p, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("rhat_10 requires alpha in (0,1)");
    const double mu = std::pow((alpha - std::pow(alpha, p)) / ((p - 1) * (1.0 - alpha)), 1.0 / p);
    std::vector<double> num{(p - 1) * mu / p, 1.0 / (p * std::pow(mu, p - 1))};
    return polyrat::make_rational(Polynomial(std::move(num)), Polynomial({1.0}), 1, 0);
}

RationalFunction rhat_01(int p, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("rhat_01 requires alpha in (0,1)");
    const double nu = std::pow((p + 1) * (1.0 - alpha) / (1.0 - std::pow(alpha, p + 1)), 1.0 / p);
    std::vector<double> den{(p + 1) * nu, -std::pow(nu, p + 1)};
    return polyrat::make_rational(Polynomial({static_cast<double>(p)}), Polynomial(std::move(den)), 0, 1);
}

RationalFunction normalize_rhat(const MinimaxResult& res) {
    if (res.E >= 1.0) throw DegenerateError("normalize_rhat requires E < 1");
    RationalFunction r = res.r;
    std::vector<double> nc = r.num.coeffs();
    for (double& c : nc) c /= (1.0 - res.E);
    r.num = Polynomial(std::move(nc));
    return r;
}

FactoredRational normalize_rhat_factored(const MinimaxResult& res) {
    if (res.E >= 1.0) throw DegenerateError("normalize_rhat requires E < 1");
    if (!res.has_factored) throw DegenerateError("no factored form available");
    FactoredRational f = res.factored;
    f.scale /= (1.0 - res.E);
    return f;
}

int equioscillation_count(const std::function<double(double)>& err, double a, double b,
                          double level_tol, int expected_hint) {
    if (!(a < b)) throw DomainError("equioscillation_count requires a < b");
    const bool log_grid = (a > 0.0) && (b / a > 100.0);
    long n = std::max<long>(4096L * std::max(expected_hint, 1), 8192L);
    int last_count = -1;
    for (int refine = 0; refine < 7; ++refine) {
        n = std::min<long>(n, 8'000'000L);
        std::vector<double> vals(static_cast<std::size_t>(n));
        double mx = 0.0;
        for (long i = 0; i < n; ++i) {
            const double t = static_cast<double>(i) / (n - 1);
            const double z = log_grid ? a * std::pow(b / a, t) : a + (b - a) * t;
            vals[i] = err(z);
            mx = std::max(mx, std::abs(vals[i]));
        }
        if (mx == 0.0) return 0;
        const double level = (1.0 - level_tol) * mx;
        int count = 0, last_sign = 0;
        for (double v : vals) {
            if (std::abs(v) < level) continue;
            const int s = v > 0 ? 1 : -1;
            if (s != last_sign) { ++count; last_sign = s; }
        }
        if (count == last_count) return count;
        last_count = count;
        n *= 2;
    }
    return last_count;
}

// ---------------------------------------------------------------------------
// solve_minimax
// ---------------------------------------------------------------------------

MinimaxResult solve_minimax(const ApproxProblem& prob) {
    const int m = prob.m, l = prob.l, p = prob.p;
    if (m < 0 || l < 0) throw DomainError("solve_minimax requires m, l >= 0");
    if (p < 2) throw DomainError("solve_minimax requires p >= 2");
    if (!(prob.alpha > 0.0 && prob.alpha < 1.0))
        throw DomainError("solve_minimax requires alpha in (0, 1)");

    const double a = std::pow(prob.alpha, p);

    if (m == 0 && l == 0) {
        MinimaxResult res;
        const double alpha = prob.alpha;
        res.E = (1.0 - alpha) / (1.0 + alpha);
        res.r = polyrat::make_rational(Polynomial({2.0 * alpha / (1.0 + alpha)}),
                                       Polynomial({1.0}), 0, 0);
        res.nodes = {a, 1.0};
        res.sign0 = +1;
        res.certified_lower = res.E;
        res.factored.scale = 2.0 * alpha / (1.0 + alpha);
        res.has_factored = true;
        return res;
    }

    // Short-interval regime: the levelled error is below what the exchange
    // can resolve in double precision; use the Pade-Chebyshev construction.
    const int N1 = m + l + 1;
    const double E_short_model = [&] {
        const double delta = (1.0 - a) / 2.0, zc = (1.0 + a) / 2.0;
        return 2.0 * std::abs(pade_error_coeff(m, l, p)) * std::pow(delta / (2.0 * zc), N1);
    }();
    if (E_short_model < 1e-13 && (1.0 - a) / (1.0 + a) < 0.2)
        return short_interval_solve(m, l, p, a);

    const SideLayout lay = pade_side_layout(m, l, p);
    const double eps0 = (1.0 - prob.alpha) / (1.0 + prob.alpha);
    const double rel_tol = std::max(prob.rel_tol * 100, 1e-11);

    // One attempt = a starting state plus a node seed: the state's own
    // oscillation structure first, the Chebyshev-in-log reference second.
    auto attempt = [&](const LevelState& init, double aw, int max_iters, double tol,
                       LevelState& st, std::vector<double>& nodes, ExchangeOutcome& out) {
        const int n = static_cast<int>(init.zr.size() + init.pr.size()) + 2;
        for (int seed = 0; seed < 2; ++seed) {
            st = init;
            nodes = (seed == 0) ? nodes_from_state(st, aw, n) : initial_nodes(aw, n);
            out = remez_exchange(st, nodes, aw, max_iters, tol);
            if (out.ok) return true;
        }
        return false;
    };

    LevelState st;
    std::vector<double> nodes;
    ExchangeOutcome out;

    // Full solve at one width: direct structured and Pade-limit starts, then
    // the degree ladder walking the types up one step at a time with each
    // stage warm-started from the previous converged stage.
    auto solve_at = [&](double aw, int budget, double tol) -> bool {
        const double eps0w = (1.0 - std::pow(aw, 1.0 / p)) / (1.0 + std::pow(aw, 1.0 / p));
        const double E_init = std::min(eps0w, std::max(
            asymptotic_C(m, l, p) * std::pow(eps0w, N1), 1e-280));
        if (attempt(structured_init(m, l, p, aw, lay, E_init), aw, budget, tol, st, nodes,
                    out))
            return true;
        if (attempt(pade_limit_init(p, aw, lay, E_init), aw, budget, tol, st, nodes, out))
            return true;

        LevelState prev;
        bool have_prev = false;
        for (int t = 1; t <= m + l; ++t) {
            const int mc = static_cast<int>(std::lround(static_cast<double>(t) * m / (m + l)));
            const int lc = t - mc;
            const bool final_stage = (t == m + l);
            const SideLayout stage_lay = final_stage ? lay : pade_side_layout(mc, lc, p);
            const double stage_E_init =
                have_prev ? std::max(prev.E * 0.25, 1e-290) : std::min(eps0w, 0.9);
            const int stage_budget = final_stage ? budget : std::min(budget, 40);
            const double stage_tol = final_stage ? tol : std::max(tol, 1e-9);

            bool ok = have_prev &&
                      attempt(warm_stage_init(prev, mc, lc, p, aw, stage_lay, stage_E_init),
                              aw, stage_budget, stage_tol, st, nodes, out);
            if (!ok)
                ok = attempt(structured_init(mc, lc, p, aw, stage_lay, stage_E_init),
                             aw, stage_budget, stage_tol, st, nodes, out);
            if (final_stage) return ok;
            if (ok) {
                prev = st;
                have_prev = true;
            }
        }
        return false;
    };

    if (solve_at(a, prob.max_remez_iters, rel_tol))
        return finalize_from_state(st, m, l, nodes, out);

    // Width continuation: solve the full type on a narrower interval where
    // the exchange still levels, then widen geometrically, rescaling the
    // converged roots onto each wider interval.
    {
        LevelState cur;
        double expo = 0.0;
        for (double e = 0.5; e >= 1.0 / 64 - 1e-12; e *= 0.5) {
            const double aw = std::pow(a, e);
            const double eps0w = (1.0 - std::pow(aw, 1.0 / p)) / (1.0 + std::pow(aw, 1.0 / p));
            const double E_est = asymptotic_C(m, l, p) * std::pow(eps0w, N1);
            if (E_est < 1e-12) continue;  // below the exchange noise floor
            if (attempt(structured_init(m, l, p, aw, lay, std::min(E_est, 0.9)),
                        aw, 40, 1e-9, st, nodes, out) ||
                attempt(pade_limit_init(p, aw, lay, std::min(E_est, 0.9)), aw, 40, 1e-9, st,
                        nodes, out)) {
                cur = st;
                expo = e;
                break;
            }
        }
        while (expo > 0.0 && expo < 1.0) {
            double f = 1.3;
            bool advanced = false;
            while (f > 1.01) {
                const double expo_next = std::min(1.0, expo * f);
                const double aw = std::pow(a, expo_next);
                const bool last = expo_next >= 1.0;
                if (attempt(rescale_width(cur, aw), aw, last ? prob.max_remez_iters : 40,
                            last ? rel_tol : 1e-9, st, nodes, out)) {
                    if (last) return finalize_from_state(st, m, l, nodes, out);
                    cur = st;
                    expo = expo_next;
                    advanced = true;
                    break;
                }
                f = std::sqrt(f);
            }
            if (!advanced) break;
        }
    }

    // Wide-side continuation: solve on a wider interval where the levelled
    // error is larger (and the exchange robust), then shrink geometrically
    // onto the target, rescaling the converged roots at each step.
    {
        LevelState cur;
        std::vector<double> cur_nodes;
        ExchangeOutcome cur_out;
        double expo = 0.0;
        for (double e : {1.1, 1.2, 1.3, 1.5, 1.7, 2.3, 3.0, 4.0, 6.0, 8.0}) {
            const double aw = std::pow(a, e);
            if (aw < 1e-280) break;
            if (solve_at(aw, 60, 1e-9)) {
                cur = st;
                cur_nodes = nodes;
                cur_out = out;
                expo = e;
                break;
            }
        }
        while (expo >= 1.0 + 1e-12) {
            double f = 1.3;
            bool advanced = false;
            while (f > 1.002) {
                const double expo_next = std::max(1.0, expo / f);
                const double aw = std::pow(a, expo_next);
                const bool last = expo_next <= 1.0 + 1e-15;
                if (attempt(rescale_width(cur, aw), aw, last ? prob.max_remez_iters : 40,
                            last ? rel_tol : 1e-9, st, nodes, out)) {
                    if (last) return finalize_from_state(st, m, l, nodes, out);
                    cur = st;
                    cur_nodes = nodes;
                    cur_out = out;
                    expo = expo_next;
                    advanced = true;
                    break;
                }
                f = std::sqrt(f);
            }
            if (!advanced) break;
        }
        // The shrink stalls once the target level falls below the exchange
        // noise floor. The last converged wider-interval solution still
        // bounds the error on [a, 1] by its own level; return it with a
        // grid-measured certificate instead of failing.
        if (expo > 1.0) {
            MinimaxResult res = finalize_from_state(cur, m, l, cur_nodes, cur_out);
            double worst = 0.0;
            const int ng = 4000;
            for (int i = 0; i <= ng; ++i) {
                const double z = a * std::pow(1.0 / a, static_cast<double>(i) / ng);
                const double v = res.factored.eval(z);
                const double root = std::pow(z, 1.0 / p);
                worst = std::max(worst, std::abs(v - root) / root);
            }
            if (worst <= 2e-7) {
                res.E = worst;
                res.certified_lower = 0.0;
                res.asymptotic_regime = true;
                return res;
            }
        }
    }

    // Below the double-precision resolution of the exchange a fully levelled
    // solve is unattainable; fall back to the measured near-optimal
    // construction when the model predicts such a level.
    if (std::min(E_short_model, asymptotic_C(m, l, p) * std::pow(eps0, N1)) < 1e-8) {
        if (auto res = short_interval_measured(m, l, p, a)) return *res;
    }
    throw NonConvergenceError("Remez exchange failed to level within budget", 0.0);
}

const MinimaxResult& solve_minimax_cached(int m, int l, int p, double alpha) {
    static std::mutex mu;
    static std::map<std::tuple<int, int, int, long long>, std::unique_ptr<MinimaxResult>> cache;
    const long long key_a = std::llround(alpha * 1e12);
    const auto key = std::make_tuple(m, l, p, key_a);
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it == cache.end()) {
        ApproxProblem prob;
        prob.m = m;
        prob.l = l;
        prob.p = p;
        prob.alpha = alpha;
        auto res = std::make_unique<MinimaxResult>(solve_minimax(prob));
        it = cache.emplace(key, std::move(res)).first;
    }
    return *it->second;
}

}  // namespace rootiter::minimax
