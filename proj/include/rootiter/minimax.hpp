#pragma once

#include <functional>
#include <vector>

#include "rootiter/polyrat.hpp"

namespace rootiter::minimax {

using polyrat::Polynomial;
using polyrat::RationalFunction;

/// Best relative-error approximation problem for z^{1/p} on [alpha^p, 1].
struct ApproxProblem {
    int m = 1;
    int l = 1;
    int p = 2;
    double alpha = 0.5;
    double rel_tol = 1e-13;
    int max_remez_iters = 60;
};

/// Factored form of a rational function whose zeros and poles all lie on the
/// negative real axis: scale * prod_j (z + zero_shifts[j]) / prod_j (z + pole_shifts[j]).
/// This is the numerically stable representation for wide intervals.
struct FactoredRational {
    std::vector<double> zero_shifts;  // z + shift, shift > 0
    std::vector<double> pole_shifts;
    double scale = 1.0;

    double eval(double z) const;
    std::complex<double> eval(std::complex<double> z) const;
    /// log of the value for z > 0 (all factors positive), compensated summation.
    double log_eval(double z) const;
    RationalFunction to_rational(int m, int l) const;
};

struct MinimaxResult {
    RationalFunction r;           // canonical monomial representation
    double E = 0.0;               // levelled relative error
    std::vector<double> nodes;    // m+l+2 reference points, ascending
    int sign0 = +1;               // sign of the error at nodes[0]
    int remez_iters = 0;
    double certified_lower = 0.0; // de la Vallee Poussin bound

    /// Factored form of r; empty shifts and scale==0 when unavailable.
    FactoredRational factored;
    bool has_factored = false;
    /// True when the result came from the short-interval Pade-Chebyshev
    /// construction instead of a fully levelled Remez solve.
    bool asymptotic_regime = false;
};

/// Solves for the type-(m,l) minimizer of max |(r(z) - z^{1/p}) / z^{1/p}|
/// over [alpha^p, 1], with equioscillation on m+l+2 nodes.
MinimaxResult solve_minimax(const ApproxProblem& prob);

/// r_hat = r / (1 - E); its minimum relative error on the interval is 0.
RationalFunction normalize_rhat(const MinimaxResult& res);
FactoredRational normalize_rhat_factored(const MinimaxResult& res);

/// Closed forms of the type-(1,0) and (0,1) normalized approximants.
RationalFunction rhat_10(int p, double alpha);
RationalFunction rhat_01(int p, double alpha);

/// (1 - E) / (1 + E)
double alpha_next(double alpha, double E);

/// Asymptotic contraction constant C(m,l,p) of eps_{k+1} ~ C eps_k^{m+l+1}.
double asymptotic_C(int m, int l, int p);

/// Leading Taylor coefficient c_f of P_{m,l,p}(z) - z^{1/p} at z = 1.
double pade_error_coeff(int m, int l, int p);

/// Number of points in a maximal alternating sequence attaining
/// +-(1 - level_tol) * max|err| on [a, b], grid-refined until stable.
int equioscillation_count(const std::function<double(double)>& err, double a, double b,
                          double level_tol, int expected_hint = 4);

/// Process-wide solve cache keyed by (m, l, p, alpha quantized to 1e-12).
const MinimaxResult& solve_minimax_cached(int m, int l, int p, double alpha);

}  // namespace rootiter::minimax
