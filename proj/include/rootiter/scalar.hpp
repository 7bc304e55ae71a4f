#pragma once

#include <complex>
#include <iosfwd>
#include <utility>
#include <vector>

#include "rootiter/minimax.hpp"

namespace rootiter::scalar {

using Complex = std::complex<double>;
using polyrat::RationalFunction;

/// One completed iteration step: the interval parameter it was built for and
/// the normalized approximant r_hat applied at that step.
struct StepFactor {
    double alpha = 1.0;
    RationalFunction rhat;
    minimax::FactoredRational factored;
    bool has_factored = false;

    Complex eval(Complex w) const;
};

/// State of the scalar p-th root iteration after k completed steps. The
/// per-step factors are z-independent, so one state evaluates f_k at any z.
struct ScalarIterState {
    int m = 1, l = 1, p = 2;
    int k = 0;
    double alpha_k = 1.0;
    double eps_k = 0.0;   // (1 - alpha_k) / (1 + alpha_k)
    bool pade = false;    // alpha pinned to 1 (Pade mode)
    std::vector<StepFactor> factors;
};

ScalarIterState init_scalar_state(int m, int l, int p, double alpha, bool pade_mode = false);
/// Appends one step's factor and updates alpha_k / eps_k.
void advance(ScalarIterState& st);

/// f_j(z) for 0 <= j <= st.k (default: j = st.k), by recursing over factors.
Complex eval_f(const ScalarIterState& st, Complex z, int j = -1);
/// f~_j(z) = (2 alpha_j / (1 + alpha_j)) f_j(z), the rescaled iterate whose
/// relative error on [alpha^p, 1] is +-eps_j.
Complex eval_f_tilde(const ScalarIterState& st, Complex z, int j = -1);

/// One iteration step at a point: f_next = f * r_hat(z / f^p, alpha) and the
/// interval update alpha_next. alpha = 1 selects the Pade factor.
std::pair<Complex, double> scalar_step(Complex z, Complex f, double alpha, int m, int l, int p);

/// eps_0, ..., eps_K with eps_{k+1} the optimal level on [((1-eps_k)/(1+eps_k))^p, 1].
std::vector<double> eps_recursion(int m, int l, int p, double eps0, int K);

struct RatioRow {
    int k = 0;
    double eps = 0.0;
    double ratio = 0.0;   // eps_k / eps_{k-1}^{m+l+1}, 0 at k = 0
    bool unreliable = false;  // eps below machine noise, ratio meaningless
};
struct RatioTable {
    std::vector<RatioRow> rows;
    double C = 0.0;  // asymptotic contraction constant, for reference
};
RatioTable ratio_table(int m, int l, int p, double eps0, int K);

struct RegionRequest {
    double lo_log10 = -4.0, hi_log10 = 0.0;
    double lo_arg = -3.141592653589793, hi_arg = 3.141592653589793;
    int n_abs = 800, n_arg = 800;
};

enum class IterMode { minimax, pade };

/// Per-cell convergence classification over a (log10|z|, arg z) rectangle.
struct RegionGrid {
    RegionRequest req;
    /// smallest k' <= k with relative error <= delta, -1 when nonconverged;
    /// index = i_abs * n_arg + i_arg.
    std::vector<int> k_converged;
    /// j when the final iterate sits within delta of the rotated root
    /// e^{2 pi i j / p} z^{1/p}, j in 1..p-1; -1 otherwise.
    std::vector<int> rotation_index;
};

/// Classifies every cell with at most k steps and tolerance delta. Pade mode
/// pins alpha to 1 and applies the z / alpha^{p/2} rescaling before iterating.
/// Cells are independent; workers are capped by ROOTITER_THREADS.
RegionGrid region_sample(const RegionRequest& req, int k, double delta, double alpha, int m,
                         int l, int p, IterMode mode);

/// CSV: header log10_abs,arg,k_converged,rotation_index; rotation blank when
/// inapplicable; -1 marks nonconverged cells.
void write_region_csv(std::ostream& os, const RegionGrid& grid);

}  // namespace rootiter::scalar
