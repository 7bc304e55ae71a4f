#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rootiter/linalg.hpp"
#include "rootiter/minimax.hpp"

namespace rootiter::matroot {

using linalg::Complex;
using linalg::ComplexMatrix;

enum class Mode { minimax, pade };

struct IterationConfig {
    int p = 2;
    int m = 8;
    int l = 8;
    double Delta = 1e-15;
    double alpha_pade_switch = 0.99;
    int max_iters = 30;
    Mode mode = Mode::minimax;
    std::optional<double> tau_override;
    std::optional<double> alpha0_override;
};

/// One per-step record of the coupled iteration.
struct TraceRow {
    int k = 0;
    double alpha = 1.0;
    double residual_inf = 0.0;  // ||Z~Y~ - I||_inf entering this step
    std::string mode;           // "minimax" or "pade"
    int matmuls = 0;            // matrix products spent on this step
    int inversions = 0;         // LU inversions / solves spent on this step
};

enum class Termination { converged, max_iters, error };

struct RootResult {
    ComplexMatrix Y_tilde;  // approximately A^{1/p}
    ComplexMatrix Z_tilde;  // approximately A^{-1/p}
    int iters = 0;
    Termination termination = Termination::error;
    double residual_defining = 0.0;     // ||Y~^p - A||_inf / ||A||_inf
    double residual_inverse_pair = 0.0; // ||Z~ Y~ - I||_inf
    std::vector<TraceRow> trace;
    long matmul_count = 0;
    long inversion_count = 0;
};

/// Coupled rational minimax iteration for the principal p-th root: scales by
/// tau = |lambda_max|, sets alpha_0 = |lambda_min/lambda_max|^{1/p}, applies
/// per-step h_{m,m,p}(Z_k Y_k, alpha_k) in partial fractions (general l by
/// direct rational evaluation), switches to the Pade factor once alpha_k
/// exceeds the threshold, and rescales the limits by tau^{+-1/p}.
/// Pade mode centers with tau = sqrt(|lambda_min lambda_max|) and alpha_0 = 1.
RootResult compute_root(const ComplexMatrix& A, const IterationConfig& cfg);

/// Partial fractions a0 + sum_j a_j / (z + b_j) of the per-step factor
/// h_{l,m,p}(z, alpha) = 1 / r_hat_{m,l}(z, alpha), for l <= m.
/// alpha >= 1 selects the Pade factor.
polyrat::PartialFractions h_partial_fractions(int m, int l, int p, double alpha);

/// true iff ||ZY_product - I||_inf <= p (Delta / ((p-1) C(m,l,p)))^{1/(m+l+1)}.
bool termination_check(const ComplexMatrix& ZY_product, const IterationConfig& cfg);
double termination_threshold(const IterationConfig& cfg);

/// Explicit scaled Newton specialization, the type-(1,0) iteration.
RootResult newton_scaled_root(const ComplexMatrix& A, int p, double tol = 1e-14,
                              int max_iters = 100);
/// Explicit scaled inverse-Newton specialization, the type-(0,1) iteration.
RootResult inverse_newton_scaled_root(const ComplexMatrix& A, int p, double tol = 1e-14,
                                      int max_iters = 100);

/// Frobenius-norm relative condition number of the p-th root:
/// (||A||_F / ||X||_F) ||(sum_{j=1}^p (X^{p-j})^T kron X^{j-1})^{-1}||_2.
double condition_number_kappa_p(const ComplexMatrix& A, const ComplexMatrix& X, int p);

/// Idempotency of the Frechet derivative of the coupled Pade step map at
/// (B, B^{-1}), measured two ways over random directions: the defect
/// ||L(L(E,F)) - L(E,F)|| / ||(E,F)|| with L from central finite differences,
/// and the disagreement between the finite-difference and closed forms
/// L(E,F) = (1/p)(E - (p-1) B F B, (p-1) F - B^{-1} E B^{-1}).
struct FrechetDefect {
    double idempotency = 0.0;
    double agreement = 0.0;
};
FrechetDefect frechet_idempotency_defect(const ComplexMatrix& B, int m, int l, int p,
                                         double h_fd = 0.0);

/// ||Y~ - ref||_inf / ||ref||_inf
double reference_relative_error(const RootResult& result, const ComplexMatrix& A_root_reference);

/// CSV: header k,alpha,residual_inf,mode
void write_trace_csv(std::ostream& os, const RootResult& result);

}  // namespace rootiter::matroot
