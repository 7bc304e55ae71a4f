// Command-line surface: compute matrix p-th roots from Matrix Market files,
// print approximants and contraction tables, sample convergence regions,
// estimate condition numbers, and run the built-in verification suite.
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rootiter/linalg.hpp"
#include "rootiter/matroot.hpp"
#include "rootiter/minimax.hpp"
#include "rootiter/scalar.hpp"
#include "rootiter/selftest.hpp"

namespace {

using namespace rootiter;
using linalg::Complex;
using linalg::ComplexMatrix;

constexpr int kExitUsage = 1;
constexpr int kExitDivergence = 2;
constexpr int kExitSolver = 3;

std::string g(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string gc(Complex z) {
    return g(z.real()) + (z.imag() < 0 ? " - " : " + ") + g(std::abs(z.imag())) + "i";
}

void print_poly(const char* label, const polyrat::Polynomial& q) {
    std::cout << label;
    if (q.is_zero()) {
        std::cout << " 0";
    } else {
        for (int j = 0; j <= q.degree(); ++j) std::cout << " " << g(q.coeff(j));
    }
    std::cout << "\n";
}

void print_partial_fractions(int m, int l, int p, double alpha) {
    if (l > m) {
        std::cout << "partial fractions: not available for l > m\n";
        return;
    }
    const polyrat::PartialFractions pf = matroot::h_partial_fractions(m, l, p, alpha);
    std::cout << "h(z) = " << gc(pf.a0);
    for (const auto& [aj, bj] : pf.terms)
        std::cout << " + (" << gc(aj) << ") / (z + (" << gc(bj) << "))";
    std::cout << "\n";
}

int cmd_minimax(int m, int l, int p, double alpha) {
    minimax::ApproxProblem prob;
    prob.m = m;
    prob.l = l;
    prob.p = p;
    prob.alpha = alpha;
    const minimax::MinimaxResult res = minimax::solve_minimax(prob);
    std::cout << "type (" << m << "," << l << "), p = " << p << ", alpha = " << g(alpha)
              << "\n";
    print_poly("numerator:", res.r.num);
    print_poly("denominator:", res.r.den);
    std::cout << "E = " << g(res.E) << "\n";
    std::cout << "certified lower bound = " << g(res.certified_lower) << "\n";
    std::cout << "nodes:";
    for (double z : res.nodes) std::cout << " " << g(z);
    std::cout << "\n";
    print_partial_fractions(m, l, p, alpha);
    return 0;
}

int cmd_pade(int m, int l, int p) {
    const polyrat::RationalFunction P = polyrat::pade_coeffs(m, l, p);
    std::cout << "type (" << m << "," << l << "), p = " << p << "\n";
    print_poly("numerator:", P.num);
    print_poly("denominator:", P.den);
    print_partial_fractions(m, l, p, 1.0);
    return 0;
}

int cmd_table(int m, int l, int p, double eps0, int K) {
    const scalar::RatioTable t = scalar::ratio_table(m, l, p, eps0, K);
    std::cout << "k,eps_k,ratio\n";
    for (const auto& row : t.rows) {
        std::cout << row.k << "," << g(row.eps) << "," << g(row.ratio);
        if (row.unreliable) std::cout << ",unreliable";
        std::cout << "\n";
    }
    std::cout << "C," << g(t.C) << "\n";
    return 0;
}

ComplexMatrix read_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open input file: " + path, 0);
    return linalg::parse_matrix_market(in);
}

void write_matrix(const std::string& path, const ComplexMatrix& A) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open output file: " + path, 0);
    linalg::write_matrix_market(out, A);
}

matroot::IterationConfig make_config(int p, int m, int l, const std::string& mode,
                                     double delta) {
    matroot::IterationConfig cfg;
    cfg.p = p;
    cfg.m = m;
    cfg.l = l;
    cfg.Delta = delta;
    cfg.mode = (mode == "pade") ? matroot::Mode::pade : matroot::Mode::minimax;
    return cfg;
}

int cmd_root(const std::string& in, const std::string& out, const std::string& out_inverse,
             const std::string& trace_path, int p, int m, int l, const std::string& mode,
             double delta) {
    const ComplexMatrix A = read_matrix(in);
    const matroot::RootResult res = matroot::compute_root(A, make_config(p, m, l, mode, delta));
    matroot::write_trace_csv(std::cout, res);
    std::cout << "iters," << res.iters << "\n";
    std::cout << "residual_inverse_pair," << g(res.residual_inverse_pair) << "\n";
    std::cout << "residual_defining," << g(res.residual_defining) << "\n";
    std::cout << "termination,"
              << (res.termination == matroot::Termination::converged ? "converged"
                                                                     : "max_iters")
              << "\n";
    if (!out.empty()) write_matrix(out, res.Y_tilde);
    if (!out_inverse.empty()) write_matrix(out_inverse, res.Z_tilde);
    if (!trace_path.empty()) {
        std::ofstream tf(trace_path);
        if (!tf) throw ParseError("cannot open trace file: " + trace_path, 0);
        matroot::write_trace_csv(tf, res);
    }
    return res.termination == matroot::Termination::converged ? 0 : kExitSolver;
}

int cmd_kappa(const std::string& in, int p, int m, int l, const std::string& mode,
              double delta) {
    const ComplexMatrix A = read_matrix(in);
    const matroot::RootResult res = matroot::compute_root(A, make_config(p, m, l, mode, delta));
    const double kappa = matroot::condition_number_kappa_p(A, res.Y_tilde, p);
    std::cout << "kappa_p," << g(kappa) << "\n";
    std::cout << "iters," << res.iters << "\n";
    return res.termination == matroot::Termination::converged ? 0 : kExitSolver;
}

int cmd_regions(int k, double delta, double alpha, int m, int l, int p,
                const std::string& mode, const std::vector<double>& rect,
                const std::string& res_str, const std::string& out) {
    scalar::RegionRequest req;
    if (!rect.empty()) {
        req.lo_log10 = rect[0];
        req.hi_log10 = rect[1];
        req.lo_arg = rect[2];
        req.hi_arg = rect[3];
    }
    if (!res_str.empty()) {
        const auto x = res_str.find('x');
        if (x == std::string::npos) throw CLI::ValidationError("--res expects NxM");
        req.n_abs = std::stoi(res_str.substr(0, x));
        req.n_arg = std::stoi(res_str.substr(x + 1));
    }
    const scalar::IterMode im =
        (mode == "pade") ? scalar::IterMode::pade : scalar::IterMode::minimax;
    const scalar::RegionGrid grid = scalar::region_sample(req, k, delta, alpha, m, l, p, im);

    std::vector<long> per_k(k + 1, 0);
    long nonconverged = 0, rotated = 0;
    for (std::size_t i = 0; i < grid.k_converged.size(); ++i) {
        if (grid.k_converged[i] < 0)
            ++nonconverged;
        else
            ++per_k[grid.k_converged[i]];
        if (grid.rotation_index[i] >= 0) ++rotated;
    }
    for (int j = 0; j <= k; ++j) std::cout << "converged_by_k," << j << "," << per_k[j] << "\n";
    std::cout << "nonconverged," << nonconverged << "\n";
    std::cout << "rotated_root_cells," << rotated << "\n";
    if (!out.empty()) {
        std::ofstream of(out);
        if (!of) throw ParseError("cannot open output file: " + out, 0);
        scalar::write_region_csv(of, grid);
    }
    return 0;
}

int cmd_selftest() {
    bool all = true;
    for (const auto& c : selftest::run_selftest()) {
        std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
        all = all && c.passed;
    }
    return all ? 0 : kExitSolver;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rational minimax iterations for the principal matrix p-th root"};
    app.require_subcommand(1);

    int p = 2, m = 8, l = 8, k = 2, K = 8;
    double alpha = 0.5, eps0 = 0.5, delta = 1e-15;
    std::string mode = "minimax", in, out, out_inverse, trace_path, res_str;
    std::vector<double> rect;

    auto add_type = [&](CLI::App* c, bool with_p = true) {
        if (with_p) c->add_option("--p", p, "root order p >= 2");
        c->add_option("--m", m, "numerator degree");
        c->add_option("--l", l, "denominator degree");
    };

    CLI::App* c_root = app.add_subcommand("root", "compute A^{1/p} and A^{-1/p} from a file");
    add_type(c_root);
    c_root->add_option("--mode", mode, "minimax|pade")
        ->check(CLI::IsMember({"minimax", "pade"}));
    c_root->add_option("--delta", delta, "termination tolerance");
    c_root->add_option("--in", in, "input Matrix Market file")->required();
    c_root->add_option("--out", out, "output file for the root");
    c_root->add_option("--out-inverse", out_inverse, "output file for the inverse root");
    c_root->add_option("--trace", trace_path, "iteration trace CSV file");

    CLI::App* c_mini = app.add_subcommand("minimax", "print the best relative approximant");
    add_type(c_mini);
    c_mini->add_option("--alpha", alpha, "interval parameter in (0,1)")->required();

    CLI::App* c_pade = app.add_subcommand("pade", "print the Pade approximant");
    add_type(c_pade);

    CLI::App* c_table = app.add_subcommand("table", "contraction table of eps_k");
    add_type(c_table);
    c_table->add_option("--eps0", eps0, "initial relative error in (0,1)")->required();
    c_table->add_option("--k", K, "number of steps");

    CLI::App* c_reg = app.add_subcommand("regions", "complex-plane convergence regions");
    add_type(c_reg);
    c_reg->add_option("--alpha", alpha, "interval parameter")->required();
    c_reg->add_option("--k", k, "iteration budget");
    c_reg->add_option("--delta", delta, "relative tolerance");
    c_reg->add_option("--mode", mode, "minimax|pade")
        ->check(CLI::IsMember({"minimax", "pade"}));
    c_reg->add_option("--rect", rect, "lo_log10,hi_log10,lo_arg,hi_arg")
        ->delimiter(',')
        ->expected(4);
    c_reg->add_option("--res", res_str, "grid resolution NxM");
    c_reg->add_option("--out", out, "grid CSV output file");

    CLI::App* c_kappa = app.add_subcommand("kappa", "condition number of the p-th root");
    add_type(c_kappa);
    c_kappa->add_option("--mode", mode, "minimax|pade")
        ->check(CLI::IsMember({"minimax", "pade"}));
    c_kappa->add_option("--delta", delta, "termination tolerance");
    c_kappa->add_option("--in", in, "input Matrix Market file")->required();

    app.add_subcommand("selftest", "run the built-in verification suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        if (app.got_subcommand("root"))
            return cmd_root(in, out, out_inverse, trace_path, p, m, l, mode, delta);
        if (app.got_subcommand("minimax")) return cmd_minimax(m, l, p, alpha);
        if (app.got_subcommand("pade")) return cmd_pade(m, l, p);
        if (app.got_subcommand("table")) return cmd_table(m, l, p, eps0, K);
        if (app.got_subcommand("regions"))
            return cmd_regions(k, delta, alpha, m, l, p, mode, rect, res_str, out);
        if (app.got_subcommand("kappa")) return cmd_kappa(in, p, m, l, mode, delta);
        if (app.got_subcommand("selftest")) return cmd_selftest();
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DivergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDivergence;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSolver;
    }
    return kExitUsage;
}
