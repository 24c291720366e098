#include "fomas/synthesis.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace fomas {

namespace {

struct Context {
    bool robust = false;
    int n_cl = 0;
    int m = 0;   // (N-1) m0
    int n2 = 0;  // 2 n_cl
    int m2 = 0;  // 2 m
    KDecomposition decomp;
    Mat m_chan;  // n_cl x m
    Mat r_chan;  // m x n_cl
    Mat j_hat;   // Sym{I_2 (x) I_{N-1} (x) J}, m2 x m2
    ThetaBlocks tb;
    VarLayout xlayout;
    int x_groups[4] = {0, 1, 2, 3};
    int mu_group = -1;
    VarLayout klayout;
    double mu_min = 1e-6;
};

Context make_context(const FomasProblem& p, bool nominal, double mu_min) {
    p.validate();
    Context ctx;
    ctx.robust = !nominal && p.uncertainty.has_value();
    ctx.n_cl = p.closed_loop_dim();
    ctx.n2 = 2 * ctx.n_cl;
    ctx.decomp = k_decomposition(p);
    ctx.tb = theta_blocks(p.alpha);
    ctx.mu_min = mu_min;

    const int N = p.n_agents();
    if (ctx.robust) {
        const UncertaintyModel& u = *p.uncertainty;
        ctx.m = (N - 1) * u.m0();
        ctx.m2 = 2 * ctx.m;
        const Mat eye = Mat::Identity(N - 1, N - 1);
        ctx.m_chan = Mat::Zero(ctx.n_cl, ctx.m);
        ctx.m_chan.topRows((N - 1) * p.dynamics.n()) = kron(eye, u.left_factor);
        ctx.r_chan = Mat::Zero(ctx.m, ctx.n_cl);
        ctx.r_chan.leftCols((N - 1) * p.dynamics.n()) = kron(eye, u.right_factor);
        ctx.j_hat = sym(kron(Mat::Identity(2 * (N - 1), 2 * (N - 1)), u.j_matrix));
    }

    ctx.xlayout = synthesis_x_layout(ctx.n_cl, ctx.robust);
    if (ctx.robust)
        ctx.mu_group = 4;
    ctx.klayout.add_masked("K", ctx.decomp.mask);
    return ctx;
}

const Mat& theta_of(const Context& ctx, int g) {
    switch (g) {
        case 0: return ctx.tb.t11;
        case 1: return ctx.tb.t12;
        case 2: return ctx.tb.t21;
        default: return ctx.tb.t22;
    }
}

// Consensus inequality with the X's (and mu) as variables and a fixed
// closed-loop matrix.
AffineLmiSystem assemble_x_system(const Context& ctx, const Mat& a_mat) {
    AffineLmiSystem sys(ctx.xlayout.n_vars());
    sys.var_labels() = ctx.xlayout.labels();
    const int n_cl = ctx.n_cl, n2 = ctx.n2, m2 = ctx.m2;
    const int dim = ctx.robust ? n2 + 2 * m2 : n2;

    const int main_blk = sys.add_empty_block(dim);
    if (ctx.robust) {
        Mat constant = Mat::Zero(dim, dim);
        for (int g = 0; g < 4; ++g) {
            const Mat tm = kron(theta_of(ctx, g), ctx.m_chan);  // n2 x m2
            constant.block(0, n2, n2, m2) += tm;
            constant.block(n2, 0, m2, n2) += tm.transpose();
            constant.block(n2 + m2, n2 + m2, m2, m2) -= ctx.j_hat;
        }
        sys.block_add_constant(main_blk, constant);

        Mat mu_coeff = Mat::Zero(dim, dim);
        mu_coeff.block(n2, n2, m2, m2) = -4.0 * Mat::Identity(m2, m2);
        mu_coeff.block(n2, n2 + m2, m2, m2) = 4.0 * Mat::Identity(m2, m2);
        mu_coeff.block(n2 + m2, n2, m2, m2) = 4.0 * Mat::Identity(m2, m2);
        mu_coeff.block(n2 + m2, n2 + m2, m2, m2) = -4.0 * Mat::Identity(m2, m2);
        sys.block_add_coeff(main_blk, ctx.xlayout.group(ctx.mu_group).offset, mu_coeff);
    }
    const Mat eye2 = Mat::Identity(2, 2);
    for (int g = 0; g < 4; ++g) {
        const Mat& theta = theta_of(ctx, g);
        ctx.xlayout.for_each_basis(g, [&](int var, const Mat& basis) {
            Mat coeff = Mat::Zero(dim, dim);
            coeff.block(0, 0, n2, n2) = sym(kron(theta, a_mat * basis));
            if (ctx.robust) {
                const Mat xr = kron(eye2, (basis.transpose() * ctx.r_chan.transpose()).eval());
                coeff.block(0, n2 + m2, n2, m2) += xr;
                coeff.block(n2 + m2, 0, m2, n2) += xr.transpose();
            }
            sys.block_add_coeff(main_blk, var, coeff);
        });
    }

    // Positivity pairs [[X_k1, X_k2], [-X_k2, X_k1]] > 0, as -pair < 0.
    for (int k = 0; k < 2; ++k) {
        const int blk = sys.add_empty_block(n2);
        ctx.xlayout.for_each_basis(2 * k, [&](int var, const Mat& basis) {
            Mat coeff = Mat::Zero(n2, n2);
            coeff.topLeftCorner(n_cl, n_cl) = -basis;
            coeff.bottomRightCorner(n_cl, n_cl) = -basis;
            sys.block_add_coeff(blk, var, coeff);
        });
        ctx.xlayout.for_each_basis(2 * k + 1, [&](int var, const Mat& basis) {
            Mat coeff = Mat::Zero(n2, n2);
            coeff.topRightCorner(n_cl, n_cl) = -basis;
            coeff.bottomLeftCorner(n_cl, n_cl) = basis;
            sys.block_add_coeff(blk, var, coeff);
        });
    }

    if (ctx.robust) {
        const int blk = sys.add_empty_block(1);
        sys.block_add_constant(blk, Mat::Constant(1, 1, ctx.mu_min));
        sys.block_add_coeff(blk, ctx.xlayout.group(ctx.mu_group).offset,
                            Mat::Constant(1, 1, -1.0));
    }
    return sys;
}

// Consensus inequality with the free K entries as variables, X's and mu fixed.
// a_base is the K-independent part of the closed loop; when with_k_terms is
// false the system is constant in K (the F1 side of a K-step blend).
AffineLmiSystem assemble_k_system(const Context& ctx, const Mat& a_base, bool with_k_terms,
                                  const Mat x_fixed[4], double mu_fixed) {
    AffineLmiSystem sys(ctx.klayout.n_vars());
    sys.var_labels() = ctx.klayout.labels();
    const int n_cl = ctx.n_cl, n2 = ctx.n2, m2 = ctx.m2;
    const int dim = ctx.robust ? n2 + 2 * m2 : n2;
    const Mat eye2 = Mat::Identity(2, 2);

    const int main_blk = sys.add_empty_block(dim);
    Mat constant = Mat::Zero(dim, dim);
    for (int g = 0; g < 4; ++g) {
        const Mat& theta = theta_of(ctx, g);
        constant.block(0, 0, n2, n2) += sym(kron(theta, a_base * x_fixed[g]));
        if (ctx.robust) {
            const Mat tm = kron(theta, ctx.m_chan);
            constant.block(0, n2, n2, m2) += tm;
            constant.block(n2, 0, m2, n2) += tm.transpose();
            const Mat xr =
                kron(eye2, (x_fixed[g].transpose() * ctx.r_chan.transpose()).eval());
            constant.block(0, n2 + m2, n2, m2) += xr;
            constant.block(n2 + m2, 0, m2, n2) += xr.transpose();
            constant.block(n2, n2, m2, m2) -= mu_fixed * Mat::Identity(m2, m2);
            constant.block(n2, n2 + m2, m2, m2) += mu_fixed * Mat::Identity(m2, m2);
            constant.block(n2 + m2, n2, m2, m2) += mu_fixed * Mat::Identity(m2, m2);
            constant.block(n2 + m2, n2 + m2, m2, m2) -=
                ctx.j_hat + mu_fixed * Mat::Identity(m2, m2);
        }
    }
    sys.block_add_constant(main_blk, constant);

    if (with_k_terms) {
        ctx.klayout.for_each_basis(0, [&](int var, const Mat& basis) {
            const Mat bkc = ctx.decomp.b_k * basis * ctx.decomp.c_k;
            Mat coeff = Mat::Zero(dim, dim);
            for (int g = 0; g < 4; ++g)
                coeff.block(0, 0, n2, n2) += sym(kron(theta_of(ctx, g), bkc * x_fixed[g]));
            sys.block_add_coeff(main_blk, var, coeff);
        });
    }

    for (int k = 0; k < 2; ++k) {
        const int blk = sys.add_empty_block(n2);
        Mat pair = Mat::Zero(n2, n2);
        pair.topLeftCorner(n_cl, n_cl) = -x_fixed[2 * k];
        pair.bottomRightCorner(n_cl, n_cl) = -x_fixed[2 * k];
        pair.topRightCorner(n_cl, n_cl) = -x_fixed[2 * k + 1];
        pair.bottomLeftCorner(n_cl, n_cl) = x_fixed[2 * k + 1];
        sys.block_add_constant(blk, pair);
    }
    if (ctx.robust) {
        const int blk = sys.add_empty_block(1);
        sys.block_add_constant(blk, Mat::Constant(1, 1, ctx.mu_min - mu_fixed));
    }
    return sys;
}

}  // namespace

VarLayout synthesis_x_layout(int n_cl, bool robust) {
    VarLayout layout;
    layout.add_symmetric("X11", n_cl);
    layout.add_skew("X12", n_cl);
    layout.add_symmetric("X21", n_cl);
    layout.add_skew("X22", n_cl);
    if (robust)
        layout.add_scalar("mu");
    return layout;
}

AffineLmiSystem theorem1_constraints(const FomasProblem& p, const DecentralizedController& k,
                                     double mu_min) {
    if (!p.uncertainty)
        throw std::invalid_argument("theorem1_constraints: problem has no uncertainty model");
    const Context ctx = make_context(p, /*nominal=*/false, mu_min);
    return assemble_x_system(ctx, closed_loop(p, k).a_cl);
}

AffineLmiSystem corollary1_constraints(const FomasProblem& p, const DecentralizedController& k) {
    const Context ctx = make_context(p, /*nominal=*/true, 0.0);
    return assemble_x_system(ctx, closed_loop(p, k).a_cl);
}

AffineLmiSystem f1_constraints(const FomasProblem& p, const Mat& q, bool nominal, double mu_min) {
    const Context ctx = make_context(p, nominal, mu_min);
    if (q.rows() != ctx.n_cl || q.cols() != ctx.n_cl)
        throw std::invalid_argument("f1_constraints: Q must be n_cl x n_cl");
    const Mat shifted = ctx.decomp.a_k - q;
    const Spectrum eigs = spectrum(shifted);
    for (Eigen::Index i = 0; i < eigs.size(); ++i)
        if (eigs(i).real() >= 0.0)
            throw std::invalid_argument("f1_constraints: A_K - Q is not Hurwitz (eigenvalue with "
                                        "real part " + std::to_string(eigs(i).real()) + ")");
    return assemble_x_system(ctx, shifted);
}

AffineLmiSystem k_step_constraints(const FomasProblem& p, const Mat& x11, const Mat& x12,
                                   const Mat& x21, const Mat& x22, double mu_fixed, bool nominal,
                                   double mu_min) {
    const Context ctx = make_context(p, nominal, mu_min);
    const Mat x_fixed[4] = {x11, x12, x21, x22};
    for (const Mat& x : x_fixed)
        if (x.rows() != ctx.n_cl || x.cols() != ctx.n_cl)
            throw std::invalid_argument("k_step_constraints: X matrices must be n_cl x n_cl");
    return assemble_k_system(ctx, ctx.decomp.a_k, /*with_k_terms=*/true, x_fixed, mu_fixed);
}

SynthesisResult synthesize(const FomasProblem& p, const HomotopyConfig& cfg) {
    p.validate();
    if (cfg.t_steps < 1 || cfg.q_shift <= 0.0 || cfg.eps_feas <= 0.0)
        throw std::invalid_argument("synthesize: bad homotopy configuration");
    if (!is_connected(p.graph))
        throw std::runtime_error("insufficient connectivity: graph is not connected");

    const bool nominal = cfg.nominal || !p.uncertainty.has_value();
    const Context ctx = make_context(p, nominal, cfg.mu_min);
    const auto t_start = std::chrono::steady_clock::now();
    auto log_line = [&](int step, double eta, const char* sub, double margin) {
        if (!cfg.log)
            return;
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
        std::ostringstream os;
        os << "step " << step << " eta " << std::fixed << std::setprecision(4) << eta << " sub "
           << sub << " margin " << std::scientific << std::setprecision(3) << margin << " time "
           << std::fixed << std::setprecision(2) << secs << "s";
        *cfg.log << os.str() << "\n";
    };

    // eta = 0: plain LMI around the Hurwitz shift.
    const Mat q = ctx.decomp.a_k + cfg.q_shift * Mat::Identity(ctx.n_cl, ctx.n_cl);
    const AffineLmiSystem f1 = f1_constraints(p, q, nominal, cfg.mu_min);

    SolveOptions opts;
    opts.eps_feas = cfg.eps_feas;
    opts.max_iter = cfg.max_iter;
    FeasibilityResult sol = solve(f1, opts);
    if (sol.status != SolveStatus::feasible)
        throw std::runtime_error("homotopy stalled at eta = 0 (initial LMI not solved; margin " +
                                 std::to_string(sol.margin) + ")");

    SynthesisResult res;
    res.eta_trace.emplace_back(0.0, sol.margin);
    log_line(0, 0.0, "X", sol.margin);

    Vec x_point = sol.point;
    Mat x_fixed[4];
    for (int g = 0; g < 4; ++g)
        x_fixed[g] = ctx.xlayout.unpack(g, x_point);
    double mu_fixed = ctx.robust ? ctx.xlayout.unpack_scalar(ctx.mu_group, x_point) : 0.0;
    Vec k_point = Vec::Zero(ctx.klayout.n_vars());

    double eta_cur = 0.0;
    int step_idx = 0;

    // One continuation move: try the X-step at eta, then the K-step.
    auto advance_to = [&](double eta) -> bool {
        ++step_idx;
        const Mat k_mat = ctx.klayout.unpack(0, k_point);
        const DecentralizedController k_ctrl = controller_from_k(k_mat, p);
        const AffineLmiSystem f2x = nominal ? corollary1_constraints(p, k_ctrl)
                                            : theorem1_constraints(p, k_ctrl, cfg.mu_min);
        SolveOptions xo = opts;
        xo.warm_start = x_point;
        const FeasibilityResult solx = solve(homotopy_blend(f1, f2x, eta), xo);
        if (solx.status == SolveStatus::feasible) {
            x_point = solx.point;
            for (int g = 0; g < 4; ++g)
                x_fixed[g] = ctx.xlayout.unpack(g, x_point);
            if (ctx.robust)
                mu_fixed = ctx.xlayout.unpack_scalar(ctx.mu_group, x_point);
            res.eta_trace.emplace_back(eta, solx.margin);
            log_line(step_idx, eta, "X", solx.margin);
            return true;
        }
        const AffineLmiSystem f1k = assemble_k_system(ctx, ctx.decomp.a_k - q,
                                                      /*with_k_terms=*/false, x_fixed, mu_fixed);
        const AffineLmiSystem f2k =
            assemble_k_system(ctx, ctx.decomp.a_k, /*with_k_terms=*/true, x_fixed, mu_fixed);
        SolveOptions ko = opts;
        ko.warm_start = k_point;
        const FeasibilityResult solk = solve(homotopy_blend(f1k, f2k, eta), ko);
        if (solk.status == SolveStatus::feasible) {
            k_point = solk.point;
            res.eta_trace.emplace_back(eta, solk.margin);
            log_line(step_idx, eta, "K", solk.margin);
            return true;
        }
        return false;
    };

    for (int i = 1; i <= cfg.t_steps; ++i) {
        const double target = static_cast<double>(i) / static_cast<double>(cfg.t_steps);
        // Bisect toward the target when a direct move fails.
        std::function<bool(double, int)> reach = [&](double eta, int depth) -> bool {
            if (advance_to(eta)) {
                eta_cur = eta;
                return true;
            }
            if (depth >= cfg.max_refinements)
                return false;
            const double mid = 0.5 * (eta_cur + eta);
            if (!reach(mid, depth + 1))
                return false;
            return reach(eta, depth + 1);
        };
        if (!reach(target, 0)) {
            std::ostringstream os;
            os << "homotopy stalled at eta = " << std::setprecision(4) << eta_cur
               << " (best accepted margin " << std::scientific << res.eta_trace.back().second
               << ")";
            throw std::runtime_error(os.str());
        }
    }

    res.controller = controller_from_k(ctx.klayout.unpack(0, k_point), p);
    res.x11 = x_fixed[0];
    res.x12 = x_fixed[1];
    res.x21 = x_fixed[2];
    res.x22 = x_fixed[3];
    res.mu = mu_fixed;

    // Spectral post-verification over the nominal loop and the delta samples.
    const ClosedLoopSystem loop = closed_loop(p, res.controller);
    bool ok = spectral_stable(loop.a_cl, p.alpha);
    if (p.uncertainty && p.realizations) {
        for (const Mat& d : p.realizations->per_agent_delta)
            ok = ok && spectral_stable(perturbed_a_cl(loop, d), p.alpha);
        ok = ok && spectral_stable(perturbed_a_cl(loop, worst_case_delta(*p.realizations)),
                                   p.alpha);
    }
    res.robustly_stable = ok;
    return res;
}

}  // namespace fomas
