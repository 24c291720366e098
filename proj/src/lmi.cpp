#include "fomas/lmi.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <iomanip>
#include <limits>

namespace fomas {

void AffineLmiSystem::add_block(const Mat& f0, const std::vector<Mat>& coeffs) {
    const int b = add_empty_block(static_cast<int>(f0.rows()));
    block_add_constant(b, f0);
    for (std::size_t k = 0; k < coeffs.size(); ++k)
        if (coeffs[k].size() > 0 && coeffs[k].cwiseAbs().maxCoeff() > 0.0)
            block_add_coeff(b, static_cast<int>(k), coeffs[k]);
}

int AffineLmiSystem::add_empty_block(int dim) {
    Block blk;
    blk.dim = dim;
    blk.f0 = Mat::Zero(dim, dim);
    blocks_.push_back(std::move(blk));
    return static_cast<int>(blocks_.size()) - 1;
}

void AffineLmiSystem::block_add_constant(int block, const Mat& m) {
    Block& blk = blocks_.at(static_cast<std::size_t>(block));
    if (m.rows() != blk.dim || m.cols() != blk.dim)
        throw std::invalid_argument("block_add_constant: dimension mismatch");
    blk.f0 += 0.5 * (m + m.transpose());
}

void AffineLmiSystem::block_add_coeff(int block, int var, const Mat& m) {
    Block& blk = blocks_.at(static_cast<std::size_t>(block));
    if (m.rows() != blk.dim || m.cols() != blk.dim)
        throw std::invalid_argument("block_add_coeff: dimension mismatch");
    if (var < 0 || var >= n_vars_)
        throw std::invalid_argument("block_add_coeff: variable index out of range");
    const Mat s = 0.5 * (m + m.transpose());
    for (int r = 0; r < blk.dim; ++r)
        for (int c = r; c < blk.dim; ++c)
            if (s(r, c) != 0.0)
                blk.entries.push_back(Entry{var, r, c, s(r, c)});
}

Mat AffineLmiSystem::eval_block(int block, const Vec& theta) const {
    const Block& blk = blocks_.at(static_cast<std::size_t>(block));
    Mat f = blk.f0;
    for (const Entry& e : blk.entries) {
        const double v = theta(e.var) * e.value;
        f(e.row, e.col) += v;
        if (e.row != e.col)
            f(e.col, e.row) += v;
    }
    return f;
}

bool AffineLmiSystem::homogeneous() const {
    for (const Block& blk : blocks_)
        if (blk.f0.cwiseAbs().maxCoeff() > 0.0)
            return false;
    return true;
}

void AffineLmiSystem::validate() const {
    for (const Block& blk : blocks_) {
        if (!blk.f0.allFinite())
            throw std::invalid_argument("AffineLmiSystem: non-finite constant block");
        for (const Entry& e : blk.entries) {
            if (!std::isfinite(e.value))
                throw std::invalid_argument("AffineLmiSystem: non-finite coefficient");
            if (e.var < 0 || e.var >= n_vars_)
                throw std::invalid_argument("AffineLmiSystem: variable index out of range");
        }
    }
}

void AffineLmiSystem::dump(const std::string& path) const {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open dump file: " + path);
    out << std::setprecision(17);
    out << "n_vars " << n_vars_ << " blocks " << blocks_.size() << "\n";
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
        const Block& blk = blocks_[b];
        out << "block " << b << " dim " << blk.dim << "\n";
        out << "F0";
        for (int r = 0; r < blk.dim; ++r)
            for (int c = 0; c < blk.dim; ++c)
                out << " " << blk.f0(r, c);
        out << "\n";
        for (int k = 0; k < n_vars_; ++k) {
            Mat fk = Mat::Zero(blk.dim, blk.dim);
            bool any = false;
            for (const Entry& e : blk.entries) {
                if (e.var != k)
                    continue;
                any = true;
                fk(e.row, e.col) = e.value;
                fk(e.col, e.row) = e.value;
            }
            if (!any)
                continue;
            out << "F" << (k + 1);
            for (int r = 0; r < blk.dim; ++r)
                for (int c = 0; c < blk.dim; ++c)
                    out << " " << fk(r, c);
            out << "\n";
        }
    }
}

double eigen_margin(const AffineLmiSystem& sys, const Vec& point) {
    if (point.size() != sys.n_vars())
        throw std::invalid_argument("eigen_margin: point dimension mismatch");
    double margin = -std::numeric_limits<double>::infinity();
    for (int b = 0; b < static_cast<int>(sys.blocks().size()); ++b)
        margin = std::max(margin, max_eig_sym(sys.eval_block(b, point)));
    return margin;
}

AffineLmiSystem homotopy_blend(const AffineLmiSystem& f1, const AffineLmiSystem& f2, double eta) {
    if (f1.n_vars() != f2.n_vars() || f1.blocks().size() != f2.blocks().size())
        throw std::invalid_argument("homotopy_blend: systems have different shapes");
    if (eta < 0.0 || eta > 1.0)
        throw std::invalid_argument("homotopy_blend: eta must lie in [0,1]");
    AffineLmiSystem out(f1.n_vars());
    out.var_labels() = f1.var_labels();
    for (std::size_t b = 0; b < f1.blocks().size(); ++b) {
        const auto& b1 = f1.blocks()[b];
        const auto& b2 = f2.blocks()[b];
        if (b1.dim != b2.dim)
            throw std::invalid_argument("homotopy_blend: block dimension mismatch");
        const int idx = out.add_empty_block(b1.dim);
        out.block_add_constant(idx, (1.0 - eta) * b1.f0 + eta * b2.f0);
        // rebuild per-variable dense slices so coefficients land symmetrized
        auto scaled = [&](const AffineLmiSystem::Block& src, double w) {
            std::vector<std::vector<AffineLmiSystem::Entry>> per_var(
                static_cast<std::size_t>(out.n_vars()));
            for (const auto& e : src.entries)
                per_var[static_cast<std::size_t>(e.var)].push_back(e);
            Mat tmp = Mat::Zero(src.dim, src.dim);
            for (int k = 0; k < out.n_vars(); ++k) {
                if (per_var[static_cast<std::size_t>(k)].empty())
                    continue;
                tmp.setZero();
                for (const auto& e : per_var[static_cast<std::size_t>(k)]) {
                    tmp(e.row, e.col) += e.value;
                    if (e.row != e.col)
                        tmp(e.col, e.row) += e.value;
                }
                out.block_add_coeff(idx, k, w * tmp);
            }
        };
        if (eta < 1.0)
            scaled(b1, 1.0 - eta);
        if (eta > 0.0)
            scaled(b2, eta);
    }
    return out;
}

namespace {

struct SmoothEval {
    double value = 0.0;            // tau-smoothed max eigenvalue
    double margin = 0.0;           // exact max eigenvalue over blocks
    std::vector<Vec> eigenvalues;  // per block
};

SmoothEval eval_smooth(const AffineLmiSystem& sys, const Vec& theta, double tau) {
    SmoothEval ev;
    ev.eigenvalues.reserve(sys.blocks().size());
    double vmax = -std::numeric_limits<double>::infinity();
    for (int b = 0; b < static_cast<int>(sys.blocks().size()); ++b) {
        Eigen::SelfAdjointEigenSolver<Mat> es(sys.eval_block(b, theta), Eigen::EigenvaluesOnly);
        ev.eigenvalues.push_back(es.eigenvalues());
        vmax = std::max(vmax, es.eigenvalues().maxCoeff());
    }
    ev.margin = vmax;
    double z = 0.0;
    for (const Vec& lam : ev.eigenvalues)
        for (Eigen::Index i = 0; i < lam.size(); ++i)
            z += std::exp((lam(i) - vmax) / tau);
    ev.value = vmax + tau * std::log(z);
    return ev;
}

// Gradient of the smoothed objective at theta; also returns the exact margin.
double grad_smooth(const AffineLmiSystem& sys, const Vec& theta, double tau, Vec& grad,
                   double& value) {
    grad.setZero(sys.n_vars());
    std::vector<Eigen::SelfAdjointEigenSolver<Mat>> solvers;
    solvers.reserve(sys.blocks().size());
    double vmax = -std::numeric_limits<double>::infinity();
    for (int b = 0; b < static_cast<int>(sys.blocks().size()); ++b) {
        solvers.emplace_back(sys.eval_block(b, theta));
        vmax = std::max(vmax, solvers.back().eigenvalues().maxCoeff());
    }
    double z = 0.0;
    for (const auto& es : solvers)
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
            z += std::exp((es.eigenvalues()(i) - vmax) / tau);
    value = vmax + tau * std::log(z);

    for (std::size_t b = 0; b < sys.blocks().size(); ++b) {
        const auto& es = solvers[b];
        const Vec& lam = es.eigenvalues();
        Vec w(lam.size());
        for (Eigen::Index i = 0; i < lam.size(); ++i)
            w(i) = std::exp((lam(i) - vmax) / tau) / z;
        // Weighted spectral projector G = V diag(w) V^T.
        const Mat g = es.eigenvectors() * w.asDiagonal() * es.eigenvectors().transpose();
        for (const auto& e : sys.blocks()[b].entries) {
            const double contrib =
                (e.row == e.col) ? e.value * g(e.row, e.row) : 2.0 * e.value * g(e.row, e.col);
            grad(e.var) += contrib;
        }
    }
    return vmax;
}

}  // namespace

FeasibilityResult solve(const AffineLmiSystem& sys, const SolveOptions& opts) {
    sys.validate();
    if (opts.eps_feas <= 0.0)
        throw std::invalid_argument("solve: eps_feas must be positive");

    FeasibilityResult res;
    const int n = sys.n_vars();

    if (sys.blocks().empty()) {
        res.status = SolveStatus::feasible;
        res.point = Vec::Zero(n);
        res.margin = -std::numeric_limits<double>::infinity();
        return res;
    }

    Vec theta = opts.warm_start.size() == n ? opts.warm_start : Vec::Zero(n);
    if (n == 0) {
        res.point = theta;
        res.margin = eigen_margin(sys, theta);
        res.status = res.margin <= -opts.eps_feas ? SolveStatus::feasible
                                                  : SolveStatus::infeasible_certificate_absent;
        return res;
    }

    const double target = std::min(opts.target_margin, -opts.eps_feas);
    const bool homogeneous = sys.homogeneous();

    Vec best_theta = theta;
    double best_margin = eigen_margin(sys, theta);
    auto consider = [&](const Vec& t, double margin) {
        if (margin < best_margin) {
            best_margin = margin;
            best_theta = t;
        }
    };

    int n_eigs = 0;
    for (const auto& blk : sys.blocks())
        n_eigs += blk.dim;

    // Smoothing schedule: coarse to fine. The final level resolves margins
    // around the target without drowning them in the log-sum-exp bias.
    const double tau_min =
        std::max(1e-9, std::abs(target) / (20.0 * std::log(2.0 + static_cast<double>(n_eigs))));
    std::vector<double> taus;
    for (double tau = 0.1; tau > tau_min * 5.0; tau *= 0.2)
        taus.push_back(tau);
    taus.push_back(tau_min);

    const int mem = 8;
    int total_iters = 0;
    int fevals = 0;
    const int max_fevals = 6 * opts.max_iter;
    bool budget_exhausted = false;

    for (double tau : taus) {
        if (best_margin <= target || budget_exhausted)
            break;
        std::deque<Vec> s_hist, y_hist;
        Vec grad(n);
        double f = 0.0;
        grad_smooth(sys, theta, tau, grad, f);
        ++fevals;

        int stall = 0;
        while (total_iters < opts.max_iter && fevals < max_fevals) {
            const double gnorm = grad.norm();
            if (gnorm <= 1e-10 * std::max(1.0, std::abs(f)))
                break;

            // L-BFGS two-loop recursion.
            Vec d = -grad;
            std::vector<double> alpha_hist(s_hist.size());
            for (int i = static_cast<int>(s_hist.size()) - 1; i >= 0; --i) {
                const double rho = 1.0 / y_hist[i].dot(s_hist[i]);
                alpha_hist[i] = rho * s_hist[i].dot(d);
                d -= alpha_hist[i] * y_hist[i];
            }
            if (!s_hist.empty()) {
                const double gamma =
                    s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
                d *= gamma;
            }
            for (std::size_t i = 0; i < s_hist.size(); ++i) {
                const double rho = 1.0 / y_hist[i].dot(s_hist[i]);
                const double beta = rho * y_hist[i].dot(d);
                d += (alpha_hist[i] - beta) * s_hist[i];
            }
            if (d.dot(grad) > -1e-14 * d.norm() * gnorm)
                d = -grad;

            // Armijo backtracking.
            const double slope = d.dot(grad);
            double step = 1.0;
            bool accepted = false;
            Vec cand;
            SmoothEval ev;
            for (int ls = 0; ls < 50 && fevals < max_fevals; ++ls) {
                cand = theta + step * d;
                ev = eval_smooth(sys, cand, tau);
                ++fevals;
                consider(cand, ev.margin);
                if (ev.value <= f + 1e-4 * step * slope) {
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if (!accepted)
                break;

            Vec grad_new(n);
            double f_new = 0.0;
            grad_smooth(sys, cand, tau, grad_new, f_new);
            ++fevals;
            ++total_iters;

            const Vec s = cand - theta;
            const Vec y = grad_new - grad;
            if (s.dot(y) > 1e-12 * s.norm() * y.norm()) {
                s_hist.push_back(s);
                y_hist.push_back(y);
                if (static_cast<int>(s_hist.size()) > mem) {
                    s_hist.pop_front();
                    y_hist.pop_front();
                }
            }
            const double improvement = f - f_new;
            theta = cand;
            grad = grad_new;
            f = f_new;

            if (best_margin <= target)
                break;
            stall = improvement <= 1e-14 * std::max(1.0, std::abs(f)) ? stall + 1 : 0;
            if (stall >= 5)
                break;
        }
        budget_exhausted = total_iters >= opts.max_iter || fevals >= max_fevals;
    }

    // A homogeneous feasible system certifies at any depth by scaling.
    if (homogeneous && best_margin < 0.0 && best_margin > target) {
        const Vec scaled = best_theta * (target / best_margin);
        const double scaled_margin = eigen_margin(sys, scaled);
        consider(scaled, scaled_margin);
    }

    res.point = best_theta;
    res.margin = eigen_margin(sys, best_theta);
    res.iterations = total_iters;
    if (res.margin <= -opts.eps_feas)
        res.status = SolveStatus::feasible;
    else
        res.status =
            budget_exhausted ? SolveStatus::max_iter : SolveStatus::infeasible_certificate_absent;
    return res;
}

FeasibilityResult solve(const AffineLmiSystem& sys, double eps_feas, int max_iter) {
    SolveOptions opts;
    opts.eps_feas = eps_feas;
    opts.max_iter = max_iter;
    return solve(sys, opts);
}

}  // namespace fomas
