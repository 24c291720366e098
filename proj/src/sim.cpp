#include "fomas/sim.hpp"

#include <Eigen/LU>

#include <cmath>
#include <numbers>

namespace fomas {

std::vector<double> gl_weights(double alpha, int count) {
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw std::invalid_argument("gl_weights: alpha must lie in (0,1]");
    if (count < 1)
        throw std::invalid_argument("gl_weights: count must be positive");
    std::vector<double> w(static_cast<std::size_t>(count));
    w[0] = 1.0;
    for (int j = 1; j < count; ++j)
        w[static_cast<std::size_t>(j)] =
            w[static_cast<std::size_t>(j - 1)] * (1.0 - (alpha + 1.0) / static_cast<double>(j));
    return w;
}

double gamma_function(double x) {
    if (!(x > 0.0))
        throw std::invalid_argument("gamma_function: requires x > 0");
    // Lanczos, g = 7, n = 9.
    static const double coeff[9] = {
        0.99999999999980993,  676.5203681218851,   -1259.1392167224028,
        771.32342877765313,   -176.61502916214059, 12.507343278686905,
        -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
    if (x < 0.5)  // reflection, unused for the series arguments but kept total
        return std::numbers::pi / (std::sin(std::numbers::pi * x) * gamma_function(1.0 - x));
    const double z = x - 1.0;
    double acc = coeff[0];
    for (int i = 1; i < 9; ++i)
        acc += coeff[i] / (z + static_cast<double>(i));
    const double t = z + 7.5;
    return std::sqrt(2.0 * std::numbers::pi) * std::pow(t, z + 0.5) * std::exp(-t) * acc;
}

double mittag_leffler(double alpha, double z, double tol) {
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw std::invalid_argument("mittag_leffler: alpha must lie in (0,1]");
    if (std::abs(z) > 5.0)
        throw std::invalid_argument("mittag_leffler: |z| must not exceed 5");
    double sum = 0.0;
    double zk = 1.0;
    for (int k = 0; k < 10000; ++k) {
        const double term = zk / gamma_function(alpha * static_cast<double>(k) + 1.0);
        sum += term;
        if (k > 2 && std::abs(term) < tol)
            return sum;
        zk *= z;
    }
    throw std::runtime_error("mittag_leffler: series did not reach tolerance");
}

namespace {

// Starting weights sigma_{k,1}, sigma_{k,2} making the shifted GL rule exact
// on t^alpha (and t^{2alpha} once two history points exist). s1/s2 are the
// plain-rule values sum_j w_j (k-j)^{p alpha}. The second correction is only
// valid while its weight decays (2alpha < alpha + 1); at alpha = 1 both
// corrections vanish and the scheme is the plain implicit recursion.
void starting_weights(double alpha, int k, double s1, double s2, double& sig1, double& sig2) {
    const double g1 = gamma_function(alpha + 1.0);
    if (k == 1 || alpha >= 1.0 - 1e-12) {
        sig1 = g1 - s1;
        sig2 = 0.0;
        return;
    }
    const double g2 = gamma_function(2.0 * alpha + 1.0);
    const double rhs1 = g1 - s1;
    const double rhs2 = g2 / g1 * std::pow(static_cast<double>(k), alpha) - s2;
    const double p1 = std::pow(2.0, alpha);
    const double p2 = std::pow(2.0, 2.0 * alpha);
    const double det = p2 - p1;
    sig2 = (rhs2 - rhs1) / det;
    sig1 = rhs1 - p1 * sig2;
}

}  // namespace

Trajectory simulate(const Mat& a, const Vec& x0, double alpha, const SimulationConfig& cfg) {
    if (a.rows() != a.cols() || a.rows() != x0.size())
        throw std::invalid_argument("simulate: dimension mismatch between A and x0");
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw std::invalid_argument("simulate: alpha must lie in (0,1]");
    if (!(cfg.step > 0.0) || !(cfg.t_end >= cfg.step))
        throw std::invalid_argument("simulate: need 0 < step <= t_end");
    const long steps = std::lround(cfg.t_end / cfg.step);
    if (steps > 10'000'000)
        throw std::invalid_argument("simulate: more than 1e7 steps requested");

    const int dim = static_cast<int>(a.rows());
    const int k_max = static_cast<int>(steps);
    const double h = cfg.step;
    const double ha = std::pow(h, -alpha);

    const std::vector<double> w = gl_weights(alpha, k_max + 1);
    Vec w_vec(k_max + 1);
    // Reversed weights so the memory sum is one contiguous matrix-vector product.
    Vec w_rev(k_max + 1);
    for (int j = 0; j <= k_max; ++j) {
        w_vec(j) = w[static_cast<std::size_t>(j)];
        w_rev(k_max - j) = w[static_cast<std::size_t>(j)];
    }

    // Reversed grids of t^alpha and t^{2alpha} feeding the starting weights.
    Vec pow1_rev(k_max + 1), pow2_rev(k_max + 1);
    for (int m = 0; m <= k_max; ++m) {
        pow1_rev(k_max - m) = std::pow(static_cast<double>(m), alpha);
        pow2_rev(k_max - m) = std::pow(static_cast<double>(m), 2.0 * alpha);
    }

    auto make_step_solver = [&](double diag_scale) {
        Mat lhs = diag_scale * ha * Mat::Identity(dim, dim) - a;
        Eigen::FullPivLU<Mat> lu(lhs);
        if (!lu.isInvertible())
            throw std::runtime_error(
                "simulate: implicit step matrix singular (h^-alpha matches an eigenvalue of A); "
                "reduce the step size");
        return lu;
    };

    Trajectory traj;
    traj.times = Vec::LinSpaced(k_max + 1, 0.0, h * static_cast<double>(k_max));
    traj.states = Mat::Zero(dim, k_max + 1);
    traj.states.col(0) = x0;

    Mat u = Mat::Zero(dim, k_max + 1);  // shifted states y - y0
    const Vec a_x0 = a * x0;
    const Eigen::FullPivLU<Mat> lu_plain = make_step_solver(1.0);

    double sig1 = 0.0, sig2 = 0.0;
    for (int k = 1; k <= k_max; ++k) {
        const double s1 = w_vec.head(k + 1).dot(pow1_rev.segment(k_max - k, k + 1));
        const double s2 = w_vec.head(k + 1).dot(pow2_rev.segment(k_max - k, k + 1));
        starting_weights(alpha, k, s1, s2, sig1, sig2);

        // Memory sum over known history: sum_{j=1..k-1} w_j u_{k-j}.
        Vec conv = Vec::Zero(dim);
        if (k >= 2) {
            conv.noalias() = u.middleCols(1, k - 1) * w_rev.segment(k_max - k + 1, k - 1);
            conv += sig1 * u.col(1);
        }
        if (k >= 3)
            conv += sig2 * u.col(2);

        const Vec rhs = a_x0 - ha * conv;
        // Steps 1 and 2 carry a starting weight on the unknown state.
        if (k == 1)
            u.col(k) = make_step_solver(1.0 + sig1).solve(rhs);
        else if (k == 2)
            u.col(k) = make_step_solver(1.0 + sig2).solve(rhs);
        else
            u.col(k) = lu_plain.solve(rhs);
        traj.states.col(k) = u.col(k) + x0;
        if (!traj.states.col(k).allFinite())
            throw std::runtime_error("simulate: state diverged to non-finite values at step " +
                                     std::to_string(k));
    }
    return traj;
}

Mat consensus_error(const Trajectory& traj, int n, int n_agents) {
    if (traj.states.rows() < static_cast<Eigen::Index>(n) * n_agents)
        throw std::invalid_argument("consensus_error: trajectory narrower than N*n");
    const Eigen::Index steps = traj.states.cols();
    Mat err(n_agents, steps);
    for (Eigen::Index t = 0; t < steps; ++t) {
        Vec mean = Vec::Zero(n);
        for (int i = 0; i < n_agents; ++i)
            mean += traj.states.col(t).segment(i * n, n);
        mean /= static_cast<double>(n_agents);
        for (int i = 0; i < n_agents; ++i)
            err(i, t) = (traj.states.col(t).segment(i * n, n) - mean).norm();
    }
    return err;
}

MetricsReport metrics(const Vec& error, const Vec& times) {
    if (error.size() != times.size() || error.size() < 2)
        throw std::invalid_argument("metrics: need matching error/time grids of length >= 2");
    MetricsReport r;
    for (Eigen::Index k = 0; k + 1 < times.size(); ++k) {
        const double dt = times(k + 1) - times(k);
        auto trap = [dt](double f0, double f1) { return 0.5 * dt * (f0 + f1); };
        const double e0 = error(k), e1 = error(k + 1);
        const double t0 = times(k), t1 = times(k + 1);
        r.ise += trap(e0 * e0, e1 * e1);
        r.iae += trap(std::abs(e0), std::abs(e1));
        r.itse += trap(t0 * e0 * e0, t1 * e1 * e1);
        r.itae += trap(t0 * std::abs(e0), t1 * std::abs(e1));
    }
    return r;
}

}  // namespace fomas
