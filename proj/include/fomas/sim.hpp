#pragma once

#include "fomas/mat_core.hpp"

#include <vector>

namespace fomas {

struct SimulationConfig {
    enum class Scheme { gl_implicit };

    double step = 1e-3;
    double t_end = 30.0;
    Scheme scheme = Scheme::gl_implicit;
};

/// Uniform-grid trajectory; column k of `states` is the full state at times(k)
/// (agent states first, controller states appended).
struct Trajectory {
    Vec times;
    Mat states;
};

/// Consensus quality indices of one error signal.
struct MetricsReport {
    double ise = 0.0;
    double iae = 0.0;
    double itse = 0.0;
    double itae = 0.0;
};

/// Grunwald-Letnikov binomial weights: w_0 = 1, w_j = w_{j-1} (1 - (alpha+1)/j).
std::vector<double> gl_weights(double alpha, int count);

/// Integrates D^alpha y = A y with Caputo initial data: the implicit
/// Grunwald-Letnikov recursion on the shifted variable y - y0, with full
/// memory and short starting-weight corrections that restore uniform
/// first-order accuracy through the t^alpha initial layer.
Trajectory simulate(const Mat& a, const Vec& x0, double alpha, const SimulationConfig& cfg);

/// E_alpha(z) = sum_k z^k / Gamma(alpha k + 1), |z| <= 5.
double mittag_leffler(double alpha, double z, double tol = 1e-12);

/// Lanczos approximation of Gamma(x) for x > 0.
double gamma_function(double x);

/// Per-agent deviation-from-mean signals: row i holds
/// e_i(t) = || x_i(t) - mean_j x_j(t) ||_2. Controller states are ignored.
Mat consensus_error(const Trajectory& traj, int n, int n_agents);

/// Trapezoidal ISE / IAE / ITSE / ITAE of one error signal on the grid.
MetricsReport metrics(const Vec& error, const Vec& times);

}  // namespace fomas
