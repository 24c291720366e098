#include "fomas/uncertainty.hpp"

#include <Eigen/Eigenvalues>

#include <random>

namespace fomas {

namespace {
double min_sym_eig(const Mat& m) {
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.transpose()),
                                          Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

double spectral_norm(const Mat& m) {
    return Eigen::JacobiSVD<Mat>(m).singularValues().maxCoeff();
}
}  // namespace

Mat delta_from_z(const Mat& z, const Mat& j) {
    if (z.rows() != z.cols() || j.rows() != j.cols() || z.rows() != j.rows())
        throw std::invalid_argument("delta_from_z: Z and J must be square of equal dimension");
    const double j_min = min_sym_eig(2.0 * j);
    if (j_min <= 0.0)
        throw std::invalid_argument("delta_from_z: Sym{J} not positive definite (min eigenvalue " +
                                    std::to_string(j_min) + ")");
    const double z_min = min_sym_eig(2.0 * z);
    if (z_min < -1e-9)
        throw std::invalid_argument("delta_from_z: Sym{Z} not positive semidefinite "
                                    "(min eigenvalue " + std::to_string(z_min) + ")");
    const Mat lhs = Mat::Identity(z.rows(), z.cols()) + j * z;
    return lhs.transpose().partialPivLu().solve(z.transpose()).transpose();
}

Mat z_from_delta(const Mat& delta, const Mat& j) {
    if (delta.rows() != delta.cols() || delta.rows() != j.rows())
        throw std::invalid_argument("z_from_delta: delta and J must be square of equal dimension");
    const Mat lhs = Mat::Identity(j.rows(), j.cols()) - delta * j;
    return lhs.partialPivLu().solve(delta);
}

bool is_representable(const Mat& delta, const Mat& j, double tol) {
    const Mat lhs = Mat::Identity(j.rows(), j.cols()) - delta * j;
    if (std::abs(lhs.determinant()) < 1e-14)
        return false;
    return min_sym_eig(2.0 * z_from_delta(delta, j)) >= -2.0 * tol;
}

bool validate_model(const UncertaintyModel& m, std::string* reason) {
    auto fail = [&](const std::string& why) {
        if (reason)
            *reason = why;
        return false;
    };
    if (m.j_matrix.rows() != m.j_matrix.cols())
        return fail("J must be square");
    const int m0 = m.m0();
    const int n = m.state_dim();
    if (m.left_factor.rows() != n || m.left_factor.cols() != m0)
        return fail("left factor must be n x m0");
    if (m.right_factor.rows() != m0 || m.right_factor.cols() != n)
        return fail("right factor must be m0 x n");
    const double j_min = min_sym_eig(2.0 * m.j_matrix);
    if (j_min <= 0.0)
        return fail("Sym{J} not positive definite (min eigenvalue " + std::to_string(j_min) + ")");
    return true;
}

Mat worst_case_delta(const UncertaintyRealization& r) {
    if (r.per_agent_delta.empty())
        throw std::invalid_argument("worst_case_delta: empty realization");
    std::size_t best = 0;
    double best_norm = spectral_norm(r.per_agent_delta[0]);
    for (std::size_t i = 1; i < r.per_agent_delta.size(); ++i) {
        const double norm = spectral_norm(r.per_agent_delta[i]);
        if (norm > best_norm) {
            best_norm = norm;
            best = i;
        }
    }
    return r.per_agent_delta[best];
}

Mat perturbation_matrix(const UncertaintyModel& m, const Mat& delta) {
    if (delta.rows() != m.m0() || delta.cols() != m.m0())
        throw std::invalid_argument("perturbation_matrix: delta must be m0 x m0");
    return m.left_factor * delta * m.right_factor;
}

std::vector<Mat> sample_deltas(const UncertaintyModel& m, int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const int m0 = m.m0();
    std::vector<Mat> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        Mat g(m0, m0);
        for (int i = 0; i < m0; ++i)
            for (int j = 0; j < m0; ++j)
                g(i, j) = gauss(rng);
        out.push_back(delta_from_z(g * g.transpose(), m.j_matrix));
    }
    return out;
}

}  // namespace fomas
