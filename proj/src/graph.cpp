#include "fomas/graph.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <complex>
#include <string>
#include <vector>

namespace fomas {

namespace {
constexpr double kRankTol = 1e-9;

bool has_full_row_rank(const Mat& m, double tol) {
    Eigen::JacobiSVD<Mat> svd(m);
    if (svd.singularValues().size() < std::min(m.rows(), m.cols()))
        return false;
    return svd.singularValues().minCoeff() > tol && m.rows() <= m.cols();
}
}  // namespace

void AgentGraph::validate() const {
    if (n_agents < 1)
        throw std::invalid_argument("AgentGraph: n_agents must be positive");
    if (adjacency.rows() != n_agents || adjacency.cols() != n_agents)
        throw std::invalid_argument("AgentGraph: adjacency must be " +
                                    std::to_string(n_agents) + "x" + std::to_string(n_agents));
    if (!adjacency.allFinite())
        throw std::invalid_argument("AgentGraph: adjacency has non-finite entries");
    for (int i = 0; i < n_agents; ++i) {
        if (adjacency(i, i) != 0.0)
            throw std::invalid_argument("AgentGraph: self-weight a_" + std::to_string(i + 1) +
                                        std::to_string(i + 1) + " must be zero");
        for (int j = 0; j < n_agents; ++j)
            if (adjacency(i, j) < 0.0)
                throw std::invalid_argument("AgentGraph: negative weight at (" +
                                            std::to_string(i + 1) + "," + std::to_string(j + 1) +
                                            ")");
    }
}

bool AgentGraph::is_symmetric(double tol) const {
    return (adjacency - adjacency.transpose()).cwiseAbs().maxCoeff() <= tol;
}

Mat laplacian(const AgentGraph& g) {
    g.validate();
    Mat l = -g.adjacency;
    for (int i = 0; i < g.n_agents; ++i)
        l(i, i) = g.adjacency.row(i).sum();
    return l;
}

LaplacianPair reduced_laplacian(const Mat& l) {
    const int n = static_cast<int>(l.rows());
    if (l.cols() != n)
        throw std::invalid_argument("reduced_laplacian: matrix must be square");
    if (n < 2)
        throw std::runtime_error("insufficient connectivity: need at least two agents to reduce");

    // Any row of a connected graph's Laplacian is dependent; prefer the last.
    for (int row = n - 1; row >= 0; --row) {
        Mat reduced(n - 1, n);
        int r = 0;
        for (int i = 0; i < n; ++i) {
            if (i == row)
                continue;
            reduced.row(r++) = l.row(i);
        }
        if (has_full_row_rank(reduced, kRankTol))
            return LaplacianPair{l, reduced, row};
    }
    throw std::runtime_error("insufficient connectivity: Laplacian rank below N-1");
}

bool is_connected(const AgentGraph& g) {
    if (g.n_agents == 1)
        return true;
    Spectrum eigs = spectrum(laplacian(g));
    std::vector<double> mags(eigs.size());
    for (Eigen::Index i = 0; i < eigs.size(); ++i)
        mags[i] = std::abs(eigs(i));
    std::sort(mags.begin(), mags.end());
    return mags[0] <= kRankTol && mags[1] > kRankTol;
}

}  // namespace fomas
