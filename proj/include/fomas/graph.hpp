#pragma once

#include "fomas/mat_core.hpp"

namespace fomas {

/// Weighted directed communication graph over N agents.
/// adjacency(i, j) = a_ij >= 0 is the weight with which agent i hears agent j;
/// the diagonal must be zero.
struct AgentGraph {
    int n_agents = 0;
    Mat adjacency;

    /// Throws std::invalid_argument describing the first violated invariant.
    void validate() const;

    bool is_symmetric(double tol = 1e-12) const;
};

struct LaplacianPair {
    Mat full;        // N x N
    Mat reduced;     // (N-1) x N, full row rank
    int removed_row; // 0-based index of the deleted row
};

/// Graph Laplacian: diagonal = row sums of the adjacency, off-diagonal = -a_ij.
Mat laplacian(const AgentGraph& g);

/// Removes one dependent row of l so the remainder has full row rank.
/// Tries the last row first, then scans upward. Throws std::runtime_error
/// ("insufficient connectivity") when no removal yields full row rank.
LaplacianPair reduced_laplacian(const Mat& l);

/// True iff the Laplacian has exactly one (near-)zero eigenvalue.
bool is_connected(const AgentGraph& g);

}  // namespace fomas
