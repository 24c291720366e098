#pragma once

#include "fomas/graph.hpp"
#include "fomas/uncertainty.hpp"

#include <optional>
#include <vector>

namespace fomas {

/// Shared agent dynamics D^alpha x_i = A x_i + B_i u_i, y_i = C x_i.
struct AgentDynamics {
    Mat a_tilde;              // n x n, shared
    std::vector<Mat> b_list;  // N matrices, each n x l
    Mat c_tilde;              // q x n, shared

    int n() const { return static_cast<int>(a_tilde.rows()); }
    int l() const { return b_list.empty() ? 0 : static_cast<int>(b_list.front().cols()); }
    int q() const { return static_cast<int>(c_tilde.rows()); }
    int n_agents() const { return static_cast<int>(b_list.size()); }
};

/// A complete problem instance: dynamics, topology, uncertainty, fractional
/// order and requested controller order.
struct FomasProblem {
    AgentDynamics dynamics;
    AgentGraph graph;
    std::optional<UncertaintyModel> uncertainty;
    std::optional<UncertaintyRealization> realizations;
    double alpha = 0.0;  // in (0, 1)
    int n_c = 0;         // controller order, >= 0

    void validate() const;
    int n_agents() const { return graph.n_agents; }
    /// Reduced closed-loop dimension (N-1) n + N n_c.
    int closed_loop_dim() const;
};

/// One agent's controller: D^alpha x_ci = A_c x_ci + B_c v_i, u_i = C_c x_ci + D_c v_i,
/// where v_i is the Laplacian-weighted neighborhood output.
struct ControllerBlock {
    Mat a_c;  // n_c x n_c
    Mat b_c;  // n_c x q
    Mat c_c;  // l x n_c
    Mat d_c;  // l x q
};

struct DecentralizedController {
    std::vector<ControllerBlock> blocks;
    int n_c = 0;

    static DecentralizedController zero(int n_agents, int n_c, int l, int q);
    void validate(const FomasProblem& p) const;
};

/// Reduced closed loop with uncertainty channels:
/// effective matrix is a_cl + m_channel (I_{N-1} (x) delta) r_channel.
struct ClosedLoopSystem {
    Mat a_cl;           // n_cl x n_cl
    Mat m_channel;      // n_cl x (N-1) m0 (zero when no uncertainty model)
    Mat r_channel;      // (N-1) m0 x n_cl
    double alpha = 0.0;
    int n_agents = 0;
    int n = 0;
    int n_c = 0;
};

struct AugmentedSystem {
    Mat a_n;  // I_N (x) A
    Mat b;    // diag(B_1 .. B_N)
    Mat c_n;  // I_N (x) C
    Mat l_q;  // L (x) I_q
};

/// Stacked N-agent system and the Laplacian output coupling.
AugmentedSystem augment(const FomasProblem& p);

/// Checks the Kronecker commutation identities
/// (L (x) I_q)(I_N (x) C) = (I_N (x) C)(L (x) I_n) and
/// (L (x) I_n)(I_N (x) A) = (I_N (x) A)(L (x) I_n) on this instance.
bool commutation_check(const FomasProblem& p, double tol = 1e-10);

/// Reduced closed loop (consensus-to-stability transformed system) for a
/// given decentralized controller. Propagates "insufficient connectivity".
ClosedLoopSystem closed_loop(const FomasProblem& p, const DecentralizedController& k);

/// a_cl + m_channel (I_{N-1} (x) delta) r_channel for one delta sample.
Mat perturbed_a_cl(const ClosedLoopSystem& sys, const Mat& delta);

/// Full (unreduced) loop matrix of dimension N n + N n_c: the stacked agents
/// under the decentralized protocol. Each agent carries its own perturbation
/// from the problem's realization when one is present.
Mat full_loop_matrix(const FomasProblem& p, const DecentralizedController& k);

/// A_cl = a_k + b_k K c_k with the decentralized sparsity pattern of K
/// recorded in `mask` (1 = free entry, 0 = structurally zero).
struct KDecomposition {
    Mat a_k;
    Mat b_k;
    Mat c_k;
    Mat mask;  // N(l+n_c) x N(q+n_c); n_c = 0 collapses to Nl x Nq
};

KDecomposition k_decomposition(const FomasProblem& p);

/// Assembles the big K = [[D_c, C_c], [B_c, A_c]] with block-diagonal parts.
Mat assemble_k(const DecentralizedController& k, const FomasProblem& p);

/// Partitions a mask-conforming K back into per-agent blocks. Throws
/// "not decentralized" when off-pattern entries exceed 1e-12.
DecentralizedController controller_from_k(const Mat& k_matrix, const FomasProblem& p);

}  // namespace fomas
