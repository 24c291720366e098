#include "fomas/model.hpp"

#include <string>

namespace fomas {

namespace {

Mat block_diag(const std::vector<Mat>& blocks, Eigen::Index rows, Eigen::Index cols) {
    Mat out = Mat::Zero(rows, cols);
    Eigen::Index r = 0, c = 0;
    for (const Mat& b : blocks) {
        out.block(r, c, b.rows(), b.cols()) = b;
        r += b.rows();
        c += b.cols();
    }
    return out;
}

struct ControllerStack {
    Mat a_c;  // N n_c x N n_c
    Mat b_c;  // N n_c x N q
    Mat c_c;  // N l x N n_c
    Mat d_c;  // N l x N q
};

ControllerStack stack_controller(const DecentralizedController& k, int N, int l, int q) {
    ControllerStack s;
    const int n_c = k.n_c;
    s.a_c = Mat::Zero(N * n_c, N * n_c);
    s.b_c = Mat::Zero(N * n_c, N * q);
    s.c_c = Mat::Zero(N * l, N * n_c);
    s.d_c = Mat::Zero(N * l, N * q);
    for (int i = 0; i < N; ++i) {
        const ControllerBlock& b = k.blocks[static_cast<std::size_t>(i)];
        if (n_c > 0) {
            s.a_c.block(i * n_c, i * n_c, n_c, n_c) = b.a_c;
            s.b_c.block(i * n_c, i * q, n_c, q) = b.b_c;
            s.c_c.block(i * l, i * n_c, l, n_c) = b.c_c;
        }
        s.d_c.block(i * l, i * q, l, q) = b.d_c;
    }
    return s;
}

struct Reduction {
    Mat l_hat;        // (N-1) x N
    Mat l_hat_n;      // (N-1)n x Nn
    Mat l_hat_n_pinv; // Nn x (N-1)n
    Mat c_r;          // Nq x (N-1)n
};

Reduction make_reduction(const FomasProblem& p) {
    const int n = p.dynamics.n();
    const LaplacianPair pair = reduced_laplacian(laplacian(p.graph));
    Reduction red;
    red.l_hat = pair.reduced;
    const Mat eye_n = Mat::Identity(n, n);
    red.l_hat_n = kron(red.l_hat, eye_n);
    // pinv(L_hat (x) I) = pinv(L_hat) (x) I
    red.l_hat_n_pinv = kron(pseudo_inverse(red.l_hat), eye_n);

    // The reduction is only exact with the pseudo-inverse; check it here so a
    // bad instance fails loudly instead of producing a wrong closed loop.
    const Mat a_n = kron(Mat::Identity(p.n_agents(), p.n_agents()), p.dynamics.a_tilde);
    const Mat lhs = red.l_hat_n * a_n * red.l_hat_n_pinv;
    const Mat rhs = kron(Mat::Identity(p.n_agents() - 1, p.n_agents() - 1), p.dynamics.a_tilde);
    const double scale = std::max(1.0, rhs.cwiseAbs().maxCoeff());
    if ((lhs - rhs).cwiseAbs().maxCoeff() > 1e-8 * scale)
        throw std::runtime_error("closed_loop: Laplacian reduction identity failed numerically");

    const Mat l_n = kron(pair.full, eye_n);
    const Mat c_n = kron(Mat::Identity(p.n_agents(), p.n_agents()), p.dynamics.c_tilde);
    red.c_r = c_n * l_n * red.l_hat_n_pinv;
    return red;
}

}  // namespace

void FomasProblem::validate() const {
    graph.validate();
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("alpha must lie in (0,1)");
    if (n_c < 0)
        throw std::invalid_argument("controller order n_c must be nonnegative");
    const int n = dynamics.n();
    if (n < 1 || dynamics.a_tilde.cols() != n)
        throw std::invalid_argument("A must be square and nonempty");
    if (dynamics.n_agents() != graph.n_agents)
        throw std::invalid_argument("agent count mismatch: " + std::to_string(dynamics.n_agents()) +
                                    " B matrices vs " + std::to_string(graph.n_agents) +
                                    "-agent graph");
    const int l = dynamics.l();
    for (const Mat& b : dynamics.b_list)
        if (b.rows() != n || b.cols() != l)
            throw std::invalid_argument("every B_i must be n x l");
    if (l < 1)
        throw std::invalid_argument("input dimension l must be positive");
    if (dynamics.q() < 1 || dynamics.c_tilde.cols() != n)
        throw std::invalid_argument("C must be q x n with q >= 1");
    if (uncertainty) {
        std::string why;
        if (!validate_model(*uncertainty, &why))
            throw std::invalid_argument("uncertainty model invalid: " + why);
        if (uncertainty->state_dim() != n)
            throw std::invalid_argument("uncertainty factors must match state dimension n");
    }
    if (realizations) {
        if (!uncertainty)
            throw std::invalid_argument("realizations given without an uncertainty model");
        if (static_cast<int>(realizations->per_agent_delta.size()) != graph.n_agents)
            throw std::invalid_argument("realizations must list one delta per agent");
        for (const Mat& d : realizations->per_agent_delta)
            if (d.rows() != uncertainty->m0() || d.cols() != uncertainty->m0())
                throw std::invalid_argument("every delta must be m0 x m0");
    }
}

int FomasProblem::closed_loop_dim() const {
    return (n_agents() - 1) * dynamics.n() + n_agents() * n_c;
}

DecentralizedController DecentralizedController::zero(int n_agents, int n_c, int l, int q) {
    DecentralizedController k;
    k.n_c = n_c;
    k.blocks.assign(static_cast<std::size_t>(n_agents),
                    ControllerBlock{Mat::Zero(n_c, n_c), Mat::Zero(n_c, q), Mat::Zero(l, n_c),
                                    Mat::Zero(l, q)});
    return k;
}

void DecentralizedController::validate(const FomasProblem& p) const {
    if (static_cast<int>(blocks.size()) != p.n_agents())
        throw std::invalid_argument("controller must have one block per agent");
    if (n_c != p.n_c)
        throw std::invalid_argument("controller order does not match the problem");
    const int l = p.dynamics.l(), q = p.dynamics.q();
    for (const ControllerBlock& b : blocks) {
        if (b.a_c.rows() != n_c || b.a_c.cols() != n_c || b.b_c.rows() != n_c ||
            b.b_c.cols() != q || b.c_c.rows() != l || b.c_c.cols() != n_c || b.d_c.rows() != l ||
            b.d_c.cols() != q)
            throw std::invalid_argument("controller block dimensions inconsistent with (n_c,q,l)");
    }
}

AugmentedSystem augment(const FomasProblem& p) {
    p.validate();
    const int N = p.n_agents();
    AugmentedSystem s;
    const Mat eye_N = Mat::Identity(N, N);
    s.a_n = kron(eye_N, p.dynamics.a_tilde);
    s.c_n = kron(eye_N, p.dynamics.c_tilde);
    s.b = block_diag(p.dynamics.b_list, N * p.dynamics.n(), N * p.dynamics.l());
    s.l_q = kron(laplacian(p.graph), Mat::Identity(p.dynamics.q(), p.dynamics.q()));
    return s;
}

bool commutation_check(const FomasProblem& p, double tol) {
    const AugmentedSystem s = augment(p);
    const Mat l_n = kron(laplacian(p.graph), Mat::Identity(p.dynamics.n(), p.dynamics.n()));
    const double lhs1 = (s.l_q * s.c_n - s.c_n * l_n).cwiseAbs().maxCoeff();
    const double lhs2 = (l_n * s.a_n - s.a_n * l_n).cwiseAbs().maxCoeff();
    return lhs1 <= tol && lhs2 <= tol;
}

ClosedLoopSystem closed_loop(const FomasProblem& p, const DecentralizedController& k) {
    p.validate();
    k.validate(p);
    const int N = p.n_agents();
    const int n = p.dynamics.n();
    const int l = p.dynamics.l();
    const int q = p.dynamics.q();
    const int n_c = p.n_c;
    const int n_red = (N - 1) * n;
    const int n_cl = p.closed_loop_dim();

    const Reduction red = make_reduction(p);
    const Mat b = block_diag(p.dynamics.b_list, N * n, N * l);
    const ControllerStack cs = stack_controller(k, N, l, q);
    const Mat lb = red.l_hat_n * b;  // (N-1)n x Nl

    ClosedLoopSystem sys;
    sys.alpha = p.alpha;
    sys.n_agents = N;
    sys.n = n;
    sys.n_c = n_c;
    sys.a_cl = Mat::Zero(n_cl, n_cl);
    sys.a_cl.topLeftCorner(n_red, n_red) =
        kron(Mat::Identity(N - 1, N - 1), p.dynamics.a_tilde) + lb * cs.d_c * red.c_r;
    if (n_c > 0) {
        sys.a_cl.topRightCorner(n_red, N * n_c) = lb * cs.c_c;
        sys.a_cl.bottomLeftCorner(N * n_c, n_red) = cs.b_c * red.c_r;
        sys.a_cl.bottomRightCorner(N * n_c, N * n_c) = cs.a_c;
    }

    const int m0 = p.uncertainty ? p.uncertainty->m0() : 0;
    sys.m_channel = Mat::Zero(n_cl, (N - 1) * m0);
    sys.r_channel = Mat::Zero((N - 1) * m0, n_cl);
    if (p.uncertainty) {
        const Mat eye = Mat::Identity(N - 1, N - 1);
        sys.m_channel.topRows(n_red) = kron(eye, p.uncertainty->left_factor);
        sys.r_channel.leftCols(n_red) = kron(eye, p.uncertainty->right_factor);
    }
    return sys;
}

Mat perturbed_a_cl(const ClosedLoopSystem& sys, const Mat& delta) {
    if (sys.m_channel.cols() == 0)
        return sys.a_cl;
    const int copies = sys.n_agents - 1;
    if (delta.rows() * copies != sys.m_channel.cols())
        throw std::invalid_argument("perturbed_a_cl: delta dimension mismatch");
    return sys.a_cl +
           sys.m_channel * kron(Mat::Identity(copies, copies), delta) * sys.r_channel;
}

Mat full_loop_matrix(const FomasProblem& p, const DecentralizedController& k) {
    p.validate();
    k.validate(p);
    const int N = p.n_agents();
    const int n = p.dynamics.n();
    const int l = p.dynamics.l();
    const int q = p.dynamics.q();
    const int n_c = p.n_c;

    const AugmentedSystem s = augment(p);
    const ControllerStack cs = stack_controller(k, N, l, q);

    Mat a_delta_n = s.a_n;
    if (p.uncertainty && p.realizations)
        for (int i = 0; i < N; ++i)
            a_delta_n.block(i * n, i * n, n, n) += perturbation_matrix(
                *p.uncertainty, p.realizations->per_agent_delta[static_cast<std::size_t>(i)]);

    const int dim = N * n + N * n_c;
    Mat loop = Mat::Zero(dim, dim);
    loop.topLeftCorner(N * n, N * n) = a_delta_n + s.b * cs.d_c * s.l_q * s.c_n;
    if (n_c > 0) {
        loop.topRightCorner(N * n, N * n_c) = s.b * cs.c_c;
        loop.bottomLeftCorner(N * n_c, N * n) = cs.b_c * s.l_q * s.c_n;
        loop.bottomRightCorner(N * n_c, N * n_c) = cs.a_c;
    }
    return loop;
}

KDecomposition k_decomposition(const FomasProblem& p) {
    p.validate();
    const int N = p.n_agents();
    const int n = p.dynamics.n();
    const int l = p.dynamics.l();
    const int q = p.dynamics.q();
    const int n_c = p.n_c;
    const int n_red = (N - 1) * n;
    const int n_cl = p.closed_loop_dim();

    const Reduction red = make_reduction(p);
    const Mat b = block_diag(p.dynamics.b_list, N * n, N * l);

    KDecomposition d;
    d.a_k = Mat::Zero(n_cl, n_cl);
    d.a_k.topLeftCorner(n_red, n_red) = kron(Mat::Identity(N - 1, N - 1), p.dynamics.a_tilde);

    d.b_k = Mat::Zero(n_cl, N * (l + n_c));
    d.b_k.topLeftCorner(n_red, N * l) = red.l_hat_n * b;
    d.c_k = Mat::Zero(N * (q + n_c), n_cl);
    d.c_k.topLeftCorner(N * q, n_red) = red.c_r;
    if (n_c > 0) {
        d.b_k.bottomRightCorner(N * n_c, N * n_c) = Mat::Identity(N * n_c, N * n_c);
        d.c_k.bottomRightCorner(N * n_c, N * n_c) = Mat::Identity(N * n_c, N * n_c);
    }

    d.mask = Mat::Zero(N * (l + n_c), N * (q + n_c));
    for (int i = 0; i < N; ++i) {
        d.mask.block(i * l, i * q, l, q).setOnes();                          // D_c
        if (n_c > 0) {
            d.mask.block(i * l, N * q + i * n_c, l, n_c).setOnes();          // C_c
            d.mask.block(N * l + i * n_c, i * q, n_c, q).setOnes();          // B_c
            d.mask.block(N * l + i * n_c, N * q + i * n_c, n_c, n_c).setOnes();  // A_c
        }
    }
    return d;
}

Mat assemble_k(const DecentralizedController& k, const FomasProblem& p) {
    k.validate(p);
    const int N = p.n_agents();
    const int l = p.dynamics.l(), q = p.dynamics.q(), n_c = k.n_c;
    const ControllerStack cs = stack_controller(k, N, l, q);
    Mat big = Mat::Zero(N * (l + n_c), N * (q + n_c));
    big.topLeftCorner(N * l, N * q) = cs.d_c;
    if (n_c > 0) {
        big.topRightCorner(N * l, N * n_c) = cs.c_c;
        big.bottomLeftCorner(N * n_c, N * q) = cs.b_c;
        big.bottomRightCorner(N * n_c, N * n_c) = cs.a_c;
    }
    return big;
}

DecentralizedController controller_from_k(const Mat& k_matrix, const FomasProblem& p) {
    const int N = p.n_agents();
    const int l = p.dynamics.l(), q = p.dynamics.q(), n_c = p.n_c;
    if (k_matrix.rows() != N * (l + n_c) || k_matrix.cols() != N * (q + n_c))
        throw std::invalid_argument("controller_from_k: K has wrong dimensions");

    const Mat mask = k_decomposition(p).mask;
    for (Eigen::Index r = 0; r < k_matrix.rows(); ++r)
        for (Eigen::Index c = 0; c < k_matrix.cols(); ++c)
            if (mask(r, c) == 0.0 && std::abs(k_matrix(r, c)) > 1e-12)
                throw std::invalid_argument("not decentralized: nonzero cross-agent coupling at (" +
                                            std::to_string(r) + "," + std::to_string(c) + ")");

    DecentralizedController k;
    k.n_c = n_c;
    for (int i = 0; i < N; ++i) {
        ControllerBlock b;
        b.d_c = k_matrix.block(i * l, i * q, l, q);
        if (n_c > 0) {
            b.c_c = k_matrix.block(i * l, N * q + i * n_c, l, n_c);
            b.b_c = k_matrix.block(N * l + i * n_c, i * q, n_c, q);
            b.a_c = k_matrix.block(N * l + i * n_c, N * q + i * n_c, n_c, n_c);
        } else {
            b.a_c = Mat::Zero(0, 0);
            b.b_c = Mat::Zero(0, q);
            b.c_c = Mat::Zero(l, 0);
        }
        k.blocks.push_back(std::move(b));
    }
    return k;
}

}  // namespace fomas
