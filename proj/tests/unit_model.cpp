#include "fomas/model.hpp"

#include "fomas/example.hpp"
#include "fomas/frac_stability.hpp"

#include <doctest.h>

#include <random>

using namespace fomas;

namespace {

FomasProblem bundled(int n_c = 0) {
    FomasProblem p = bundled_example().problem;
    p.n_c = n_c;
    return p;
}

DecentralizedController bundled_ctrl(const std::string& name) {
    return bundled_example().reference_controllers.at(name);
}

FomasProblem toy_pair(double a_scalar) {
    FomasProblem p;
    p.alpha = 0.5;
    p.n_c = 0;
    p.dynamics.a_tilde = Mat::Constant(1, 1, a_scalar);
    p.dynamics.b_list = {Mat::Ones(1, 1), Mat::Ones(1, 1)};
    p.dynamics.c_tilde = Mat::Ones(1, 1);
    p.graph.n_agents = 2;
    p.graph.adjacency = (Mat(2, 2) << 0, 1, 1, 0).finished();
    return p;
}

DecentralizedController random_decentralized(const FomasProblem& p, std::mt19937& rng) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    DecentralizedController k;
    k.n_c = p.n_c;
    for (int i = 0; i < p.n_agents(); ++i) {
        ControllerBlock b;
        b.a_c = Mat::NullaryExpr(p.n_c, p.n_c, [&]() { return dist(rng); });
        b.b_c = Mat::NullaryExpr(p.n_c, p.dynamics.q(), [&]() { return dist(rng); });
        b.c_c = Mat::NullaryExpr(p.dynamics.l(), p.n_c, [&]() { return dist(rng); });
        b.d_c = Mat::NullaryExpr(p.dynamics.l(), p.dynamics.q(), [&]() { return dist(rng); });
        k.blocks.push_back(std::move(b));
    }
    return k;
}

FomasProblem random_problem(std::mt19937& rng, int n_agents, int n, int n_c) {
    std::uniform_real_distribution<double> dist(-1.5, 1.5);
    std::uniform_real_distribution<double> w(0.2, 1.5);
    FomasProblem p;
    p.alpha = 0.6;
    p.n_c = n_c;
    p.dynamics.a_tilde = Mat::NullaryExpr(n, n, [&]() { return dist(rng); });
    for (int i = 0; i < n_agents; ++i)
        p.dynamics.b_list.push_back(Mat::NullaryExpr(n, 1, [&]() { return dist(rng); }));
    p.dynamics.c_tilde = Mat::NullaryExpr(1, n, [&]() { return dist(rng); });
    p.graph.n_agents = n_agents;
    p.graph.adjacency = Mat::Zero(n_agents, n_agents);
    for (int i = 1; i < n_agents; ++i) {
        const double v = w(rng);
        p.graph.adjacency(i, i - 1) = v;
        p.graph.adjacency(i - 1, i) = v;
    }
    return p;
}

}  // namespace

TEST_CASE("augment: block structure") {
    const FomasProblem p = bundled();
    const AugmentedSystem s = augment(p);
    CHECK(s.a_n.rows() == 16);
    for (int i = 0; i < 4; ++i)
        CHECK((s.a_n.block(4 * i, 4 * i, 4, 4) - p.dynamics.a_tilde).cwiseAbs().maxCoeff() ==
              0.0);
    CHECK(s.a_n.cwiseAbs().sum() ==
          doctest::Approx(4.0 * p.dynamics.a_tilde.cwiseAbs().sum()));
    CHECK((s.l_q - laplacian(p.graph)).cwiseAbs().maxCoeff() == 0.0);  // q = 1
    CHECK(s.b.rows() == 16);
    CHECK(s.b.cols() == 4);
}

TEST_CASE("augment: single agent and two-agent degenerate shapes") {
    FomasProblem p = toy_pair(-1.0);
    const AugmentedSystem s = augment(p);
    CHECK((s.l_q - laplacian(p.graph)).cwiseAbs().maxCoeff() == 0.0);

    FomasProblem single = toy_pair(-1.0);
    single.graph.n_agents = 1;
    single.graph.adjacency = Mat::Zero(1, 1);
    single.dynamics.b_list = {Mat::Ones(1, 1)};
    const AugmentedSystem s1 = augment(single);
    CHECK((s1.a_n - single.dynamics.a_tilde).cwiseAbs().maxCoeff() == 0.0);
    CHECK(s1.l_q.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("commutation identities hold structurally") {
    CHECK(commutation_check(bundled()));

    FomasProblem single = toy_pair(-1.0);
    single.graph.n_agents = 1;
    single.graph.adjacency = Mat::Zero(1, 1);
    single.dynamics.b_list = {Mat::Ones(1, 1)};
    CHECK(commutation_check(single));

    std::mt19937 rng(31);
    for (int trial = 0; trial < 10; ++trial)
        CHECK(commutation_check(random_problem(rng, 3, 2 + trial % 3, 0)));
}

TEST_CASE("closed_loop: zero static controller reduces to I (x) A") {
    const FomasProblem p = bundled();
    const auto k = DecentralizedController::zero(4, 0, 1, 1);
    const ClosedLoopSystem sys = closed_loop(p, k);
    CHECK(sys.a_cl.rows() == 12);
    const Mat expect = kron(Mat::Identity(3, 3), p.dynamics.a_tilde);
    CHECK((sys.a_cl - expect).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("closed_loop: reduction identity via the pseudo-inverse") {
    const FomasProblem p = bundled();
    const Mat l = laplacian(p.graph);
    const LaplacianPair pair = reduced_laplacian(l);
    const Mat eye_n = Mat::Identity(4, 4);
    const Mat l_hat_n = kron(pair.reduced, eye_n);
    const Mat pinv = pseudo_inverse(l_hat_n);
    const Mat a_n = kron(Mat::Identity(4, 4), p.dynamics.a_tilde);
    const Mat lhs = l_hat_n * a_n * pinv;
    const Mat rhs = kron(Mat::Identity(3, 3), p.dynamics.a_tilde);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((l_hat_n * pinv - Mat::Identity(12, 12)).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("closed_loop: published order-0 gains pass the sector test") {
    const FomasProblem p = bundled(0);
    const ClosedLoopSystem sys = closed_loop(p, bundled_ctrl("theorem1_order0"));
    CHECK(sys.a_cl.rows() == 12);
    CHECK(spectral_stable(sys.a_cl, 0.8));
}

TEST_CASE("closed_loop: channel zero blocks are exact") {
    const FomasProblem p = bundled(2);
    const ClosedLoopSystem sys = closed_loop(p, bundled_ctrl("theorem1_order2"));
    CHECK(sys.m_channel.rows() == 20);
    CHECK(sys.m_channel.cols() == 3);
    CHECK(sys.m_channel.bottomRows(8).cwiseAbs().maxCoeff() == 0.0);
    CHECK(sys.r_channel.rightCols(8).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("k_decomposition: assembly identity a_k + b_k K c_k = a_cl") {
    std::mt19937 rng(77);
    for (int trial = 0; trial < 50; ++trial) {
        FomasProblem p = trial % 2 == 0 ? bundled(trial % 4) : random_problem(rng, 3, 2, trial % 3);
        p.n_c = trial % 3;
        const KDecomposition d = k_decomposition(p);
        const DecentralizedController k = random_decentralized(p, rng);
        const Mat big_k = assemble_k(k, p);
        const Mat via_decomp = d.a_k + d.b_k * big_k * d.c_k;
        const Mat direct = closed_loop(p, k).a_cl;
        CHECK((via_decomp - direct).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("k_decomposition: mask shapes") {
    {
        const KDecomposition d = k_decomposition(bundled(0));
        CHECK(d.mask.rows() == 4);
        CHECK(d.mask.cols() == 4);
        CHECK(d.mask.sum() == 4.0);  // N * l * q free entries
        CHECK((d.mask - Mat::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);
    }
    {
        const KDecomposition d = k_decomposition(bundled(2));
        CHECK(d.mask.rows() == 12);
        CHECK(d.mask.cols() == 12);
        CHECK(d.mask.sum() == doctest::Approx(4.0 * 9.0));  // four free 3x3 agent blocks
    }
}

TEST_CASE("controller_from_k: round trip and decentralization guard") {
    const FomasProblem p = bundled(2);
    std::mt19937 rng(9);
    const DecentralizedController k = random_decentralized(p, rng);
    const Mat big_k = assemble_k(k, p);
    const DecentralizedController back = controller_from_k(big_k, p);
    for (int i = 0; i < 4; ++i) {
        CHECK((back.blocks[i].a_c - k.blocks[i].a_c).cwiseAbs().maxCoeff() == 0.0);
        CHECK((back.blocks[i].b_c - k.blocks[i].b_c).cwiseAbs().maxCoeff() == 0.0);
        CHECK((back.blocks[i].c_c - k.blocks[i].c_c).cwiseAbs().maxCoeff() == 0.0);
        CHECK((back.blocks[i].d_c - k.blocks[i].d_c).cwiseAbs().maxCoeff() == 0.0);
    }

    const Mat zero_k = Mat::Zero(12, 12);
    const DecentralizedController zero = controller_from_k(zero_k, p);
    for (const auto& b : zero.blocks)
        CHECK(b.a_c.cwiseAbs().maxCoeff() == 0.0);

    Mat coupled = big_k;
    coupled(0, 1) = 0.5;  // agent-1 D_c row hitting agent 2's output
    CHECK_THROWS_WITH_AS(controller_from_k(coupled, p), doctest::Contains("not decentralized"),
                         std::invalid_argument);
}

TEST_CASE("full_loop_matrix: zero controller without uncertainty is block diagonal") {
    FomasProblem p = bundled(0);
    p.uncertainty.reset();
    p.realizations.reset();
    const auto k = DecentralizedController::zero(4, 0, 1, 1);
    const Mat loop = full_loop_matrix(p, k);
    CHECK((loop - kron(Mat::Identity(4, 4), p.dynamics.a_tilde)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("problem validation catches inconsistencies") {
    FomasProblem p = bundled();
    p.alpha = 1.2;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);

    FomasProblem q = bundled();
    q.dynamics.b_list.pop_back();
    CHECK_THROWS_AS(q.validate(), std::invalid_argument);
}
