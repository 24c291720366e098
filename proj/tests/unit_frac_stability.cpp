#include "fomas/frac_stability.hpp"

#include <doctest.h>

#include <numbers>
#include <random>

using namespace fomas;

TEST_CASE("theta_blocks: alpha = 0.8 values and orthogonality") {
    const ThetaBlocks tb = theta_blocks(0.8);
    CHECK(tb.theta == doctest::Approx(0.4 * std::numbers::pi));
    CHECK(tb.t11(0, 0) == doctest::Approx(0.95105651629515353).epsilon(1e-12));  // sin(0.4 pi)
    CHECK(tb.t11(0, 1) == doctest::Approx(-0.30901699437494745).epsilon(1e-12));

    for (const Mat* t : {&tb.t11, &tb.t12, &tb.t21, &tb.t22})
        CHECK((t->transpose() * (*t) - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);

    CHECK_THROWS_AS(theta_blocks(0.0), std::invalid_argument);
    CHECK_THROWS_AS(theta_blocks(1.0), std::invalid_argument);
}

TEST_CASE("theta_blocks: alpha -> 1 limits") {
    const ThetaBlocks tb = theta_blocks(1.0 - 1e-9);
    CHECK((tb.t11 - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-8);
    Mat rot(2, 2);
    rot << 0, 1, -1, 0;
    CHECK((tb.t12 - rot).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("spectral_stable: sector membership") {
    CHECK(spectral_stable(Mat::Constant(1, 1, -1.0), 0.5));  // arg pi > pi/4
    Mat rot(2, 2);
    rot << 0, 1, -1, 0;
    CHECK(spectral_stable(rot, 0.8));  // eigenvalues +-i, arg pi/2 > 0.4 pi
    CHECK_FALSE(spectral_stable(Mat::Constant(1, 1, 1.0), 0.5));
    CHECK_FALSE(spectral_stable(Mat::Zero(2, 2), 0.5));  // zero eigenvalue sits on arg 0
}

TEST_CASE("spectral_stable: exact boundary counts as unstable") {
    const double alpha = 0.6;
    const double phi = alpha * std::numbers::pi / 2.0;
    Mat boundary(2, 2);
    boundary << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
    // eigenvalues e^{+-i phi}: |arg| == alpha pi / 2 exactly
    CHECK_FALSE(spectral_stable(boundary, alpha));
    // nudge the angle outward and it becomes stable
    const double phi2 = phi + 1e-6;
    Mat inside(2, 2);
    inside << std::cos(phi2), -std::sin(phi2), std::sin(phi2), std::cos(phi2);
    CHECK(spectral_stable(inside, alpha));
}

TEST_CASE("spectral_stable: invariant under well-conditioned similarity") {
    std::mt19937 rng(19);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    int checked = 0;
    for (int trial = 0; trial < 60 && checked < 25; ++trial) {
        const int d = 2 + trial % 3;
        const Mat a = Mat::NullaryExpr(d, d, [&]() { return dist(rng); });
        const double margin = sector_margin(a, 0.5);
        if (std::abs(margin) < 1e-3)
            continue;  // skip the boundary band
        Mat t = Mat::NullaryExpr(d, d, [&]() { return dist(rng); }) + 3.0 * Mat::Identity(d, d);
        const Mat similar = t * a * t.inverse();
        CHECK(spectral_stable(similar, 0.5) == spectral_stable(a, 0.5));
        ++checked;
    }
    CHECK(checked >= 20);
}

TEST_CASE("lemma1_lmi: identity certificate for -I") {
    const Mat a = -Mat::Identity(2, 2);
    const AffineLmiSystem sys = lemma1_lmi(a, 0.5);
    const VarLayout layout = lemma1_layout(2);
    Vec point = Vec::Zero(sys.n_vars());
    layout.pack(0, Mat::Identity(2, 2), point);  // P11 = I
    layout.pack(2, Mat::Identity(2, 2), point);  // P21 = I
    CHECK(eigen_margin(sys, point) < 0.0);

    const auto res = solve(sys);
    CHECK(res.status == SolveStatus::feasible);
    const StabilityCertificate cert = decode_lemma1_certificate(sys, res.point, 2);
    CHECK(cert.margin <= -1e-7);
    CHECK((cert.p11 - cert.p11.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((cert.p12 + cert.p12.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("lemma1_lmi: infeasible for an unstable matrix") {
    const auto res = solve(lemma1_lmi(Mat::Identity(2, 2), 0.5));
    CHECK(res.status != SolveStatus::feasible);
}

TEST_CASE("lemma1_lmi: feasible for a stable non-normal matrix") {
    Mat a(2, 2);
    a << -1, 10, 0, -1;
    const auto res = solve(lemma1_lmi(a, 0.9));
    CHECK(res.status == SolveStatus::feasible);
}

TEST_CASE("lemma1_lmi agrees with the spectral oracle on random matrices") {
    std::mt19937 rng(101);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    const double alphas[] = {0.3, 0.5, 0.8};
    int checked = 0;
    for (int trial = 0; trial < 80 && checked < 30; ++trial) {
        const int d = 2 + trial % 3;
        const Mat a = Mat::NullaryExpr(d, d, [&]() { return dist(rng); });
        const double alpha = alphas[trial % 3];
        if (std::abs(sector_margin(a, alpha)) < 1e-3)
            continue;
        const bool oracle = spectral_stable(a, alpha);
        const bool lmi = solve(lemma1_lmi(a, alpha)).status == SolveStatus::feasible;
        CHECK(lmi == oracle);
        ++checked;
    }
    CHECK(checked >= 25);
}
