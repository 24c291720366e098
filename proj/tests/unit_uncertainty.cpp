#include "fomas/uncertainty.hpp"

#include <doctest.h>

#include <Eigen/SVD>

#include <random>

using namespace fomas;

namespace {

UncertaintyModel bundled_model() {
    UncertaintyModel m;
    m.left_factor = (Mat(4, 1) << 0.2, 0.0, -0.1, 0.3).finished();
    m.right_factor = (Mat(1, 4) << 0.0, 0.2, 0.4, -0.2).finished();
    m.j_matrix = Mat::Ones(1, 1);
    return m;
}

Mat scalar(double v) { return Mat::Constant(1, 1, v); }

}  // namespace

TEST_CASE("delta_from_z: scalar values") {
    CHECK(delta_from_z(scalar(1.0), scalar(1.0))(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(delta_from_z(scalar(0.0), scalar(1.0))(0, 0) == 0.0);
    CHECK(delta_from_z(scalar(3.0), scalar(1.0))(0, 0) == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("delta_from_z: precondition violations report the offending eigenvalue") {
    CHECK_THROWS_AS(delta_from_z(scalar(1.0), scalar(-1.0)), std::invalid_argument);
    CHECK_THROWS_AS(delta_from_z(scalar(-0.5), scalar(1.0)), std::invalid_argument);
}

TEST_CASE("validate_model") {
    CHECK(validate_model(bundled_model()));

    UncertaintyModel bad = bundled_model();
    bad.j_matrix = scalar(-1.0);
    std::string why;
    CHECK_FALSE(validate_model(bad, &why));
    CHECK(why.find("positive definite") != std::string::npos);

    UncertaintyModel skew = bundled_model();
    skew.left_factor = Mat::Zero(4, 2);
    skew.right_factor = Mat::Zero(2, 4);
    skew.j_matrix = (Mat(2, 2) << 0, 1, -1, 0).finished();  // Sym{J} = 0
    CHECK_FALSE(validate_model(skew));
}

TEST_CASE("worst_case_delta") {
    UncertaintyRealization r;
    r.per_agent_delta = {scalar(0.5), scalar(-0.4), scalar(0.1), scalar(0.8)};
    CHECK(worst_case_delta(r)(0, 0) == 0.8);

    UncertaintyRealization zeros;
    zeros.per_agent_delta = {scalar(0.0), scalar(0.0)};
    CHECK(worst_case_delta(zeros)(0, 0) == 0.0);

    UncertaintyRealization single;
    single.per_agent_delta = {scalar(-0.3)};
    CHECK(worst_case_delta(single)(0, 0) == -0.3);

    UncertaintyRealization tie;
    tie.per_agent_delta = {scalar(-0.7), scalar(0.7)};
    CHECK(worst_case_delta(tie)(0, 0) == -0.7);  // lowest index wins
}

TEST_CASE("perturbation_matrix: rank-one expansion of the bundled factors") {
    const UncertaintyModel m = bundled_model();
    CHECK(perturbation_matrix(m, scalar(0.0)).cwiseAbs().maxCoeff() == 0.0);

    const Mat p = perturbation_matrix(m, scalar(0.5));
    CHECK(p(0, 1) == doctest::Approx(0.02).epsilon(1e-12));
    CHECK(p(0, 2) == doctest::Approx(0.04).epsilon(1e-12));
    CHECK(p(3, 3) == doctest::Approx(-0.03).epsilon(1e-12));

    const Mat outer = perturbation_matrix(m, scalar(1.0));
    CHECK((outer - m.left_factor * m.right_factor).cwiseAbs().maxCoeff() == 0.0);

    CHECK_THROWS_AS(perturbation_matrix(m, Mat::Zero(2, 2)), std::invalid_argument);
}

TEST_CASE("perturbation rank never exceeds m0") {
    std::mt19937 rng(17);
    std::normal_distribution<double> gauss;
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 4, m0 = 2;
        UncertaintyModel m;
        m.left_factor = Mat::NullaryExpr(n, m0, [&]() { return gauss(rng); });
        m.right_factor = Mat::NullaryExpr(m0, n, [&]() { return gauss(rng); });
        m.j_matrix = Mat::Identity(m0, m0);
        Mat g = Mat::NullaryExpr(m0, m0, [&]() { return gauss(rng); });
        const Mat pert = perturbation_matrix(m, delta_from_z(g * g.transpose(), m.j_matrix));
        Eigen::JacobiSVD<Mat> svd(pert);
        int rank = 0;
        for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
            if (svd.singularValues()(i) > 1e-10 * svd.singularValues()(0))
                ++rank;
        CHECK(rank <= m0);
    }
}

TEST_CASE("round trip z -> delta -> z on random valid pairs") {
    std::mt19937 rng(23);
    std::normal_distribution<double> gauss;
    for (int trial = 0; trial < 25; ++trial) {
        const int m0 = 1 + trial % 3;
        Mat g = Mat::NullaryExpr(m0, m0, [&]() { return gauss(rng); });
        const Mat z = g * g.transpose();  // Sym{Z} >= 0
        Mat jg = Mat::NullaryExpr(m0, m0, [&]() { return gauss(rng); });
        const Mat j = jg * jg.transpose() + 0.5 * Mat::Identity(m0, m0);
        const Mat delta = delta_from_z(z, j);
        CHECK((z_from_delta(delta, j) - z).cwiseAbs().maxCoeff() < 1e-9);
        CHECK(is_representable(delta, j));
    }
}

TEST_CASE("scalar map is monotone into [0, 1/j)") {
    const double j = 2.0;
    double prev = -1.0;
    for (int i = 0; i <= 40; ++i) {
        const double z = 0.25 * i;
        const double d = delta_from_z(scalar(z), scalar(j))(0, 0);
        CHECK(d >= 0.0);
        CHECK(d < 1.0 / j);
        CHECK(d > prev);
        prev = d;
    }
}

TEST_CASE("the bundled realization's negative delta is not representable") {
    // delta = -0.4 with J = 1 maps back to z = -0.4/1.4 < 0
    CHECK_FALSE(is_representable(scalar(-0.4), scalar(1.0)));
    CHECK(is_representable(scalar(0.5), scalar(1.0)));
    CHECK(is_representable(scalar(0.8), scalar(1.0)));
}

TEST_CASE("sample_deltas: deterministic and valid") {
    const UncertaintyModel m = bundled_model();
    const auto a = sample_deltas(m, 8, 1234);
    const auto b = sample_deltas(m, 8, 1234);
    REQUIRE(a.size() == 8);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK((a[i] - b[i]).cwiseAbs().maxCoeff() == 0.0);
        CHECK(is_representable(a[i], m.j_matrix, 1e-7));
    }
    const auto c = sample_deltas(m, 8, 99);
    bool any_diff = false;
    for (std::size_t i = 0; i < a.size(); ++i)
        any_diff = any_diff || (a[i] - c[i]).cwiseAbs().maxCoeff() > 0.0;
    CHECK(any_diff);
}
