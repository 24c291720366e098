#include "fomas/io.hpp"

#include "fomas/example.hpp"
#include "fomas/graph.hpp"

#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

using namespace fomas;

namespace {

bool same_matrix(const Mat& a, const Mat& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() &&
           (a.size() == 0 || (a - b).cwiseAbs().maxCoeff() == 0.0);
}

bool same_problem(const FomasProblem& a, const FomasProblem& b) {
    if (a.alpha != b.alpha || a.n_c != b.n_c)
        return false;
    if (!same_matrix(a.dynamics.a_tilde, b.dynamics.a_tilde) ||
        !same_matrix(a.dynamics.c_tilde, b.dynamics.c_tilde))
        return false;
    if (a.dynamics.b_list.size() != b.dynamics.b_list.size())
        return false;
    for (std::size_t i = 0; i < a.dynamics.b_list.size(); ++i)
        if (!same_matrix(a.dynamics.b_list[i], b.dynamics.b_list[i]))
            return false;
    if (!same_matrix(a.graph.adjacency, b.graph.adjacency))
        return false;
    if (a.uncertainty.has_value() != b.uncertainty.has_value())
        return false;
    if (a.uncertainty) {
        if (!same_matrix(a.uncertainty->left_factor, b.uncertainty->left_factor) ||
            !same_matrix(a.uncertainty->right_factor, b.uncertainty->right_factor) ||
            !same_matrix(a.uncertainty->j_matrix, b.uncertainty->j_matrix))
            return false;
    }
    if (a.realizations.has_value() != b.realizations.has_value())
        return false;
    if (a.realizations) {
        if (a.realizations->per_agent_delta.size() != b.realizations->per_agent_delta.size())
            return false;
        for (std::size_t i = 0; i < a.realizations->per_agent_delta.size(); ++i)
            if (!same_matrix(a.realizations->per_agent_delta[i],
                             b.realizations->per_agent_delta[i]))
                return false;
    }
    return true;
}

}  // namespace

TEST_CASE("bundled example parses to the published instance") {
    const ProblemFile pf = bundled_example();
    const FomasProblem& p = pf.problem;
    CHECK(p.n_agents() == 4);
    CHECK(p.dynamics.n() == 4);
    CHECK(p.dynamics.l() == 1);
    CHECK(p.dynamics.q() == 1);
    CHECK(p.alpha == 0.8);

    Mat expect_l(4, 4);
    expect_l << 2, -1, 0, -1, -1, 2, -1, 0, 0, -1, 2, -1, -1, 0, -1, 2;
    CHECK(same_matrix(laplacian(p.graph), expect_l));

    REQUIRE(p.realizations.has_value());
    CHECK(p.realizations->per_agent_delta[3](0, 0) == 0.8);

    CHECK(pf.reference_controllers.count("theorem1_order0") == 1);
    CHECK(pf.reference_controllers.count("theorem1_order2") == 1);
    CHECK(pf.reference_controllers.count("corollary1_order0") == 1);
    CHECK(pf.reference_controllers.count("corollary1_order2") == 1);
    CHECK(pf.reference_controllers.at("theorem1_order2").blocks[0].a_c(0, 0) == -53.7197);

    REQUIRE(pf.sim.has_value());
    CHECK(pf.sim->x0.size() == 16);
    CHECK(pf.sim->x0(0) == 2.5);
    REQUIRE(pf.homotopy.has_value());
    CHECK(pf.homotopy->t_steps == 10);
}

TEST_CASE("bundled example flags the non-representable delta") {
    const ProblemFile pf = bundled_example();
    bool found = false;
    for (const std::string& w : pf.warnings)
        found = found || w.find("agent 2") != std::string::npos;
    CHECK(found);
}

TEST_CASE("problem file round trip preserves value equality") {
    const ProblemFile pf = bundled_example();
    const std::string text = serialize_problem(pf);
    const ProblemFile back = parse_problem_json(text);
    CHECK(same_problem(pf.problem, back.problem));
    CHECK(back.reference_controllers.size() == pf.reference_controllers.size());
    const std::string text2 = serialize_problem(back);
    CHECK(text == text2);
}

TEST_CASE("problem file rejects out-of-range alpha") {
    std::string text = bundled_example_json();
    const auto pos = text.find("\"alpha\": 0.8");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, std::string("\"alpha\": 0.8").size(), "\"alpha\": 1.2");
    CHECK_THROWS_WITH_AS(parse_problem_json(text), doctest::Contains("alpha must lie in (0,1)"),
                         std::invalid_argument);
}

TEST_CASE("problem file rejects agent-count mismatches") {
    // drop one agent entry while keeping the 4x4 adjacency
    std::string text = bundled_example_json();
    const std::string entry = "{\"B\": [[1], [1], [0], [1]]},";
    const auto pos = text.find(entry);
    REQUIRE(pos != std::string::npos);
    text.erase(pos, entry.size());
    CHECK_THROWS_AS(parse_problem_json(text), std::invalid_argument);
}

TEST_CASE("problem file rejects malformed matrices") {
    CHECK_THROWS_AS(parse_problem_json("{\"alpha\": 0.5, \"n_c\": 0, \"A\": [[1, 2], [3]]}"),
                    std::invalid_argument);
    CHECK_THROWS_AS(parse_problem_json("not json at all"), std::invalid_argument);
}

TEST_CASE("realizations can be given as z gains instead of deltas") {
    std::string text = bundled_example_json();
    const std::string deltas = "\"deltas\": [0.5, -0.4, 0.1, 0.8]";
    const auto pos = text.find(deltas);
    REQUIRE(pos != std::string::npos);
    text.replace(pos, deltas.size(), "\"z\": [1.0, 0.0, 3.0, 0.5]");
    const ProblemFile pf = parse_problem_json(text);
    REQUIRE(pf.problem.realizations.has_value());
    // z (1 + J z)^{-1} with J = 1
    CHECK(pf.problem.realizations->per_agent_delta[0](0, 0) == doctest::Approx(0.5));
    CHECK(pf.problem.realizations->per_agent_delta[1](0, 0) == doctest::Approx(0.0));
    CHECK(pf.problem.realizations->per_agent_delta[2](0, 0) == doctest::Approx(0.75));
    // all constructively valid, so no representability warnings
    for (const std::string& w : pf.warnings)
        CHECK(w.find("not representable") == std::string::npos);
}

TEST_CASE("directed adjacency parses with a warning") {
    std::string text = bundled_example_json();
    const std::string adj = "\"adjacency\": [[0, 1, 0, 1], [1, 0, 1, 0], [0, 1, 0, 1], [1, 0, 1, 0]]";
    const auto pos = text.find(adj);
    REQUIRE(pos != std::string::npos);
    text.replace(pos, adj.size(),
                 "\"adjacency\": [[0, 2, 0, 1], [1, 0, 1, 0], [0, 1, 0, 1], [1, 0, 1, 0]]");
    const ProblemFile pf = parse_problem_json(text);
    bool warned = false;
    for (const std::string& w : pf.warnings)
        warned = warned || w.find("not symmetric") != std::string::npos;
    CHECK(warned);
}

TEST_CASE("controller file round trip is lossless") {
    ControllerFile cf;
    cf.controller.n_c = 2;
    for (int i = 0; i < 3; ++i) {
        ControllerBlock b;
        b.a_c = (Mat(2, 2) << -53.719700000000003, 1.0 / 3.0, M_PI, -24.3364).finished();
        b.b_c = (Mat(2, 1) << 43.6203, -1.8477).finished();
        b.c_c = (Mat(1, 2) << -2.154, -4.7027).finished();
        b.d_c = Mat::Constant(1, 1, -10.0066 + i);
        cf.controller.blocks.push_back(std::move(b));
    }
    cf.provenance = ControllerProvenance{0.8, true, {{0.0, -1e-4}, {1.0, -2.3e-5}}};

    const std::string text = serialize_controller(cf);
    const ControllerFile back = parse_controller_json(text);
    REQUIRE(back.controller.blocks.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(same_matrix(back.controller.blocks[i].a_c, cf.controller.blocks[i].a_c));
        CHECK(same_matrix(back.controller.blocks[i].b_c, cf.controller.blocks[i].b_c));
        CHECK(same_matrix(back.controller.blocks[i].c_c, cf.controller.blocks[i].c_c));
        CHECK(same_matrix(back.controller.blocks[i].d_c, cf.controller.blocks[i].d_c));
    }
    REQUIRE(back.provenance.has_value());
    CHECK(back.provenance->alpha == 0.8);
    CHECK(back.provenance->robustly_stable);
    CHECK(back.provenance->eta_trace.size() == 2);
    CHECK(back.provenance->eta_trace[1].second == -2.3e-5);
}

TEST_CASE("trajectory CSV round trip and header format") {
    Trajectory traj;
    traj.times = Vec::LinSpaced(4, 0.0, 0.3);
    traj.states = Mat::Zero(6, 4);  // includes 2 controller states that must not be written
    for (Eigen::Index t = 0; t < 4; ++t)
        for (int s = 0; s < 6; ++s)
            traj.states(s, t) = 0.125 * s - 0.33 * static_cast<double>(t);

    const std::string path = "traj_roundtrip_test.csv";
    write_trajectory_csv(traj, 2, 2, path);

    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "time,agent1_x1,agent1_x2,agent2_x1,agent2_x2");
    in.close();

    const TrajectoryTable table = read_trajectory_csv(path);
    CHECK(table.n == 2);
    CHECK(table.n_agents == 2);
    CHECK((table.traj.times - traj.times).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((table.traj.states - traj.states.topRows(4)).cwiseAbs().maxCoeff() < 1e-12);
    std::remove(path.c_str());
}

TEST_CASE("metrics CSV format") {
    std::vector<MetricsReport> reports(2);
    reports[0] = MetricsReport{3.2706, 1.0023, 0.0984, 0.4007};
    reports[1] = MetricsReport{6.2087, 2.7805, 1.7648, 3.5645};
    const std::string path = "metrics_format_test.csv";
    write_metrics_csv(reports, path);

    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "agent,ISE,IAE,ITSE,ITAE");
    std::getline(in, line);
    CHECK(line == "1,3.2706,1.0023,0.0984,0.4007");
    std::getline(in, line);
    CHECK(line.substr(0, 2) == "2,");
    in.close();
    std::remove(path.c_str());
}

TEST_CASE("shipped data file matches the embedded example") {
    std::ifstream in(FOMAS_DATA_FILE);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str() == bundled_example_json());
}
