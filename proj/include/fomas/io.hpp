#pragma once

#include "fomas/model.hpp"
#include "fomas/sim.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fomas {

/// Optional sections of a problem file that do not live in FomasProblem.
struct SimSettings {
    double step = 1e-3;
    double t_end = 30.0;
    Vec x0;  // N*n agent initial states
};

struct HomotopySettings {
    int t_steps = 10;
    double eps_feas = 1e-7;
    double q_shift = 1.0;
    int max_refinements = 6;
};

struct ProblemFile {
    FomasProblem problem;
    std::optional<SimSettings> sim;
    std::optional<HomotopySettings> homotopy;
    std::map<std::string, DecentralizedController> reference_controllers;
    std::vector<std::string> warnings;  // non-fatal diagnostics found while parsing
};

struct ControllerProvenance {
    double alpha = 0.0;
    bool robustly_stable = false;
    std::vector<std::pair<double, double>> eta_trace;
};

struct ControllerFile {
    DecentralizedController controller;
    std::optional<ControllerProvenance> provenance;
};

ProblemFile parse_problem(const std::string& path);
ProblemFile parse_problem_json(const std::string& text);
std::string serialize_problem(const ProblemFile& pf);

ControllerFile parse_controller(const std::string& path);
ControllerFile parse_controller_json(const std::string& text);
std::string serialize_controller(const ControllerFile& cf);
void write_controller(const ControllerFile& cf, const std::string& path);

/// Trajectory CSV: header `time,agent<i>_x<j>,...`, one row per step,
/// 12 significant digits; agent states only (controller states omitted).
void write_trajectory_csv(const Trajectory& traj, int n, int n_agents, const std::string& path);

struct TrajectoryTable {
    Trajectory traj;  // states restricted to the agent columns found in the file
    int n = 0;
    int n_agents = 0;
};

TrajectoryTable read_trajectory_csv(const std::string& path);

/// Metrics CSV: `agent,ISE,IAE,ITSE,ITAE`, one row per agent.
void write_metrics_csv(const std::vector<MetricsReport>& reports, const std::string& path);

}  // namespace fomas
