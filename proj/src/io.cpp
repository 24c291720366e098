#include "fomas/io.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace fomas {

using Json = nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& key, const std::string& what) {
    throw std::invalid_argument("problem file: key '" + key + "': " + what);
}

const Json& require(const Json& j, const std::string& key) {
    if (!j.contains(key))
        throw std::invalid_argument("problem file: missing key '" + key + "'");
    return j.at(key);
}

Mat parse_matrix(const Json& j, const std::string& key, int rows = -1, int cols = -1) {
    if (!j.is_array() || j.empty() || !j.front().is_array())
        fail(key, "expected a rectangular array of arrays");
    const int r = static_cast<int>(j.size());
    const int c = static_cast<int>(j.front().size());
    Mat m(r, c);
    for (int i = 0; i < r; ++i) {
        const Json& row = j.at(static_cast<std::size_t>(i));
        if (!row.is_array() || static_cast<int>(row.size()) != c)
            fail(key, "rows have inconsistent lengths");
        for (int k = 0; k < c; ++k) {
            if (!row.at(static_cast<std::size_t>(k)).is_number())
                fail(key, "non-numeric entry");
            m(i, k) = row.at(static_cast<std::size_t>(k)).get<double>();
        }
    }
    if (!m.allFinite())
        fail(key, "non-finite entry");
    if ((rows >= 0 && r != rows) || (cols >= 0 && c != cols))
        fail(key, "expected shape " + std::to_string(rows) + "x" + std::to_string(cols) +
                      ", got " + std::to_string(r) + "x" + std::to_string(c));
    return m;
}

Vec parse_vector(const Json& j, const std::string& key, int size = -1) {
    if (!j.is_array())
        fail(key, "expected a flat array");
    Vec v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j.at(i).is_number())
            fail(key, "non-numeric entry");
        v(static_cast<Eigen::Index>(i)) = j.at(i).get<double>();
    }
    if (size >= 0 && v.size() != size)
        fail(key, "expected length " + std::to_string(size) + ", got " +
                      std::to_string(v.size()));
    return v;
}

Json matrix_to_json(const Mat& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Json vector_to_json(const Vec& v) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        out.push_back(v(i));
    return out;
}

// deltas / z entries may be plain numbers (m0 = 1) or m0 x m0 arrays.
Mat parse_gain(const Json& j, const std::string& key, int m0) {
    if (j.is_number())
        return Mat::Constant(1, 1, j.get<double>());
    return parse_matrix(j, key, m0, m0);
}

DecentralizedController parse_controller_blocks(const Json& j, const std::string& where) {
    DecentralizedController k;
    if (!j.contains("n_c") || !j.at("n_c").is_number_integer())
        throw std::invalid_argument(where + ": missing integer key 'n_c'");
    k.n_c = j.at("n_c").get<int>();
    if (k.n_c < 0)
        throw std::invalid_argument(where + ": n_c must be nonnegative");
    const Json& blocks = j.contains("blocks") ? j.at("blocks") : Json::array();
    if (!blocks.is_array() || blocks.empty())
        throw std::invalid_argument(where + ": 'blocks' must be a nonempty array");
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        const Json& b = blocks.at(i);
        ControllerBlock cb;
        const std::string tag = where + ".blocks[" + std::to_string(i) + "]";
        cb.d_c = parse_matrix(require(b, "D_c"), tag + ".D_c");
        if (k.n_c > 0) {
            cb.a_c = parse_matrix(require(b, "A_c"), tag + ".A_c", k.n_c, k.n_c);
            cb.b_c = parse_matrix(require(b, "B_c"), tag + ".B_c", k.n_c, -1);
            cb.c_c = parse_matrix(require(b, "C_c"), tag + ".C_c", -1, k.n_c);
        } else {
            cb.a_c = Mat::Zero(0, 0);
            cb.b_c = Mat::Zero(0, cb.d_c.cols());
            cb.c_c = Mat::Zero(cb.d_c.rows(), 0);
        }
        k.blocks.push_back(std::move(cb));
    }
    return k;
}

Json controller_blocks_to_json(const DecentralizedController& k) {
    Json out;
    out["n_c"] = k.n_c;
    Json blocks = Json::array();
    for (const ControllerBlock& b : k.blocks) {
        Json jb;
        if (k.n_c > 0) {
            jb["A_c"] = matrix_to_json(b.a_c);
            jb["B_c"] = matrix_to_json(b.b_c);
            jb["C_c"] = matrix_to_json(b.c_c);
        }
        jb["D_c"] = matrix_to_json(b.d_c);
        blocks.push_back(std::move(jb));
    }
    out["blocks"] = std::move(blocks);
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

ProblemFile parse_problem_json(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("problem file: invalid JSON: ") + e.what());
    }

    ProblemFile pf;
    FomasProblem& p = pf.problem;

    if (!require(j, "alpha").is_number())
        fail("alpha", "expected a number");
    p.alpha = j.at("alpha").get<double>();
    if (!(p.alpha > 0.0 && p.alpha < 1.0))
        throw std::invalid_argument("problem file: alpha must lie in (0,1)");

    if (!require(j, "n_c").is_number_integer())
        fail("n_c", "expected an integer");
    p.n_c = j.at("n_c").get<int>();

    p.dynamics.a_tilde = parse_matrix(require(j, "A"), "A");
    const int n = static_cast<int>(p.dynamics.a_tilde.rows());
    if (p.dynamics.a_tilde.cols() != n)
        fail("A", "must be square");
    p.dynamics.c_tilde = parse_matrix(require(j, "C"), "C", -1, n);

    const Json& agents = require(j, "agents");
    if (!agents.is_array() || agents.empty())
        fail("agents", "expected a nonempty array");
    for (std::size_t i = 0; i < agents.size(); ++i)
        p.dynamics.b_list.push_back(
            parse_matrix(require(agents.at(i), "B"), "agents[" + std::to_string(i) + "].B", n, -1));

    const int N = static_cast<int>(agents.size());
    p.graph.n_agents = N;
    p.graph.adjacency = parse_matrix(require(j, "adjacency"), "adjacency", N, N);

    if (j.contains("uncertainty")) {
        const Json& u = j.at("uncertainty");
        UncertaintyModel model;
        model.left_factor = parse_matrix(require(u, "M"), "uncertainty.M", n, -1);
        const int m0 = static_cast<int>(model.left_factor.cols());
        model.right_factor = parse_matrix(require(u, "R"), "uncertainty.R", m0, n);
        model.j_matrix = parse_matrix(require(u, "J"), "uncertainty.J", m0, m0);
        std::string why;
        if (!validate_model(model, &why))
            throw std::invalid_argument("problem file: uncertainty model invalid: " + why);
        p.uncertainty = std::move(model);

        const bool has_deltas = u.contains("deltas");
        const bool has_z = u.contains("z");
        if (has_deltas && has_z)
            fail("uncertainty", "give either 'deltas' or 'z', not both");
        if (has_deltas || has_z) {
            const Json& list = u.at(has_deltas ? "deltas" : "z");
            if (!list.is_array() || static_cast<int>(list.size()) != N)
                fail(has_deltas ? "uncertainty.deltas" : "uncertainty.z",
                     "expected one entry per agent");
            UncertaintyRealization real;
            for (std::size_t i = 0; i < list.size(); ++i) {
                const std::string tag = "uncertainty.deltas[" + std::to_string(i) + "]";
                Mat g = parse_gain(list.at(i), tag, m0);
                if (has_z)
                    g = delta_from_z(g, p.uncertainty->j_matrix);
                else if (!is_representable(g, p.uncertainty->j_matrix))
                    pf.warnings.push_back(
                        "delta for agent " + std::to_string(i + 1) +
                        " is not representable as Z(I+JZ)^{-1} with Sym{Z} >= 0");
                real.per_agent_delta.push_back(std::move(g));
            }
            p.realizations = std::move(real);
        }
    }

    if (j.contains("sim")) {
        const Json& s = j.at("sim");
        SimSettings sim;
        if (s.contains("h"))
            sim.step = s.at("h").get<double>();
        if (s.contains("t_end"))
            sim.t_end = s.at("t_end").get<double>();
        if (s.contains("x0"))
            sim.x0 = parse_vector(s.at("x0"), "sim.x0", N * n);
        if (!(sim.step > 0.0) || !(sim.t_end >= sim.step))
            fail("sim", "need 0 < h <= t_end");
        pf.sim = std::move(sim);
    }

    if (j.contains("homotopy")) {
        const Json& h = j.at("homotopy");
        HomotopySettings hs;
        if (h.contains("T"))
            hs.t_steps = h.at("T").get<int>();
        if (h.contains("eps_feas"))
            hs.eps_feas = h.at("eps_feas").get<double>();
        if (h.contains("q_shift"))
            hs.q_shift = h.at("q_shift").get<double>();
        if (h.contains("max_refinements"))
            hs.max_refinements = h.at("max_refinements").get<int>();
        if (hs.t_steps < 1 || hs.eps_feas <= 0.0 || hs.q_shift <= 0.0 || hs.max_refinements < 0)
            fail("homotopy", "invalid settings");
        pf.homotopy = hs;
    }

    if (j.contains("reference_controllers")) {
        const Json& refs = j.at("reference_controllers");
        if (!refs.is_object())
            fail("reference_controllers", "expected an object");
        for (const auto& [name, body] : refs.items())
            pf.reference_controllers.emplace(
                name, parse_controller_blocks(body, "reference_controllers." + name));
    }

    p.validate();  // dimension and invariant checks with domain-level messages
    if (!is_connected(p.graph))
        pf.warnings.push_back("graph is not connected; controller design will fail");
    if (!p.graph.is_symmetric())
        pf.warnings.push_back("adjacency is not symmetric (directed graph): the consensus "
                              "certificate is only established for undirected topologies");
    return pf;
}

ProblemFile parse_problem(const std::string& path) {
    return parse_problem_json(read_file(path));
}

std::string serialize_problem(const ProblemFile& pf) {
    const FomasProblem& p = pf.problem;
    Json j;
    j["alpha"] = p.alpha;
    j["n_c"] = p.n_c;
    j["A"] = matrix_to_json(p.dynamics.a_tilde);
    j["C"] = matrix_to_json(p.dynamics.c_tilde);
    Json agents = Json::array();
    for (const Mat& b : p.dynamics.b_list) {
        Json a;
        a["B"] = matrix_to_json(b);
        agents.push_back(std::move(a));
    }
    j["agents"] = std::move(agents);
    j["adjacency"] = matrix_to_json(p.graph.adjacency);
    if (p.uncertainty) {
        Json u;
        u["M"] = matrix_to_json(p.uncertainty->left_factor);
        u["R"] = matrix_to_json(p.uncertainty->right_factor);
        u["J"] = matrix_to_json(p.uncertainty->j_matrix);
        if (p.realizations) {
            Json deltas = Json::array();
            for (const Mat& d : p.realizations->per_agent_delta) {
                if (d.rows() == 1 && d.cols() == 1)
                    deltas.push_back(d(0, 0));
                else
                    deltas.push_back(matrix_to_json(d));
            }
            u["deltas"] = std::move(deltas);
        }
        j["uncertainty"] = std::move(u);
    }
    if (pf.sim) {
        Json s;
        s["h"] = pf.sim->step;
        s["t_end"] = pf.sim->t_end;
        if (pf.sim->x0.size() > 0)
            s["x0"] = vector_to_json(pf.sim->x0);
        j["sim"] = std::move(s);
    }
    if (pf.homotopy) {
        Json h;
        h["T"] = pf.homotopy->t_steps;
        h["eps_feas"] = pf.homotopy->eps_feas;
        h["q_shift"] = pf.homotopy->q_shift;
        h["max_refinements"] = pf.homotopy->max_refinements;
        j["homotopy"] = std::move(h);
    }
    if (!pf.reference_controllers.empty()) {
        Json refs;
        for (const auto& [name, k] : pf.reference_controllers)
            refs[name] = controller_blocks_to_json(k);
        j["reference_controllers"] = std::move(refs);
    }
    return j.dump(2) + "\n";
}

ControllerFile parse_controller_json(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("controller file: invalid JSON: ") + e.what());
    }
    ControllerFile cf;
    cf.controller = parse_controller_blocks(j, "controller file");
    if (j.contains("provenance")) {
        const Json& pv = j.at("provenance");
        ControllerProvenance prov;
        if (pv.contains("alpha"))
            prov.alpha = pv.at("alpha").get<double>();
        if (pv.contains("robustly_stable"))
            prov.robustly_stable = pv.at("robustly_stable").get<bool>();
        if (pv.contains("eta_trace"))
            for (const auto& pair : pv.at("eta_trace"))
                prov.eta_trace.emplace_back(pair.at(0).get<double>(), pair.at(1).get<double>());
        cf.provenance = std::move(prov);
    }
    return cf;
}

ControllerFile parse_controller(const std::string& path) {
    return parse_controller_json(read_file(path));
}

std::string serialize_controller(const ControllerFile& cf) {
    Json j = controller_blocks_to_json(cf.controller);
    if (cf.provenance) {
        Json pv;
        pv["alpha"] = cf.provenance->alpha;
        pv["robustly_stable"] = cf.provenance->robustly_stable;
        Json trace = Json::array();
        for (const auto& [eta, margin] : cf.provenance->eta_trace)
            trace.push_back(Json::array({eta, margin}));
        pv["eta_trace"] = std::move(trace);
        j["provenance"] = std::move(pv);
    }
    return j.dump(2) + "\n";
}

void write_controller(const ControllerFile& cf, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open output file: " + path);
    out << serialize_controller(cf);
}

void write_trajectory_csv(const Trajectory& traj, int n, int n_agents, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open output file: " + path);
    out << "time";
    for (int i = 1; i <= n_agents; ++i)
        for (int k = 1; k <= n; ++k)
            out << ",agent" << i << "_x" << k;
    out << "\n";
    char buf[32];
    for (Eigen::Index t = 0; t < traj.times.size(); ++t) {
        std::snprintf(buf, sizeof(buf), "%.12g", traj.times(t));
        out << buf;
        for (int c = 0; c < n_agents * n; ++c) {
            std::snprintf(buf, sizeof(buf), "%.12g", traj.states(c, t));
            out << ',' << buf;
        }
        out << "\n";
    }
}

TrajectoryTable read_trajectory_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open file: " + path);
    std::string line;
    if (!std::getline(in, line))
        throw std::invalid_argument("trajectory file: empty");

    std::vector<std::string> header;
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ','))
            header.push_back(cell);
    }
    if (header.empty() || header[0] != "time")
        throw std::invalid_argument("trajectory file: first column must be 'time'");
    int n_agents = 0, n = 0;
    for (std::size_t c = 1; c < header.size(); ++c) {
        int agent = 0, comp = 0;
        if (std::sscanf(header[c].c_str(), "agent%d_x%d", &agent, &comp) != 2)
            throw std::invalid_argument("trajectory file: bad column name '" + header[c] + "'");
        n_agents = std::max(n_agents, agent);
        n = std::max(n, comp);
    }
    if (static_cast<std::size_t>(n_agents) * static_cast<std::size_t>(n) + 1 != header.size())
        throw std::invalid_argument("trajectory file: column names do not tile agents x states");

    std::vector<double> times;
    std::vector<double> flat;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(ss, cell, ','))
            row.push_back(std::stod(cell));
        if (row.size() != header.size())
            throw std::invalid_argument("trajectory file: row width mismatch");
        times.push_back(row[0]);
        flat.insert(flat.end(), row.begin() + 1, row.end());
    }
    if (times.size() < 2)
        throw std::invalid_argument("trajectory file: need at least two rows");

    TrajectoryTable table;
    table.n = n;
    table.n_agents = n_agents;
    table.traj.times = Eigen::Map<Vec>(times.data(), static_cast<Eigen::Index>(times.size()));
    table.traj.states =
        Eigen::Map<Mat>(flat.data(), static_cast<Eigen::Index>(n_agents) * n,
                        static_cast<Eigen::Index>(times.size()));
    return table;
}

void write_metrics_csv(const std::vector<MetricsReport>& reports, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open output file: " + path);
    out << "agent,ISE,IAE,ITSE,ITAE\n";
    char buf[32];
    for (std::size_t i = 0; i < reports.size(); ++i) {
        out << (i + 1);
        for (double v : {reports[i].ise, reports[i].iae, reports[i].itse, reports[i].itae}) {
            std::snprintf(buf, sizeof(buf), "%.12g", v);
            out << ',' << buf;
        }
        out << "\n";
    }
}

}  // namespace fomas
