#include "frc/problem_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace frc {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& why) {
    throw SchemaError(field, "problem file: " + field + ": " + why);
}

const json& need(const json& obj, const std::string& path, const char* key) {
    if (!obj.is_object()) fail(path, "expected an object");
    const auto it = obj.find(key);
    if (it == obj.end()) fail(path + "." + key, "missing required field");
    return *it;
}

double number_at(const json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "expected a number");
    return v.get<double>();
}

int integer_at(const json& v, const std::string& path) {
    if (!v.is_number_integer()) fail(path, "expected an integer");
    return v.get<int>();
}

Vector vector_at(const json& v, const std::string& path, int want = -1) {
    if (!v.is_array()) fail(path, "expected an array of numbers");
    Vector out(v.size());
    for (size_t i = 0; i < v.size(); ++i)
        out(static_cast<int>(i)) = number_at(v[i], path + "[" + std::to_string(i) + "]");
    if (want >= 0 && out.size() != want)
        fail(path, "expected " + std::to_string(want) + " entries, got " +
                       std::to_string(out.size()));
    return out;
}

Matrix matrix_at(const json& v, const std::string& path, int rows = -1, int cols = -1) {
    if (!v.is_array() || v.empty()) fail(path, "expected a nested array (row-major matrix)");
    const size_t r = v.size();
    if (!v[0].is_array() || v[0].empty()) fail(path + "[0]", "expected a row array");
    const size_t c = v[0].size();
    Matrix out(r, c);
    for (size_t i = 0; i < r; ++i) {
        const std::string rp = path + "[" + std::to_string(i) + "]";
        if (!v[i].is_array() || v[i].size() != c) fail(rp, "ragged matrix rows");
        for (size_t j = 0; j < c; ++j)
            out(static_cast<int>(i), static_cast<int>(j)) =
                number_at(v[i][j], rp + "[" + std::to_string(j) + "]");
    }
    if ((rows >= 0 && out.rows() != rows) || (cols >= 0 && out.cols() != cols))
        fail(path, "expected a " + std::to_string(rows) + "x" + std::to_string(cols) + " matrix");
    return out;
}

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

json vector_to_json(const Vector& v) {
    json out = json::array();
    for (int i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

Nonlinearity nonlinearity_at(const json& v, const std::string& path) {
    const std::string s = v.is_string() ? v.get<std::string>() : "";
    if (s == "zero") return Nonlinearity::zero;
    if (s == "sine") return Nonlinearity::sine;
    if (s == "saturation") return Nonlinearity::saturation;
    fail(path, "expected one of \"zero\", \"sine\", \"saturation\"");
}

ControlCost cost_kind_at(const json& v, const std::string& path) {
    const std::string s = v.is_string() ? v.get<std::string>() : "";
    if (s == "zero") return ControlCost::zero;
    if (s == "linear") return ControlCost::linear;
    if (s == "quadratic") return ControlCost::quadratic;
    if (s == "absolute") return ControlCost::absolute;
    fail(path, "expected one of \"zero\", \"linear\", \"quadratic\", \"absolute\"");
}

const char* nonlinearity_name(Nonlinearity k) {
    switch (k) {
    case Nonlinearity::zero: return "zero";
    case Nonlinearity::sine: return "sine";
    case Nonlinearity::saturation: return "saturation";
    }
    return "zero";
}

const char* cost_kind_name(ControlCost k) {
    switch (k) {
    case ControlCost::zero: return "zero";
    case ControlCost::linear: return "linear";
    case ControlCost::quadratic: return "quadratic";
    case ControlCost::absolute: return "absolute";
    }
    return "zero";
}

void parse_samples(const json& v, const std::string& path, int n,
                   std::vector<double>& times, std::vector<Vector>& values) {
    if (!v.is_object()) fail(path, "expected an object with \"times\" and \"values\"");
    const json& ts = need(v, path, "times");
    const json& vs = need(v, path, "values");
    if (!ts.is_array() || !vs.is_array() || ts.size() != vs.size())
        fail(path, "times and values must be arrays of equal length");
    for (size_t k = 0; k < ts.size(); ++k) {
        times.push_back(number_at(ts[k], path + ".times[" + std::to_string(k) + "]"));
        values.push_back(vector_at(vs[k], path + ".values[" + std::to_string(k) + "]", n));
    }
}

} // namespace

ProblemFile parse_problem(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        fail("(document)", e.what());
    }
    if (!root.is_object()) fail("(document)", "expected a JSON object");

    ProblemFile out;
    ProblemSpec& p = out.problem;

    p.alpha = number_at(need(root, "", "alpha"), "alpha");
    p.beta = number_at(need(root, "", "beta"), "beta");
    p.horizon = number_at(need(root, "", "horizon"), "horizon");
    p.x0 = vector_at(need(root, "", "x0"), "x0");
    const int n = static_cast<int>(p.x0.size());
    if (n < 1) fail("x0", "state dimension must be positive");

    const json& ops = need(root, "", "operators");
    const Matrix L = ops.contains("L") ? matrix_at(ops["L"], "operators.L", n, n)
                                       : Matrix::Identity(n, n);
    const Matrix M = ops.contains("M") ? matrix_at(ops["M"], "operators.M", n, n)
                                       : Matrix::Identity(n, n);
    const Matrix E = ops.contains("E") ? matrix_at(ops["E"], "operators.E", n, n)
                                       : Matrix::Zero(n, n);
    p.triple = OperatorTriple::make(L, M, E);

    const json& channels = need(root, "", "channels");
    if (!channels.is_array() || channels.empty())
        fail("channels", "expected a nonempty array of channel objects");
    p.channels = static_cast<int>(channels.size());

    const json& constraint = need(root, "", "constraint");
    const json& atoms = need(constraint, "constraint", "atoms");
    if (!atoms.is_array() || atoms.empty())
        fail("constraint.atoms", "expected a nonempty array of control points");
    for (size_t j = 0; j < atoms.size(); ++j)
        p.constraint.atoms.push_back(
            vector_at(atoms[j], "constraint.atoms[" + std::to_string(j) + "]"));
    const int m = static_cast<int>(p.constraint.atoms[0].size());
    if (constraint.contains("state_dependence")) {
        const json& sd = constraint["state_dependence"];
        const json& rule = need(sd, "constraint.state_dependence", "rule");
        const std::string rs = rule.is_string() ? rule.get<std::string>() : "";
        if (rs == "fixed") {
            p.constraint.rule = FiniteControlSet::StateRule::fixed;
        } else if (rs == "translate") {
            p.constraint.rule = FiniteControlSet::StateRule::translate;
            p.constraint.W =
                matrix_at(need(sd, "constraint.state_dependence", "W"),
                          "constraint.state_dependence.W", m, n);
        } else {
            fail("constraint.state_dependence.rule", "expected \"fixed\" or \"translate\"");
        }
    }

    for (size_t i = 0; i < channels.size(); ++i) {
        const std::string path = "channels[" + std::to_string(i) + "]";
        p.B.push_back(matrix_at(need(channels[i], path, "B"), path + ".B", n, m));
    }

    if (root.contains("dynamics")) {
        const json& dyn = root["dynamics"];
        const std::string path = "dynamics";
        if (!dyn.is_object()) fail(path, "expected an object");
        if (dyn.contains("C")) p.dynamics.C = matrix_at(dyn["C"], "dynamics.C", n, n);
        if (dyn.contains("D")) {
            const json& d = dyn["D"];
            if (!d.is_array() || static_cast<int>(d.size()) != p.channels)
                fail("dynamics.D", "expected one matrix per channel");
            for (size_t i = 0; i < d.size(); ++i) {
                const std::string dp = "dynamics.D[" + std::to_string(i) + "]";
                if (d[i].is_null()) {
                    p.dynamics.D.emplace_back();
                } else {
                    p.dynamics.D.push_back(matrix_at(d[i], dp, n, n));
                }
            }
        }
        if (dyn.contains("nonlinearity")) {
            const json& nl = dyn["nonlinearity"];
            p.dynamics.kind =
                nonlinearity_at(need(nl, "dynamics.nonlinearity", "kind"),
                                "dynamics.nonlinearity.kind");
            if (nl.contains("gain"))
                p.dynamics.gain = number_at(nl["gain"], "dynamics.nonlinearity.gain");
        }
        if (dyn.contains("forcing"))
            parse_samples(dyn["forcing"], "dynamics.forcing", n, p.dynamics.forcing_times,
                          p.dynamics.forcing_values);
    }

    if (root.contains("nonlocal")) {
        const json& nl = root["nonlocal"];
        if (!nl.is_object()) fail("nonlocal", "expected an object");
        if (nl.contains("trajectory_samples")) {
            const json& samples = nl["trajectory_samples"];
            if (!samples.is_array()) fail("nonlocal.trajectory_samples", "expected an array");
            for (size_t k = 0; k < samples.size(); ++k) {
                const std::string sp = "nonlocal.trajectory_samples[" + std::to_string(k) + "]";
                p.nonlocal.tau.push_back(number_at(need(samples[k], sp, "tau"), sp + ".tau"));
                p.nonlocal.H.push_back(matrix_at(need(samples[k], sp, "H"), sp + ".H", n, n));
            }
        }
        if (nl.contains("control_sample")) {
            const json& cs = nl["control_sample"];
            p.nonlocal.tau_u = number_at(need(cs, "nonlocal.control_sample", "tau"),
                                         "nonlocal.control_sample.tau");
            p.nonlocal.G = matrix_at(need(cs, "nonlocal.control_sample", "G"),
                                     "nonlocal.control_sample.G", n, n);
        }
    }

    const json& costs = need(root, "", "costs");
    if (!costs.is_array() || static_cast<int>(costs.size()) != p.channels)
        fail("costs", "expected one cost object per channel");
    for (size_t i = 0; i < costs.size(); ++i) {
        const std::string path = "costs[" + std::to_string(i) + "]";
        if (!costs[i].is_object()) fail(path, "expected an object");
        CostSpec cs;
        if (costs[i].contains("P")) cs.P = matrix_at(costs[i]["P"], path + ".P", n, n);
        if (costs[i].contains("p"))
            parse_samples(costs[i]["p"], path + ".p", n, cs.p_times, cs.p_values);
        if (costs[i].contains("q")) {
            const json& q = costs[i]["q"];
            cs.q_kind = cost_kind_at(need(q, path + ".q", "kind"), path + ".q.kind");
            if (cs.q_kind == ControlCost::linear)
                cs.q_coeff = vector_at(need(q, path + ".q", "coeff"), path + ".q.coeff", m);
            if (q.contains("center"))
                cs.q_center = vector_at(q["center"], path + ".q.center", m);
            if (q.contains("scale")) cs.q_scale = number_at(q["scale"], path + ".q.scale");
        }
        p.costs.push_back(std::move(cs));
    }

    if (root.contains("solver")) {
        const json& s = root["solver"];
        if (!s.is_object()) fail("solver", "expected an object");
        if (s.contains("tol")) out.solver.tol = number_at(s["tol"], "solver.tol");
        if (s.contains("max_iter"))
            out.solver.max_iter = integer_at(s["max_iter"], "solver.max_iter");
    }

    p.validate();
    return out;
}

ProblemFile load_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("(file)", "problem file: cannot open " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_problem(buffer.str());
}

std::string serialize_problem(const ProblemFile& file) {
    const ProblemSpec& p = file.problem;
    json root;
    root["alpha"] = p.alpha;
    root["beta"] = p.beta;
    root["horizon"] = p.horizon;
    root["x0"] = vector_to_json(p.x0);
    root["operators"] = {{"L", matrix_to_json(p.triple.L)},
                         {"M", matrix_to_json(p.triple.M)},
                         {"E", matrix_to_json(p.triple.E)}};

    json channels = json::array();
    for (const auto& B : p.B) channels.push_back(json{{"B", matrix_to_json(B)}});
    root["channels"] = channels;

    json dyn;
    if (p.dynamics.C.size() > 0) dyn["C"] = matrix_to_json(p.dynamics.C);
    if (!p.dynamics.D.empty()) {
        json d = json::array();
        for (const auto& Di : p.dynamics.D)
            d.push_back(Di.size() > 0 ? matrix_to_json(Di) : json(nullptr));
        dyn["D"] = d;
    }
    if (p.dynamics.kind != Nonlinearity::zero || p.dynamics.gain != 0.0)
        dyn["nonlinearity"] = {{"kind", nonlinearity_name(p.dynamics.kind)},
                               {"gain", p.dynamics.gain}};
    if (!p.dynamics.forcing_times.empty()) {
        json values = json::array();
        for (const auto& v : p.dynamics.forcing_values) values.push_back(vector_to_json(v));
        dyn["forcing"] = {{"times", p.dynamics.forcing_times}, {"values", values}};
    }
    if (!dyn.is_null()) root["dynamics"] = dyn;

    if (!p.nonlocal.trivial()) {
        json nl;
        if (!p.nonlocal.tau.empty()) {
            json samples = json::array();
            for (size_t k = 0; k < p.nonlocal.tau.size(); ++k)
                samples.push_back(json{{"tau", p.nonlocal.tau[k]},
                                       {"H", matrix_to_json(p.nonlocal.H[k])}});
            nl["trajectory_samples"] = samples;
        }
        if (p.nonlocal.G.size() > 0)
            nl["control_sample"] = {{"tau", p.nonlocal.tau_u},
                                    {"G", matrix_to_json(p.nonlocal.G)}};
        root["nonlocal"] = nl;
    }

    json costs = json::array();
    for (const auto& cs : p.costs) {
        json c;
        if (cs.P.size() > 0) c["P"] = matrix_to_json(cs.P);
        if (!cs.p_times.empty()) {
            json values = json::array();
            for (const auto& v : cs.p_values) values.push_back(vector_to_json(v));
            c["p"] = {{"times", cs.p_times}, {"values", values}};
        }
        json q;
        q["kind"] = cost_kind_name(cs.q_kind);
        if (cs.q_kind == ControlCost::linear) q["coeff"] = vector_to_json(cs.q_coeff);
        if (cs.q_center.size() > 0) q["center"] = vector_to_json(cs.q_center);
        if (cs.q_scale != 1.0) q["scale"] = cs.q_scale;
        c["q"] = q;
        costs.push_back(c);
    }
    root["costs"] = costs;

    json constraint;
    json atoms = json::array();
    for (const auto& a : p.constraint.atoms) atoms.push_back(vector_to_json(a));
    constraint["atoms"] = atoms;
    if (p.constraint.rule == FiniteControlSet::StateRule::translate)
        constraint["state_dependence"] = {{"rule", "translate"},
                                          {"W", matrix_to_json(p.constraint.W)}};
    root["constraint"] = constraint;

    root["solver"] = {{"tol", file.solver.tol}, {"max_iter", file.solver.max_iter}};
    return root.dump(2) + "\n";
}

} // namespace frc
