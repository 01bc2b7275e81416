#include "domsplit/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "domsplit/error.hpp"
#include "domsplit/rng.hpp"
#include "domsplit/snumbers.hpp"

namespace domsplit {

using json = nlohmann::json;

namespace {

constexpr double two_pi = 6.283185307179586476925286766559;

[[noreturn]] void fail(const std::string& path, std::string what) {
    // nested config errors already carry the prefix
    const std::string prefix = std::string(error_code_name(ErrorCode::config)) + ": ";
    if (what.rfind(prefix, 0) == 0) what.erase(0, prefix.size());
    throw Error(ErrorCode::config, path + ": " + what);
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string index(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

// Object view with a closed key set.
class Node {
public:
    Node(const json& j, std::string path, std::set<std::string> allowed) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) fail(path_.empty() ? "<root>" : path_, "expected an object");
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!allowed.count(it.key())) fail(join(path_, it.key()), "unknown field");
    }
    bool has(const std::string& key) const { return j_.contains(key); }
    const json& at(const std::string& key) const {
        if (!has(key)) fail(join(path_, key), "required field missing");
        return j_.at(key);
    }
    std::string path(const std::string& key) const { return join(path_, key); }

    long long integer(const std::string& key, long long def, bool required = false) const {
        if (!has(key)) {
            if (required) fail(path(key), "required field missing");
            return def;
        }
        const json& v = j_.at(key);
        if (!v.is_number_integer()) fail(path(key), "expected an integer");
        return v.get<long long>();
    }
    std::uint64_t unsigned_integer(const std::string& key, std::uint64_t def) const {
        if (!has(key)) return def;
        const json& v = j_.at(key);
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
            fail(path(key), "expected a nonnegative integer");
        return v.get<std::uint64_t>();
    }
    double scalar(const std::string& key, double def, bool required = false) const;
    std::string string(const std::string& key, const std::string& def, bool required = false) const {
        if (!has(key)) {
            if (required) fail(path(key), "required field missing");
            return def;
        }
        const json& v = j_.at(key);
        if (!v.is_string()) fail(path(key), "expected a string");
        return v.get<std::string>();
    }

private:
    const json& j_;
    std::string path_;
};

double scalar_value(const json& v, const std::string& path) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        try {
            return parse_scalar(v.get<std::string>());
        } catch (const Error& e) {
            fail(path, e.what());
        }
    }
    fail(path, "expected a number or a rational string");
}

double Node::scalar(const std::string& key, double def, bool required) const {
    if (!has(key)) {
        if (required) fail(path(key), "required field missing");
        return def;
    }
    return scalar_value(j_.at(key), path(key));
}

Vector vector_value(const json& v, const std::string& path, int expected = -1) {
    if (!v.is_array()) fail(path, "expected an array");
    if (expected >= 0 && static_cast<int>(v.size()) != expected)
        fail(path, "expected " + std::to_string(expected) + " entries");
    Vector out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out(i) = scalar_value(v[i], index(path, i));
    return out;
}

Matrix matrix_value(const json& v, const std::string& path, int d) {
    if (!v.is_array() || static_cast<int>(v.size()) != d) fail(path, "expected " + std::to_string(d) + " rows");
    Matrix m(d, d);
    for (int i = 0; i < d; ++i) m.row(i) = vector_value(v[i], index(path, i), d).transpose();
    return m;
}

std::vector<int> grid_value(const json& v, const std::string& path, int expected) {
    std::vector<int> out;
    if (v.is_number_integer()) {
        out.assign(expected, v.get<int>());
    } else if (v.is_array()) {
        if (static_cast<int>(v.size()) != expected) fail(path, "expected " + std::to_string(expected) + " entries");
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number_integer()) fail(index(path, i), "expected an integer");
            out.push_back(v[i].get<int>());
        }
    } else {
        fail(path, "expected an integer or an array of integers");
    }
    for (int g : out)
        if (g < 1 || g > 1 << 16) fail(path, "grid sizes must lie in [1, 65536]");
    return out;
}

TrigTerm trig_term(const json& v, const std::string& path, int point_dim) {
    Node n(v, path, {"coefficient", "kind", "harmonic", "component"});
    TrigTerm t;
    t.coefficient = n.scalar("coefficient", 0.0, true);
    const std::string kind = n.string("kind", "cos");
    if (kind != "cos" && kind != "sin") fail(n.path("kind"), "expected \"cos\" or \"sin\"");
    t.sine = kind == "sin";
    t.harmonic = static_cast<int>(n.integer("harmonic", 1));
    if (t.harmonic < 0) fail(n.path("harmonic"), "must be nonnegative");
    t.component = static_cast<int>(n.integer("component", 0));
    if (t.component < 0 || t.component >= point_dim) fail(n.path("component"), "no such base coordinate");
    return t;
}

TrigPoly trig_poly(const json& v, const std::string& path, int point_dim) {
    TrigPoly p;
    if (v.is_number() || v.is_string()) {
        p.constant = scalar_value(v, path);
        return p;
    }
    Node n(v, path, {"constant", "terms"});
    p.constant = n.scalar("constant", 0.0);
    if (n.has("terms")) {
        const json& t = n.at("terms");
        if (!t.is_array()) fail(n.path("terms"), "expected an array");
        for (std::size_t i = 0; i < t.size(); ++i) p.terms.push_back(trig_term(t[i], index(n.path("terms"), i), point_dim));
    }
    return p;
}

json trig_json(const TrigPoly& p) {
    json terms = json::array();
    for (const auto& t : p.terms)
        terms.push_back({{"coefficient", t.coefficient}, {"kind", t.sine ? "sin" : "cos"},
                         {"harmonic", t.harmonic}, {"component", t.component}});
    return {{"constant", p.constant}, {"terms", terms}};
}

json vector_json(const Vector& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

json matrix_json(const Matrix& m) {
    json a = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(vector_json(m.row(i).transpose()));
    return a;
}

FieldTerm field_term(const json& v, const std::string& path, int d, int point_dim, bool diagonal_only) {
    Node n(v, path, {"row", "col", "entry", "coefficient", "kind", "harmonic", "component"});
    int row, col;
    if (diagonal_only) {
        if (n.has("row") || n.has("col")) fail(path, "diagonal forcing uses \"entry\"");
        row = col = static_cast<int>(n.integer("entry", 0, true));
    } else {
        if (n.has("entry")) fail(n.path("entry"), "coupled terms use \"row\" and \"col\"");
        row = static_cast<int>(n.integer("row", 0, true));
        col = static_cast<int>(n.integer("col", 0, true));
    }
    if (row < 0 || row >= d) fail(n.path(diagonal_only ? "entry" : "row"), "index out of range");
    if (col < 0 || col >= d) fail(n.path("col"), "index out of range");
    FieldTerm t;
    t.coefficient = Matrix::Zero(d, d);
    t.coefficient(row, col) = n.scalar("coefficient", 0.0, true);
    const std::string kind = n.string("kind", "cos");
    if (kind != "cos" && kind != "sin") fail(n.path("kind"), "expected \"cos\" or \"sin\"");
    t.sine = kind == "sin";
    t.harmonic = static_cast<int>(n.integer("harmonic", 1));
    if (t.harmonic < 0) fail(n.path("harmonic"), "must be nonnegative");
    t.component = static_cast<int>(n.integer("component", 0));
    if (t.component < 0 || t.component >= point_dim) fail(n.path("component"), "no such base coordinate");
    return t;
}

json field_json(const FieldSpec& f) {
    json j;
    j["kind"] = f.kind;
    auto term_json = [&](const FieldTerm& t, bool diag) {
        int row = 0, col = 0;
        double c = 0.0;
        for (int i = 0; i < f.dim(); ++i)
            for (int k = 0; k < f.dim(); ++k)
                if (t.coefficient(i, k) != 0.0) {
                    row = i;
                    col = k;
                    c = t.coefficient(i, k);
                }
        json o = {{"coefficient", c}, {"kind", t.sine ? "sin" : "cos"}, {"harmonic", t.harmonic},
                  {"component", t.component}};
        if (diag) {
            o["entry"] = row;
        } else {
            o["row"] = row;
            o["col"] = col;
        }
        return o;
    };
    if (f.kind == "rotation") {
        j["omega"] = f.constant(0, 1);
    } else if (f.kind == "diagonal_trig") {
        j["diagonal"] = vector_json(f.constant.diagonal());
        json forcing = json::array();
        for (const auto& t : f.terms) forcing.push_back(term_json(t, true));
        j["forcing"] = forcing;
    } else {
        j["matrix"] = matrix_json(f.constant);
        if (f.kind == "coupled") {
            json terms = json::array();
            for (const auto& t : f.terms) terms.push_back(term_json(t, false));
            j["terms"] = terms;
        }
    }
    return j;
}

void line_col(const std::string& text, std::size_t byte, std::size_t& line, std::size_t& col) {
    line = 1;
    col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
}

Matrix rotation_in_plane(int d, double theta) {
    Matrix r = Matrix::Identity(d, d);
    const double c = std::cos(theta), s = std::sin(theta);
    r(0, 0) = c;
    r(0, 1) = -s;
    r(1, 0) = s;
    r(1, 1) = c;
    return r;
}

}  // namespace

double TrigPoly::operator()(const Vector& x) const {
    double v = constant;
    for (const auto& t : terms) {
        const double arg = two_pi * t.harmonic * (t.component < x.size() ? x(t.component) : 0.0);
        v += t.coefficient * (t.sine ? std::sin(arg) : std::cos(arg));
    }
    return v;
}

double parse_scalar(const std::string& text) {
    if (text == "golden") return (std::sqrt(5.0) - 1.0) / 2.0;
    const auto slash = text.find('/');
    auto number = [&](const std::string& s) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != s.size()) throw Error(ErrorCode::config, "malformed number '" + text + "'");
        return v;
    };
    if (slash == std::string::npos) return number(text);
    const double num = number(text.substr(0, slash));
    const double den = number(text.substr(slash + 1));
    if (den == 0.0) throw Error(ErrorCode::config, "zero denominator in '" + text + "'");
    return num / den;
}

ScenarioConfig parse_config(const std::string& text, const std::string& source) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line, col;
        line_col(text, e.byte > 0 ? e.byte - 1 : 0, line, col);
        throw Error(ErrorCode::config, source + ":" + std::to_string(line) + ":" + std::to_string(col) +
                                           ": syntax error");
    }
    Node top(root, "", {"name", "dimension", "norm", "base", "generator", "analysis", "flow", "output"});
    ScenarioConfig cfg;
    cfg.name = top.string("name", "unnamed");
    cfg.dim = static_cast<int>(top.integer("dimension", 0, true));
    if (cfg.dim < 2) fail("dimension", "must be at least 2");
    cfg.norm = top.string("norm", "euclidean");
    Norm norm = Norm::euclidean(cfg.dim);
    try {
        norm = Norm::parse(cfg.norm, cfg.dim);
    } catch (const Error& e) {
        fail("norm", e.what());
    }
    cfg.norm = norm.to_string();
    try {
        check_dim_cap(cfg.dim, norm);
    } catch (const Error& e) {
        fail("dimension", e.what());
    }

    // analysis first: the base grid default lives there
    if (top.has("analysis")) {
        Node a(top.at("analysis"), "analysis", {"k", "n_max", "tol", "grid", "seed", "criterion", "horizon"});
        cfg.analysis.k = static_cast<int>(a.integer("k", 1));
        cfg.analysis.n_max = static_cast<int>(a.integer("n_max", 60));
        cfg.analysis.tol = a.scalar("tol", 1e-8);
        cfg.analysis.grid = static_cast<int>(a.integer("grid", 128));
        cfg.analysis.seed = a.unsigned_integer("seed", cfg.analysis.seed);
        try {
            cfg.analysis.criterion = parse_criterion(a.string("criterion", "bogo"));
        } catch (const Error&) {
            fail("analysis.criterion", "expected bogo, magic or magic-simplified");
        }
        cfg.analysis.horizon = static_cast<int>(a.integer("horizon", 100000));
    }
    if (cfg.analysis.k < 1 || cfg.analysis.k >= cfg.dim) fail("analysis.k", "must satisfy 1 <= k < dimension");
    if (cfg.analysis.n_max < 8) fail("analysis.n_max", "must be at least 8");
    if (!(cfg.analysis.tol > 0.0)) fail("analysis.tol", "must be positive");
    if (cfg.analysis.grid < 1) fail("analysis.grid", "must be positive");
    if (cfg.analysis.horizon < cfg.analysis.n_max + 1) fail("analysis.horizon", "must exceed n_max");

    Node b(top.at("base"), "base", {"kind", "length", "alpha", "shift", "grid", "frequency"});
    cfg.base.kind = b.string("kind", "", true);
    int point_dim = 1;
    if (cfg.base.kind == "cycle") {
        cfg.base.length = static_cast<int>(b.integer("length", 1));
        if (cfg.base.length < 1) fail("base.length", "must be positive");
    } else if (cfg.base.kind == "rotation") {
        cfg.base.alpha = b.scalar("alpha", 0.0, true);
        cfg.base.grid = b.has("grid") ? grid_value(b.at("grid"), "base.grid", 1) : std::vector<int>{cfg.analysis.grid};
    } else if (cfg.base.kind == "torus") {
        cfg.base.shift = vector_value(b.at("shift"), "base.shift");
        point_dim = static_cast<int>(cfg.base.shift.size());
        if (point_dim < 1) fail("base.shift", "must be nonempty");
        cfg.base.grid = b.has("grid") ? grid_value(b.at("grid"), "base.grid", point_dim)
                                      : std::vector<int>(point_dim, std::max(1, static_cast<int>(std::lround(
                                                                     std::pow(cfg.analysis.grid, 1.0 / point_dim)))));
    } else if (cfg.base.kind == "flow") {
        if (b.has("frequency")) cfg.base.frequency = vector_value(b.at("frequency"), "base.frequency");
        point_dim = std::max<int>(1, static_cast<int>(cfg.base.frequency.size()));
        if (cfg.base.frequency.size() > 0)
            cfg.base.grid = b.has("grid") ? grid_value(b.at("grid"), "base.grid", point_dim)
                                          : std::vector<int>(point_dim, 16);
    } else {
        fail("base.kind", "expected cycle, rotation, torus or flow");
    }
    for (const char* key : {"length", "alpha", "shift", "grid", "frequency"}) {
        const std::string k = key;
        const bool used = (k == "length" && cfg.base.kind == "cycle") ||
                          (k == "alpha" && cfg.base.kind == "rotation") ||
                          (k == "shift" && cfg.base.kind == "torus") ||
                          (k == "grid" && cfg.base.kind != "cycle") || (k == "frequency" && cfg.base.kind == "flow");
        if (b.has(k) && !used) fail(b.path(k), "not used by base kind " + cfg.base.kind);
    }

    if (cfg.base.kind == "flow") {
        if (top.has("generator")) fail("generator", "flow scenarios take their field from \"flow\"");
        Node f(top.at("flow"), "flow", {"field", "step", "horizon", "m_list", "t_max", "eps_grid"});
        cfg.flow.present = true;
        cfg.flow.step = f.scalar("step", 1.0 / 256.0);
        cfg.flow.horizon = f.scalar("horizon", 64.0);
        cfg.flow.t_max = f.scalar("t_max", 8.0);
        cfg.flow.eps_grid = static_cast<int>(f.integer("eps_grid", 33));
        if (!(cfg.flow.step > 0.0 && cfg.flow.step <= 0.5)) fail("flow.step", "must lie in (0, 0.5]");
        if (!(cfg.flow.t_max >= 1.0)) fail("flow.t_max", "must be at least 1");
        if (!(cfg.flow.horizon >= cfg.flow.t_max + 1.0)) fail("flow.horizon", "must be at least t_max + 1");
        if (cfg.flow.eps_grid < 2) fail("flow.eps_grid", "must be at least 2");
        if (f.has("m_list")) {
            const json& ml = f.at("m_list");
            if (!ml.is_array() || ml.empty()) fail("flow.m_list", "expected a nonempty array");
            cfg.flow.m_list.clear();
            for (std::size_t i = 0; i < ml.size(); ++i) {
                if (!ml[i].is_number_integer() || ml[i].get<int>() < 1)
                    fail(index("flow.m_list", i), "expected a positive integer");
                cfg.flow.m_list.push_back(ml[i].get<int>());
            }
        }
        Node fd(f.at("field"), "flow.field", {"kind", "matrix", "omega", "diagonal", "forcing", "terms"});
        const std::string kind = fd.string("kind", "", true);
        auto terms = [&](const char* key, bool diag) {
            std::vector<FieldTerm> out;
            if (!fd.has(key)) return out;
            const json& t = fd.at(key);
            if (!t.is_array()) fail(fd.path(key), "expected an array");
            for (std::size_t i = 0; i < t.size(); ++i)
                out.push_back(field_term(t[i], index(fd.path(key), i), cfg.dim, point_dim, diag));
            return out;
        };
        if (kind == "constant") {
            cfg.flow.field = FieldSpec::constant_matrix(matrix_value(fd.at("matrix"), "flow.field.matrix", cfg.dim));
        } else if (kind == "rotation") {
            if (cfg.dim != 2) fail("flow.field.kind", "rotation fields are two-dimensional");
            cfg.flow.field = FieldSpec::rotation(fd.scalar("omega", 1.0));
        } else if (kind == "diagonal_trig") {
            cfg.flow.field = FieldSpec::diagonal_trig(vector_value(fd.at("diagonal"), "flow.field.diagonal", cfg.dim),
                                                      terms("forcing", true));
        } else if (kind == "coupled") {
            cfg.flow.field = FieldSpec::coupled(matrix_value(fd.at("matrix"), "flow.field.matrix", cfg.dim),
                                                terms("terms", false));
        } else {
            fail("flow.field.kind", "expected constant, rotation, diagonal_trig or coupled");
        }
    } else {
        if (top.has("flow")) fail("flow", "only used with base kind flow");
        Node g(top.at("generator"), "generator",
               {"kind", "matrix", "matrices", "angle", "diagonal", "frame", "energy", "potential", "perturbation",
                "seed"});
        GeneratorSpec& gs = cfg.generator;
        gs.kind = g.string("kind", "", true);
        if (gs.kind == "constant") {
            gs.matrix = matrix_value(g.at("matrix"), "generator.matrix", cfg.dim);
        } else if (gs.kind == "cycle") {
            if (cfg.base.kind != "cycle") fail("generator.kind", "cycle generators need a cycle base");
            const json& ms = g.at("matrices");
            if (!ms.is_array() || static_cast<int>(ms.size()) != cfg.base.length)
                fail("generator.matrices", "expected one matrix per cycle point");
            for (std::size_t i = 0; i < ms.size(); ++i)
                gs.matrices.push_back(matrix_value(ms[i], index("generator.matrices", i), cfg.dim));
        } else if (gs.kind == "rotation") {
            gs.angle_constant = g.scalar("angle", 0.0, true);
        } else if (gs.kind == "conjugated_diagonal") {
            gs.diagonal = vector_value(g.at("diagonal"), "generator.diagonal", cfg.dim);
            gs.angle = trig_poly(g.has("angle") ? g.at("angle") : json(0.0), "generator.angle", point_dim);
            gs.frame = g.string("frame", "symmetric");
            if (gs.frame != "symmetric" && gs.frame != "cohomologous")
                fail("generator.frame", "expected symmetric or cohomologous");
        } else if (gs.kind == "schrodinger") {
            if (cfg.dim != 2) fail("generator.kind", "Schrodinger generators are two-dimensional");
            gs.energy = g.scalar("energy", 0.0, true);
            gs.potential = trig_poly(g.at("potential"), "generator.potential", point_dim);
        } else if (gs.kind == "random_near_diagonal") {
            gs.diagonal = vector_value(g.at("diagonal"), "generator.diagonal", cfg.dim);
            gs.perturbation = g.scalar("perturbation", 0.1);
            if (gs.perturbation < 0.0) fail("generator.perturbation", "must be nonnegative");
            gs.seed = g.unsigned_integer("seed", cfg.analysis.seed);
        } else {
            fail("generator.kind",
                 "expected constant, cycle, rotation, conjugated_diagonal, schrodinger or random_near_diagonal");
        }
    }
    if (top.has("output")) {
        Node o(top.at("output"), "output", {"dir"});
        cfg.output_dir = o.string("dir", "");
    }
    cfg.canonical = materialize(cfg);
    if (cfg.base.kind != "flow" && cfg.generator.kind == "schrodinger") build_cocycle(cfg);
    return cfg;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::io, "cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

std::string materialize(const ScenarioConfig& cfg) {
    json j;
    j["name"] = cfg.name;
    j["dimension"] = cfg.dim;
    j["norm"] = cfg.norm;
    json b = {{"kind", cfg.base.kind}};
    if (cfg.base.kind == "cycle") b["length"] = cfg.base.length;
    if (cfg.base.kind == "rotation") b["alpha"] = cfg.base.alpha;
    if (cfg.base.kind == "torus") b["shift"] = vector_json(cfg.base.shift);
    if (cfg.base.kind == "flow") b["frequency"] = vector_json(cfg.base.frequency);
    if (!cfg.base.grid.empty()) b["grid"] = cfg.base.grid;
    j["base"] = b;
    j["analysis"] = {{"k", cfg.analysis.k},
                     {"n_max", cfg.analysis.n_max},
                     {"tol", cfg.analysis.tol},
                     {"grid", cfg.analysis.grid},
                     {"seed", cfg.analysis.seed},
                     {"criterion", criterion_name(cfg.analysis.criterion)},
                     {"horizon", cfg.analysis.horizon}};
    if (cfg.flow.present) {
        j["flow"] = {{"field", field_json(cfg.flow.field)}, {"step", cfg.flow.step},     {"horizon", cfg.flow.horizon},
                     {"m_list", cfg.flow.m_list},             {"t_max", cfg.flow.t_max}, {"eps_grid", cfg.flow.eps_grid}};
    } else {
        const GeneratorSpec& gs = cfg.generator;
        json g = {{"kind", gs.kind}};
        if (gs.kind == "constant") g["matrix"] = matrix_json(gs.matrix);
        if (gs.kind == "cycle") {
            json ms = json::array();
            for (const auto& m : gs.matrices) ms.push_back(matrix_json(m));
            g["matrices"] = ms;
        }
        if (gs.kind == "rotation") g["angle"] = gs.angle_constant;
        if (gs.kind == "conjugated_diagonal") {
            g["diagonal"] = vector_json(gs.diagonal);
            g["angle"] = trig_json(gs.angle);
            g["frame"] = gs.frame;
        }
        if (gs.kind == "schrodinger") {
            g["energy"] = gs.energy;
            g["potential"] = trig_json(gs.potential);
        }
        if (gs.kind == "random_near_diagonal") {
            g["diagonal"] = vector_json(gs.diagonal);
            g["perturbation"] = gs.perturbation;
            g["seed"] = gs.seed;
        }
        j["generator"] = g;
    }
    if (!cfg.output_dir.empty()) j["output"] = {{"dir", cfg.output_dir}};
    return j.dump(2) + "\n";
}

bool is_flow(const ScenarioConfig& cfg) { return cfg.base.kind == "flow"; }

CocycleSystem build_cocycle(const ScenarioConfig& cfg) {
    if (is_flow(cfg)) throw Error(ErrorCode::config, "flow scenario has no discrete generator");
    const int d = cfg.dim;
    BaseSystem base = BaseSystem::finite_cycle(1);
    if (cfg.base.kind == "cycle") base = BaseSystem::finite_cycle(cfg.base.length);
    if (cfg.base.kind == "rotation") base = BaseSystem::circle_rotation(cfg.base.alpha, cfg.base.grid.front());
    if (cfg.base.kind == "torus") base = BaseSystem::torus_translation(cfg.base.shift, cfg.base.grid);
    const GeneratorSpec gs = cfg.generator;
    CocycleSystem::Generator gen;
    if (gs.kind == "constant") {
        gen = [m = gs.matrix](const Vector&) { return m; };
    } else if (gs.kind == "cycle") {
        gen = [ms = gs.matrices](const Vector& x) { return ms.at(static_cast<std::size_t>(std::lround(x(0)))); };
    } else if (gs.kind == "rotation") {
        gen = [d, a = gs.angle_constant](const Vector&) { return rotation_in_plane(d, a); };
    } else if (gs.kind == "conjugated_diagonal") {
        const Matrix dg = gs.diagonal.asDiagonal();
        if (gs.frame == "symmetric") {
            gen = [d, dg, angle = gs.angle](const Vector& x) {
                const Matrix r = rotation_in_plane(d, angle(x));
                return Matrix(r * dg * r.transpose());
            };
        } else {
            gen = [d, dg, angle = gs.angle, base](const Vector& x) {
                const Matrix r0 = rotation_in_plane(d, angle(x));
                const Matrix r1 = rotation_in_plane(d, angle(base.forward(x)));
                return Matrix(r1 * dg * r0.transpose());
            };
        }
    } else if (gs.kind == "schrodinger") {
        gen = [e = gs.energy, v = gs.potential](const Vector& x) { return Matrix{{e - v(x), -1.0}, {1.0, 0.0}}; };
    } else if (gs.kind == "random_near_diagonal") {
        const Matrix dg = gs.diagonal.asDiagonal();
        Rng rng(mix_seed(gs.seed, 0x67656eULL));
        if (cfg.base.kind == "cycle") {
            std::vector<Matrix> per;
            for (int i = 0; i < cfg.base.length; ++i) per.push_back(dg + gs.perturbation * rng.normal_matrix(d, d));
            gen = [per](const Vector& x) { return per.at(static_cast<std::size_t>(std::lround(x(0)))); };
        } else {
            const int pd = static_cast<int>(base.samples().front().size());
            const double scale = gs.perturbation / std::sqrt(1.0 + 2.0 * pd);
            Matrix p0 = rng.normal_matrix(d, d);
            std::vector<Matrix> cs, ss;
            for (int c = 0; c < pd; ++c) {
                cs.push_back(rng.normal_matrix(d, d));
                ss.push_back(rng.normal_matrix(d, d));
            }
            gen = [dg, scale, p0, cs, ss](const Vector& x) {
                Matrix g = p0;
                for (std::size_t c = 0; c < cs.size(); ++c)
                    g += cs[c] * std::cos(two_pi * x(c)) + ss[c] * std::sin(two_pi * x(c));
                return Matrix(dg + scale * g);
            };
        }
    }
    CocycleSystem c(std::move(base), gen, d, Norm::parse(cfg.norm, d), cfg.name);
    c.set_horizon(cfg.analysis.horizon);
    if (gs.kind == "schrodinger") {
        for (const auto& x : c.base().samples()) {
            const double det = gen(x).determinant();
            if (std::abs(det - 1.0) > 1e-12) fail("generator", "Schrodinger determinant differs from 1");
        }
    }
    return c;
}

FlowCocycle build_flow(const ScenarioConfig& cfg) {
    if (!is_flow(cfg)) throw Error(ErrorCode::config, "not a flow scenario");
    FlowBase fb = cfg.base.frequency.size() == 0 ? FlowBase::fixed_point()
                                                 : FlowBase::torus(cfg.base.frequency, cfg.base.grid);
    return FlowCocycle(fb, cfg.flow.field, Norm::parse(cfg.norm, cfg.dim), cfg.flow.step, cfg.flow.horizon);
}

}  // namespace domsplit
