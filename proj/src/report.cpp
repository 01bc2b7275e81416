#include "domsplit/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>
#include <openssl/evp.h>

#include "domsplit/error.hpp"

namespace domsplit {

using json = nlohmann::json;

namespace {

bool same(double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); }

json number(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

double read_number(const json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "nan") return std::nan("");
        if (s == "inf") return infinity;
        if (s == "-inf") return -infinity;
    }
    throw Error(ErrorCode::io, "malformed number in report");
}

json matrix_out(const Matrix& m) {
    json data = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index k = 0; k < m.cols(); ++k) data.push_back(number(m(i, k)));
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

Matrix matrix_in(const json& j) {
    const auto r = j.at("rows").get<Eigen::Index>();
    const auto c = j.at("cols").get<Eigen::Index>();
    const json& data = j.at("data");
    if (static_cast<Eigen::Index>(data.size()) != r * c) throw Error(ErrorCode::io, "malformed matrix in report");
    Matrix m(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index k = 0; k < c; ++k) m(i, k) = read_number(data[i * c + k]);
    return m;
}

bool same_matrix(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    for (Eigen::Index i = 0; i < a.size(); ++i)
        if (!same(a.data()[i], b.data()[i])) return false;
    return true;
}

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error(ErrorCode::io, "cannot write " + p.string());
    out << text;
    if (!out) throw Error(ErrorCode::io, "cannot write " + p.string());
}

}  // namespace

bool Quantity::operator==(const Quantity& o) const { return same(value, o.value) && provenance == o.provenance; }

bool Table::operator==(const Table& o) const {
    if (name != o.name || x_label != o.x_label || provenance != o.provenance || rows.size() != o.rows.size())
        return false;
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (!same(rows[i].n, o.rows[i].n) || !same(rows[i].value, o.rows[i].value)) return false;
    return true;
}

bool PointRecord::operator==(const PointRecord& o) const {
    if (x.size() != o.x.size() || !same(projection_norm, o.projection_norm)) return false;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (!same(x[i], o.x[i])) return false;
    return same_matrix(e, o.e) && same_matrix(f, o.f);
}

bool ReportBundle::operator==(const ReportBundle& o) const {
    return provenance == o.provenance && status == o.status && diagnostic == o.diagnostic && config == o.config &&
           quantities == o.quantities && checks == o.checks && tables == o.tables &&
           points_provenance == o.points_provenance && points == o.points;
}

const Table* ReportBundle::table(const std::string& name) const {
    for (const auto& t : tables)
        if (t.name == name) return &t;
    return nullptr;
}

std::string to_json(const ReportBundle& b) {
    json j;
    j["provenance"] = {{"config_hash", b.provenance.config_hash},
                       {"seed", b.provenance.seed},
                       {"library_version", b.provenance.library_version},
                       {"scenario", b.provenance.scenario}};
    j["status"] = b.status;
    j["diagnostic"] = b.diagnostic;
    j["config"] = b.config.empty() ? json() : json::parse(b.config);
    json q = json::object();
    for (const auto& [k, v] : b.quantities) q[k] = {{"value", number(v.value)}, {"provenance", v.provenance}};
    j["quantities"] = q;
    json c = json::object();
    for (const auto& [k, v] : b.checks) c[k] = v;
    j["checks"] = c;
    json tables = json::array();
    for (const auto& t : b.tables) {
        json rows = json::array();
        for (const auto& r : t.rows) rows.push_back(json::array({number(r.n), number(r.value)}));
        tables.push_back({{"name", t.name}, {"x_label", t.x_label}, {"provenance", t.provenance}, {"rows", rows}});
    }
    j["tables"] = tables;
    json points = json::array();
    for (const auto& p : b.points) {
        json x = json::array();
        for (double v : p.x) x.push_back(number(v));
        points.push_back({{"x", x}, {"e", matrix_out(p.e)}, {"f", matrix_out(p.f)},
                          {"projection_norm", number(p.projection_norm)}});
    }
    j["splitting"] = {{"provenance", b.points_provenance}, {"points", points}};
    return j.dump(2) + "\n";
}

ReportBundle from_json(const std::string& text) {
    ReportBundle b;
    try {
        const json j = json::parse(text);
        const json& p = j.at("provenance");
        b.provenance.config_hash = p.at("config_hash").get<std::string>();
        b.provenance.seed = p.at("seed").get<std::string>();
        b.provenance.library_version = p.at("library_version").get<std::string>();
        b.provenance.scenario = p.at("scenario").get<std::string>();
        b.status = j.at("status").get<std::string>();
        b.diagnostic = j.at("diagnostic").get<std::string>();
        b.config = j.at("config").is_null() ? std::string() : j.at("config").dump(2) + "\n";
        for (auto it = j.at("quantities").begin(); it != j.at("quantities").end(); ++it)
            b.quantities[it.key()] = {read_number(it.value().at("value")),
                                      it.value().at("provenance").get<std::string>()};
        for (auto it = j.at("checks").begin(); it != j.at("checks").end(); ++it) b.checks[it.key()] = it.value().get<bool>();
        for (const auto& t : j.at("tables")) {
            Table tb;
            tb.name = t.at("name").get<std::string>();
            tb.x_label = t.at("x_label").get<std::string>();
            tb.provenance = t.at("provenance").get<std::string>();
            for (const auto& r : t.at("rows")) tb.rows.push_back({read_number(r.at(0)), read_number(r.at(1))});
            b.tables.push_back(std::move(tb));
        }
        const json& s = j.at("splitting");
        b.points_provenance = s.at("provenance").get<std::string>();
        for (const auto& pt : s.at("points")) {
            PointRecord r;
            for (const auto& v : pt.at("x")) r.x.push_back(read_number(v));
            r.e = matrix_in(pt.at("e"));
            r.f = matrix_in(pt.at("f"));
            r.projection_norm = read_number(pt.at("projection_norm"));
            b.points.push_back(std::move(r));
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::io, std::string("malformed report: ") + e.what());
    }
    return b;
}

std::string to_csv(const Table& t) {
    std::string out = t.x_label + ",value\n";
    for (const auto& r : t.rows) out += format_number(r.n) + "," + format_number(r.value) + "\n";
    return out;
}

void emit_report(const ReportBundle& b, const std::string& dir, ReportFormat format) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::io, "cannot create " + dir + ": " + ec.message());
    if (format != ReportFormat::csv_tables) write_file(fs::path(dir) / "report.json", to_json(b));
    if (format != ReportFormat::json) {
        const fs::path tables = fs::path(dir) / "tables";
        fs::create_directories(tables, ec);
        if (ec) throw Error(ErrorCode::io, "cannot create " + tables.string() + ": " + ec.message());
        for (const auto& t : b.tables) write_file(tables / (t.name + ".csv"), to_csv(t));
    }
}

std::string sha256_hex(const std::string& data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw Error(ErrorCode::io, "sha256 failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 15];
    }
    return out;
}

namespace {

Table series(const std::string& name, const std::vector<double>& v, int first_n, const std::string& prov = "measured") {
    Table t;
    t.name = name;
    t.provenance = prov;
    for (std::size_t i = 0; i < v.size(); ++i) t.rows.push_back({static_cast<double>(first_n + i), v[i]});
    return t;
}

Table time_series(const std::string& name, const std::vector<double>& times, const std::vector<double>& v) {
    Table t;
    t.name = name;
    t.x_label = "t";
    for (std::size_t i = 0; i < v.size(); ++i) t.rows.push_back({times[i], v[i]});
    return t;
}

// max over points of the convergence gaps; gaps[i] belongs to n = i + 2
Table convergence(const std::string& name, const SplittingReport& rep, bool upper) {
    std::vector<double> m;
    for (const auto& p : rep.points) {
        const auto& g = upper ? p.upper.gaps : p.lower.gaps;
        if (g.size() > m.size()) m.resize(g.size(), 0.0);
        for (std::size_t i = 0; i < g.size(); ++i) m[i] = std::max(m[i], g[i]);
    }
    return series(name, m, 2);
}

void add_points(ReportBundle& b, const SplittingReport& rep) {
    for (const auto& p : rep.points) {
        PointRecord r;
        r.x.assign(p.x.data(), p.x.data() + p.x.size());
        r.e = p.e.basis();
        r.f = p.f.basis();
        r.projection_norm = p.projection_norm;
        b.points.push_back(std::move(r));
    }
}

void start_bundle(ReportBundle& b, const ScenarioConfig& cfg) {
    b.provenance.config_hash = sha256_hex(cfg.canonical);
    b.provenance.seed = std::to_string(cfg.analysis.seed);
    b.provenance.scenario = cfg.name;
    b.config = cfg.canonical;
}

Outcome analyze_discrete(const ScenarioConfig& cfg, const RunOptions& opts) {
    Outcome out;
    ReportBundle& b = out.bundle;
    start_bundle(b, cfg);
    const CocycleSystem c = build_cocycle(cfg);
    const int k = cfg.analysis.k;
    const int n_max = cfg.analysis.n_max;
    const DominationCertificate cert = detect_domination(c, k, n_max, cfg.analysis.criterion, opts);
    b.quantities["tau_fit"] = {cert.fit.tau, "fitted"};
    b.quantities["K_fit"] = {cert.fit.k, "fitted"};
    b.quantities["kappa"] = {c.kappa(), "measured"};
    b.quantities["injectivity_floor"] = {c.injectivity_floor(), "measured"};
    b.tables.push_back(series("criterion_table", cert.sup_ratios, 1));
    b.checks["domination"] = cert.pass;
    if (!cert.pass) {
        b.status = "no-domination";
        b.diagnostic = cert.diagnostic;
        out.exit_code = 2;
        return out;
    }
    const SplittingReport rep = construct_splitting(c, cert, cfg.analysis.tol, opts);
    const Verification ver = verify_splitting(c, rep, n_max, opts);
    add_points(b, rep);
    b.tables.push_back(series("domination_table", ver.sup_ratios, 1));
    b.tables.push_back(convergence("upper_convergence", rep, true));
    b.tables.push_back(convergence("lower_convergence", rep, false));
    double proj = 0.0, rate = 0.0;
    int stab = 0;
    bool converged = true;
    for (const auto& p : rep.points) {
        proj = std::max(proj, p.projection_norm);
        rate = std::max(rate, p.upper.measured_rate);
        stab = std::max(stab, p.upper.stabilization_index);
        converged = converged && p.upper.converged && p.lower.converged;
    }
    b.quantities["equivariance_residual_E"] = {ver.equivariance_e, "measured"};
    b.quantities["equivariance_residual_F"] = {ver.equivariance_f, "measured"};
    b.quantities["K_tilde"] = {ver.k_tilde, "measured"};
    b.quantities["envelope_tau"] = {ver.envelope.tau, "fitted"};
    b.quantities["envelope_K"] = {ver.envelope.k, "fitted"};
    b.quantities["projection_norm_max"] = {proj, "measured"};
    b.quantities["upper_rate_max"] = {rate, "measured"};
    b.quantities["stabilization_index"] = {static_cast<double>(stab), "measured"};
    b.checks["limits_resolved"] = converged;
    b.checks["upper_envelope"] = rate <= cert.fit.tau + 0.05;
    b.checks["verification"] = ver.pass;
    if (c.norm().is_euclidean()) {
        const RBound rb = r_bound_certificate(c, rep, cert, n_max);
        b.quantities["R_E_estimate"] = {std::exp(rb.log_estimate), "measured"};
        b.quantities["log_R_E_estimate"] = {rb.log_estimate, "measured"};
        b.quantities["log_R_E_lower_bound"] = {rb.log_bound, "closed-form-bound"};
        b.quantities["log_R_E_lower_bound_variant"] = {rb.log_bound_variant, "closed-form-bound"};
        b.quantities["Q_index"] = {static_cast<double>(rb.q_index), "closed-form-bound"};
        b.quantities["Q_index_variant"] = {static_cast<double>(rb.q_index_variant), "closed-form-bound"};
        b.quantities["K_theorem"] = {rb.k_const, "fitted"};
        b.checks["r_bound"] = rb.holds;
    }
    if (ver.pass) {
        const ConverseResult cv = converse_constant(c, rep, ver, n_max, opts);
        b.quantities["converse_C0"] = {cv.c0, "measured"};
        b.quantities["converse_K"] = {cv.k_envelope, "fitted"};
        b.quantities["converse_K_prime"] = {cv.k_prime, "fitted"};
        b.quantities["converse_worst_ratio"] = {cv.worst_ratio, "measured"};
        b.checks["converse"] = cv.holds;
    }
    b.status = ver.pass ? "dominated" : "not-verified";
    b.diagnostic = ver.diagnostic;
    out.exit_code = ver.pass ? 0 : 2;
    return out;
}

Outcome analyze_flow(const ScenarioConfig& cfg, const RunOptions& opts) {
    Outcome out;
    ReportBundle& b = out.bundle;
    start_bundle(b, cfg);
    const FlowCocycle fc = build_flow(cfg);
    const int k = cfg.analysis.k;
    const FlowDomination fd = continuous_domination_check(fc, k, cfg.flow.t_max, cfg.flow.eps_grid, opts);
    b.quantities["gamma_fit"] = {fd.gamma, "fitted"};
    b.quantities["log_C_fit"] = {fd.log_c, "fitted"};
    b.tables.push_back(time_series("continuous_criterion", fd.times, fd.sup_ratios));
    b.checks["domination"] = fd.pass;
    if (!fd.pass) {
        b.status = "no-domination";
        b.diagnostic = fd.diagnostic;
        out.exit_code = 2;
        return out;
    }
    const FlowSplitting fs =
        flow_splitting(fc, fd, cfg.flow.m_list, cfg.analysis.n_max, cfg.analysis.tol, cfg.flow.t_max, opts);
    for (std::size_t i = 0; i < fs.certificates.size(); ++i) {
        const std::string m = std::to_string(cfg.flow.m_list[i]);
        b.quantities["tau_fit_m" + m] = {fs.certificates[i].fit.tau, "fitted"};
        b.tables.push_back(series("criterion_table_m" + m, fs.certificates[i].sup_ratios, 1));
    }
    if (fs.reports.size() == cfg.flow.m_list.size()) {
        double worst = 0.0;
        for (const auto& row : fs.agreement)
            for (double v : row) worst = std::max(worst, v);
        b.quantities["m_agreement_max"] = {worst, "measured"};
        b.quantities["gamma_splitting"] = {fs.gamma, "fitted"};
        b.quantities["log_C_splitting"] = {fs.log_c, "fitted"};
        b.quantities["ratio_half_time"] = {fs.half_time_ratio, "measured"};
        b.quantities["sup_norm_unit_time"] = {fs.sup_norm_unit_time, "measured"};
        b.quantities["min_on_E_unit_time"] = {fs.min_on_e_unit_time, "measured"};
        b.tables.push_back(time_series("continuous_domination", fs.times, fs.ratios));
        add_points(b, fs.reports.front());
        b.checks["m_agreement"] = fs.agree;
    }
    b.checks["verification"] = fs.pass;
    b.status = fs.pass ? "dominated" : "not-verified";
    b.diagnostic = fs.diagnostic;
    out.exit_code = fs.pass ? 0 : 2;
    return out;
}

}  // namespace

Outcome analyze(const ScenarioConfig& cfg, const RunOptions& opts) {
    RunOptions o = opts;
    o.search.seed = cfg.analysis.seed;
    return is_flow(cfg) ? analyze_flow(cfg, o) : analyze_discrete(cfg, o);
}

}  // namespace domsplit
