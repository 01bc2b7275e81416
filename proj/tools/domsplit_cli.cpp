#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "domsplit/error.hpp"
#include "domsplit/geometry.hpp"
#include "domsplit/lemma_suites.hpp"
#include "domsplit/report.hpp"
#include "domsplit/scenario.hpp"
#include "domsplit/schema.hpp"
#include "domsplit/snumbers.hpp"

using namespace domsplit;

namespace {

// exit codes
constexpr int exit_ok = 0;
constexpr int exit_error = 1;
constexpr int exit_negative = 2;

Matrix parse_matrix(const std::string& text) {
    std::vector<std::vector<double>> rows;
    std::stringstream rs(text);
    std::string row;
    while (std::getline(rs, row, ';')) {
        std::vector<double> r;
        std::string cell;
        for (char& ch : row)
            if (ch == ',') ch = ' ';
        std::stringstream cs(row);
        while (cs >> cell) r.push_back(parse_scalar(cell));
        if (!r.empty()) rows.push_back(r);
    }
    if (rows.empty()) throw Error(ErrorCode::config, "empty matrix");
    const std::size_t n = rows.size();
    for (const auto& r : rows)
        if (r.size() != n) throw Error(ErrorCode::dimension_mismatch, "matrix must be square, rows ';' separated");
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) m(i, k) = rows[i][k];
    return m;
}

std::string format_matrix(const Matrix& m) {
    std::ostringstream os;
    os.precision(12);
    os << "[";
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        if (i) os << "; ";
        for (Eigen::Index k = 0; k < m.cols(); ++k) os << (k ? ", " : "") << m(i, k);
    }
    os << "]";
    return os.str();
}

std::string output_dir(const std::string& flag, const ScenarioConfig& cfg) {
    if (!flag.empty()) return flag;
    if (!cfg.output_dir.empty()) return cfg.output_dir;
    if (const char* env = std::getenv("DOMSPLIT_OUT"); env && *env) return env;
    return "domsplit-out";
}

void print_summary(const ReportBundle& b, const std::string& dir) {
    std::cout << "status: " << b.status << "\n";
    if (!b.diagnostic.empty()) std::cout << "diagnostic: " << b.diagnostic << "\n";
    std::cout.precision(10);
    for (const auto& [name, q] : b.quantities) std::cout << name << " = " << q.value << " (" << q.provenance << ")\n";
    for (const auto& [name, v] : b.checks) std::cout << "check " << name << ": " << (v ? "pass" : "fail") << "\n";
    std::cout << "report: " << dir << "\n";
}

struct AnalyzeArgs {
    std::string config;
    int k = 0;
    int n_max = 0;
    std::string criterion;
    std::string out;
    unsigned jobs = 1;
    std::string format = "both";
    // flow overrides
    std::vector<int> m_list;
    double t_max = 0.0;
    int eps_grid = 0;
};

int run_analysis(const AnalyzeArgs& a, bool flow_only) {
    ScenarioConfig cfg = load_config(a.config);
    if (flow_only && !is_flow(cfg)) throw Error(ErrorCode::config, "flow verb needs a flow scenario (base.kind = flow)");
    if (a.k > 0) cfg.analysis.k = a.k;
    if (a.n_max > 0) cfg.analysis.n_max = a.n_max;
    if (!a.criterion.empty()) cfg.analysis.criterion = parse_criterion(a.criterion);
    if (!a.m_list.empty()) cfg.flow.m_list = a.m_list;
    if (a.t_max > 0.0) cfg.flow.t_max = a.t_max;
    if (a.eps_grid > 0) cfg.flow.eps_grid = a.eps_grid;
    // revalidate the overridden config through the parser
    cfg = parse_config(materialize(cfg), a.config);
    RunOptions opts;
    opts.jobs = a.jobs;
    const Outcome out = analyze(cfg, opts);
    const std::string dir = output_dir(a.out, cfg);
    const ReportFormat fmt = a.format == "json" ? ReportFormat::json
                             : a.format == "csv" ? ReportFormat::csv_tables
                                                 : ReportFormat::both;
    emit_report(out.bundle, dir, fmt);
    print_summary(out.bundle, dir);
    return out.exit_code;
}

int run_lemmas(const std::string& suite, int trials, std::uint64_t seed, int dim) {
    const SuiteResult r = run_suite(suite, trials, seed, dim);
    std::cout << "suite " << r.suite << ": " << r.trials << " trials, dim <= " << r.dim << ", seed " << r.seed << "\n";
    std::cout << "checks " << r.checks << ", skipped " << r.skipped << ", violations " << r.violations.size() << "\n";
    for (const auto& [name, v] : r.measured) std::cout << "measured " << name << " = " << v << "\n";
    for (const auto& v : r.violations) {
        std::cout << "VIOLATION " << v.check << " trial " << v.trial << " seed " << v.seed << ": " << v.detail << "\n";
        for (std::size_t i = 0; i < v.counterexample.size(); ++i)
            std::cout << "  input " << i << " = " << format_matrix(v.counterexample[i]) << "\n";
    }
    return r.violations.empty() ? exit_ok : exit_negative;
}

int run_oracle(const std::string& what, const std::string& matrix, const std::string& norm_spec, int q, int dim,
               std::uint64_t seed, int starts, std::uint64_t samples) {
    SearchOptions opts;
    opts.seed = seed;
    if (starts > 0) opts.starts = starts;
    std::cout.precision(15);
    if (what == "ball-volume") {
        if (dim < 1) throw Error(ErrorCode::config, "--dim is required for ball-volume");
        const Norm n = Norm::parse(norm_spec, dim);
        check_dim_cap(dim, n);
        const BallVolume v = ball_volume(Matrix::Identity(dim, dim), n, VolumeMethod::automatic, samples);
        std::cout << "value: " << v.value << "\n";
        std::cout << "normalized: " << v.value / unit_ball_volume(dim) << "\n";
        std::cout << "tolerance: " << v.tolerance << "\n";
        std::cout << "method: " << v.method << "\n";
        std::cout << "seed: " << seed << "\n";
        return exit_ok;
    }
    if (matrix.empty()) throw Error(ErrorCode::config, "--matrix is required");
    const Matrix a = parse_matrix(matrix);
    const int d = static_cast<int>(a.rows());
    const Norm n = Norm::parse(norm_spec, d);
    check_dim_cap(d, n);
    SNumber s;
    if (what == "gelfand") s = gelfand_number(a, q, n, opts);
    else if (what == "kolmogorov") s = kolmogorov_number(a, q, n, opts);
    else if (what == "volume") s = volume_growth(a, q, n, opts);
    else throw Error(ErrorCode::config, "unknown oracle '" + what + "'");
    std::cout << "value: " << s.value << "\n";
    std::cout << "certificate: " << format_matrix(s.certificate) << "\n";
    std::cout << "tolerance: " << s.tolerance << "\n";
    std::cout << "exact: " << (s.exact ? "yes" : "no") << "\n";
    std::cout << "seed: " << s.seed << "\n";
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dominated splittings of linear cocycles: detection, construction and certificates.\n"
                 "Exit codes: 0 success, 1 error, 2 negative result (no domination or lemma violations)."};
    app.require_subcommand(1, 1);

    AnalyzeArgs aa;
    auto* analyze_cmd = app.add_subcommand("analyze", "Run a scenario end to end and write a report");
    analyze_cmd->add_option("config", aa.config, "Scenario config (JSON)")->required()->check(CLI::ExistingFile);
    analyze_cmd->add_option("--k", aa.k, "Splitting index, overrides analysis.k");
    analyze_cmd->add_option("--n-max", aa.n_max, "Horizon, overrides analysis.n_max");
    analyze_cmd->add_option("--criterion", aa.criterion, "bogo | magic | magic-simplified")
        ->check(CLI::IsMember({"bogo", "magic", "magic-simplified"}));
    analyze_cmd->add_option("--out", aa.out, "Output directory (default: output.dir, then $DOMSPLIT_OUT, then domsplit-out)");
    analyze_cmd->add_option("--jobs", aa.jobs, "Worker threads over sample points")->check(CLI::Range(1u, 256u));
    analyze_cmd->add_option("--format", aa.format, "json | csv | both")->check(CLI::IsMember({"json", "csv", "both"}));

    AnalyzeArgs fa;
    auto* flow_cmd = app.add_subcommand("flow", "Run a flow scenario: continuous-time criterion and sampled splittings");
    flow_cmd->add_option("config", fa.config, "Flow scenario config (JSON)")->required()->check(CLI::ExistingFile);
    flow_cmd->add_option("--k", fa.k, "Splitting index");
    flow_cmd->add_option("--n-max", fa.n_max, "Horizon of each discretization");
    flow_cmd->add_option("--m-list", fa.m_list, "Sampling rates m, time step 1/m")->delimiter(',');
    flow_cmd->add_option("--t-max", fa.t_max, "Largest time in the continuous-time checks");
    flow_cmd->add_option("--eps-grid", fa.eps_grid, "Points in the epsilon grid over [0, 1]");
    flow_cmd->add_option("--out", fa.out, "Output directory");
    flow_cmd->add_option("--jobs", fa.jobs, "Worker threads over sample points")->check(CLI::Range(1u, 256u));
    flow_cmd->add_option("--format", fa.format, "json | csv | both")->check(CLI::IsMember({"json", "csv", "both"}));

    std::string suite;
    int trials = 100;
    std::uint64_t lemma_seed = 1;
    int lemma_dim = 4;
    auto* lemmas_cmd = app.add_subcommand("verify-lemmas", "Fuzz the geometry, s-number, SVD and quantitative lemmas");
    lemmas_cmd->add_option("--suite", suite, "geometry | snumbers | svd | quantitative")
        ->required()
        ->check(CLI::IsMember(suite_names()));
    lemmas_cmd->add_option("--trials", trials, "Number of random instances")->check(CLI::NonNegativeNumber);
    lemmas_cmd->add_option("--seed", lemma_seed, "Run seed");
    lemmas_cmd->add_option("--dim", lemma_dim, "Largest ambient dimension (2..16)");

    std::string what, matrix, norm_spec = "euclidean";
    int q = 1, dim = 0, starts = 0;
    std::uint64_t oracle_seed = SearchOptions{}.seed;
    std::uint64_t samples = 1000000;
    auto* oracle_cmd = app.add_subcommand("oracle", "Evaluate an s-number or ball-volume oracle");
    oracle_cmd->add_option("--what", what, "gelfand | kolmogorov | volume | ball-volume")
        ->required()
        ->check(CLI::IsMember({"gelfand", "kolmogorov", "volume", "ball-volume"}));
    oracle_cmd->add_option("--matrix", matrix, "Square matrix, rows separated by ';', e.g. \"3,0;0,1\"");
    oracle_cmd->add_option("--norm", norm_spec, "euclidean | l1 | linf | lp:<p> | weighted:<w>,...[@<p>]");
    oracle_cmd->add_option("--q", q, "Index q");
    oracle_cmd->add_option("--dim", dim, "Dimension for ball-volume");
    oracle_cmd->add_option("--seed", oracle_seed, "Oracle seed");
    oracle_cmd->add_option("--starts", starts, "Multistart count");
    oracle_cmd->add_option("--samples", samples, "Quasi-random points for Monte-Carlo volumes");

    std::string which = "config";
    auto* schema_cmd = app.add_subcommand("schema", "Print the config or report JSON schema");
    schema_cmd->add_option("which", which, "config | report")->check(CLI::IsMember({"config", "report"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_error;
    }
    try {
        if (*analyze_cmd) return run_analysis(aa, false);
        if (*flow_cmd) return run_analysis(fa, true);
        if (*lemmas_cmd) return run_lemmas(suite, trials, lemma_seed, lemma_dim);
        if (*oracle_cmd) return run_oracle(what, matrix, norm_spec, q, dim, oracle_seed, starts, samples);
        if (*schema_cmd) {
            std::cout << (which == "report" ? report_schema() : config_schema());
            return exit_ok;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_error;
    }
    return exit_error;
}
