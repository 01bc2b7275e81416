// One pass/fail line per acceptance criterion. Exit status is the number of failures.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "domsplit/cocycle.hpp"
#include "domsplit/geometry.hpp"
#include "domsplit/lemma_suites.hpp"
#include "domsplit/report.hpp"
#include "domsplit/scenario.hpp"
#include "domsplit/snumbers.hpp"
#include "domsplit/splitting.hpp"
#include "domsplit/svd_split.hpp"
#include "gen.hpp"
#include "oracles.hpp"

using namespace domsplit;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;
    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string scenario(const std::string& name) { return std::string(DOMSPLIT_SCENARIO_DIR) + "/" + name + ".json"; }

double quantity(const ReportBundle& b, const std::string& name) {
    auto it = b.quantities.find(name);
    return it == b.quantities.end() ? std::nan("") : it->second.value;
}

bool check(const ReportBundle& b, const std::string& name) {
    auto it = b.checks.find(name);
    return it != b.checks.end() && it->second;
}

Matrix axis(int d, int i) { return Matrix::Identity(d, d).col(i); }

Verdict euclidean_collapse() {
    Verdict v;
    gen::Source src(1001);
    int bad = 0;
    for (int t = 0; t < 500; ++t) {
        const int d = 1 + t % 8;
        const Matrix a = src.matrix(d, d);
        const Vector s = oracle::singular_values(a);
        const Norm n = Norm::euclidean(d);
        double prod = 1.0;
        for (int q = 1; q <= d; ++q) {
            prod *= s(q - 1);
            auto rel = [](double x, double y) { return std::abs(x - y) <= 1e-9 * std::abs(y) + 1e-300; };
            if (!rel(gelfand_number(a, q, n).value, s(q - 1)) || !rel(kolmogorov_number(a, q, n).value, s(q - 1)) ||
                !rel(volume_growth(a, q, n).value, prod))
                ++bad;
        }
    }
    v.require(bad == 0, std::to_string(bad) + " mismatches");
    v.detail = v.pass ? "500 matrices, d <= 8, c_q = x_q = sigma_q and V_q = prod sigma_i" : v.detail;
    return v;
}

Verdict hilbert_inequalities() {
    Verdict v;
    gen::Source src(1002);
    int bad = 0;
    double r_min = 1.0;
    for (int t = 0; t < 500; ++t) {
        const int d = 2 + t % 7, k = src.integer(1, d - 1);
        const Matrix a = src.matrix(d, d);
        const Matrix e = src.matrix(d, k);
        const HilbertSplit h = hilbert_svd_split(a, Subspace::span(e));
        const Vector s = oracle::singular_values(a);
        double vk = 1.0;
        for (int i = 0; i < k; ++i) vk *= s(i);
        const double r = oracle::gram_det(a, e) / vk;
        r_min = std::min(r_min, r);
        const double slack = 1e-9;
        if (h.min_norm_e < r * s(k - 1) * (1.0 - slack) || h.norm_on_f > s(k) / r * (1.0 + slack) ||
            h.projection_norm > (1.0 + slack) / r)
            ++bad;
    }
    v.require(bad == 0, std::to_string(bad) + " violations");
    if (v.pass) v.detail = "500 instances, 0 violations, smallest r " + fmt("%.3g", r_min);
    return v;
}

Verdict quantitative_lemmas() {
    Verdict v;
    const SuiteResult r = run_suite("quantitative", 10000, 1003, 6);
    v.require(r.violations.empty(), std::to_string(r.violations.size()) + " violations");
    v.require(r.skipped == 0, std::to_string(r.skipped) + " instances outside preconditions");
    const BoundCheck id = det_lipschitz_matrices(Matrix::Identity(2, 2), 1.1 * Matrix::Identity(2, 2));
    v.require(std::abs(id.lhs - 0.1906) < 5e-5 && std::abs(id.rhs - 0.2222) < 5e-5 && id.pass, "identity case");
    if (v.pass)
        v.detail = "10000 trials each, 0 violations; I vs 1.1 I: " + fmt("%.4f", id.lhs) + " <= " + fmt("%.4f", id.rhs);
    return v;
}

Verdict constant_diagonal() {
    Verdict v;
    Matrix a(2, 2);
    a << 2, 0, 0, 1;
    const CocycleSystem c(BaseSystem::finite_cycle(1), [a](const Vector&) { return a; }, 2, Norm::euclidean(2));
    const DominationCertificate cert = detect_domination(c, 1, 60, Criterion::bogo);
    v.require(cert.pass, "domination not detected");
    v.require(cert.fit.tau >= 0.495 && cert.fit.tau <= 0.505, "tau " + fmt("%.6g", cert.fit.tau));
    v.require(cert.fit.k >= 0.9 && cert.fit.k <= 1.1, "K " + fmt("%.6g", cert.fit.k));
    if (!v.pass) return v;
    const SplittingReport rep = construct_splitting(c, cert, 1e-12);
    v.require(oracle::proj_dist(rep.points[0].e.basis(), axis(2, 0)) < 1e-10, "E is not the first axis");
    v.require(oracle::proj_dist(rep.points[0].f.basis(), axis(2, 1)) < 1e-10, "F is not the second axis");
    const Verification ver = verify_splitting(c, rep, 60);
    for (int n = 1; n <= 60; ++n)
        if (std::abs(ver.sup_ratios[n - 1] - std::ldexp(1.0, -n)) > 1e-9 * std::ldexp(1.0, -n)) {
            v.require(false, "ratio at n = " + std::to_string(n));
            break;
        }
    const RBound rb = r_bound_certificate(c, rep, cert, 60);
    const double bound = theorem_log_bound(1, 2.0, 1.0, 0.5);
    v.require(std::abs(bound + 80.32) < 5e-3, "bound " + fmt("%.6f", bound));
    v.require(std::abs(rb.log_estimate) < 1e-12 && rb.log_estimate >= rb.log_bound, "R_E");
    if (v.pass)
        v.detail = "tau " + fmt("%.6g", cert.fit.tau) + ", K " + fmt("%.6g", cert.fit.k) + ", R_E " +
                   fmt("%.6g", std::exp(rb.log_estimate)) + " >= exp(" + fmt("%.8f", bound) + ")";
    return v;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(DOMSPLIT_CLI) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Verdict controls() {
    Verdict v;
    const auto out = std::filesystem::temp_directory_path() / ("domsplit_accept_" + std::to_string(::getpid()));
    std::string detail;
    for (const std::string name : {"rotation", "identity"}) {
        const Outcome o = analyze(load_config(scenario(name)));
        const double tau = quantity(o.bundle, "tau_fit");
        v.require(o.exit_code == 2, name + " exit " + std::to_string(o.exit_code));
        v.require(tau >= 0.99, name + " tau " + fmt("%.6g", tau));
        const int cli = run_cli("analyze " + scenario(name) + " --out " + (out / name).string());
        v.require(cli == 2, name + " cli exit " + std::to_string(cli));
        detail += (detail.empty() ? "" : ", ") + name + " exit 2 tau " + fmt("%.6g", tau);
    }
    std::filesystem::remove_all(out);
    if (v.pass) v.detail = detail;
    return v;
}

Verdict skew_product() {
    Verdict v;
    const Outcome o = analyze(load_config(scenario("skew_product")));
    const ReportBundle& b = o.bundle;
    const double tau = quantity(b, "tau_fit"), rate = quantity(b, "upper_rate_max");
    v.require(o.exit_code == 0, "status " + b.status);
    v.require(rate <= tau + 0.05, "upper rate " + fmt("%.4g", rate) + " vs tau " + fmt("%.4g", tau));
    v.require(check(b, "upper_envelope"), "upper envelope");
    v.require(quantity(b, "equivariance_residual_E") < 1e-6, "E residual");
    v.require(quantity(b, "equivariance_residual_F") < 1e-6, "F residual");
    v.require(check(b, "verification"), "verification");
    v.require(quantity(b, "log_R_E_estimate") >= quantity(b, "log_R_E_lower_bound"), "R_E bound");
    v.require(check(b, "converse"), "converse check");
    if (v.pass)
        v.detail = "tau " + fmt("%.4f", tau) + ", gap rate " + fmt("%.4f", rate) + ", residuals " +
                   fmt("%.2g", std::max(quantity(b, "equivariance_residual_E"), quantity(b, "equivariance_residual_F"))) +
                   ", log R_E " + fmt("%.4f", quantity(b, "log_R_E_estimate")) + " >= " +
                   fmt("%.4f", quantity(b, "log_R_E_lower_bound"));
    return v;
}

Verdict uniqueness() {
    Verdict v;
    double worst = 0.0;
    int count = 0;
    for (const std::string name : {"diagonal", "upper_triangular", "skew_product", "schrodinger", "random_cycle"}) {
        const ScenarioConfig cfg = load_config(scenario(name));
        const CocycleSystem c = build_cocycle(cfg);
        const int k = cfg.analysis.k;
        const double tol = std::min(cfg.analysis.tol, 1e-10);
        const DominationCertificate c30 = detect_domination(c, k, 30, cfg.analysis.criterion);
        const DominationCertificate c60 = detect_domination(c, k, 60, cfg.analysis.criterion);
        if (!c60.pass) continue;
        v.require(c30.pass, name + " at horizon 30");
        if (!c30.pass) continue;
        const SplittingReport r30 = construct_splitting(c, c30, tol);
        const SplittingReport r60 = construct_splitting(c, c60, tol);
        const CocycleSystem c2 = c.rebase(2);
        const DominationCertificate cr = detect_domination(c2, k, 30, cfg.analysis.criterion);
        v.require(cr.pass, name + " rebased");
        if (!cr.pass) continue;
        const SplittingReport rr = construct_splitting(c2, cr, tol);
        const Uniqueness a = uniqueness_check(r30, r60), b = uniqueness_check(r60, rr);
        const double w = std::max({a.max_e, a.max_f, b.max_e, b.max_f});
        v.require(w < 1e-6, name + " disagreement " + fmt("%.3g", w));
        worst = std::max(worst, w);
        ++count;
    }
    v.require(count >= 4, "too few passing scenarios");
    if (v.pass) v.detail = std::to_string(count) + " scenarios, max d_H " + fmt("%.3g", worst);
    return v;
}

Verdict flow_suite() {
    Verdict v;
    const Outcome o = analyze(load_config(scenario("flow_diagonal")));
    const ReportBundle& b = o.bundle;
    const double gamma = quantity(b, "gamma_fit"), half = quantity(b, "ratio_half_time"),
                 agree = quantity(b, "m_agreement_max");
    v.require(o.exit_code == 0, "status " + b.status);
    v.require(gamma >= 1.99 && gamma <= 2.01, "gamma " + fmt("%.6g", gamma));
    v.require(std::abs(half - std::exp(-1.0)) < 1e-6, "half-time ratio " + fmt("%.10g", half));
    v.require(agree < 1e-5, "m agreement " + fmt("%.3g", agree));
    double axes = 0.0;
    for (const auto& p : b.points)
        axes = std::max({axes, oracle::proj_dist(p.e, axis(2, 0)), oracle::proj_dist(p.f, axis(2, 1))});
    v.require(!b.points.empty() && axes < 1e-8, "splitting vs axes " + fmt("%.3g", axes));
    if (v.pass)
        v.detail = "gamma " + fmt("%.6f", gamma) + ", ratio(0.5) " + fmt("%.9f", half) + ", m agreement " +
                   fmt("%.2g", agree) + ", axes " + fmt("%.2g", axes);
    return v;
}

Verdict oracle_soundness() {
    Verdict v;
    gen::Source src(1009);
    SearchOptions ms;
    ms.strategy = Strategy::multistart;
    double worst = 0.0;
    for (double p : {1.0, infinity}) {
        const Norm n = Norm::lp(2, p);
        for (int t = 0; t < 25; ++t) {
            const Matrix a = src.matrix(2, 2, -2.0, 2.0);
            const Vector e = src.vector(2), f = src.vector(2);
            const double top = oracle::ratio_extremum(a, p, true), bottom = oracle::ratio_extremum(a, p, false);
            const double g = oracle::line_gap(e, f, p);
            const Subspace se = Subspace::span(e), sf = Subspace::span(f);
            const double errs[] = {
                std::abs(gelfand_number(a, 1, n, ms).value - top) / top,
                std::abs(gelfand_number(a, 2, n, ms).value - bottom) / std::max(bottom, 1e-12),
                std::abs(kolmogorov_number(a, 1, n, ms).value - top) / top,
                std::abs(kolmogorov_number(a, 2, n, ms).value - bottom) / std::max(bottom, 1e-12),
                std::abs(gap(se, sf, n, ms) - g),
                std::abs(minimal_angle(se, sf, n, ms).sin_theta - g),
            };
            for (double x : errs) worst = std::max(worst, x);
        }
    }
    v.require(worst < 1e-5, "worst deviation " + fmt("%.3g", worst));
    if (v.pass) v.detail = "50 cases, worst deviation from grid enumeration " + fmt("%.2g", worst);
    return v;
}

Verdict gen_svd_consistency() {
    Verdict v;
    gen::Source src(1010);
    double worst_f = 0.0, worst_c = 0.0;
    for (int t = 0; t < 100; ++t) {
        const int d = src.integer(2, 6), k = src.integer(1, d - 1);
        const Matrix a = src.matrix(d, d);
        Eigen::JacobiSVD<Matrix> ref(a, Eigen::ComputeFullV);
        const Subspace e = Subspace::span(ref.matrixV().leftCols(k));
        const GenSvd g = banach_gen_svd(a, e, Norm::euclidean(d));
        worst_f = std::max(worst_f, oracle::proj_dist(g.f.basis(), hilbert_svd_split(a, e).f.basis()));
        worst_c = std::max(worst_c, g.containment_residual);
    }
    double d_max = 0.0;
    bool conclusions = true;
    for (int t = 0; t < 30; ++t) {
        const int d = src.integer(2, 3), k = src.integer(1, d - 1);
        const Matrix a = src.conditioned(d, 4.0);
        const GenSvd g = banach_gen_svd(a, Subspace::span(src.matrix(d, k)), Norm::lp(d, infinity));
        worst_c = std::max(worst_c, g.containment_residual);
        conclusions = conclusions && std::isfinite(g.empirical_d) && g.projection_norm <= g.empirical_d * (1 + 1e-12) &&
                      g.image_projection_norm <= g.empirical_d * (1 + 1e-12) &&
                      g.norm_on_f <= g.empirical_d * g.c_next * (1 + 1e-12) + 1e-15;
        d_max = std::max(d_max, g.empirical_d);
    }
    Vector diag(3);
    diag << 4, 2, 1;
    const GenSvd g3 = banach_gen_svd(diag.asDiagonal(), Subspace::coordinate(3, {0, 1}), Norm::lp(3, infinity));
    worst_c = std::max(worst_c, g3.containment_residual);
    v.require(worst_f < 1e-8, "euclidean F deviation " + fmt("%.3g", worst_f));
    v.require(worst_c < 1e-9, "containment residual " + fmt("%.3g", worst_c));
    v.require(conclusions, "linf conclusions");
    if (v.pass)
        v.detail = "euclidean F deviation " + fmt("%.2g", worst_f) + ", containment " + fmt("%.2g", worst_c) +
                   ", linf measured D max " + fmt("%.4g", d_max) + ", diag(4,2,1) D " + fmt("%.4g", g3.empirical_d);
    return v;
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        double budget;
        std::function<Verdict()> run;
    };
    const std::vector<Criterion> all{
        {1, 10, euclidean_collapse}, {2, 30, hilbert_inequalities}, {3, 60, quantitative_lemmas},
        {4, 5, constant_diagonal},   {5, 5, controls},              {6, 120, skew_product},
        {7, 120, uniqueness},        {8, 60, flow_suite},           {9, 60, oracle_soundness},
        {10, 60, gen_svd_consistency},
    };
    int failures = 0;
    for (const auto& c : all) {
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = c.run();
        } catch (const std::exception& e) {
            v.pass = false;
            v.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (secs > c.budget) {
            v.pass = false;
            v.detail += "; runtime " + fmt("%.1f", secs) + " s over budget";
        }
        if (!v.pass) ++failures;
        std::printf("criterion %2d: %s  %s  (%.2f s)\n", c.id, v.pass ? "PASS" : "FAIL", v.detail.c_str(), secs);
        std::fflush(stdout);
    }
    return failures;
}
