#include "domsplit/splitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "domsplit/error.hpp"
#include "domsplit/geometry.hpp"
#include "domsplit/parallel.hpp"
#include "domsplit/snumbers.hpp"
#include "domsplit/svd_split.hpp"

namespace domsplit {

const char* criterion_name(Criterion c) {
    switch (c) {
        case Criterion::bogo: return "bogo";
        case Criterion::magic: return "magic";
        case Criterion::magic_simplified: return "magic-simplified";
    }
    return "?";
}

Criterion parse_criterion(const std::string& s) {
    if (s == "bogo") return Criterion::bogo;
    if (s == "magic") return Criterion::magic;
    if (s == "magic-simplified" || s == "magic_simplified") return Criterion::magic_simplified;
    throw Error(ErrorCode::config, "unknown criterion '" + s + "'");
}

namespace {

constexpr double log_floor = -690.0;  // about log(1e-300)
constexpr double noise_floor = 1e-13;

double safe_log(double v) { return v > 0.0 && std::isfinite(v) ? std::log(v) : (v > 0.0 ? 700.0 : log_floor); }

double euclid_dh(const Matrix& a, const Matrix& b) { return spectral_norm(a * a.transpose() - b * b.transpose()); }

// Euclidean gap(span a, span b) for orthonormal a, b
double euclid_gap(const Matrix& a, const Matrix& b) {
    if (a.cols() == 0) return 0.0;
    return spectral_norm(a - b * (b.transpose() * a));
}

void summarize(ConvergenceTable& t, int first_n) {
    const int m = static_cast<int>(t.gaps.size());
    t.stabilization_index = first_n;
    for (int i = m - 1; i > 0; --i) {
        if (t.gaps[i] > std::max(t.gaps[i - 1], noise_floor)) {
            t.stabilization_index = first_n + i;
            break;
        }
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (int i = 0; i < m; ++i) {
        if (t.gaps[i] <= noise_floor) continue;
        const double x = i;
        const double y = std::log(t.gaps[i]);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++cnt;
    }
    if (cnt >= 2 && cnt * sxx - sx * sx > 0) {
        t.measured_rate = std::exp((cnt * sxy - sx * sy) / (cnt * sxx - sx * sx));
    } else {
        t.measured_rate = 0.0;
    }
}

// log Gelfand numbers c_k, c_{k+1} of a scaled product
std::pair<double, double> log_gelfand_pair(const ScaledProduct& p, int k, const Norm& norm,
                                           const SearchOptions& search) {
    if (norm.is_euclidean()) {
        Vector ls = p.log_singular_values();
        return {ls(k - 1), ls(k)};
    }
    const Matrix m = p.q * p.r;
    return {p.log_scale + safe_log(gelfand_number(m, k, norm, search).value),
            p.log_scale + safe_log(gelfand_number(m, k + 1, norm, search).value)};
}

// log c_k, log c_{k+1} of A^n_x for n = 0..count
std::vector<std::pair<double, double>> gelfand_track(const CocycleSystem& c, const Vector& x, int k, int count,
                                                     const SearchOptions& search) {
    std::vector<std::pair<double, double>> out;
    out.reserve(count + 1);
    ForwardProduct fp(c.dim());
    out.push_back({0.0, 0.0});
    Vector y = x;
    for (int n = 1; n <= count; ++n) {
        fp.push(c.generator(y));
        y = c.base().forward(y);
        out.push_back(log_gelfand_pair(fp.product(), k, c.norm(), search));
    }
    return out;
}

}  // namespace

EnvelopeFit fit_envelope(const std::vector<double>& ratios, int fit_from) {
    EnvelopeFit fit;
    const int n_max = static_cast<int>(ratios.size());
    fit.fit_from = std::clamp(fit_from, 1, std::max(1, n_max - 1));
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (int n = fit.fit_from; n <= n_max; ++n) {
        const double y = safe_log(ratios[n - 1]);
        sx += n; sy += y; sxx += double(n) * n; sxy += n * y;
        ++cnt;
    }
    const double den = cnt * sxx - sx * sx;
    fit.slope = cnt >= 2 && den > 0 ? (cnt * sxy - sx * sy) / den : 0.0;
    fit.intercept = cnt > 0 ? (sy - fit.slope * sx) / cnt : 0.0;
    // identical ratios give an exact zero slope
    fit.tau = std::exp(fit.slope);
    double logk = -std::numeric_limits<double>::infinity();
    for (int n = 1; n <= n_max; ++n) logk = std::max(logk, safe_log(ratios[n - 1]) - n * fit.slope);
    fit.k = n_max ? std::exp(logk) : 1.0;
    return fit;
}

DominationCertificate detect_domination(const CocycleSystem& c, int k, int n_max, Criterion criterion,
                                        const RunOptions& opts) {
    const int d = c.dim();
    if (k < 1 || k >= d) throw Error(ErrorCode::dimension_mismatch, "index k must satisfy 1 <= k < d");
    if (n_max < 2) throw Error(ErrorCode::precondition, "n_max must be at least 2");
    const auto& samples = c.base().samples();
    std::vector<std::vector<double>> per(samples.size());
    parallel_for(samples.size(), opts.jobs, [&](std::size_t i) {
        const Vector& x = samples[i];
        std::vector<double>& r = per[i];
        r.resize(n_max);
        if (criterion == Criterion::magic) {
            auto gx = gelfand_track(c, x, k, n_max + 1, opts.search);
            auto gt = gelfand_track(c, c.base().forward(x), k, n_max, opts.search);
            for (int n = 1; n <= n_max; ++n)
                r[n - 1] = std::exp(std::max(gx[n].second, gt[n].second) - gx[n + 1].first);
        } else {
            auto gx = gelfand_track(c, x, k, n_max, opts.search);
            for (int n = 1; n <= n_max; ++n) r[n - 1] = std::exp(gx[n].second - gx[n].first);
        }
    });
    DominationCertificate cert;
    cert.k = k;
    cert.criterion = criterion;
    cert.n_max = n_max;
    cert.sup_ratios.assign(n_max, 0.0);
    for (const auto& r : per)
        for (int n = 0; n < n_max; ++n) cert.sup_ratios[n] = std::max(cert.sup_ratios[n], r[n]);
    cert.fit = fit_envelope(cert.sup_ratios, std::max(1, n_max / 2));
    const bool finite = std::isfinite(cert.fit.tau) && std::isfinite(cert.fit.k);
    cert.pass = finite && cert.fit.tau < 1.0 - cert.margin;
    if (!finite) cert.diagnostic = "non-finite ratios";
    else if (!cert.pass) cert.diagnostic = "no exponential gap";
    return cert;
}

UpperResult construct_upper(const CocycleSystem& c, const Vector& x, int k, double tol, int n_max, double tau_fit) {
    const int d = c.dim();
    if (k < 1 || k >= d) throw Error(ErrorCode::dimension_mismatch, "index k must satisfy 1 <= k < d");
    const double stop = tol * (tau_fit < 1.0 ? 1.0 - tau_fit : 0.01);
    BackwardProduct bp(d);
    Vector y = x;
    Matrix prev;
    UpperResult out;
    int below = 0;
    for (int n = 1; n <= n_max; ++n) {
        y = c.base().inverse(y);
        bp.push(c.generator(y));
        Matrix cur = bp.top_left_singular(k);
        if (n > 1) {
            const double g = euclid_dh(cur, prev);
            out.table.gaps.push_back(g);
            below = g < stop ? below + 1 : 0;
            if (below >= 2) {
                out.table.converged = true;
                prev = cur;
                break;
            }
        }
        prev = cur;
    }
    out.e = Subspace::from_orthonormal(prev);
    summarize(out.table, 2);
    return out;
}

LowerResult construct_lower(const CocycleSystem& c, const Vector& x, const Subspace& e, double tol, int n_max,
                            const SearchOptions& search) {
    const int d = c.dim();
    const int k = e.dim();
    if (k < 1 || k >= d || e.ambient_dim() != d) throw Error(ErrorCode::dimension_mismatch, "construct_lower");
    const bool euclid = c.norm().is_euclidean();
    ForwardProduct fp(d);
    Vector y = x;
    Matrix prev;
    LowerResult out;
    int below = 0;
    for (int n = 1; n <= n_max; ++n) {
        fp.push(c.generator(y));
        y = c.base().forward(y);
        const ScaledProduct& p = fp.product();
        Matrix cur;
        if (euclid) {
            // A^n = s Q R, so the complement is ker(U^T R) with U spanning R E
            const Matrix u = orthonormal_basis(p.r * e.basis());
            cur = null_space(u.transpose() * p.r, 1e-13);
            if (cur.cols() != d - k) throw Error(ErrorCode::precondition, "lower construction lost rank");
        } else {
            cur = banach_paring(p.q * p.r, e, c.norm(), search).f.basis();
        }
        if (n > 1) {
            const double g = euclid_dh(cur, prev);
            out.table.gaps.push_back(g);
            below = g < tol ? below + 1 : 0;
            if (below >= 2) {
                out.table.converged = true;
                prev = cur;
                break;
            }
        }
        prev = cur;
    }
    out.f = Subspace::from_orthonormal(prev);
    summarize(out.table, 2);
    out.projection_norm = oblique_projection(e, out.f, c.norm(), search).norm;
    return out;
}

SplittingReport construct_splitting(const CocycleSystem& c, const DominationCertificate& cert, double tol,
                                    const RunOptions& opts) {
    if (!cert.pass) throw Error(ErrorCode::precondition, "domination was not detected");
    SplittingReport rep;
    rep.k = cert.k;
    rep.tol = tol;
    rep.n_max = cert.n_max;
    rep.tau = cert.fit.tau;
    const auto& samples = c.base().samples();
    rep.points.resize(samples.size());
    parallel_for(samples.size(), opts.jobs, [&](std::size_t i) {
        PointSplitting& ps = rep.points[i];
        ps.x = samples[i];
        UpperResult up = construct_upper(c, ps.x, rep.k, tol, rep.n_max, rep.tau);
        LowerResult lo = construct_lower(c, ps.x, up.e, tol, rep.n_max, opts.search);
        ps.e = up.e;
        ps.f = lo.f;
        ps.upper = up.table;
        ps.lower = lo.table;
        ps.projection_norm = lo.projection_norm;
    });
    return rep;
}

namespace {

// Subspaces at arbitrary base points: report values at samples, fresh constructions elsewhere.
class Provider {
public:
    Provider(const CocycleSystem& c, const SplittingReport& r, const SearchOptions& s) : c_(c), r_(r), s_(s) {}

    const PointSplitting* lookup(const Vector& y) const {
        const int idx = c_.base().sample_index(y);
        if (idx >= 0 && idx < static_cast<int>(r_.points.size()) && c_.base().same_point(r_.points[idx].x, y))
            return &r_.points[idx];
        for (const auto& p : r_.points)
            if (c_.base().same_point(p.x, y)) return &p;
        return nullptr;
    }
    Matrix upper(const Vector& y) const {
        if (auto p = lookup(y)) return p->e.basis();
        return construct_upper(c_, y, r_.k, r_.tol, r_.n_max, r_.tau).e.basis();
    }
    Matrix lower(const Vector& y, const Matrix& e) const {
        if (auto p = lookup(y)) return p->f.basis();
        return construct_lower(c_, y, Subspace::from_orthonormal(e), r_.tol, r_.n_max, s_).f.basis();
    }

private:
    const CocycleSystem& c_;
    const SplittingReport& r_;
    SearchOptions s_;
};

struct OrbitProfile {
    std::vector<double> log_ratio;     // n = 1..N: log ||A^n|F|| - log m(A^n|E)
    std::vector<double> log_min_e;     // n = 1..N
    std::vector<double> log_norm_f;    // n = 1..N
    std::vector<Vector> log_sigma;     // n = 0..N, singular values of A^n_x
    double equivariance_f = 0.0;
    double log_c0 = -std::numeric_limits<double>::infinity();  // max log 1 / m(A_y|E(y)) on the orbit
};

OrbitProfile orbit_profile(const CocycleSystem& c, const Provider& prov, const Vector& x, const Matrix& e0,
                           const Matrix& f0, int count) {
    const int d = c.dim();
    const int k = static_cast<int>(e0.cols());
    OrbitProfile out;
    ForwardProduct full(d), on_e(k), on_f(d - k);
    out.log_sigma.push_back(Vector::Zero(d));
    Vector y = x;
    Matrix e = e0;
    Matrix f = f0;
    for (int n = 1; n <= count; ++n) {
        const Matrix a = c.generator(y);
        const Vector ty = c.base().forward(y);
        full.push(a);
        Eigen::HouseholderQR<Matrix> qr(a * e);
        Matrix e_next = qr.householderQ() * Matrix::Identity(d, k);
        Matrix r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
        out.log_c0 = std::max(out.log_c0, -std::log(min_singular_value(r)));
        on_e.push(r);
        const Matrix f_next = prov.lower(ty, e_next);
        // A F(y) in F(Ty) tested as F(y) in A^-1 F(Ty), where errors in F(Ty) contract
        out.equivariance_f =
            std::max(out.equivariance_f, euclid_gap(f, orthonormal_basis(a.partialPivLu().solve(f_next))));
        on_f.push(f_next.transpose() * a * f);
        const Vector le = on_e.product().log_singular_values();
        const Vector lf = on_f.product().log_singular_values();
        out.log_min_e.push_back(le(k - 1));
        out.log_norm_f.push_back(lf(0));
        out.log_ratio.push_back(lf(0) - le(k - 1));
        out.log_sigma.push_back(full.product().log_singular_values());
        e = e_next;
        f = f_next;
        y = ty;
    }
    return out;
}

}  // namespace

Verification verify_splitting(const CocycleSystem& c, const SplittingReport& report, int n_max,
                              const RunOptions& opts) {
    if (report.points.size() != c.base().samples().size())
        throw Error(ErrorCode::sample_mismatch, "report does not cover the cocycle samples");
    const int k = report.k;
    Provider prov(c, report, opts.search);
    const std::size_t m = report.points.size();
    std::vector<OrbitProfile> prof(m);
    std::vector<double> eq_e(m, 0.0);
    parallel_for(m, opts.jobs, [&](std::size_t i) {
        const PointSplitting& ps = report.points[i];
        const Vector tx = c.base().forward(ps.x);
        const Matrix a = c.generator(ps.x);
        eq_e[i] = euclid_dh(orthonormal_basis(a * ps.e.basis()), prov.upper(tx));
        prof[i] = orbit_profile(c, prov, ps.x, ps.e.basis(), ps.f.basis(), n_max);
    });
    Verification v;
    v.sup_ratios.assign(n_max, 0.0);
    double log_kt = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
        v.equivariance_e = std::max(v.equivariance_e, eq_e[i]);
        v.equivariance_f = std::max(v.equivariance_f, prof[i].equivariance_f);
        for (int n = 1; n <= n_max; ++n) {
            v.sup_ratios[n - 1] = std::max(v.sup_ratios[n - 1], std::exp(prof[i].log_ratio[n - 1]));
            const Vector& ls = prof[i].log_sigma[n];
            log_kt = std::max({log_kt, ls(k - 1) - prof[i].log_min_e[n - 1], prof[i].log_norm_f[n - 1] - ls(k)});
        }
    }
    v.k_tilde = std::exp(log_kt);
    v.envelope = fit_envelope(v.sup_ratios, std::max(1, n_max / 2));
    const bool equivariant = v.equivariance_e < v.equivariance_tol && v.equivariance_f < v.equivariance_tol;
    const bool decays = std::isfinite(v.envelope.tau) && v.envelope.tau < 0.99;
    v.pass = equivariant && decays;
    if (!equivariant) v.diagnostic = "equivariance residual above tolerance";
    else if (!decays) v.diagnostic = "domination ratio does not decay";
    return v;
}

double theorem_log_bound(int k, double kappa, double k_const, double tau, int* q_index) {
    if (!(tau > 0.0 && tau < 1.0)) throw Error(ErrorCode::bound_not_applicable, "tau must lie in (0, 1)");
    const double q = std::ceil((std::log(3.0 * std::pow(kappa, 3) * k_const) - std::log(1.0 - tau)) / -std::log(tau));
    const int qi = std::max(0, static_cast<int>(q));
    if (q_index) *q_index = qi;
    return -(2.0 * k * std::log(kappa) * qi + 36.0 * k / (1.0 - tau));
}

double variant_log_bound(int k, double kappa, double k_const, double tau, int* q_index) {
    if (!(tau > 0.0 && tau < 1.0)) throw Error(ErrorCode::bound_not_applicable, "tau must lie in (0, 1)");
    const double q = std::ceil((std::log(12.0 * std::pow(kappa, 3) * k_const) - std::log(1.0 - tau)) / -std::log(tau));
    const int qi = std::max(0, static_cast<int>(q));
    if (q_index) *q_index = qi;
    return -(2.0 * k * std::log(kappa) * qi + 2.0 * k / (1.0 - tau));
}

RBound r_bound_certificate(const CocycleSystem& c, const SplittingReport& report, const DominationCertificate& cert,
                           int n_max) {
    const int d = c.dim();
    const int k = report.k;
    RBound out;
    out.log_estimate = 0.0;
    for (const PointSplitting& ps : report.points) {
        ForwardProduct full(d), on_e(k);
        Matrix e = ps.e.basis();
        Vector y = ps.x;
        for (int n = 1; n <= n_max; ++n) {
            const Matrix a = c.generator(y);
            full.push(a);
            Eigen::HouseholderQR<Matrix> qr(a * e);
            e = qr.householderQ() * Matrix::Identity(d, k);
            on_e.push(qr.matrixQR().topRows(k).triangularView<Eigen::Upper>());
            const double log_det = on_e.product().log_singular_values().sum();
            const double log_top = full.product().log_singular_values().head(k).sum();
            out.log_estimate = std::min(out.log_estimate, log_det - log_top);
            y = c.base().forward(y);
        }
        out.measured_index = std::max(out.measured_index, ps.upper.stabilization_index);
    }
    out.kappa = c.kappa();
    out.k_const = std::max(cert.fit.k, 1.0);
    out.tau = cert.fit.tau;
    if (cert.pass && out.tau > 0.0 && out.tau < 1.0) {
        out.log_bound = theorem_log_bound(k, out.kappa, out.k_const, out.tau, &out.q_index);
        out.log_bound_variant = variant_log_bound(k, out.kappa, out.k_const, out.tau, &out.q_index_variant);
        out.holds = out.log_estimate >= out.log_bound;
    } else {
        out.log_bound = -std::numeric_limits<double>::infinity();
        out.log_bound_variant = out.log_bound;
        out.holds = false;
    }
    return out;
}

ConverseResult converse_constant(const CocycleSystem& c, const SplittingReport& report,
                                 const Verification& verification, int n_max, const RunOptions& opts) {
    if (!verification.pass) throw Error(ErrorCode::precondition, "no verified splitting");
    const int k = report.k;
    const double tau = verification.envelope.tau;
    Provider prov(c, report, opts.search);
    const std::size_t m = report.points.size();
    std::vector<OrbitProfile> px(m), ptx(m);
    parallel_for(m, opts.jobs, [&](std::size_t i) {
        const PointSplitting& ps = report.points[i];
        const Vector tx = c.base().forward(ps.x);
        const Matrix a = c.generator(ps.x);
        const Matrix e_tx = orthonormal_basis(a * ps.e.basis());
        px[i] = orbit_profile(c, prov, ps.x, ps.e.basis(), ps.f.basis(), n_max + 1);
        ptx[i] = orbit_profile(c, prov, tx, e_tx, prov.lower(tx, e_tx), n_max);
    });
    ConverseResult out;
    out.tau = tau;
    double log_k = -std::numeric_limits<double>::infinity();
    double log_c0 = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
        for (int n = 1; n <= n_max; ++n) {
            log_k = std::max({log_k, px[i].log_ratio[n - 1] - n * std::log(tau),
                              ptx[i].log_ratio[n - 1] - n * std::log(tau)});
        }
        log_c0 = std::max({log_c0, px[i].log_c0, ptx[i].log_c0});
    }
    out.k_envelope = std::exp(log_k);
    out.c0 = std::exp(log_c0);
    out.k_prime = out.k_envelope * out.c0;
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
        for (int n = 1; n <= n_max; ++n) {
            const double lhs = std::max(px[i].log_sigma[n](k), ptx[i].log_sigma[n](k));
            const double rhs = std::log(out.k_prime) + n * std::log(tau) + px[i].log_sigma[n + 1](k - 1);
            worst = std::max(worst, lhs - rhs);
        }
    }
    out.worst_ratio = std::exp(worst);
    out.holds = out.worst_ratio <= 1.0 + 1e-9;
    return out;
}

Uniqueness uniqueness_check(const SplittingReport& a, const SplittingReport& b) {
    if (a.points.size() != b.points.size()) throw Error(ErrorCode::sample_mismatch, "different sample counts");
    Uniqueness u;
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        const auto& p = a.points[i];
        const auto& q = b.points[i];
        if (p.x.size() != q.x.size() || (p.x - q.x).cwiseAbs().maxCoeff() > 1e-12)
            throw Error(ErrorCode::sample_mismatch, "sample points differ");
        if (p.e.dim() != q.e.dim()) throw Error(ErrorCode::sample_mismatch, "different splitting index");
        u.max_e = std::max(u.max_e, euclid_dh(p.e.basis(), q.e.basis()));
        u.max_f = std::max(u.max_f, euclid_dh(p.f.basis(), q.f.basis()));
    }
    return u;
}

}  // namespace domsplit
