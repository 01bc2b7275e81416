#include "domsplit/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "domsplit/error.hpp"
#include "domsplit/geometry.hpp"
#include "domsplit/parallel.hpp"
#include "domsplit/snumbers.hpp"

namespace domsplit {

namespace {

constexpr double two_pi = 6.283185307179586476925286766559;

double wrap(double v) {
    v -= std::floor(v);
    return v >= 1.0 ? 0.0 : v;
}

void check_term(const FieldTerm& t, int d) {
    if (t.coefficient.rows() != d || t.coefficient.cols() != d)
        throw Error(ErrorCode::dimension_mismatch, "field term size");
    if (t.component < 0) throw Error(ErrorCode::config, "field term component");
}

// least squares slope and intercept of y against x
std::pair<double, double> line_fit(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i]; sy += y[i]; sxx += x[i] * x[i]; sxy += x[i] * y[i];
    }
    const double den = n * sxx - sx * sx;
    const double slope = den > 0 ? (n * sxy - sx * sy) / den : 0.0;
    return {slope, n > 0 ? (sy - slope * sx) / n : 0.0};
}

double log_or_floor(double v) { return v > 0 ? std::log(v) : -690.0; }

std::pair<double, double> gelfand_pair(const Matrix& b, int k, const Norm& norm, const SearchOptions& s) {
    if (norm.is_euclidean()) {
        const Vector sv = singular_values(b);
        return {sv(k - 1), sv(k)};
    }
    return {gelfand_number(b, k, norm, s).value, gelfand_number(b, k + 1, norm, s).value};
}

double norm_on(const Matrix& b, const Matrix& basis, const Norm& norm, const SearchOptions& s) {
    if (norm.is_euclidean()) return spectral_norm(b * basis);
    return operator_norm(b, norm, norm, basis, s);
}

double min_on(const Matrix& b, const Matrix& basis, const Norm& norm, const SearchOptions& s) {
    if (norm.is_euclidean()) return min_singular_value(b * basis);
    return min_norm(b, Subspace::from_orthonormal(basis), norm, s);
}

}  // namespace

FieldSpec FieldSpec::constant_matrix(const Matrix& m) {
    if (m.rows() != m.cols() || m.rows() < 1) throw Error(ErrorCode::dimension_mismatch, "field must be square");
    FieldSpec f;
    f.kind = "constant";
    f.constant = m;
    return f;
}

FieldSpec FieldSpec::diagonal_trig(const Vector& diagonal, std::vector<FieldTerm> forcing) {
    FieldSpec f;
    f.kind = "diagonal_trig";
    f.constant = diagonal.asDiagonal();
    const int d = static_cast<int>(diagonal.size());
    for (const auto& t : forcing) {
        check_term(t, d);
        if (!t.coefficient.isDiagonal(0.0)) throw Error(ErrorCode::config, "diagonal forcing must be diagonal");
    }
    f.terms = std::move(forcing);
    return f;
}

FieldSpec FieldSpec::rotation(double omega) {
    FieldSpec f;
    f.kind = "rotation";
    f.constant = Matrix{{0.0, omega}, {-omega, 0.0}};
    return f;
}

FieldSpec FieldSpec::coupled(const Matrix& m, std::vector<FieldTerm> terms) {
    FieldSpec f = constant_matrix(m);
    f.kind = "coupled";
    for (const auto& t : terms) check_term(t, f.dim());
    f.terms = std::move(terms);
    return f;
}

Matrix FieldSpec::at(const Vector& y) const {
    Matrix m = constant;
    for (const auto& t : terms) {
        const double arg = two_pi * t.harmonic * (t.component < y.size() ? y(t.component) : 0.0);
        m += t.coefficient * (t.sine ? std::sin(arg) : std::cos(arg));
    }
    return m;
}

bool FieldSpec::is_diagonal() const {
    if (!constant.isDiagonal(0.0)) return false;
    for (const auto& t : terms)
        if (!t.coefficient.isDiagonal(0.0)) return false;
    return true;
}

FlowBase FlowBase::fixed_point() { return FlowBase{}; }

FlowBase FlowBase::torus(const Vector& frequency, const std::vector<int>& grid) {
    if (frequency.size() < 1 || static_cast<Eigen::Index>(grid.size()) != frequency.size())
        throw Error(ErrorCode::dimension_mismatch, "flow grid must match the frequency vector");
    for (int g : grid)
        if (g < 1) throw Error(ErrorCode::precondition, "grid must be positive");
    return FlowBase{frequency, grid};
}

FlowCocycle::FlowCocycle(FlowBase base, FieldSpec field, Norm norm, double step, double t_max)
    : base_(std::move(base)), field_(std::move(field)), norm_(std::move(norm)), step_(step), t_max_(t_max) {
    if (!(step_ > 0.0)) throw Error(ErrorCode::precondition, "integration step must be positive");
    if (!(t_max_ > 0.0)) throw Error(ErrorCode::precondition, "horizon must be positive");
    if (norm_.dim() != field_.dim()) throw Error(ErrorCode::dimension_mismatch, "norm and field dimensions differ");
    for (const auto& t : field_.terms)
        if (t.component >= base_.point_dim() && !base_.is_fixed())
            throw Error(ErrorCode::config, "field term refers to a missing base coordinate");
    if (base_.is_fixed()) {
        samples_.push_back(Vector::Zero(1));
    } else {
        samples_ = BaseSystem::torus_translation(base_.frequency, base_.grid).samples();
    }
}

Vector FlowCocycle::flow_point(const Vector& x, double t) const {
    if (base_.is_fixed()) return x;
    Vector y(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) y(i) = wrap(x(i) + t * base_.frequency(i));
    return y;
}

namespace {

Matrix rk4_step(const FlowCocycle& fc, const Vector& x, double s, double h, const Matrix& y) {
    const Matrix m0 = fc.field().at(fc.flow_point(x, s));
    const Matrix mh = fc.field().at(fc.flow_point(x, s + 0.5 * h));
    const Matrix m1 = fc.field().at(fc.flow_point(x, s + h));
    const Matrix k1 = m0 * y;
    const Matrix k2 = mh * (y + 0.5 * h * k1);
    const Matrix k3 = mh * (y + 0.5 * h * k2);
    const Matrix k4 = m1 * (y + h * k3);
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

Matrix FlowCocycle::integrate(const Vector& x, double t, double h) const {
    if (t < 0.0) throw Error(ErrorCode::precondition, "time must be nonnegative");
    const long full = static_cast<long>(std::floor(t / h + 1e-9));
    Matrix y = Matrix::Identity(dim(), dim());
    for (long i = 0; i < full; ++i) y = rk4_step(*this, x, i * h, h, y);
    const double rest = t - full * h;
    if (rest > 1e-14) y = rk4_step(*this, x, full * h, rest, y);
    return y;
}

std::vector<Matrix> FlowCocycle::trajectory(const Vector& x, double dt, int count) const {
    const long per = static_cast<long>(std::ceil(dt / step_ - 1e-9));
    const double h = dt / per;
    std::vector<Matrix> out;
    out.reserve(count + 1);
    Matrix y = Matrix::Identity(dim(), dim());
    out.push_back(y);
    for (int i = 0; i < count; ++i) {
        for (long j = 0; j < per; ++j) y = rk4_step(*this, x, i * dt + j * h, h, y);
        out.push_back(y);
    }
    return out;
}

Matrix FlowCocycle::closed_form(const Vector& x, double t) const {
    if (!has_closed_form()) throw Error(ErrorCode::precondition, "no closed form for a non-diagonal field");
    const int d = dim();
    Vector expo = field_.constant.diagonal() * t;
    for (const auto& term : field_.terms) {
        const double w = base_.is_fixed() ? 0.0 : base_.frequency(term.component);
        const double x0 = term.component < x.size() ? x(term.component) : 0.0;
        const double a = two_pi * term.harmonic;
        double integral;
        if (std::abs(a * w) < 1e-15) {
            integral = t * (term.sine ? std::sin(a * x0) : std::cos(a * x0));
        } else if (term.sine) {
            integral = -(std::cos(a * (x0 + t * w)) - std::cos(a * x0)) / (a * w);
        } else {
            integral = (std::sin(a * (x0 + t * w)) - std::sin(a * x0)) / (a * w);
        }
        expo += term.coefficient.diagonal() * integral;
    }
    Matrix out = Matrix::Zero(d, d);
    for (int i = 0; i < d; ++i) out(i, i) = std::exp(expo(i));
    return out;
}

FlowEvaluation evaluate_flow(const FlowCocycle& fc, const Vector& x, double t) {
    if (t > fc.t_max()) throw Error(ErrorCode::horizon_exceeded, "time beyond the flow horizon");
    if (t < 0.0) throw Error(ErrorCode::precondition, "time must be nonnegative");
    FlowEvaluation ev;
    ev.value = fc.integrate(x, t, fc.step());
    const Matrix fine = fc.integrate(x, t, 0.5 * fc.step());
    ev.error_estimate = spectral_norm(ev.value - fine) / 15.0;
    return ev;
}

double discretization_step(double h, int m) {
    const double unit = 1.0 / m;
    return unit / std::ceil(unit / h - 1e-9);
}

CocycleSystem discretize_flow(const FlowCocycle& fc, int m) {
    if (m < 1) throw Error(ErrorCode::precondition, "m must be positive");
    const double h = discretization_step(fc.step(), m);
    const double unit = 1.0 / m;
    BaseSystem base = fc.base().is_fixed()
                          ? BaseSystem::finite_cycle(1)
                          : BaseSystem::torus_translation(fc.base().frequency * unit, fc.base().grid);
    FlowCocycle copy = fc;
    auto gen = [copy, unit, h](const Vector& x) { return copy.integrate(x, unit, h); };
    return CocycleSystem(std::move(base), gen, fc.dim(), fc.norm(), "flow/" + std::to_string(m));
}

FlowDomination continuous_domination_check(const FlowCocycle& fc, int k, double t_max, int eps_grid,
                                           const RunOptions& opts) {
    const int d = fc.dim();
    if (k < 1 || k >= d) throw Error(ErrorCode::dimension_mismatch, "index k must satisfy 1 <= k < d");
    if (eps_grid < 2) throw Error(ErrorCode::precondition, "epsilon grid needs at least two points");
    FlowDomination out;
    out.k = k;
    out.eps_grid = eps_grid;
    const int count = std::max(1, static_cast<int>(std::lround(t_max / out.dt)));
    out.t_max = count * out.dt;
    const int unit = static_cast<int>(std::lround(1.0 / out.dt));
    if (out.t_max + 1.0 > fc.t_max()) throw Error(ErrorCode::horizon_exceeded, "check beyond the flow horizon");
    const auto& samples = fc.samples();
    std::vector<std::vector<double>> per(samples.size());
    parallel_for(samples.size(), opts.jobs, [&](std::size_t s) {
        const Vector& x = samples[s];
        const auto own = fc.trajectory(x, out.dt, count + unit);
        std::vector<double> lhs(count + 1, 0.0);
        for (int j = 0; j < eps_grid; ++j) {
            const double eps = static_cast<double>(j) / (eps_grid - 1);
            const auto traj = j == 0 ? own : fc.trajectory(fc.flow_point(x, eps), out.dt, count);
            for (int i = 0; i <= count; ++i)
                lhs[i] = std::max(lhs[i], gelfand_pair(traj[i], k, fc.norm(), opts.search).second);
        }
        per[s].resize(count + 1);
        for (int i = 0; i <= count; ++i)
            per[s][i] = lhs[i] / gelfand_pair(own[i + unit], k, fc.norm(), opts.search).first;
    });
    out.sup_ratios.assign(count + 1, 0.0);
    for (const auto& r : per)
        for (int i = 0; i <= count; ++i) out.sup_ratios[i] = std::max(out.sup_ratios[i], r[i]);
    std::vector<double> logs;
    for (int i = 0; i <= count; ++i) {
        out.times.push_back(i * out.dt);
        logs.push_back(log_or_floor(out.sup_ratios[i]));
    }
    const auto [slope, intercept] = line_fit(out.times, logs);
    (void)intercept;
    out.gamma = -slope;
    out.log_c = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= count; ++i) out.log_c = std::max(out.log_c, logs[i] + out.gamma * out.times[i]);
    out.pass = std::isfinite(out.gamma) && out.gamma > out.margin;
    if (!out.pass) out.diagnostic = "no exponential gap";
    return out;
}

FlowSplitting flow_splitting(const FlowCocycle& fc, const FlowDomination& cert, const std::vector<int>& m_list,
                             int n_max, double tol, double t_max, const RunOptions& opts) {
    if (!cert.pass) throw Error(ErrorCode::precondition, "continuous-time domination was not detected");
    if (m_list.empty()) throw Error(ErrorCode::precondition, "empty m list");
    FlowSplitting out;
    out.m_list = m_list;
    for (int m : m_list) {
        const CocycleSystem c = discretize_flow(fc, m);
        DominationCertificate dc = detect_domination(c, cert.k, n_max, Criterion::bogo, opts);
        out.certificates.push_back(dc);
        if (!dc.pass) {
            out.diagnostic = "discretization m = " + std::to_string(m) + ": " + dc.diagnostic;
            return out;
        }
        out.reports.push_back(construct_splitting(c, dc, tol, opts));
    }
    const std::size_t nm = m_list.size();
    out.agreement.assign(nm, std::vector<double>(nm, 0.0));
    double worst = 0.0;
    for (std::size_t i = 0; i < nm; ++i) {
        for (std::size_t j = i + 1; j < nm; ++j) {
            const Uniqueness u = uniqueness_check(out.reports[i], out.reports[j]);
            const double v = std::max(u.max_e, u.max_f);
            out.agreement[i][j] = out.agreement[j][i] = v;
            if (v >= worst) {
                worst = v;
                out.worst_i = static_cast<int>(i);
                out.worst_j = static_cast<int>(j);
            }
        }
    }
    out.agree = worst < out.agreement_tol;

    const double dt = 0.125;
    const int count = std::max(8, static_cast<int>(std::lround(t_max / dt)));
    const int unit = static_cast<int>(std::lround(1.0 / dt));
    if (count * dt > fc.t_max()) throw Error(ErrorCode::horizon_exceeded, "check beyond the flow horizon");
    const SplittingReport& rep = out.reports.front();
    const std::size_t ns = rep.points.size();
    std::vector<std::vector<double>> ratio(ns);
    std::vector<double> sup_unit(ns, 0.0), min_unit(ns, std::numeric_limits<double>::infinity());
    parallel_for(ns, opts.jobs, [&](std::size_t s) {
        const PointSplitting& p = rep.points[s];
        const auto traj = fc.trajectory(p.x, dt, count);
        ratio[s].resize(count + 1);
        for (int i = 0; i <= count; ++i) {
            const double on_f = norm_on(traj[i], p.f.basis(), fc.norm(), opts.search);
            const double on_e = min_on(traj[i], p.e.basis(), fc.norm(), opts.search);
            ratio[s][i] = on_f / on_e;
            if (i <= unit) {
                const double full = fc.norm().is_euclidean() ? spectral_norm(traj[i])
                                                             : operator_norm(traj[i], fc.norm(), opts.search);
                sup_unit[s] = std::max(sup_unit[s], full);
                min_unit[s] = std::min(min_unit[s], on_e);
            }
        }
    });
    out.ratios.assign(count + 1, 0.0);
    std::vector<double> logs;
    for (int i = 0; i <= count; ++i) {
        for (std::size_t s = 0; s < ns; ++s) out.ratios[i] = std::max(out.ratios[i], ratio[s][i]);
        out.times.push_back(i * dt);
        logs.push_back(log_or_floor(out.ratios[i]));
    }
    out.gamma = -line_fit(out.times, logs).first;
    out.log_c = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= count; ++i) out.log_c = std::max(out.log_c, logs[i] + out.gamma * out.times[i]);
    out.half_time_ratio = out.ratios[unit / 2];
    out.sup_norm_unit_time = *std::max_element(sup_unit.begin(), sup_unit.end());
    out.min_on_e_unit_time = *std::min_element(min_unit.begin(), min_unit.end());
    const bool decays = out.gamma > cert.margin;
    const bool controlled = std::isfinite(out.sup_norm_unit_time) && out.min_on_e_unit_time > 0.0;
    out.pass = out.agree && decays && controlled;
    if (!out.agree) {
        out.diagnostic = "splittings for m = " + std::to_string(m_list[out.worst_i]) + " and m = " +
                         std::to_string(m_list[out.worst_j]) + " disagree";
    } else if (!decays) {
        out.diagnostic = "continuous-time ratio does not decay";
    } else if (!controlled) {
        out.diagnostic = "unit-time control failed";
    }
    return out;
}

}  // namespace domsplit
