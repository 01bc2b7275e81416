#include "domsplit/lemma_suites.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <sstream>

#include "domsplit/error.hpp"
#include "domsplit/geometry.hpp"
#include "domsplit/rng.hpp"
#include "domsplit/snumbers.hpp"
#include "domsplit/splitting.hpp"
#include "domsplit/svd_split.hpp"

namespace domsplit {

namespace {

using Instance = std::vector<Matrix>;
using Predicate = std::function<std::optional<std::string>(const Instance&)>;

std::string describe(double lhs, double rhs) {
    std::ostringstream os;
    os.precision(17);
    os << "lhs " << lhs << " rhs " << rhs;
    return os.str();
}

std::optional<std::string> at_most(double lhs, double rhs) {
    if (lhs <= rhs) return std::nullopt;
    return describe(lhs, rhs);
}

// failing predicate, with errors counted as passes so shrinking stays inside the domain
bool still_fails(const Predicate& p, const Instance& x) {
    try {
        return p(x).has_value();
    } catch (const std::exception&) {
        return false;
    }
}

Instance shrink(const Instance& start, const Predicate& p) {
    Instance cur = start;
    for (int pass = 0; pass < 3; ++pass) {
        bool changed = false;
        for (auto& m : cur) {
            for (Eigen::Index i = 0; i < m.size(); ++i) {
                const double old = m.data()[i];
                for (double cand : {0.0, std::round(old), std::round(old * 10.0) / 10.0, std::round(old * 100.0) / 100.0}) {
                    if (cand == old) continue;
                    m.data()[i] = cand;
                    if (still_fails(p, cur)) {
                        changed = true;
                        break;
                    }
                    m.data()[i] = old;
                }
            }
        }
        if (!changed) break;
    }
    return cur;
}

struct Context {
    SuiteResult& result;
    int trial = 0;
    std::uint64_t seed = 0;

    void check(const std::string& name, const Instance& x, const Predicate& p) {
        std::optional<std::string> failure;
        try {
            failure = p(x);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::bound_not_applicable || e.code() == ErrorCode::precondition ||
                e.code() == ErrorCode::not_complemented) {
                ++result.skipped;
                return;
            }
            failure = std::string("error: ") + e.what();
        }
        ++result.checks;
        if (!failure) return;
        Violation v;
        v.check = name;
        v.trial = trial;
        v.seed = seed;
        v.detail = *failure;
        v.counterexample = shrink(x, p);
        if (auto again = p(v.counterexample)) v.detail = *again;
        result.violations.push_back(std::move(v));
    }
    void measure(const std::string& name, double v) {
        auto it = result.measured.find(name);
        if (it == result.measured.end()) result.measured[name] = v;
        else it->second = std::max(it->second, v);
    }
};

int draw(Rng& rng, int lo, int hi) { return lo + static_cast<int>(rng.uniform() * (hi - lo + 1)); }

Matrix orth(Rng& rng, int d, int q) { return orthonormal_basis(rng.normal_matrix(d, q)); }

// U diag(s) V^T with log-uniform singular values in [1, kappa]
Matrix conditioned(Rng& rng, int d, double kappa) {
    const Matrix u = orth(rng, d, d);
    const Matrix v = orth(rng, d, d);
    Vector s(d);
    for (int i = 0; i < d; ++i) s(i) = std::exp(rng.uniform() * std::log(kappa));
    return u * s.asDiagonal() * v.transpose();
}

Norm random_polytope_or_euclid(Rng& rng, int d) {
    const int pick = draw(rng, 0, 2);
    if (pick == 0) return Norm::euclidean(d);
    return Norm::lp(d, pick == 1 ? 1.0 : infinity);
}

Norm norm_by_code(double code, int d) {
    if (code == 1.0) return Norm::lp(d, 1.0);
    if (code == 3.0) return Norm::lp(d, infinity);
    return Norm::euclidean(d);
}

double norm_code(const Norm& n) {
    if (n.is_euclidean()) return 2.0;
    return n.p() == 1.0 ? 1.0 : 3.0;
}

Subspace sub(const Matrix& m) { return Subspace::span_of(m); }

double euclid_dh(const Subspace& a, const Subspace& b) { return spectral_norm(a.projector() - b.projector()); }

void geometry_trial(Context& cx, Rng& rng, int dim) {
    const int d = draw(rng, 2, dim);
    const int q = draw(rng, 1, d - 1);
    const Norm eu = Norm::euclidean(d);
    const Matrix e = orth(rng, d, q);
    const Matrix e2 = orth(rng, d, q);
    const Matrix f = orth(rng, d, d - q);

    cx.check("hausdorff_sandwich", {e, e2}, [&](const Instance& x) {
        const Subspace a = sub(x[0]), b = sub(x[1]);
        const double g = std::max(gap(a, b, eu), gap(b, a, eu));
        const double h = hausdorff(a, b, eu);
        if (g > h + 1e-9) return at_most(g, h);
        return at_most(h, 2.0 * g + 1e-9);
    });

    const Norm pn = random_polytope_or_euclid(rng, d);
    const double code = norm_code(pn);
    if (d <= 4) {
        // nearby pair so that the precondition gap < 1/q is usually met
        const Matrix near = e + 0.2 / q * rng.uniform() * rng.normal_matrix(d, q);
        cx.check("gap_asymmetry", {e, near, Matrix::Constant(1, 1, code)}, [](const Instance& x) {
            const Subspace a = sub(x[0]), b = sub(x[1]);
            const Norm n = norm_by_code(x[2](0, 0), a.ambient_dim());
            const int qq = a.dim();
            if (b.dim() != qq) throw Error(ErrorCode::precondition, "dimension drop");
            const double g = gap(a, b, n);
            if (!(g < 1.0 / qq)) throw Error(ErrorCode::bound_not_applicable, "gap too large");
            return at_most(gap(b, a, n), gap_asymmetry_bound(g, qq) + 1e-12);
        });
    }

    cx.check("angle_projection_identity", {e, f}, [&](const Instance& x) -> std::optional<std::string> {
        const Subspace a = sub(x[0]), b = sub(x[1]);
        const double s = minimal_angle(a, b, eu).sin_theta;
        const double p = oblique_projection(a, b, eu).norm;
        if (std::abs(s * p - 1.0) <= 1e-6) return std::nullopt;
        return "sin theta * |pi| = " + describe(s * p, 1.0);
    });

    cx.check("angle_symmetry", {e, f}, [&](const Instance& x) {
        const Subspace a = sub(x[0]), b = sub(x[1]);
        return at_most(minimal_angle(b, a, eu).sin_theta, 2.0 * minimal_angle(a, b, eu).sin_theta + 1e-9);
    });

    const Matrix noise = rng.normal_matrix(d, q);
    const double scale = rng.uniform();
    cx.check("open_condition", {e, f, noise, Matrix::Constant(1, 1, scale)}, [&](const Instance& x) {
        const Subspace a = sub(x[0]), b = sub(x[1]);
        const double s = minimal_angle(a, b, eu).sin_theta;
        const double p = oblique_projection(a, b, eu).norm;
        // shrink the perturbation until d_H < sin theta
        double t = x[3](0, 0);
        Subspace a2 = sub(x[0] + t * x[2]);
        for (int i = 0; i < 60 && (a2.dim() != a.dim() || euclid_dh(a, a2) >= s); ++i) {
            t *= 0.5;
            a2 = sub(x[0] + t * x[2]);
        }
        const double dh = euclid_dh(a, a2);
        if (!(dh < s) || a2.dim() != a.dim()) throw Error(ErrorCode::precondition, "perturbation too large");
        const double p2 = oblique_projection(a2, b, eu).norm;
        return at_most(p2, p / (1.0 - p * dh) * (1.0 + 1e-9));
    });

    cx.check("orthogonal_complement", {e}, [&](const Instance& x) -> std::optional<std::string> {
        const Subspace a = sub(x[0]);
        const double p = oblique_projection(a, a.complement(), eu).norm;
        if (std::abs(p - 1.0) > 1e-10 || p > std::sqrt(static_cast<double>(a.dim())) + 1e-12)
            return describe(p, 1.0);
        return std::nullopt;
    });

    const Matrix a = conditioned(rng, d, 10.0);
    const Matrix b = conditioned(rng, d, 10.0);
    cx.check("det_multiplicative", {a, b, e}, [&](const Instance& x) -> std::optional<std::string> {
        const Subspace s = sub(x[2]);
        const double lhs = subspace_determinant(x[1] * x[0], s, eu);
        const double rhs = subspace_determinant(x[1], s.image(x[0]), eu) * subspace_determinant(x[0], s, eu);
        if (std::abs(lhs - rhs) <= 1e-9 * std::max(lhs, rhs)) return std::nullopt;
        return describe(lhs, rhs);
    });

    cx.check("gap_estimate", {e, e2, f}, [&](const Instance& x) {
        const Subspace s = sub(x[0]), s2 = sub(x[1]), c = sub(x[2]);
        const Projection pf = oblique_projection(c, s, eu);
        const double restricted = spectral_norm(pf.matrix * s2.basis());
        return at_most(euclid_dh(s2, s), 4.0 * s.dim() * restricted + 1e-12);
    });

    if (d >= 2) {
        const int l = draw(rng, 1, d - 1);
        const int m = draw(rng, 1, d - l);
        const Matrix g = rng.normal_matrix(d, l);
        const Matrix h = rng.normal_matrix(d, m);
        cx.check("det_split", {a, g, h}, [&](const Instance& x) -> std::optional<std::string> {
            const DetSplit r = det_split_bound(x[0], sub(x[1]), sub(x[2]), eu);
            if (r.within) return std::nullopt;
            std::ostringstream os;
            os << "ratio " << r.ratio << " outside [" << r.lower << ", " << r.upper << "]";
            return os.str();
        });
    }

    cx.check("projection_idempotent", {e, f}, [&](const Instance& x) -> std::optional<std::string> {
        const Subspace s = sub(x[0]), c = sub(x[1]);
        const Matrix p = oblique_projection(s, c, eu).matrix;
        const double scale2 = std::max(1.0, spectral_norm(p) * spectral_norm(p));
        const double r1 = spectral_norm(p * p - p) / scale2;
        const double r2 = spectral_norm(p * s.basis() - s.basis()) / scale2;
        const double r3 = spectral_norm(p * c.basis()) / scale2;
        const double worst = std::max({r1, r2, r3});
        return at_most(worst, 1e-10);
    });

    Vector weights(d);
    for (int i = 0; i < d; ++i) weights(i) = rng.uniform(0.2, 3.0);
    const double p = rng.uniform() < 0.2 ? infinity : rng.uniform(1.0, 5.0);
    const Vector u = rng.normal_vector(d), v = rng.normal_vector(d);
    const double lambda = rng.uniform(-3.0, 3.0);
    cx.check("norm_axioms", {weights, Matrix::Constant(1, 1, p), u, v}, [lambda](const Instance& x)
                 -> std::optional<std::string> {
        const Norm n = Norm::weighted(x[0], x[1](0, 0));
        const Vector a = x[2], b = x[3];
        const double na = n(a), nb = n(b);
        if (n(Vector::Zero(a.size())) != 0.0) return "nonzero norm of zero";
        if (std::abs(n(lambda * a) - std::abs(lambda) * na) > 1e-12 * (1.0 + std::abs(lambda) * na))
            return "homogeneity " + describe(n(lambda * a), std::abs(lambda) * na);
        if (n(a + b) > (na + nb) * (1.0 + 1e-12)) return "triangle " + describe(n(a + b), na + nb);
        const Vector fa = n.norming_functional(a);
        if (std::abs(n.dual(fa) - 1.0) > 1e-9 || std::abs(fa.dot(a) - na) > 1e-9 * (1.0 + na))
            return "norming functional " + describe(fa.dot(a), na);
        if (fa.dot(b) > nb * (1.0 + 1e-9) + 1e-12) return "duality " + describe(fa.dot(b), nb);
        return std::nullopt;
    });
}

void snumbers_trial(Context& cx, Rng& rng, int dim) {
    const int d = draw(rng, 2, dim);
    const Norm eu = Norm::euclidean(d);
    const Matrix a = rng.normal_matrix(d, d);
    cx.check("euclidean_collapse", {a}, [&](const Instance& x) -> std::optional<std::string> {
        const Vector s = singular_values(x[0]);
        double prod = 1.0;
        for (int q = 1; q <= d; ++q) {
            prod *= s(q - 1);
            const double c = gelfand_number(x[0], q, eu).value;
            const double k = kolmogorov_number(x[0], q, eu).value;
            const double v = volume_growth(x[0], q, eu).value;
            if (std::abs(c - s(q - 1)) > 1e-9 * s(0)) return "c_" + std::to_string(q) + " " + describe(c, s(q - 1));
            if (std::abs(k - s(q - 1)) > 1e-9 * s(0)) return "x_" + std::to_string(q) + " " + describe(k, s(q - 1));
            if (std::abs(v - prod) > 1e-9 * std::max(prod, 1e-300)) return "V_" + std::to_string(q) + " " + describe(v, prod);
        }
        return std::nullopt;
    });
    cx.check("det_product", {a}, [](const Instance& x) -> std::optional<std::string> {
        const Vector s = singular_values(x[0]);
        const double p = s.prod(), det = std::abs(x[0].determinant());
        if (std::abs(p - det) <= 1e-9 * std::max(p, det)) return std::nullopt;
        return describe(p, det);
    });
    const Matrix b = rng.normal_matrix(d, d), c = rng.normal_matrix(d, d);
    const int k = draw(rng, 1, d);
    cx.check("submultiplicative", {a, b, c}, [&](const Instance& x) {
        const double lhs = gelfand_number(x[0] * x[1] * x[2], k, eu).value;
        return at_most(lhs, spectral_norm(x[0]) * gelfand_number(x[1], k, eu).value * spectral_norm(x[2]) * (1 + 1e-9));
    });
    const Matrix pert = rng.uniform() * rng.normal_matrix(d, d);
    cx.check("gelfand_lipschitz", {a, pert}, [&](const Instance& x) {
        const double diff = std::abs(gelfand_number(x[0], k, eu).value - gelfand_number(x[0] + x[1], k, eu).value);
        return at_most(diff, spectral_norm(x[1]) * (1 + 1e-9) + 1e-12);
    });
    cx.check("volume_relation", {a}, [&](const Instance& x) -> std::optional<std::string> {
        for (int q = 1; q <= d; ++q) {
            const auto r = gelfand_volume_relation_check(x[0], q, eu);
            if (std::abs(r.volume_ratio - 1.0) > 1e-9 || std::abs(r.snumber_ratio - 1.0) > 1e-9)
                return "q " + std::to_string(q) + " " + describe(r.volume_ratio, r.snumber_ratio);
        }
        return std::nullopt;
    });
    if (cx.trial % 10 == 0) {
        // general norms in the plane, where the oracles are cheap
        const Norm pn = Norm::lp(2, rng.uniform() < 0.5 ? 1.0 : infinity);
        const Matrix a2 = rng.normal_matrix(2, 2);
        cx.check("general_monotone", {a2, Matrix::Constant(1, 1, norm_code(pn))}, [](const Instance& x)
                     -> std::optional<std::string> {
            const Norm n = norm_by_code(x[1](0, 0), 2);
            const double c1 = gelfand_number(x[0], 1, n).value, c2 = gelfand_number(x[0], 2, n).value;
            const double k1 = kolmogorov_number(x[0], 1, n).value, k2 = kolmogorov_number(x[0], 2, n).value;
            const double op = operator_norm(x[0], n);
            if (c2 > c1 * (1 + 1e-6)) return "gelfand " + describe(c2, c1);
            if (k2 > k1 * (1 + 1e-6)) return "kolmogorov " + describe(k2, k1);
            if (std::abs(c1 - op) > 1e-6 * op) return "c_1 " + describe(c1, op);
            return std::nullopt;
        });
        try {
            const auto r = gelfand_volume_relation_check(a2, 2, pn);
            cx.measure("gelfand_volume_C_emp", std::max(r.volume_ratio, 1.0 / r.volume_ratio));
            cx.measure("gelfand_kolmogorov_C_emp", std::max(r.snumber_ratio, 1.0 / r.snumber_ratio));
        } catch (const Error&) {
        }
    }
}

void svd_trial(Context& cx, Rng& rng, int dim) {
    const int d = draw(rng, 2, dim);
    const int k = draw(rng, 1, d - 1);
    const Norm eu = Norm::euclidean(d);
    const Matrix a = conditioned(rng, d, 20.0);
    const Svd svd = jacobi_svd(a);
    const Matrix top = svd.v.leftCols(k);
    const Matrix e = top + rng.uniform() * 0.5 * rng.normal_matrix(d, k);
    cx.check("prop_5_3", {a, e}, [&](const Instance& x) -> std::optional<std::string> {
        const HilbertSplit h = hilbert_svd_split(x[0], sub(x[1]));
        const double slack = 1e-9;
        if (h.min_norm_e < h.r * h.sigma_k * (1 - slack)) return "m(A|E) " + describe(h.min_norm_e, h.r * h.sigma_k);
        if (h.norm_on_f > h.sigma_k1 / h.r * (1 + slack)) return "|A|F| " + describe(h.norm_on_f, h.sigma_k1 / h.r);
        if (h.projection_norm > (1 + slack) / h.r) return "|pi| " + describe(h.projection_norm, 1 / h.r);
        return std::nullopt;
    });
    cx.check("gen_svd_matches_hilbert", {a}, [&](const Instance& x) -> std::optional<std::string> {
        const Svd s = jacobi_svd(x[0]);
        if (s.s(k - 1) < s.s(k) * (1 + 1e-3)) throw Error(ErrorCode::precondition, "near tie");
        const Subspace ek = Subspace::from_orthonormal(s.v.leftCols(k));
        const double dh = euclid_dh(banach_gen_svd(x[0], ek, eu).f, hilbert_svd_split(x[0], ek).f);
        return at_most(dh, 1e-8);
    });
    const Vector v = rng.normal_vector(d);
    const Norm pn = random_polytope_or_euclid(rng, d);
    cx.check("one_step", {a, v, Matrix::Constant(1, 1, norm_code(pn))}, [d](const Instance& x)
                 -> std::optional<std::string> {
        const Norm n = norm_by_code(x[2](0, 0), d);
        if (x[1].norm() == 0.0) throw Error(ErrorCode::precondition, "zero vector");
        const Vector u = x[1] / n(x[1]);
        const OneStep s = banach_one_step(x[0], u, n);
        if (!s.bound_holds) return "projection " + describe(s.projection_norm, s.bound);
        if (std::abs(s.image_projection_norm - 1.0) > 1e-9) return "image projection " + describe(s.image_projection_norm, 1.0);
        return std::nullopt;
    });
    if (cx.trial % 10 == 0) {
        const int d3 = std::min(d, 3);
        const int k3 = draw(rng, 1, d3 - 1);
        const Matrix a3 = conditioned(rng, d3, 8.0);
        const Matrix e3 = rng.normal_matrix(d3, k3);
        cx.check("gen_svd_containment", {a3, e3}, [&](const Instance& x) -> std::optional<std::string> {
            const GenSvd g = banach_gen_svd(x[0], sub(x[1]), Norm::lp(static_cast<int>(x[0].rows()), infinity));
            cx.measure("gen_svd_D_emp_linf", g.empirical_d);
            return at_most(g.containment_residual, 1e-9);
        });
    }
}

void quantitative_trial(Context& cx, Rng& rng, int dim) {
    if (cx.trial == 0) {
        const Matrix i2 = Matrix::Identity(2, 2);
        cx.check("lemma_5_1_identity_case", {i2, 1.1 * i2}, [](const Instance& x) -> std::optional<std::string> {
            const BoundCheck b = det_lipschitz_matrices(x[0], x[1]);
            if (std::abs(b.lhs - 2 * std::log(1.1)) > 1e-12 || std::abs(b.rhs - 0.2 / 0.9) > 1e-12 || !b.pass)
                return describe(b.lhs, b.rhs);
            return std::nullopt;
        });
        cx.check("theorem_bound_diagonal_case", {}, [](const Instance&) -> std::optional<std::string> {
            int q = 0;
            const double lb = theorem_log_bound(1, 2.0, 1.0, 0.5, &q);
            const double expect = -(2.0 * std::log(2.0) * 6 + 72.0);
            if (q != 6 || std::abs(lb - expect) > 1e-12) return describe(lb, expect);
            return std::nullopt;
        });
    }
    const int k = draw(rng, 1, dim);
    const Matrix b1 = conditioned(rng, k, 10.0);
    const Matrix dir = rng.normal_matrix(k, k);
    const double frac = rng.uniform(0.01, 0.99);
    cx.check("lemma_5_1", {b1, dir, Matrix::Constant(1, 1, frac)}, [](const Instance& x)
                 -> std::optional<std::string> {
        const double m1 = min_singular_value(x[0]);
        if (x[1].norm() == 0.0) throw Error(ErrorCode::precondition, "zero direction");
        const Matrix delta = x[1] / spectral_norm(x[1]) * (x[2](0, 0) * m1 / 2.0);
        const BoundCheck b = det_lipschitz_matrices(x[0], x[0] + delta);
        if (b.pass) return std::nullopt;
        return describe(b.lhs, b.rhs);
    });
    const int d = draw(rng, 2, dim < 2 ? 2 : dim);
    const int q = draw(rng, 1, d - 1);
    const double kappa = rng.uniform() < 0.5 ? 2.0 : 10.0;
    const Matrix a = conditioned(rng, d, kappa);
    const Matrix e = orth(rng, d, q);
    const Matrix noise = rng.normal_matrix(d, q);
    const double t = rng.uniform();
    cx.check("lemma_5_2", {a, e, noise, Matrix::Constant(1, 1, t)}, [](const Instance& x)
                 -> std::optional<std::string> {
        const Subspace e1 = sub(x[1]);
        const Vector s = singular_values(x[0]);
        const double radius = 1.0 / (4.0 * (s(0) / s(s.size() - 1)) * (s(0) / s(s.size() - 1)));
        double tt = x[3](0, 0);
        Subspace e2 = sub(x[1] + tt * x[2]);
        for (int i = 0; i < 80 && (e2.dim() != e1.dim() || euclid_dh(e1, e2) > radius); ++i) {
            tt *= 0.7;
            e2 = sub(x[1] + tt * x[2]);
        }
        if (e2.dim() != e1.dim()) throw Error(ErrorCode::precondition, "dimension drop");
        const BoundCheck b = det_lipschitz_grassmann(x[0], e1, e2);
        if (b.pass) return std::nullopt;
        return describe(b.lhs, b.rhs);
    });
    const Matrix a2 = a + 1e-3 * rng.uniform() * rng.normal_matrix(d, d);
    const Matrix e2 = e + 1e-3 * rng.uniform() * noise;
    cx.check("det_reg_euclidean", {a, a2, e, e2}, [&](const Instance& x) -> std::optional<std::string> {
        const DetRegularity r = det_reg_banach_check(x[0], x[1], sub(x[2]), sub(x[3]), Norm::euclidean(d));
        cx.measure("det_reg_quotient_max", r.quotient);
        if (!r.has_euclidean_bound) return std::nullopt;
        return at_most(r.quotient, r.euclidean_bound * (1 + 1e-9));
    });
}

}  // namespace

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"geometry", "snumbers", "svd", "quantitative"};
    return names;
}

SuiteResult run_suite(const std::string& suite, int trials, std::uint64_t seed, int dim) {
    if (std::find(suite_names().begin(), suite_names().end(), suite) == suite_names().end())
        throw Error(ErrorCode::config, "unknown suite '" + suite + "'");
    if (dim < 2) throw Error(ErrorCode::precondition, "dimension must be at least 2");
    if (dim > euclidean_dim_cap) throw Error(ErrorCode::cap_exceeded, "dimension above the cap of 16");
    if (trials < 0) throw Error(ErrorCode::precondition, "trial count must be nonnegative");
    SuiteResult result;
    result.suite = suite;
    result.trials = trials;
    result.dim = dim;
    result.seed = seed;
    for (int t = 0; t < trials; ++t) {
        Context cx{result, t, mix_seed(seed, static_cast<std::uint64_t>(t))};
        Rng rng(cx.seed);
        if (suite == "geometry") geometry_trial(cx, rng, dim);
        else if (suite == "snumbers") snumbers_trial(cx, rng, dim);
        else if (suite == "svd") svd_trial(cx, rng, dim);
        else quantitative_trial(cx, rng, dim);
    }
    return result;
}

}  // namespace domsplit
