#include "domsplit/svd_split.hpp"

#include <cmath>

#include "domsplit/error.hpp"
#include "domsplit/geometry.hpp"
#include "domsplit/snumbers.hpp"

namespace domsplit {

namespace {

constexpr double slack = 1e-9;

double log_volume(const Matrix& m) {
    Vector s = singular_values(m);
    return s.array().log().sum();
}

bool collapses(const Matrix& m) {
    Vector s = singular_values(m);
    return s(0) == 0.0 || s(s.size() - 1) < 1e-12 * s(0);
}

// basis of {x in span(basis) : f . x = 0}
Matrix restrict_kernel(const Matrix& basis, const Vector& f) {
    Matrix row = f.transpose() * basis;
    return basis * null_space(row, 1e-14);
}

}  // namespace

HilbertSplit hilbert_svd_split(const Matrix& a, const Subspace& e) {
    const int d = static_cast<int>(a.cols());
    const int k = e.dim();
    if (a.rows() != a.cols() || e.ambient_dim() != d) throw Error(ErrorCode::dimension_mismatch, "hilbert_svd_split");
    if (k == 0) throw Error(ErrorCode::zero_subspace, "hilbert_svd_split");
    const Matrix m = a * e.basis();
    if (collapses(m)) throw Error(ErrorCode::not_injective, "E meets the kernel of A");

    HilbertSplit out;
    const Matrix image = orthonormal_basis(m);
    out.f = Subspace::from_orthonormal(null_space(image.transpose() * a, 1e-14));
    if (out.f.dim() != d - k) out.f = Subspace::from_orthonormal(null_space(image.transpose() * a, 1e-10));
    out.f_image = Subspace::from_orthonormal(image).complement();

    const Vector sigma = singular_values(a);
    const Vector s = singular_values(m);
    out.sigma_k = sigma(k - 1);
    out.sigma_k1 = k < d ? sigma(k) : 0.0;
    out.r = std::exp(s.array().log().sum() - sigma.head(k).array().log().sum());
    out.min_norm_e = s(k - 1);
    const Norm euclid = Norm::euclidean(d);
    out.norm_on_f = k < d ? spectral_norm(a * out.f.basis()) : 0.0;
    out.projection_norm = k < d ? oblique_projection(e, out.f, euclid).norm : 1.0;
    const double scale = sigma(0) * 1e-13;
    out.bounds_hold = out.min_norm_e >= out.r * out.sigma_k * (1 - slack) - scale &&
                      out.norm_on_f <= out.sigma_k1 / out.r * (1 + slack) + scale &&
                      out.projection_norm <= (1 + slack) / out.r;
    return out;
}

OneStep banach_one_step(const Matrix& a, const Vector& v_in, const Norm& norm, bool volume_relation,
                        const SearchOptions& opts) {
    const int d = norm.dim();
    if (a.rows() != d || a.cols() != d || v_in.size() != d) throw Error(ErrorCode::dimension_mismatch, "banach_one_step");
    const double nv = norm(v_in);
    if (nv == 0.0) throw Error(ErrorCode::zero_subspace, "zero vector");
    const Vector v = v_in / nv;
    const Vector w = a * v;
    const double nw = norm(w);
    const double c1 = operator_norm(a, norm, opts);
    if (c1 == 0.0 || nw <= 1e-14 * c1) throw Error(ErrorCode::not_injective, "vector in kernel");

    OneStep out;
    out.functional = norm.norming_functional(w);
    const Vector pulled = a.transpose() * out.functional;  // functional o A
    out.g_image = Subspace::from_orthonormal(null_space(out.functional.transpose(), 1e-14));
    out.g = Subspace::from_orthonormal(null_space(pulled.transpose(), 1e-14));
    out.projection = v * pulled.transpose() / nw;
    // rank one: ||x -> f(x) u|| = ||f||_* |u|
    out.projection_norm = norm.dual(pulled) / nw;
    out.image_projection_norm = norm.dual(out.functional);
    out.bound = c1 / nw;
    out.bound_holds = out.projection_norm <= out.bound * (1 + slack);
    if (volume_relation && d >= 2) {
        const double v2 = volume_growth(a, 2, norm, opts).value;
        const double v1g = volume_growth(a, 1, norm, out.g, opts).value;
        out.has_volume_relation = true;
        out.volume_lower_ratio = v1g * c1 / v2;
        out.volume_upper_ratio = v1g * nw / v2;
    }
    return out;
}

Paring banach_paring(const Matrix& a, const Subspace& e, const Norm& norm, const SearchOptions& opts) {
    const int d = norm.dim();
    const int k = e.dim();
    if (a.rows() != d || a.cols() != d || e.ambient_dim() != d) throw Error(ErrorCode::dimension_mismatch, "banach_paring");
    if (k == 0) throw Error(ErrorCode::zero_subspace, "banach_paring");
    if (collapses(a * e.basis())) throw Error(ErrorCode::not_injective, "E meets the kernel of A");
    Paring out;
    Matrix f = Matrix::Identity(d, d);
    Matrix f_image = Matrix::Identity(d, d);
    Matrix ei = e.basis();
    for (int i = 0; i < k; ++i) {
        Vector v;
        if (norm.is_euclidean()) {
            Svd svd = jacobi_svd(a * ei);
            v = canonical_sign(ei * svd.v.col(0));
        } else {
            SphereOptimum top = convex_sup(ei, norm, [&](const Vector& x) { return norm(a * x); }, opts);
            if (!(top.value > 0.0) || top.point.size() != d)
                throw Error(ErrorCode::precondition, "sphere oracle failed to find a maximiser");
            v = top.point;
        }
        v /= norm(v);
        out.pivots.push_back(v);
        const Vector ell = norm.norming_functional(a * v);
        const Vector pulled = a.transpose() * ell;
        f = restrict_kernel(f, pulled);
        f_image = restrict_kernel(f_image, ell);
        ei = restrict_kernel(ei, pulled);
    }
    out.f = Subspace::from_orthonormal(orthonormal_basis(f));
    out.f_image = Subspace::from_orthonormal(orthonormal_basis(f_image));
    if (out.f.dim() != d - k || out.f_image.dim() != d - k)
        throw Error(ErrorCode::precondition, "paring lost a dimension");
    return out;
}

GenSvd banach_gen_svd(const Matrix& a, const Subspace& e, const Norm& norm, const SearchOptions& opts) {
    const int d = norm.dim();
    const int k = e.dim();
    check_dim_cap(d, norm);
    Paring par = banach_paring(a, e, norm, opts);
    GenSvd out;
    out.e = e;
    out.e_image = e.image(a);
    out.f = par.f;
    out.f_image = par.f_image;
    out.pivots = par.pivots;

    if (k < d) {
        const Matrix af = orthonormal_basis(a * out.f.basis());
        out.containment_residual = af.cols() == 0
            ? 0.0
            : spectral_norm(af - out.f_image.basis() * (out.f_image.basis().transpose() * af));
        out.projection_norm = oblique_projection(out.e, out.f, norm, opts).norm;
        out.image_projection_norm = oblique_projection(out.e_image, out.f_image, norm, opts).norm;
        out.norm_on_f = operator_norm(a, norm, norm, out.f.basis(), opts);
        out.c_next = gelfand_number(a, k + 1, norm, opts).value;
    } else {
        out.projection_norm = 1.0;
        out.image_projection_norm = 1.0;
    }
    out.r = subspace_determinant(a, e, norm) / volume_growth(a, k, norm, opts).value;
    out.empirical_d = std::max(out.projection_norm, out.image_projection_norm);
    if (out.c_next > 0.0) out.empirical_d = std::max(out.empirical_d, out.norm_on_f / out.c_next);
    out.paper_form_d = std::pow(std::min(out.r, 1.0), -(std::pow(2.0, k) - 1.0));
    return out;
}

BoundCheck det_lipschitz_matrices(const Matrix& b1, const Matrix& b2) {
    if (b1.rows() != b1.cols() || b1.rows() != b2.rows() || b1.cols() != b2.cols())
        throw Error(ErrorCode::dimension_mismatch, "det_lipschitz_matrices");
    const int k = static_cast<int>(b1.rows());
    if (collapses(b1) || collapses(b2)) throw Error(ErrorCode::bound_not_applicable, "matrices must be invertible");
    const double m = std::min(min_singular_value(b1), min_singular_value(b2));
    const double delta = spectral_norm(b1 - b2);
    if (!(delta < m)) throw Error(ErrorCode::bound_not_applicable, "||B1 - B2|| >= m");
    BoundCheck out;
    out.lhs = std::abs(log_volume(b2) - log_volume(b1));
    out.rhs = k * delta / (m - delta);
    out.pass = out.lhs <= out.rhs * (1 + 1e-12) + 1e-15;
    return out;
}

BoundCheck det_lipschitz_grassmann(const Matrix& a, const Subspace& e1, const Subspace& e2) {
    if (e1.dim() != e2.dim() || e1.ambient_dim() != a.cols() || a.rows() != a.cols())
        throw Error(ErrorCode::dimension_mismatch, "det_lipschitz_grassmann");
    if (collapses(a)) throw Error(ErrorCode::bound_not_applicable, "A must be invertible");
    const int k = e1.dim();
    const Vector s = singular_values(a);
    const double kappa = s(0) / s(s.size() - 1);
    const double dh = spectral_norm(e1.projector() - e2.projector());
    if (dh > 1.0 / (4.0 * kappa * kappa)) throw Error(ErrorCode::bound_not_applicable, "d_H exceeds (2 kappa)^-2");
    BoundCheck out;
    out.lhs = std::abs(log_volume(a * e1.basis()) - log_volume(a * e2.basis()));
    out.rhs = 36.0 * k * kappa * kappa * dh;
    out.pass = out.lhs <= out.rhs * (1 + 1e-12) + 1e-15;
    return out;
}

DetRegularity det_reg_banach_check(const Matrix& a1, const Matrix& a2, const Subspace& e1,
                                   const Subspace& e2, const Norm& norm, const SearchOptions& opts) {
    if (e1.dim() != e2.dim()) throw Error(ErrorCode::dimension_mismatch, "det_reg_banach_check");
    const double det1 = subspace_determinant(a1, e1, norm);
    const double det2 = subspace_determinant(a2, e2, norm);
    if (det1 == 0.0 || det2 == 0.0) throw Error(ErrorCode::not_injective, "restriction is singular");
    const double num = std::abs(std::log(det1) - std::log(det2));
    const double da = operator_norm(a1 - a2, norm, opts);
    const double dh = hausdorff(e1, e2, norm, opts);
    DetRegularity out;
    const double denom = da + dh;
    out.quotient = denom == 0.0 ? 0.0 : num / denom;
    if (norm.is_euclidean() && denom > 0.0) {
        const int k = e1.dim();
        const Vector s = singular_values(a1);
        const double kappa = s(0) / s(s.size() - 1);
        const double delta = spectral_norm(a1 - a2);
        const double m = std::min(min_singular_value(a1 * e2.basis()), min_singular_value(a2 * e2.basis()));
        const double dh2 = spectral_norm(e1.projector() - e2.projector());
        if (dh2 <= 1.0 / (4.0 * kappa * kappa) && delta < m) {
            out.has_euclidean_bound = true;
            out.euclidean_bound = (36.0 * k * kappa * kappa * dh2 + k * delta / (m - delta)) / denom;
        }
    }
    return out;
}

}  // namespace domsplit
