#include "domsplit/snumbers.hpp"

#include <cmath>

#include "domsplit/error.hpp"
#include "domsplit/geometry.hpp"

namespace domsplit {

void check_dim_cap(int d, const Norm& norm) {
    const int cap = norm.is_euclidean() ? euclidean_dim_cap : general_dim_cap;
    if (d > cap)
        throw Error(ErrorCode::cap_exceeded,
                    "dimension " + std::to_string(d) + " exceeds cap " + std::to_string(cap));
}

namespace {

void check_square(const Matrix& a, int q, const Norm& norm) {
    if (a.rows() != a.cols() || a.cols() != norm.dim())
        throw Error(ErrorCode::dimension_mismatch, "s-numbers need a square matrix matching the norm");
    if (q < 1 || q > a.cols()) throw Error(ErrorCode::dimension_mismatch, "s-number index out of range");
    check_dim_cap(static_cast<int>(a.cols()), norm);
}

struct Extremum {
    double value;
    Vector point;
};

Extremum min_norm_point(const Matrix& a, const Subspace& e, const Norm& norm, const SearchOptions& opts) {
    if (e.dim() == 0) throw Error(ErrorCode::zero_subspace, "min_norm on zero subspace");
    const Matrix m = a * e.basis();
    if (norm.is_euclidean()) {
        Svd svd = jacobi_svd(m);
        return {svd.s(svd.s.size() - 1), canonical_sign(e.basis() * svd.v.col(svd.v.cols() - 1))};
    }
    Vector s = singular_values(m);
    if (s(0) == 0.0 || s(s.size() - 1) < 1e-12 * s(0)) {
        Matrix k = null_space(m);
        return {0.0, canonical_sign(e.basis() * k.col(0))};
    }
    if (opts.strategy == Strategy::automatic && polytope_supported(norm)) {
        // m(A|E) = 1 / sup{|x| : A x = y, y unit in AE}
        const Matrix image = orthonormal_basis(m);
        const Matrix pinv = m.completeOrthogonalDecomposition().pseudoInverse();
        auto pre = [&](const Vector& y) { return Vector(e.basis() * (pinv * y)); };
        SphereOptimum top = convex_sup(image, norm, [&](const Vector& y) { return norm(pre(y)); }, opts);
        Vector x = pre(top.point);
        x /= norm(x);
        return {1.0 / top.value, canonical_sign(x)};
    }
    SphereOptimum o = sphere_search(e.basis(), norm, [&](const Vector& x) { return norm(a * x); },
                                    Sense::minimize, opts);
    return {o.value, o.point};
}

Matrix line(const Vector& v) { return orthonormal_basis(v); }

}  // namespace

double min_norm(const Matrix& a, const Subspace& e, const Norm& norm, const SearchOptions& opts) {
    if (a.cols() != norm.dim() || e.ambient_dim() != norm.dim())
        throw Error(ErrorCode::dimension_mismatch, "min_norm");
    return min_norm_point(a, e, norm, opts).value;
}

SNumber gelfand_number(const Matrix& a, int q, const Norm& norm, const SearchOptions& opts) {
    check_square(a, q, norm);
    const int d = static_cast<int>(a.cols());
    SNumber out;
    out.seed = opts.seed;
    if (norm.is_euclidean()) {
        Svd svd = jacobi_svd(a);
        out.value = svd.s(q - 1);
        out.certificate = svd.v.rightCols(d - q + 1);
        out.exact = true;
        return out;
    }
    const bool polytope = opts.strategy == Strategy::automatic && polytope_supported(norm);
    if (q == 1) {
        out.value = operator_norm(a, norm, opts);
        out.certificate = Matrix::Identity(d, d);
        out.exact = polytope;
    } else if (q == d) {
        Extremum e = min_norm_point(a, Subspace::whole(d), norm, opts);
        out.value = e.value;
        out.certificate = line(e.point);
        out.exact = polytope;
    } else {
        GrassmannOptimum g = grassmann_search(
            Matrix::Identity(d, d), d - q + 1,
            [&](const Matrix& f) { return operator_norm(a, norm, norm, f, opts); }, Sense::minimize, opts);
        out.value = g.value;
        out.certificate = g.basis;
    }
    out.tolerance = out.exact ? 1e-12 : opts.tolerance;
    return out;
}

SNumber kolmogorov_number(const Matrix& a, int q, const Norm& norm, const SearchOptions& opts) {
    check_square(a, q, norm);
    const int d = static_cast<int>(a.cols());
    SNumber out;
    out.seed = opts.seed;
    if (norm.is_euclidean()) {
        Svd svd = jacobi_svd(a);
        out.value = svd.s(q - 1);
        out.certificate = svd.v.leftCols(q);
        out.exact = true;
        return out;
    }
    const bool polytope = opts.strategy == Strategy::automatic && polytope_supported(norm);
    if (q == 1) {
        SphereOptimum o = convex_sup(Matrix::Identity(d, d), norm, [&](const Vector& x) { return norm(a * x); },
                                     opts);
        out.value = o.value;
        out.certificate = line(o.point);
        out.exact = polytope;
    } else if (q == d) {
        out.value = min_norm(a, Subspace::whole(d), norm, opts);
        out.certificate = Matrix::Identity(d, d);
        out.exact = polytope;
    } else {
        GrassmannOptimum g = grassmann_search(
            Matrix::Identity(d, d), q,
            [&](const Matrix& w) { return min_norm(a, Subspace::from_orthonormal(w), norm, opts); },
            Sense::maximize, opts);
        out.value = g.value;
        out.certificate = g.basis;
    }
    out.tolerance = out.exact ? 1e-12 : opts.tolerance;
    return out;
}

SNumber volume_growth(const Matrix& a, int q, const Norm& norm, const Subspace& domain,
                      const SearchOptions& opts) {
    if (a.rows() != a.cols() || a.cols() != norm.dim() || domain.ambient_dim() != norm.dim())
        throw Error(ErrorCode::dimension_mismatch, "volume_growth");
    if (q < 0 || q > domain.dim()) throw Error(ErrorCode::dimension_mismatch, "volume index out of range");
    check_dim_cap(static_cast<int>(a.cols()), norm);
    SNumber out;
    out.seed = opts.seed;
    if (q == 0) {
        out.value = 1.0;
        out.certificate = Matrix(norm.dim(), 0);
        out.exact = true;
        return out;
    }
    if (norm.is_euclidean()) {
        Svd svd = jacobi_svd(a * domain.basis());
        out.value = svd.s.head(q).prod();
        out.certificate = domain.basis() * svd.v.leftCols(q);
        out.exact = true;
        return out;
    }
    const bool polytope = opts.strategy == Strategy::automatic && polytope_supported(norm);
    if (q == 1) {
        SphereOptimum o = convex_sup(domain.basis(), norm, [&](const Vector& x) { return norm(a * x); }, opts);
        out.value = o.value;
        out.certificate = line(o.point);
        out.exact = polytope;
    } else if (q == norm.dim()) {
        out.value = std::abs(a.determinant());
        out.certificate = domain.basis();
        out.exact = true;
    } else {
        GrassmannOptimum g = grassmann_search(
            domain.basis(), q,
            [&](const Matrix& w) { return subspace_determinant(a, Subspace::from_orthonormal(w), norm); },
            Sense::maximize, opts);
        out.value = g.value;
        out.certificate = g.basis;
    }
    out.tolerance = out.exact ? 1e-12 : opts.tolerance;
    return out;
}

SNumber volume_growth(const Matrix& a, int q, const Norm& norm, const SearchOptions& opts) {
    return volume_growth(a, q, norm, Subspace::whole(norm.dim()), opts);
}

SNumberProfile snumber_profile(const Matrix& a, const Norm& norm, const SearchOptions& opts) {
    SNumberProfile p;
    for (int q = 1; q <= a.cols(); ++q) {
        p.gelfand.push_back(gelfand_number(a, q, norm, opts).value);
        p.kolmogorov.push_back(kolmogorov_number(a, q, norm, opts).value);
        p.volume.push_back(volume_growth(a, q, norm, opts).value);
    }
    return p;
}

GelfandVolumeRelation gelfand_volume_relation_check(const Matrix& a, int q, const Norm& norm,
                                                    const SearchOptions& opts) {
    const double vq = volume_growth(a, q, norm, opts).value;
    const double vq1 = volume_growth(a, q - 1, norm, opts).value;
    const double cq = gelfand_number(a, q, norm, opts).value;
    const double xq = kolmogorov_number(a, q, norm, opts).value;
    if (vq1 == 0.0 || cq == 0.0 || xq == 0.0) throw Error(ErrorCode::rank_deficient, "rank-deficient matrix");
    return {vq / (cq * vq1), cq / xq};
}

}  // namespace domsplit
