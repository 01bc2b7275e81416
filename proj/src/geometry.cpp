#include "domsplit/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "domsplit/error.hpp"
#include "domsplit/kernels.hpp"
#include "domsplit/rng.hpp"

namespace domsplit {

namespace {

void check_dims(const Subspace& s, const Norm& norm, const char* what) {
    if (s.ambient_dim() != norm.dim()) throw Error(ErrorCode::dimension_mismatch, what);
}

bool exact_polytope(const Norm& norm, const SearchOptions& opts) {
    return opts.strategy == Strategy::automatic && polytope_supported(norm);
}

// Direct search for min_c |x - B c|; convex, so one start suffices.
double convex_distance_search(const Vector& x, const Matrix& b, const Norm& norm,
                              const SearchOptions& opts) {
    const int m = static_cast<int>(b.cols());
    Vector c = b.transpose() * x;
    double val = norm(x - b * c);
    double step = std::max(norm(x), 1e-300);
    const double floor = step * 1e-13;
    Rng rng(opts.seed ^ 0xd157ULL);
    Matrix dirs = Matrix::Identity(m, m);
    int stalls = 0;
    for (int it = 0; it < 4000 && step > floor; ++it) {
        bool moved = false;
        for (int j = 0; j < m; ++j) {
            for (double s : {1.0, -1.0}) {
                Vector trial = c + s * step * dirs.col(j);
                const double v = norm(x - b * trial);
                if (v < val) {
                    val = v;
                    c = trial;
                    moved = true;
                }
            }
        }
        if (moved) {
            step *= 1.5;
            stalls = 0;
        } else {
            // a fresh random frame escapes ridges of piecewise-linear norms
            if (m > 1 && stalls < 2) {
                Eigen::HouseholderQR<Matrix> qr(rng.normal_matrix(m, m));
                dirs = qr.householderQ();
                ++stalls;
                continue;
            }
            dirs = Matrix::Identity(m, m);
            stalls = 0;
            step *= 0.5;
        }
    }
    return val;
}

}  // namespace

double distance_to_subspace(const Vector& x, const Subspace& f, const Norm& norm,
                            const SearchOptions& opts) {
    check_dims(f, norm, "distance_to_subspace");
    if (f.dim() == 0) return norm(x);
    if (f.dim() == f.ambient_dim()) return 0.0;
    if (norm.is_euclidean()) return (x - f.basis() * (f.basis().transpose() * x)).norm();
    if (exact_polytope(norm, opts)) {
        // dual: sup of g.x over dual-unit g annihilating F
        double best = 0.0;
        for (const Vector& g : section_vertices(f.complement().basis(), norm.dual_norm()))
            best = std::max(best, g.dot(x));
        return best;
    }
    return convex_distance_search(x, f.basis(), norm, opts);
}

double gap(const Subspace& e, const Subspace& f, const Norm& norm, const SearchOptions& opts) {
    check_dims(e, norm, "gap");
    check_dims(f, norm, "gap");
    if (e.dim() == 0) throw Error(ErrorCode::zero_subspace, "gap from the zero subspace");
    if (norm.is_euclidean()) {
        Matrix r = e.basis() - f.basis() * (f.basis().transpose() * e.basis());
        return spectral_norm(r);
    }
    if (f.dim() == f.ambient_dim()) return 0.0;
    if (exact_polytope(norm, opts)) {
        const auto primal = section_vertices(e.basis(), norm);
        const auto dual = f.dim() == 0 ? std::vector<Vector>{} : section_vertices(f.complement().basis(), norm.dual_norm());
        double best = 0.0;
        if (f.dim() == 0) return 1.0;
        for (const Vector& x : primal)
            for (const Vector& g : dual) best = std::max(best, g.dot(x));
        return best;
    }
    return convex_sup(e.basis(), norm,
                      [&](const Vector& x) { return distance_to_subspace(x, f, norm, opts); }, opts)
        .value;
}

namespace {

// inf over unit y in F of |x - y|
double distance_to_sphere(const Vector& x, const Subspace& f, const Norm& norm,
                          const SearchOptions& opts) {
    if (f.dim() == 1) {
        Vector y = f.basis().col(0);
        y /= norm(y);
        return std::min(norm(x - y), norm(x + y));
    }
    return sphere_search(f.basis(), norm, [&](const Vector& y) { return norm(x - y); }, Sense::minimize,
                         opts)
        .value;
}

double one_sided_sphere_distance(const Subspace& e, const Subspace& f, const Norm& norm,
                                 const SearchOptions& opts) {
    auto fn = [&](const Vector& x) { return distance_to_sphere(x, f, norm, opts); };
    if (e.dim() == 1) {
        Vector x = e.basis().col(0);
        return fn(x / norm(x));
    }
    return sphere_search(e.basis(), norm, fn, Sense::maximize, opts).value;
}

}  // namespace

double hausdorff(const Subspace& e, const Subspace& f, const Norm& norm, const SearchOptions& opts) {
    check_dims(e, norm, "hausdorff");
    check_dims(f, norm, "hausdorff");
    if (norm.is_euclidean()) return spectral_norm(e.projector() - f.projector());
    if (e.dim() == 0 || f.dim() == 0) throw Error(ErrorCode::zero_subspace, "hausdorff with zero subspace");
    return std::max(one_sided_sphere_distance(e, f, norm, opts), one_sided_sphere_distance(f, e, norm, opts));
}

double gap_asymmetry_bound(double g, int q) {
    if (q <= 0 || !(g * q < 1.0)) throw Error(ErrorCode::bound_not_applicable, "gap must be below 1/q");
    return q * g / (1.0 - q * g);
}

Angle minimal_angle(const Subspace& e, const Subspace& f, const Norm& norm, const SearchOptions& opts) {
    check_dims(e, norm, "minimal_angle");
    check_dims(f, norm, "minimal_angle");
    if (e.dim() == 0) throw Error(ErrorCode::zero_subspace, "angle from the zero subspace");
    Angle out;
    if (f.dim() == 0) {
        out.sin_theta = 1.0;
    } else if (e.intersect(f).dim() > 0) {
        out.sin_theta = 0.0;
    } else if (norm.is_euclidean()) {
        Matrix r = e.basis() - f.basis() * (f.basis().transpose() * e.basis());
        out.sin_theta = min_singular_value(r);
    } else if (opts.strategy == Strategy::automatic && e.dim() + f.dim() == e.ambient_dim()) {
        out.sin_theta = 1.0 / oblique_projection(e, f, norm, opts).norm;
    } else {
        out.sin_theta = sphere_search(e.basis(), norm,
                                      [&](const Vector& x) { return distance_to_subspace(x, f, norm, opts); },
                                      Sense::minimize, opts)
                            .value;
    }
    out.sin_theta = std::clamp(out.sin_theta, 0.0, 1.0);
    out.theta = std::asin(out.sin_theta);
    return out;
}

Projection oblique_projection(const Subspace& e, const Subspace& f, const Norm& norm,
                              const SearchOptions& opts) {
    check_dims(e, norm, "oblique_projection");
    check_dims(f, norm, "oblique_projection");
    const int d = e.ambient_dim();
    if (e.dim() + f.dim() != d) throw Error(ErrorCode::not_complemented, "dimensions do not add up");
    Matrix m(d, d);
    m << e.basis(), f.basis();
    if (min_singular_value(m) < 1e-10) throw Error(ErrorCode::not_complemented, "subspaces intersect");
    Matrix keep = Matrix::Zero(d, d);
    keep.leftCols(e.dim()) = e.basis();
    Projection out;
    out.matrix = keep * m.inverse();
    out.norm = operator_norm(out.matrix, norm, opts);
    return out;
}

double operator_norm(const Matrix& a, const Norm& in, const Norm& out, const Matrix& domain,
                     const SearchOptions& opts) {
    if (a.cols() != in.dim() || a.rows() != out.dim() || domain.rows() != in.dim())
        throw Error(ErrorCode::dimension_mismatch, "operator_norm");
    if (domain.cols() == 0) return 0.0;
    if (in.is_euclidean() && out.is_euclidean()) return spectral_norm(a * domain);
    auto f = [&](const Vector& x) { return out(a * x); };
    if (exact_polytope(in, opts)) return convex_sup(domain, in, f, opts).value;
    if (opts.strategy == Strategy::automatic && polytope_supported(out) && domain.cols() == in.dim()) {
        const Norm in_dual = in.dual_norm();
        double best = 0.0;
        for (const Vector& g : section_vertices(Matrix::Identity(out.dim(), out.dim()), out.dual_norm()))
            best = std::max(best, in_dual(a.transpose() * g));
        return best;
    }
    return sphere_search(domain, in, f, Sense::maximize, opts).value;
}

double operator_norm(const Matrix& a, const Norm& in, const Norm& out, const SearchOptions& opts) {
    return operator_norm(a, in, out, Matrix::Identity(in.dim(), in.dim()), opts);
}

double operator_norm(const Matrix& a, const Norm& norm, const SearchOptions& opts) {
    return operator_norm(a, norm, norm, opts);
}

namespace {

double polygon_area(const Matrix& basis, const Norm& norm) {
    std::vector<Vector> pts;
    for (const Vector& v : section_vertices(basis, norm)) pts.push_back(basis.transpose() * v);
    std::sort(pts.begin(), pts.end(), [](const Vector& a, const Vector& b) {
        return std::atan2(a(1), a(0)) < std::atan2(b(1), b(0));
    });
    double area = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const Vector& p = pts[i];
        const Vector& q = pts[(i + 1) % pts.size()];
        area += p(0) * q(1) - p(1) * q(0);
    }
    return 0.5 * std::abs(area);
}

double polar_area(const Matrix& basis, const Norm& norm) {
    constexpr int n = 4096;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        const double t = 2.0 * M_PI * i / n;
        Vector u(2);
        u << std::cos(t), std::sin(t);
        const double r = 1.0 / norm(basis * u);
        acc += r * r;
    }
    return 0.5 * acc * (2.0 * M_PI / n);
}

double bounding_radius(const Norm& norm) {
    const double p = norm.p();
    const double d = norm.dim();
    const double factor = p <= 2.0 ? 1.0 : (p == infinity ? std::sqrt(d) : std::pow(d, 0.5 - 1.0 / p));
    return factor / norm.weights().minCoeff();
}

double monte_carlo_volume(const Matrix& basis, const Norm& norm, std::uint64_t samples) {
    const int q = static_cast<int>(basis.cols());
    const int d = static_cast<int>(basis.rows());
    const double r = bounding_radius(norm);
    constexpr std::uint64_t chunk = 8192;
    std::uint64_t inside = 0;
    Matrix coeff(chunk, q);
    Matrix pts(chunk, d);
    for (std::uint64_t start = 0; start < samples; start += chunk) {
        const std::uint64_t n = std::min(chunk, samples - start);
        for (int j = 0; j < q; ++j)
            for (std::uint64_t i = 0; i < n; ++i) coeff(i, j) = r * (2.0 * halton(start + i + 1, j) - 1.0);
        pts.topRows(n).noalias() = coeff.topRows(n) * basis.transpose();
        // columns of the top block are not contiguous when n < chunk; copy in that case
        if (n == chunk) {
            inside += kernels::count_within(pts.data(), n, d, norm.weights().data(), norm.p(), 1.0);
        } else {
            Matrix tail = pts.topRows(n);
            inside += kernels::count_within(tail.data(), n, d, norm.weights().data(), norm.p(), 1.0);
        }
    }
    return std::pow(2.0 * r, q) * static_cast<double>(inside) / static_cast<double>(samples);
}

}  // namespace

BallVolume ball_volume(const Matrix& basis, const Norm& norm, VolumeMethod method, std::uint64_t samples) {
    if (basis.rows() != norm.dim()) throw Error(ErrorCode::dimension_mismatch, "ball_volume");
    const int q = static_cast<int>(basis.cols());
    if (q == 0) return {1.0, 0.0, "exact"};
    if (method == VolumeMethod::monte_carlo) return {monte_carlo_volume(basis, norm, samples), 1e-3, "monte-carlo"};
    if (norm.is_euclidean()) return {unit_ball_volume(q), 0.0, "exact"};
    if (q == 1) return {2.0 / norm(basis.col(0)), 0.0, "exact"};
    if (q == 2) {
        if (polytope_supported(norm)) return {polygon_area(basis, norm), 1e-12, "polygon"};
        return {polar_area(basis, norm), 1e-8, "polar-quadrature"};
    }
    return {monte_carlo_volume(basis, norm, samples), 1e-3, "monte-carlo"};
}

double subspace_determinant(const Matrix& a, const Subspace& e, const Norm& in, const Norm& out,
                            VolumeMethod method) {
    if (a.cols() != in.dim() || a.rows() != out.dim() || e.ambient_dim() != in.dim())
        throw Error(ErrorCode::dimension_mismatch, "subspace_determinant");
    if (e.dim() == 0) return 1.0;
    Matrix m = a * e.basis();
    Vector s = singular_values(m);
    if (s(0) == 0.0 || s(s.size() - 1) < 1e-12 * s(0)) return 0.0;
    const double coord_det = s.prod();
    if (in.is_euclidean() && out.is_euclidean()) return coord_det;
    Matrix image = orthonormal_basis(m);
    return coord_det * ball_volume(e.basis(), in, method).value / ball_volume(image, out, method).value;
}

double subspace_determinant(const Matrix& a, const Subspace& e, const Norm& norm, VolumeMethod method) {
    return subspace_determinant(a, e, norm, norm, method);
}

DetSplit det_split_bound(const Matrix& a, const Subspace& g, const Subspace& h, const Norm& norm,
                         const SearchOptions& opts) {
    Subspace e = g.sum(h);
    if (e.dim() != g.dim() + h.dim()) throw Error(ErrorCode::not_complemented, "G and H intersect");
    DetSplit out;
    const double dg = subspace_determinant(a, g, norm);
    const double dh = subspace_determinant(a, h, norm);
    if (dg == 0.0 || dh == 0.0) throw Error(ErrorCode::not_injective, "A collapses G or H");
    out.ratio = subspace_determinant(a, e, norm) / (dg * dh);
    if (norm.is_euclidean()) {
        const int l = g.dim();
        out.has_bounds = true;
        out.lower = std::pow(minimal_angle(g.image(a), h.image(a), norm, opts).sin_theta, l);
        out.upper = std::pow(minimal_angle(g, h, norm, opts).sin_theta, -l);
        out.within = out.lower <= out.ratio * (1 + 1e-9) && out.ratio <= out.upper * (1 + 1e-9);
    }
    return out;
}

}  // namespace domsplit
