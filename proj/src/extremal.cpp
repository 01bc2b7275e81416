#include "domsplit/extremal.hpp"

#include <algorithm>
#include <cmath>

#include "domsplit/error.hpp"
#include "domsplit/rng.hpp"
#include "domsplit/subspace.hpp"

namespace domsplit {

namespace {

bool better(double a, double b, Sense sense) {
    return sense == Sense::maximize ? a > b : a < b;
}

bool lex_less(const Vector& a, const Vector& b) {
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (std::abs(a(i) - b(i)) > 1e-12) return a(i) < b(i);
    }
    return false;
}

void for_each_subset(int n, int k, const std::function<void(const std::vector<int>&)>& fn) {
    std::vector<int> idx(k);
    for (int i = 0; i < k; ++i) idx[i] = i;
    if (k > n) return;
    while (true) {
        fn(idx);
        int i = k - 1;
        while (i >= 0 && idx[i] == n - k + i) --i;
        if (i < 0) return;
        ++idx[i];
        for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

Matrix thin_q(const Matrix& m) {
    Eigen::HouseholderQR<Matrix> qr(m);
    return qr.householderQ() * Matrix::Identity(m.rows(), m.cols());
}

}  // namespace

SphereOptimum sphere_search(const Matrix& basis, const Norm& norm,
                            const std::function<double(const Vector&)>& f, Sense sense,
                            const SearchOptions& opts) {
    const int m = static_cast<int>(basis.cols());
    if (m == 0) throw Error(ErrorCode::zero_subspace, "sphere search on zero subspace");
    auto point_of = [&](const Vector& c) {
        Vector x = basis * c;
        return Vector(x / norm(x));
    };
    auto value_of = [&](const Vector& c) { return f(point_of(c)); };

    if (m == 1) {
        Vector c = Vector::Ones(1);
        const double a = value_of(c);
        const double b = value_of(-c);
        SphereOptimum out;
        if (better(b, a, sense)) {
            out.value = b;
            out.point = point_of(-c);
        } else {
            out.value = a;
            out.point = canonical_sign(point_of(c));
        }
        return out;
    }

    Rng rng(opts.seed);
    const double step_floor = std::max(opts.tolerance * 1e-4, 1e-12);
    SphereOptimum best;
    bool have = false;
    for (int s = 0; s < opts.starts; ++s) {
        Vector c;
        if (s < m) {
            c = Vector::Unit(m, s);
        } else if (s < 2 * m) {
            c = Vector::Ones(m);
            c(s - m) = -1.0;
            c.normalize();
        } else {
            c = rng.normal_vector(m).normalized();
        }
        double val = value_of(c);
        double step = 0.5;
        for (int it = 0; it < opts.max_iterations && step > step_floor; ++it) {
            Matrix tangent = complement_basis(c);
            Vector best_c = c;
            double best_v = val;
            bool moved = false;
            for (Eigen::Index j = 0; j < tangent.cols(); ++j) {
                for (double sign : {1.0, -1.0}) {
                    Vector trial = (c + sign * step * tangent.col(j)).normalized();
                    const double v = value_of(trial);
                    if (better(v, best_v, sense)) {
                        best_v = v;
                        best_c = trial;
                        moved = true;
                    }
                }
            }
            if (moved) {
                c = best_c;
                val = best_v;
                step = std::min(0.5, step * 1.5);
            } else {
                step *= 0.5;
            }
        }
        if (!have || better(val, best.value, sense)) {
            best.value = val;
            best.point = point_of(c);
            have = true;
        }
    }
    return best;
}

GrassmannOptimum grassmann_search(const Matrix& ambient, int m,
                                  const std::function<double(const Matrix&)>& f, Sense sense,
                                  const SearchOptions& opts) {
    const int n = static_cast<int>(ambient.cols());
    if (m < 0 || m > n) throw Error(ErrorCode::dimension_mismatch, "grassmann dimension");
    if (m == 0 || m == n) {
        Matrix b = m == 0 ? Matrix(ambient.rows(), 0) : ambient;
        return {f(b), b};
    }
    Rng rng(opts.seed);
    std::vector<Matrix> starts;
    for_each_subset(n, m, [&](const std::vector<int>& idx) {
        if (static_cast<int>(starts.size()) >= opts.starts / 2) return;
        Matrix y = Matrix::Zero(n, m);
        for (int j = 0; j < m; ++j) y(idx[j], j) = 1.0;
        starts.push_back(y);
    });
    while (static_cast<int>(starts.size()) < opts.starts) starts.push_back(thin_q(rng.normal_matrix(n, m)));

    const double step_floor = std::max(opts.tolerance * 1e-4, 1e-12);
    GrassmannOptimum best;
    bool have = false;
    for (const Matrix& y0 : starts) {
        Matrix y = y0;
        double val = f(ambient * y);
        double step = 0.5;
        for (int it = 0; it < opts.max_iterations && step > step_floor; ++it) {
            Matrix normal = complement_basis(y);
            Matrix best_y = y;
            double best_v = val;
            bool moved = false;
            for (Eigen::Index i = 0; i < normal.cols(); ++i) {
                for (int j = 0; j < m; ++j) {
                    for (double sign : {1.0, -1.0}) {
                        Matrix trial = y;
                        trial.col(j) += sign * step * normal.col(i);
                        trial = thin_q(trial);
                        const double v = f(ambient * trial);
                        if (better(v, best_v, sense)) {
                            best_v = v;
                            best_y = trial;
                            moved = true;
                        }
                    }
                }
            }
            if (moved) {
                y = best_y;
                val = best_v;
                step = std::min(0.5, step * 1.5);
            } else {
                step *= 0.5;
            }
        }
        if (!have || better(val, best.value, sense)) {
            best.value = val;
            best.basis = ambient * y;
            have = true;
        }
    }
    return best;
}

bool polytope_supported(const Norm& norm) { return norm.is_polyhedral() && norm.dim() <= 8; }

std::vector<Vector> section_vertices(const Matrix& basis, const Norm& norm) {
    if (!polytope_supported(norm)) throw Error(ErrorCode::cap_exceeded, "face enumeration needs l1/linf, d <= 8");
    const int d = static_cast<int>(basis.rows());
    const int m = static_cast<int>(basis.cols());
    std::vector<Vector> out;
    if (m == 0) return out;
    const Matrix bw = norm.weights().asDiagonal() * basis;
    auto push = [&](const Vector& x) {
        for (const Vector& v : out)
            if ((v - x).cwiseAbs().maxCoeff() < 1e-10) return;
        out.push_back(x);
    };
    if (norm.p() == infinity) {
        for_each_subset(d, m, [&](const std::vector<int>& rows) {
            Matrix sub(m, m);
            for (int i = 0; i < m; ++i) sub.row(i) = bw.row(rows[i]);
            Eigen::FullPivLU<Matrix> lu(sub);
            if (lu.rank() < m) return;
            for (int mask = 0; mask < (1 << m); ++mask) {
                Vector s(m);
                for (int i = 0; i < m; ++i) s(i) = (mask >> i) & 1 ? -1.0 : 1.0;
                Vector c = lu.solve(s);
                if ((bw * c).cwiseAbs().maxCoeff() <= 1.0 + 1e-9) push(basis * c);
            }
        });
    } else {
        for_each_subset(d, m - 1, [&](const std::vector<int>& rows) {
            Matrix sub(m - 1, m);
            for (int i = 0; i < m - 1; ++i) sub.row(i) = bw.row(rows[i]);
            Matrix k = null_space(sub, 1e-12);
            if (k.cols() != 1) return;
            Vector c = k.col(0);
            c /= (bw * c).cwiseAbs().sum();
            push(basis * c);
            push(-(basis * c));
        });
    }
    return out;
}

SphereOptimum convex_sup(const Matrix& basis, const Norm& norm,
                         const std::function<double(const Vector&)>& f, const SearchOptions& opts) {
    if (basis.cols() == 0) throw Error(ErrorCode::zero_subspace, "sup over zero subspace");
    if (opts.strategy == Strategy::automatic && polytope_supported(norm)) {
        SphereOptimum best;
        bool have = false;
        for (const Vector& v : section_vertices(basis, norm)) {
            const double val = f(v);
            const Vector cv = canonical_sign(v);
            const double scale = std::max(1.0, std::abs(val));
            if (!have || val > best.value + 1e-12 * scale ||
                (std::abs(val - best.value) <= 1e-12 * scale && lex_less(cv, best.point))) {
                if (!have || val > best.value + 1e-12 * scale) best.value = val;
                best.point = cv;
                have = true;
            }
        }
        return best;
    }
    return sphere_search(basis, norm, f, Sense::maximize, opts);
}

}  // namespace domsplit
