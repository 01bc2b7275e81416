#include "domsplit/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace domsplit {

Matrix orthonormal_basis(const Matrix& m, double rel_tol) {
    if (m.cols() == 0 || m.rows() == 0) return Matrix(m.rows(), 0);
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU);
    const Vector& s = svd.singularValues();
    if (s.size() == 0 || s(0) == 0.0) return Matrix(m.rows(), 0);
    int rank = 0;
    while (rank < s.size() && s(rank) > rel_tol * s(0)) ++rank;
    return svd.matrixU().leftCols(rank);
}

Matrix null_space(const Matrix& m, double rel_tol) {
    const auto n = m.cols();
    if (m.rows() == 0) return Matrix::Identity(n, n);
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
    const Vector& s = svd.singularValues();
    int rank = 0;
    if (s.size() > 0 && s(0) > 0.0) {
        while (rank < s.size() && s(rank) > rel_tol * s(0)) ++rank;
    }
    return svd.matrixV().rightCols(n - rank);
}

Matrix complement_basis(const Matrix& q) {
    if (q.cols() == 0) return Matrix::Identity(q.rows(), q.rows());
    return null_space(q.transpose());
}

namespace {

// Hestenes rotations until the columns of x are mutually orthogonal; v collects them.
void hestenes(Matrix& x, Matrix& v) {
    const auto p = x.cols();
    v = Matrix::Identity(p, p);
    constexpr double eps = 1e-15;
    for (int sweep = 0; sweep < 80; ++sweep) {
        bool rotated = false;
        for (Eigen::Index i = 0; i < p; ++i) {
            for (Eigen::Index j = i + 1; j < p; ++j) {
                // cosines and norm ratios instead of squared norms, so graded columns do not underflow
                const double ni = x.col(i).stableNorm();
                const double nj = x.col(j).stableNorm();
                if (ni == 0.0 || nj == 0.0) continue;
                const double cosine = (x.col(i) / ni).dot(x.col(j) / nj);
                if (std::abs(cosine) <= eps) continue;
                const double zeta = (nj / ni - ni / nj) / (2.0 * cosine);
                const double t = (zeta >= 0 ? 1.0 : -1.0) / (std::abs(zeta) + std::hypot(1.0, zeta));
                if (t == 0.0) continue;
                rotated = true;
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                Vector xi = x.col(i);
                x.col(i) = c * xi - s * x.col(j);
                x.col(j) = s * xi + c * x.col(j);
                Vector vi = v.col(i);
                v.col(i) = c * vi - s * v.col(j);
                v.col(j) = s * vi + c * v.col(j);
            }
        }
        if (!rotated) break;
    }
}

// SVD of a square matrix r through Hestenes on r^T.
Svd square_svd(const Matrix& r) {
    const auto n = r.rows();
    Matrix x = r.transpose();
    Matrix w;
    hestenes(x, w);
    Vector sigma(n);
    for (Eigen::Index i = 0; i < n; ++i) sigma(i) = x.col(i).stableNorm();
    std::vector<Eigen::Index> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return sigma(a) > sigma(b); });

    Svd out;
    out.s.resize(n);
    out.u.resize(n, n);
    Matrix right(n, 0);
    std::vector<Eigen::Index> missing;
    for (Eigen::Index k = 0; k < n; ++k) {
        const auto i = order[k];
        out.s(k) = sigma(i);
        out.u.col(k) = w.col(i);
    }
    out.v = Matrix::Zero(n, n);
    int filled = 0;
    for (Eigen::Index k = 0; k < n; ++k) {
        const auto i = order[k];
        if (sigma(i) > 0.0) {
            out.v.col(k) = x.col(i) / sigma(i);
            ++filled;
        }
    }
    if (filled < n) {
        Matrix rest = complement_basis(orthonormal_basis(out.v.leftCols(filled)));
        for (Eigen::Index k = filled; k < n; ++k) out.v.col(k) = rest.col(k - filled);
    }
    return out;
}

}  // namespace

Svd jacobi_svd(const Matrix& a) {
    const auto m = a.rows();
    const auto n = a.cols();
    if (m < n) {
        Svd t = jacobi_svd(a.transpose());
        std::swap(t.u, t.v);
        return t;
    }
    if (m == n) return square_svd(a);
    Eigen::HouseholderQR<Matrix> qr(a);
    Matrix r = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
    Matrix q = qr.householderQ() * Matrix::Identity(m, n);
    Svd inner = square_svd(r);
    inner.u = q * inner.u;
    return inner;
}

Vector singular_values(const Matrix& a) {
    if (a.size() == 0) return Vector(0);
    return jacobi_svd(a).s;
}

double spectral_norm(const Matrix& a) {
    if (a.size() == 0) return 0.0;
    return singular_values(a)(0);
}

double min_singular_value(const Matrix& a) {
    if (a.size() == 0) return 0.0;
    Vector s = singular_values(a);
    return s(s.size() - 1);
}

double unit_ball_volume(int q) {
    return std::pow(M_PI, q / 2.0) / std::tgamma(q / 2.0 + 1.0);
}

}  // namespace domsplit
