#include "domsplit/subspace.hpp"

#include <sstream>

#include "domsplit/error.hpp"

namespace domsplit {

Subspace Subspace::span(const Matrix& vectors) {
    Matrix q = orthonormal_basis(vectors);
    if (q.cols() != vectors.cols())
        throw Error(ErrorCode::rank_deficient, "spanning vectors are linearly dependent");
    return Subspace(std::move(q));
}

Subspace Subspace::span_of(const Matrix& vectors, double rel_tol) {
    return Subspace(orthonormal_basis(vectors, rel_tol));
}

Subspace Subspace::from_orthonormal(const Matrix& basis) { return Subspace(basis); }

Subspace Subspace::whole(int d) { return Subspace(Matrix::Identity(d, d)); }

Subspace Subspace::zero(int d) { return Subspace(Matrix(d, 0)); }

Subspace Subspace::coordinate(int d, std::initializer_list<int> axes) {
    Matrix b = Matrix::Zero(d, static_cast<Eigen::Index>(axes.size()));
    int j = 0;
    for (int a : axes) {
        if (a < 0 || a >= d) throw Error(ErrorCode::dimension_mismatch, "coordinate axis out of range");
        b(a, j++) = 1.0;
    }
    return span(b);
}

Subspace Subspace::complement() const { return Subspace(complement_basis(basis_)); }

Subspace Subspace::image(const Matrix& a) const {
    if (a.cols() != ambient_dim()) throw Error(ErrorCode::dimension_mismatch, "image");
    if (dim() == 0) return zero(static_cast<int>(a.rows()));
    Matrix q = orthonormal_basis(a * basis_);
    if (q.cols() != dim()) throw Error(ErrorCode::not_injective, "map collapses the subspace");
    return Subspace(std::move(q));
}

Subspace Subspace::preimage(const Matrix& a) const {
    if (a.rows() != ambient_dim()) throw Error(ErrorCode::dimension_mismatch, "preimage");
    // v in preimage iff (I - P) A v = 0
    Matrix c = complement_basis(basis_);
    if (c.cols() == 0) return whole(static_cast<int>(a.cols()));
    return Subspace(null_space(c.transpose() * a));
}

Subspace Subspace::intersect(const Subspace& other) const {
    if (other.ambient_dim() != ambient_dim()) throw Error(ErrorCode::dimension_mismatch, "intersect");
    if (dim() == 0 || other.dim() == 0) return zero(ambient_dim());
    Matrix stacked(ambient_dim(), dim() + other.dim());
    stacked << basis_, -other.basis_;
    Matrix k = null_space(stacked, 1e-10);
    if (k.cols() == 0) return zero(ambient_dim());
    return Subspace(orthonormal_basis(basis_ * k.topRows(dim())));
}

Subspace Subspace::sum(const Subspace& other) const {
    if (other.ambient_dim() != ambient_dim()) throw Error(ErrorCode::dimension_mismatch, "sum");
    Matrix stacked(ambient_dim(), dim() + other.dim());
    stacked << basis_, other.basis_;
    return Subspace(orthonormal_basis(stacked, 1e-10));
}

bool Subspace::contains(const Vector& v, double tol) const {
    const double n = v.norm();
    if (n == 0.0) return true;
    return (v - basis_ * (basis_.transpose() * v)).norm() <= tol * n;
}

std::string Subspace::to_string() const {
    std::ostringstream os;
    os << "span{";
    for (int j = 0; j < dim(); ++j) {
        os << (j ? ", " : "") << "(";
        for (int i = 0; i < ambient_dim(); ++i) os << (i ? "," : "") << basis_(i, j);
        os << ")";
    }
    os << "}";
    return os.str();
}

Vector canonical_sign(const Vector& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::abs(v(i)) > 1e-12 * v.cwiseAbs().maxCoeff()) return v(i) < 0 ? Vector(-v) : v;
    }
    return v;
}

}  // namespace domsplit
