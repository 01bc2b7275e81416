#pragma once

#include <string>

#include "domsplit/linalg.hpp"

namespace domsplit {

// A linear subspace of R^d, stored as a Euclidean-orthonormal basis regardless of the
// norm it is later measured in.
class Subspace {
public:
    Subspace() = default;
    // Span of the columns; throws rank_deficient if they are dependent.
    static Subspace span(const Matrix& vectors);
    // Span of the columns, dropping dependent directions.
    static Subspace span_of(const Matrix& vectors, double rel_tol = 1e-12);
    static Subspace from_orthonormal(const Matrix& basis);
    static Subspace whole(int d);
    static Subspace zero(int d);
    static Subspace coordinate(int d, std::initializer_list<int> axes);

    int dim() const { return static_cast<int>(basis_.cols()); }
    int ambient_dim() const { return static_cast<int>(basis_.rows()); }
    const Matrix& basis() const { return basis_; }
    Matrix projector() const { return basis_ * basis_.transpose(); }

    Subspace complement() const;
    // A(E); throws not_injective if A does not preserve the dimension.
    Subspace image(const Matrix& a) const;
    // {v : A v in this}
    Subspace preimage(const Matrix& a) const;
    Subspace intersect(const Subspace& other) const;
    Subspace sum(const Subspace& other) const;
    bool contains(const Vector& v, double tol = 1e-10) const;

    std::string to_string() const;

private:
    explicit Subspace(Matrix basis) : basis_(std::move(basis)) {}
    Matrix basis_;
};

// Columns of q become canonical: each basis of a line gets a positive leading entry.
Vector canonical_sign(const Vector& v);

}  // namespace domsplit
