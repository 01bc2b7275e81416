#pragma once

#include <Eigen/Dense>

namespace domsplit {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Orthonormal basis of the column span. Directions with singular value below
// rel_tol * (largest singular value) are dropped.
Matrix orthonormal_basis(const Matrix& m, double rel_tol = 1e-12);

// Orthonormal basis of ker(m).
Matrix null_space(const Matrix& m, double rel_tol = 1e-12);

// Orthonormal basis of the Euclidean complement of span(q), q orthonormal.
Matrix complement_basis(const Matrix& q);

struct Svd {
    Matrix u;  // left singular vectors, columns
    Vector s;  // descending
    Matrix v;  // right singular vectors, columns
};

// One-sided Jacobi SVD applied to the transpose, so row-graded matrices
// (the R factors of long products) keep relative accuracy in small singular values.
Svd jacobi_svd(const Matrix& a);

Vector singular_values(const Matrix& a);
double spectral_norm(const Matrix& a);
double min_singular_value(const Matrix& a);

double unit_ball_volume(int q);  // Euclidean unit ball in R^q

}  // namespace domsplit
