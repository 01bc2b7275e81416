#pragma once

// Hand-rolled generators for property tests.

#include <Eigen/Dense>
#include <cstdint>
#include <random>

namespace gen {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

class Source {
public:
    explicit Source(std::uint64_t seed) : eng_(seed) {}

    double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }

    Matrix matrix(int r, int c, double lo = -1.0, double hi = 1.0) {
        Matrix m(r, c);
        for (int j = 0; j < c; ++j)
            for (int i = 0; i < r; ++i) m(i, j) = uniform(lo, hi);
        return m;
    }
    Vector vector(int n) { return matrix(n, 1).col(0); }

    Matrix orthogonal(int d) {
        return Eigen::HouseholderQR<Matrix>(matrix(d, d)).householderQ() * Matrix::Identity(d, d);
    }

    // U diag(s) V^T with singular values spread over [1 / spread, spread]
    Matrix conditioned(int d, double spread) {
        Vector s(d);
        for (int i = 0; i < d; ++i) s(i) = std::exp(uniform(-std::log(spread), std::log(spread)));
        return orthogonal(d) * s.asDiagonal() * orthogonal(d).transpose();
    }

    // d x k with orthonormal columns
    Matrix frame(int d, int k) {
        return Eigen::HouseholderQR<Matrix>(matrix(d, k)).householderQ() * Matrix::Identity(d, k);
    }

private:
    std::mt19937_64 eng_;
};

}  // namespace gen
