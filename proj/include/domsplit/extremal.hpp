#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "domsplit/linalg.hpp"
#include "domsplit/norm.hpp"

namespace domsplit {

// automatic: closed forms for Euclidean norms, face enumeration for polyhedral norms
// where the problem is a convex maximisation, multi-start search elsewhere.
// multistart: always search, even where an exact route exists.
enum class Strategy { automatic, multistart };
enum class Sense { maximize, minimize };

struct SearchOptions {
    int starts = 64;
    int max_iterations = 200;
    double tolerance = 1e-6;
    std::uint64_t seed = 0x5eed2024;
    Strategy strategy = Strategy::automatic;
};

struct SphereOptimum {
    double value = 0.0;
    Vector point;  // norm-unit vector in R^d
};

// Optimise f over the norm-unit sphere of span(basis); basis is d x m orthonormal, m >= 1.
SphereOptimum sphere_search(const Matrix& basis, const Norm& norm,
                            const std::function<double(const Vector&)>& f, Sense sense,
                            const SearchOptions& opts);

struct GrassmannOptimum {
    double value = 0.0;
    Matrix basis;  // d x m orthonormal
};

// Optimise f over m-dimensional subspaces of span(ambient); ambient is d x n orthonormal.
GrassmannOptimum grassmann_search(const Matrix& ambient, int m,
                                  const std::function<double(const Matrix&)>& f, Sense sense,
                                  const SearchOptions& opts);

// Face enumeration for polyhedral norms (p = 1 or inf, any weights), d <= 8.
bool polytope_supported(const Norm& norm);
// Vertices of (unit ball) intersected with span(basis), as points of R^d.
std::vector<Vector> section_vertices(const Matrix& basis, const Norm& norm);

// sup of a convex, even function over the unit sphere of span(basis). Exact on polyhedral
// norms under Strategy::automatic; ties resolve to the sign-canonical, lexicographically
// smallest vertex.
SphereOptimum convex_sup(const Matrix& basis, const Norm& norm,
                         const std::function<double(const Vector&)>& f, const SearchOptions& opts);

}  // namespace domsplit
