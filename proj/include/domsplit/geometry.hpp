#pragma once

#include <cstdint>
#include <string>

#include "domsplit/extremal.hpp"
#include "domsplit/norm.hpp"
#include "domsplit/subspace.hpp"

namespace domsplit {

// inf over f in F of |x - f|
double distance_to_subspace(const Vector& x, const Subspace& f, const Norm& norm,
                            const SearchOptions& opts = {});

// sup over unit e in E of dist(e, F)
double gap(const Subspace& e, const Subspace& f, const Norm& norm, const SearchOptions& opts = {});

// Euclidean: ||Pr_E - Pr_F||. Otherwise the symmetric sup-inf distance between unit spheres.
double hausdorff(const Subspace& e, const Subspace& f, const Norm& norm, const SearchOptions& opts = {});

// q g / (1 - q g), valid for g < 1/q
double gap_asymmetry_bound(double g, int q);

struct Angle {
    double sin_theta = 0.0;
    double theta = 0.0;
};
// sin theta = inf{|e - f| : e unit in E, f in F}
Angle minimal_angle(const Subspace& e, const Subspace& f, const Norm& norm,
                    const SearchOptions& opts = {});

struct Projection {
    Matrix matrix;
    double norm = 0.0;
};
// Projection onto E along F; E and F must be complementary.
Projection oblique_projection(const Subspace& e, const Subspace& f, const Norm& norm,
                              const SearchOptions& opts = {});

// sup |A x|_out over x in span(domain) with |x|_in = 1
double operator_norm(const Matrix& a, const Norm& in, const Norm& out, const Matrix& domain,
                     const SearchOptions& opts = {});
double operator_norm(const Matrix& a, const Norm& in, const Norm& out, const SearchOptions& opts = {});
double operator_norm(const Matrix& a, const Norm& norm, const SearchOptions& opts = {});

enum class VolumeMethod { automatic, monte_carlo };

struct BallVolume {
    double value = 0.0;
    double tolerance = 0.0;  // relative
    std::string method;
};
// Lebesgue volume of {c in R^q : |basis c| <= 1}, basis d x q orthonormal.
BallVolume ball_volume(const Matrix& basis, const Norm& norm,
                       VolumeMethod method = VolumeMethod::automatic,
                       std::uint64_t samples = 1000000);

// Volume ratio of A|E. Zero when A|E drops rank (sigma_min < 1e-12 sigma_max).
double subspace_determinant(const Matrix& a, const Subspace& e, const Norm& in, const Norm& out,
                            VolumeMethod method = VolumeMethod::automatic);
double subspace_determinant(const Matrix& a, const Subspace& e, const Norm& norm,
                            VolumeMethod method = VolumeMethod::automatic);

struct DetSplit {
    double ratio = 0.0;  // det(A|G+H) / (det(A|G) det(A|H))
    bool has_bounds = false;
    double lower = 0.0;  // sin(theta(AG, AH))^l
    double upper = 0.0;  // sin(theta(G, H))^-l
    bool within = true;
};
DetSplit det_split_bound(const Matrix& a, const Subspace& g, const Subspace& h, const Norm& norm,
                         const SearchOptions& opts = {});

}  // namespace domsplit
