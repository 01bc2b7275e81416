#pragma once

#include <vector>

#include "domsplit/extremal.hpp"
#include "domsplit/norm.hpp"
#include "domsplit/subspace.hpp"

namespace domsplit {

struct HilbertSplit {
    Subspace f;        // {v : A v in (AE)^perp}
    Subspace f_image;  // (AE)^perp
    double r = 0.0;    // det(A|E) / V_k(A)
    double sigma_k = 0.0;
    double sigma_k1 = 0.0;  // zero when k = d
    double min_norm_e = 0.0;
    double norm_on_f = 0.0;
    double projection_norm = 0.0;  // ||pi_{E//F}||
    // m(A|E) >= r sigma_k, ||A|F|| <= sigma_{k+1} / r, ||pi_{E//F}|| <= 1 / r (1e-9 relative slack)
    bool bounds_hold = false;
};

// Euclidean splitting of A along E; A must be injective on E.
HilbertSplit hilbert_svd_split(const Matrix& a, const Subspace& e);

struct OneStep {
    Vector functional;  // dual-unit, functional . (A v) = |A v|
    Subspace g;         // complement of <v>, {w : A w in G'}
    Subspace g_image;   // ker functional
    Matrix projection;  // pi_{<v>//G}
    double projection_norm = 0.0;
    double image_projection_norm = 0.0;  // pi_{<Av>//G'}, equals 1
    double bound = 0.0;                  // c_1(A) / |A v|
    bool bound_holds = false;
    // measured ratios around the l = 1 volume relation, when requested
    bool has_volume_relation = false;
    double volume_lower_ratio = 0.0;  // V_1(A|G) c_1(A) / V_2(A)
    double volume_upper_ratio = 0.0;  // V_1(A|G) |A v| / V_2(A)
};

OneStep banach_one_step(const Matrix& a, const Vector& v, const Norm& norm, bool volume_relation = false,
                        const SearchOptions& opts = {});

struct GenSvd {
    Subspace e;
    Subspace e_image;
    Subspace f;
    Subspace f_image;
    std::vector<Vector> pivots;  // v_1..v_k
    double containment_residual = 0.0;  // gap(A F, F') in the Euclidean sense
    double projection_norm = 0.0;        // ||pi_{E//F}||
    double image_projection_norm = 0.0;  // ||pi_{E'//F'}||
    double norm_on_f = 0.0;              // ||A|F||
    double c_next = 0.0;                 // c_{k+1}(A), 0 when k = d
    double r = 0.0;                      // det(A|E) / V_k(A)
    double empirical_d = 0.0;            // max of the three measured ratios
    double paper_form_d = 0.0;           // r^-(2^k - 1), the constant C_k set to 1
};

struct Paring {
    Subspace f;
    Subspace f_image;
    std::vector<Vector> pivots;
};
// The k paring steps alone: F = intersection of ker(l_i o A), F' = intersection of ker l_i.
Paring banach_paring(const Matrix& a, const Subspace& e, const Norm& norm, const SearchOptions& opts = {});

GenSvd banach_gen_svd(const Matrix& a, const Subspace& e, const Norm& norm, const SearchOptions& opts = {});

struct BoundCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    bool pass = false;
};

// |log det B2 / det B1| <= k ||B1 - B2|| / (m - ||B1 - B2||)
BoundCheck det_lipschitz_matrices(const Matrix& b1, const Matrix& b2);

// |log det(A|E1) / det(A|E2)| <= 36 k kappa^2 d_H(E1, E2) for d_H <= (2 kappa)^-2
BoundCheck det_lipschitz_grassmann(const Matrix& a, const Subspace& e1, const Subspace& e2);

struct DetRegularity {
    double quotient = 0.0;  // |log ratio| / (||A1 - A2|| + d_H(E1, E2))
    bool has_euclidean_bound = false;
    double euclidean_bound = 0.0;  // composed Euclidean constant for the same quotient
};

DetRegularity det_reg_banach_check(const Matrix& a1, const Matrix& a2, const Subspace& e1,
                                   const Subspace& e2, const Norm& norm, const SearchOptions& opts = {});

}  // namespace domsplit
