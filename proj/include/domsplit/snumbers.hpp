#pragma once

#include <cstdint>
#include <vector>

#include "domsplit/extremal.hpp"
#include "domsplit/norm.hpp"
#include "domsplit/subspace.hpp"

namespace domsplit {

inline constexpr int euclidean_dim_cap = 16;
inline constexpr int general_dim_cap = 6;

void check_dim_cap(int d, const Norm& norm);

struct SNumber {
    double value = 0.0;
    Matrix certificate;  // optimal subspace basis (Gelfand: F, Kolmogorov/volume: W or E)
    double tolerance = 0.0;
    std::uint64_t seed = 0;
    bool exact = false;
};

// m(A|E) = inf |A x| / |x| over x in E
double min_norm(const Matrix& a, const Subspace& e, const Norm& norm, const SearchOptions& opts = {});

// c_q: inf over F of codimension q-1 of ||A|F||. Codimension reading of the definition.
SNumber gelfand_number(const Matrix& a, int q, const Norm& norm, const SearchOptions& opts = {});
// sup over q-dimensional W of m(A|W)
SNumber kolmogorov_number(const Matrix& a, int q, const Norm& norm, const SearchOptions& opts = {});
// V_q: sup over q-dimensional E of det(A|E)
SNumber volume_growth(const Matrix& a, int q, const Norm& norm, const SearchOptions& opts = {});
// V_q of A restricted to the domain subspace
SNumber volume_growth(const Matrix& a, int q, const Norm& norm, const Subspace& domain,
                      const SearchOptions& opts = {});

struct SNumberProfile {
    std::vector<double> gelfand, kolmogorov, volume;
};
SNumberProfile snumber_profile(const Matrix& a, const Norm& norm, const SearchOptions& opts = {});

struct GelfandVolumeRelation {
    double volume_ratio = 0.0;   // V_q / (c_q V_{q-1})
    double snumber_ratio = 0.0;  // c_q / x_q
};
GelfandVolumeRelation gelfand_volume_relation_check(const Matrix& a, int q, const Norm& norm,
                                                    const SearchOptions& opts = {});

}  // namespace domsplit
