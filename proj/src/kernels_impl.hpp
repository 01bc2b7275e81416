#pragma once

#include <cstddef>

namespace domsplit::kernels::detail {

void norms_scalar(const double* coords, std::size_t n, int d, const double* w, double p, double* out);
std::size_t count_scalar(const double* coords, std::size_t n, int d, const double* w, double p,
                         double radius);

#if defined(DOMSPLIT_BUILD_AVX2)
// p in {1, 2, inf} only; callers fall back to scalar otherwise.
void norms_avx2(const double* coords, std::size_t n, int d, const double* w, double p, double* out);
std::size_t count_avx2(const double* coords, std::size_t n, int d, const double* w, double p,
                       double radius);
#endif

#if defined(DOMSPLIT_BUILD_NEON)
void norms_neon(const double* coords, std::size_t n, int d, const double* w, double p, double* out);
std::size_t count_neon(const double* coords, std::size_t n, int d, const double* w, double p,
                       double radius);
#endif

inline bool simd_exponent(double p) {
    return p == 1.0 || p == 2.0 || p == __builtin_inf();
}

}  // namespace domsplit::kernels::detail
