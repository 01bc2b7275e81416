#include <immintrin.h>

#include <cmath>

#include "kernels_impl.hpp"

namespace domsplit::kernels::detail {

namespace {

// Four points per register. Accumulation order over j matches the scalar loop.
inline __m256d norm4(const double* coords, std::size_t n, std::size_t i, int d, const double* w,
                     double p) {
    const __m256d sign_mask = _mm256_set1_pd(-0.0);
    __m256d acc = _mm256_setzero_pd();
    for (int j = 0; j < d; ++j) {
        __m256d v = _mm256_loadu_pd(coords + j * n + i);
        if (w) v = _mm256_mul_pd(v, _mm256_set1_pd(w[j]));
        if (p == 2.0) {
            acc = _mm256_add_pd(acc, _mm256_mul_pd(v, v));
        } else {
            v = _mm256_andnot_pd(sign_mask, v);
            acc = p == 1.0 ? _mm256_add_pd(acc, v) : _mm256_max_pd(acc, v);
        }
    }
    if (p == 2.0) acc = _mm256_sqrt_pd(acc);
    return acc;
}

inline double norm1(const double* coords, std::size_t n, std::size_t i, int d, const double* w,
                    double p) {
    double acc = 0.0;
    for (int j = 0; j < d; ++j) {
        const double v = coords[j * n + i] * (w ? w[j] : 1.0);
        if (p == 2.0) acc += v * v;
        else if (p == 1.0) acc += std::abs(v);
        else acc = std::abs(v) > acc ? std::abs(v) : acc;
    }
    return p == 2.0 ? std::sqrt(acc) : acc;
}

}  // namespace

void norms_avx2(const double* coords, std::size_t n, int d, const double* w, double p, double* out) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, norm4(coords, n, i, d, w, p));
    for (; i < n; ++i) out[i] = norm1(coords, n, i, d, w, p);
}

std::size_t count_avx2(const double* coords, std::size_t n, int d, const double* w, double p,
                       double radius) {
    std::size_t c = 0;
    std::size_t i = 0;
    const __m256d r = _mm256_set1_pd(radius);
    for (; i + 4 <= n; i += 4) {
        const __m256d le = _mm256_cmp_pd(norm4(coords, n, i, d, w, p), r, _CMP_LE_OQ);
        c += static_cast<std::size_t>(__builtin_popcount(_mm256_movemask_pd(le)));
    }
    for (; i < n; ++i) c += norm1(coords, n, i, d, w, p) <= radius ? 1 : 0;
    return c;
}

}  // namespace domsplit::kernels::detail
