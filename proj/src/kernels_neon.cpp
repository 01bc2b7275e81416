#include <arm_neon.h>

#include <cmath>

#include "kernels_impl.hpp"

namespace domsplit::kernels::detail {

namespace {

inline float64x2_t norm2x(const double* coords, std::size_t n, std::size_t i, int d, const double* w,
                          double p) {
    float64x2_t acc = vdupq_n_f64(0.0);
    for (int j = 0; j < d; ++j) {
        float64x2_t v = vld1q_f64(coords + j * n + i);
        if (w) v = vmulq_n_f64(v, w[j]);
        if (p == 2.0) {
            acc = vaddq_f64(acc, vmulq_f64(v, v));
        } else {
            v = vabsq_f64(v);
            acc = p == 1.0 ? vaddq_f64(acc, v) : vmaxq_f64(acc, v);
        }
    }
    if (p == 2.0) acc = vsqrtq_f64(acc);
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

void norms_neon(const double* coords, std::size_t n, int d, const double* w, double p, double* out) {
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(out + i, norm2x(coords, n, i, d, w, p));
    for (; i < n; ++i) out[i] = norm1(coords, n, i, d, w, p);
}

std::size_t count_neon(const double* coords, std::size_t n, int d, const double* w, double p,
                       double radius) {
    std::size_t c = 0;
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const uint64x2_t le = vcleq_f64(norm2x(coords, n, i, d, w, p), vdupq_n_f64(radius));
        c += (vgetq_lane_u64(le, 0) ? 1 : 0) + (vgetq_lane_u64(le, 1) ? 1 : 0);
    }
    for (; i < n; ++i) c += norm1(coords, n, i, d, w, p) <= radius ? 1 : 0;
    return c;
}

}  // namespace domsplit::kernels::detail
