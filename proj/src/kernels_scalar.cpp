#include <cmath>

#include "kernels_impl.hpp"

namespace domsplit::kernels::detail {

namespace {

inline double point_norm(const double* coords, std::size_t n, std::size_t i, int d, const double* w,
                         double p) {
    if (p == __builtin_inf()) {
        double m = 0.0;
        for (int j = 0; j < d; ++j) {
            const double v = std::abs(coords[j * n + i] * (w ? w[j] : 1.0));
            m = v > m ? v : m;
        }
        return m;
    }
    if (p == 1.0) {
        double s = 0.0;
        for (int j = 0; j < d; ++j) s += std::abs(coords[j * n + i] * (w ? w[j] : 1.0));
        return s;
    }
    if (p == 2.0) {
        double s = 0.0;
        for (int j = 0; j < d; ++j) {
            const double v = coords[j * n + i] * (w ? w[j] : 1.0);
            s += v * v;
        }
        return std::sqrt(s);
    }
    double s = 0.0;
    for (int j = 0; j < d; ++j) s += std::pow(std::abs(coords[j * n + i] * (w ? w[j] : 1.0)), p);
    return std::pow(s, 1.0 / p);
}

}  // namespace

void norms_scalar(const double* coords, std::size_t n, int d, const double* w, double p, double* out) {
    for (std::size_t i = 0; i < n; ++i) out[i] = point_norm(coords, n, i, d, w, p);
}

std::size_t count_scalar(const double* coords, std::size_t n, int d, const double* w, double p,
                         double radius) {
    std::size_t c = 0;
    for (std::size_t i = 0; i < n; ++i) c += point_norm(coords, n, i, d, w, p) <= radius ? 1 : 0;
    return c;
}

}  // namespace domsplit::kernels::detail
