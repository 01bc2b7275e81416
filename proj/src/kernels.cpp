#include "domsplit/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

#include "domsplit/error.hpp"
#include "kernels_impl.hpp"

namespace domsplit::kernels {

namespace {

Isa initial_isa() {
    if (const char* env = std::getenv("DOMSPLIT_ISA"); env && std::strcmp(env, "scalar") == 0)
        return Isa::scalar;
    return detected_isa();
}

std::atomic<Isa>& current() {
    static std::atomic<Isa> isa{initial_isa()};
    return isa;
}

}  // namespace

const char* isa_name(Isa isa) {
    switch (isa) {
        case Isa::scalar: return "scalar";
        case Isa::avx2: return "avx2";
        case Isa::neon: return "neon";
    }
    return "?";
}

bool isa_supported(Isa isa) {
    switch (isa) {
        case Isa::scalar: return true;
        case Isa::avx2:
#if defined(DOMSPLIT_BUILD_AVX2)
            return __builtin_cpu_supports("avx2");
#else
            return false;
#endif
        case Isa::neon:
#if defined(DOMSPLIT_BUILD_NEON)
            return true;
#else
            return false;
#endif
    }
    return false;
}

Isa detected_isa() {
    if (isa_supported(Isa::avx2)) return Isa::avx2;
    if (isa_supported(Isa::neon)) return Isa::neon;
    return Isa::scalar;
}

Isa active_isa() { return current().load(); }

void set_isa(Isa isa) {
    if (!isa_supported(isa))
        throw Error(ErrorCode::precondition, std::string("kernel variant unavailable: ") + isa_name(isa));
    current().store(isa);
}

void weighted_norms(Isa isa, const double* coords, std::size_t n, int d, const double* weights,
                    double p, double* out) {
    if (detail::simd_exponent(p)) {
#if defined(DOMSPLIT_BUILD_AVX2)
        if (isa == Isa::avx2) return detail::norms_avx2(coords, n, d, weights, p, out);
#endif
#if defined(DOMSPLIT_BUILD_NEON)
        if (isa == Isa::neon) return detail::norms_neon(coords, n, d, weights, p, out);
#endif
    }
    detail::norms_scalar(coords, n, d, weights, p, out);
}

void weighted_norms(const double* coords, std::size_t n, int d, const double* weights, double p,
                    double* out) {
    weighted_norms(active_isa(), coords, n, d, weights, p, out);
}

std::size_t count_within(Isa isa, const double* coords, std::size_t n, int d, const double* weights,
                         double p, double radius) {
    if (detail::simd_exponent(p)) {
#if defined(DOMSPLIT_BUILD_AVX2)
        if (isa == Isa::avx2) return detail::count_avx2(coords, n, d, weights, p, radius);
#endif
#if defined(DOMSPLIT_BUILD_NEON)
        if (isa == Isa::neon) return detail::count_neon(coords, n, d, weights, p, radius);
#endif
    }
    return detail::count_scalar(coords, n, d, weights, p, radius);
}

std::size_t count_within(const double* coords, std::size_t n, int d, const double* weights, double p,
                         double radius) {
    return count_within(active_isa(), coords, n, d, weights, p, radius);
}

}  // namespace domsplit::kernels
