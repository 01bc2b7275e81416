#pragma once

#include <cstddef>

namespace domsplit::kernels {

enum class Isa { scalar, avx2, neon };

const char* isa_name(Isa isa);
bool isa_supported(Isa isa);
Isa detected_isa();
// Currently dispatched variant. Defaults to detected_isa(); DOMSPLIT_ISA=scalar forces the reference.
Isa active_isa();
void set_isa(Isa isa);  // throws if unsupported on this machine/build

// Points are stored column-major: coords[j * n + i] is coordinate j of point i.
// out[i] = || diag(w) x_i ||_p; weights may be null (all ones).
void weighted_norms(const double* coords, std::size_t n, int d, const double* weights, double p,
                    double* out);
void weighted_norms(Isa isa, const double* coords, std::size_t n, int d, const double* weights,
                    double p, double* out);

// Number of points with norm <= radius.
std::size_t count_within(const double* coords, std::size_t n, int d, const double* weights,
                         double p, double radius);
std::size_t count_within(Isa isa, const double* coords, std::size_t n, int d,
                         const double* weights, double p, double radius);

}  // namespace domsplit::kernels
