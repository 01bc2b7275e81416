#pragma once

#include <cstdint>
#include <random>

#include "domsplit/linalg.hpp"

namespace domsplit {

// std::normal_distribution is implementation defined, so Gaussians come from
// Box-Muller on the (fully specified) mt19937_64 stream to keep seeds portable.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform();  // [0, 1)
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double normal();
    Vector normal_vector(int n);
    Matrix normal_matrix(int rows, int cols);
    std::uint64_t next() { return engine_(); }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

// Radical-inverse Halton point, component j uses the j-th prime base.
double halton(std::uint64_t index, int component);

}  // namespace domsplit
