#pragma once

#include <functional>
#include <string>
#include <vector>

#include "domsplit/linalg.hpp"
#include "domsplit/norm.hpp"

namespace domsplit {

enum class BaseKind { finite_cycle, circle_rotation, torus_translation, explicit_map };

// Invertible base dynamics with a finite sample set. Points are small coordinate vectors:
// the index for cycles, angles in [0, 1) for rotations and translations.
class BaseSystem {
public:
    using Map = std::function<Vector(const Vector&)>;

    static BaseSystem finite_cycle(int length);
    static BaseSystem circle_rotation(double alpha, int grid);
    static BaseSystem torus_translation(const Vector& shift, const std::vector<int>& grid);
    static BaseSystem explicit_map(int point_dim, Map forward, Map inverse, std::vector<Vector> samples,
                                   std::string name);

    BaseKind kind() const { return kind_; }
    Vector forward(const Vector& x) const;
    Vector inverse(const Vector& x) const;
    Vector iterate(const Vector& x, int n) const;
    const std::vector<Vector>& samples() const { return samples_; }
    bool same_point(const Vector& a, const Vector& b, double tol = 1e-12) const;
    // index of a sample equal to x, or -1
    int sample_index(const Vector& x) const;
    // base map T^m, same samples
    BaseSystem power(int m) const;
    std::string describe() const { return name_; }
    const Vector& shift() const { return shift_; }
    int cycle_length() const { return cycle_length_; }

private:
    BaseKind kind_ = BaseKind::finite_cycle;
    Map forward_, inverse_;
    std::vector<Vector> samples_;
    std::string name_;
    Vector shift_;
    int cycle_length_ = 0;
};

// P = exp(log_scale) * q * r with q orthogonal and r upper triangular, max |r_ij| = 1.
struct ScaledProduct {
    Matrix q;
    Matrix r;
    double log_scale = 0.0;

    Matrix matrix() const;
    Vector log_singular_values() const;
};

// Left-multiplying accumulator: after pushes a_0, a_1, ... holds a_{n-1} ... a_0.
class ForwardProduct {
public:
    explicit ForwardProduct(int d);
    void push(const Matrix& a);
    const ScaledProduct& product() const { return p_; }
    int length() const { return n_; }

private:
    ScaledProduct p_;
    int n_ = 0;
};

// Right-multiplying accumulator: after pushes a_0, a_1, ... holds a_0 a_1 ... a_{n-1}.
// Stored through the transpose, so the left singular vectors stay accurate.
class BackwardProduct {
public:
    explicit BackwardProduct(int d);
    void push(const Matrix& a);
    // orthonormal basis of the top-k left singular subspace
    Matrix top_left_singular(int k) const;
    Vector log_singular_values() const;
    int length() const { return n_; }

private:
    ScaledProduct pt_;  // transpose of the product
    int n_ = 0;
};

class CocycleSystem {
public:
    using Generator = std::function<Matrix(const Vector&)>;

    CocycleSystem(BaseSystem base, Generator generator, int dim, Norm norm, std::string name = "");

    const BaseSystem& base() const { return base_; }
    const Norm& norm() const { return norm_; }
    int dim() const { return dim_; }
    const std::string& name() const { return name_; }

    Matrix generator(const Vector& x) const;
    // A^n_x for n >= 0; for n < 0 the inverse cocycle (A^{-n}_{T^n x})^{-1}
    ScaledProduct orbit_product(const Vector& x, int n) const;
    double injectivity_floor() const { return floor_; }
    // sup ||A_x|| * sup ||A_x^-1|| over the samples (Euclidean)
    double kappa() const { return kappa_; }
    // cocycle over T^m generated by A^m_x
    CocycleSystem rebase(int m) const;
    // largest |n| accepted by orbit_product
    int horizon() const { return horizon_; }
    void set_horizon(int h) { horizon_ = h; }

private:
    BaseSystem base_;
    Generator gen_;
    int dim_;
    Norm norm_;
    std::string name_;
    double floor_ = 0.0;
    double kappa_ = 0.0;
    int horizon_ = 100000;
};

}  // namespace domsplit
