#pragma once

#include <limits>
#include <string>

#include "domsplit/linalg.hpp"

namespace domsplit {

inline constexpr double infinity = std::numeric_limits<double>::infinity();

// |x| = || diag(w) x ||_p. Euclidean is p = 2 with unit weights; lp has unit weights.
class Norm {
public:
    enum class Kind { euclidean, lp, weighted };

    static Norm euclidean(int dim);
    static Norm lp(int dim, double p);
    static Norm weighted(const Vector& weights, double p = 2.0);
    // "euclidean", "l1", "l2", "linf", "lp:<p>", "weighted:<w1>,<w2>,...[@<p>]"
    static Norm parse(const std::string& spec, int dim);

    Kind kind() const { return kind_; }
    int dim() const { return static_cast<int>(weights_.size()); }
    double p() const { return p_; }
    const Vector& weights() const { return weights_; }

    bool is_euclidean() const;
    bool is_polyhedral() const { return p_ == 1.0 || p_ == infinity; }

    double operator()(const Vector& x) const;
    double dual(const Vector& f) const;
    Norm dual_norm() const;
    // f with dual(f) = 1 and f.x = |x|; ties in linf go to the lowest index.
    Vector norming_functional(const Vector& x) const;

    std::string to_string() const;
    bool operator==(const Norm& other) const;

private:
    Norm(Kind kind, Vector weights, double p) : kind_(kind), weights_(std::move(weights)), p_(p) {}

    Kind kind_;
    Vector weights_;
    double p_;
};

double lp_value(const Vector& y, double p);

}  // namespace domsplit
