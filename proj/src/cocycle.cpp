#include "domsplit/cocycle.hpp"

#include <cmath>
#include <sstream>

#include "domsplit/error.hpp"

namespace domsplit {

namespace {

double wrap(double t) {
    t -= std::floor(t);
    return t >= 1.0 ? 0.0 : t;
}

double circle_distance(double a, double b) {
    const double d = std::abs(wrap(a) - wrap(b));
    return std::min(d, 1.0 - d);
}

}  // namespace

BaseSystem BaseSystem::finite_cycle(int length) {
    if (length < 1) throw Error(ErrorCode::precondition, "cycle length must be positive");
    BaseSystem b;
    b.kind_ = BaseKind::finite_cycle;
    b.cycle_length_ = length;
    b.forward_ = [length](const Vector& x) {
        Vector y(1);
        y(0) = static_cast<double>((static_cast<long>(std::lround(x(0))) + 1) % length);
        return y;
    };
    b.inverse_ = [length](const Vector& x) {
        Vector y(1);
        y(0) = static_cast<double>((static_cast<long>(std::lround(x(0))) + length - 1) % length);
        return y;
    };
    for (int i = 0; i < length; ++i) b.samples_.push_back(Vector::Constant(1, i));
    b.name_ = "finite_cycle(" + std::to_string(length) + ")";
    return b;
}

BaseSystem BaseSystem::circle_rotation(double alpha, int grid) {
    if (grid < 1) throw Error(ErrorCode::precondition, "grid must be positive");
    BaseSystem b;
    b.kind_ = BaseKind::circle_rotation;
    b.shift_ = Vector::Constant(1, alpha);
    b.forward_ = [alpha](const Vector& x) { return Vector::Constant(1, wrap(x(0) + alpha)); };
    b.inverse_ = [alpha](const Vector& x) { return Vector::Constant(1, wrap(x(0) - alpha)); };
    for (int j = 0; j < grid; ++j) b.samples_.push_back(Vector::Constant(1, static_cast<double>(j) / grid));
    std::ostringstream os;
    os.precision(17);
    os << "circle_rotation(" << alpha << ", " << grid << ")";
    b.name_ = os.str();
    return b;
}

BaseSystem BaseSystem::torus_translation(const Vector& shift, const std::vector<int>& grid) {
    const int m = static_cast<int>(shift.size());
    if (m < 1 || static_cast<int>(grid.size()) != m) throw Error(ErrorCode::dimension_mismatch, "torus grid");
    BaseSystem b;
    b.kind_ = BaseKind::torus_translation;
    b.shift_ = shift;
    b.forward_ = [shift](const Vector& x) {
        Vector y = x + shift;
        for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = wrap(y(i));
        return y;
    };
    b.inverse_ = [shift](const Vector& x) {
        Vector y = x - shift;
        for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = wrap(y(i));
        return y;
    };
    std::vector<int> idx(m, 0);
    while (true) {
        Vector p(m);
        for (int i = 0; i < m; ++i) p(i) = static_cast<double>(idx[i]) / grid[i];
        b.samples_.push_back(p);
        int i = m - 1;
        while (i >= 0 && ++idx[i] == grid[i]) idx[i--] = 0;
        if (i < 0) break;
    }
    b.name_ = "torus_translation(" + std::to_string(m) + ")";
    return b;
}

BaseSystem BaseSystem::explicit_map(int point_dim, Map forward, Map inverse, std::vector<Vector> samples,
                                    std::string name) {
    BaseSystem b;
    b.kind_ = BaseKind::explicit_map;
    b.forward_ = std::move(forward);
    b.inverse_ = std::move(inverse);
    b.samples_ = std::move(samples);
    b.name_ = std::move(name);
    for (const Vector& s : b.samples_)
        if (s.size() != point_dim) throw Error(ErrorCode::dimension_mismatch, "sample point dimension");
    return b;
}

Vector BaseSystem::forward(const Vector& x) const { return forward_(x); }
Vector BaseSystem::inverse(const Vector& x) const { return inverse_(x); }

Vector BaseSystem::iterate(const Vector& x, int n) const {
    Vector y = x;
    for (int i = 0; i < n; ++i) y = forward_(y);
    for (int i = 0; i < -n; ++i) y = inverse_(y);
    return y;
}

bool BaseSystem::same_point(const Vector& a, const Vector& b, double tol) const {
    if (a.size() != b.size()) return false;
    if (kind_ == BaseKind::circle_rotation || kind_ == BaseKind::torus_translation) {
        for (Eigen::Index i = 0; i < a.size(); ++i)
            if (circle_distance(a(i), b(i)) > tol) return false;
        return true;
    }
    return (a - b).cwiseAbs().maxCoeff() <= tol;
}

int BaseSystem::sample_index(const Vector& x) const {
    if (kind_ == BaseKind::finite_cycle) {
        const long i = std::lround(x(0));
        return i >= 0 && i < cycle_length_ && std::abs(x(0) - i) < 1e-9 ? static_cast<int>(i) : -1;
    }
    if (kind_ == BaseKind::circle_rotation) {
        const auto n = static_cast<long>(samples_.size());
        const long j = std::lround(wrap(x(0)) * n) % n;
        return same_point(x, samples_[j]) ? static_cast<int>(j) : -1;
    }
    for (std::size_t i = 0; i < samples_.size(); ++i)
        if (same_point(x, samples_[i])) return static_cast<int>(i);
    return -1;
}

BaseSystem BaseSystem::power(int m) const {
    if (m < 1) throw Error(ErrorCode::precondition, "power must be positive");
    BaseSystem b = *this;
    BaseSystem self = *this;
    b.forward_ = [self, m](const Vector& x) { return self.iterate(x, m); };
    b.inverse_ = [self, m](const Vector& x) { return self.iterate(x, -m); };
    if (b.shift_.size()) {
        b.shift_ = m * shift_;
        for (Eigen::Index i = 0; i < b.shift_.size(); ++i) b.shift_(i) = wrap(b.shift_(i));
    }
    b.name_ = name_ + "^" + std::to_string(m);
    return b;
}

Matrix ScaledProduct::matrix() const { return std::exp(log_scale) * q * r; }

Vector ScaledProduct::log_singular_values() const {
    Vector s = singular_values(r);
    return s.array().log() + log_scale;
}

namespace {

void left_multiply(ScaledProduct& p, const Matrix& a) {
    Eigen::HouseholderQR<Matrix> qr(a * p.q);
    const auto d = a.rows();
    p.q = qr.householderQ() * Matrix::Identity(d, d);
    Matrix rr = qr.matrixQR().triangularView<Eigen::Upper>();
    p.r = rr * p.r;
    const double s = p.r.cwiseAbs().maxCoeff();
    if (s > 0.0 && std::isfinite(s)) {
        p.r /= s;
        p.log_scale += std::log(s);
    }
}

ScaledProduct identity_product(int d) {
    return {Matrix::Identity(d, d), Matrix::Identity(d, d), 0.0};
}

}  // namespace

ForwardProduct::ForwardProduct(int d) : p_(identity_product(d)) {}

void ForwardProduct::push(const Matrix& a) {
    left_multiply(p_, a);
    ++n_;
}

BackwardProduct::BackwardProduct(int d) : pt_(identity_product(d)) {}

void BackwardProduct::push(const Matrix& a) {
    left_multiply(pt_, a.transpose());
    ++n_;
}

Matrix BackwardProduct::top_left_singular(int k) const {
    // product = exp(s) r^T q^T, so its left singular vectors are the right ones of r
    return jacobi_svd(pt_.r).v.leftCols(k);
}

Vector BackwardProduct::log_singular_values() const { return pt_.log_singular_values(); }

CocycleSystem::CocycleSystem(BaseSystem base, Generator generator, int dim, Norm norm, std::string name)
    : base_(std::move(base)), gen_(std::move(generator)), dim_(dim), norm_(std::move(norm)), name_(std::move(name)) {
    if (norm_.dim() != dim_) throw Error(ErrorCode::dimension_mismatch, "norm dimension differs from cocycle dimension");
    if (base_.samples().empty()) throw Error(ErrorCode::precondition, "base system has no samples");
    double top = 0.0;
    double inv_top = 0.0;
    floor_ = infinity;
    for (const Vector& x : base_.samples()) {
        Matrix a = this->generator(x);
        Vector s = singular_values(a);
        const double smin = s(s.size() - 1);
        if (!(smin > 1e-12)) throw Error(ErrorCode::not_injective, "generator is not injective at a sample point");
        floor_ = std::min(floor_, smin);
        top = std::max(top, s(0));
        inv_top = std::max(inv_top, 1.0 / smin);
    }
    kappa_ = top * inv_top;
}

Matrix CocycleSystem::generator(const Vector& x) const {
    Matrix a = gen_(x);
    if (a.rows() != dim_ || a.cols() != dim_) throw Error(ErrorCode::dimension_mismatch, "generator shape");
    if (!a.allFinite()) throw Error(ErrorCode::precondition, "generator returned non-finite entries");
    return a;
}

ScaledProduct CocycleSystem::orbit_product(const Vector& x, int n) const {
    if (n > horizon_ || -n > horizon_) throw Error(ErrorCode::horizon_exceeded, "orbit length beyond horizon");
    ForwardProduct p(dim_);
    if (n >= 0) {
        Vector y = x;
        for (int i = 0; i < n; ++i) {
            p.push(generator(y));
            y = base_.forward(y);
        }
    } else {
        Vector y = x;
        for (int i = 0; i < -n; ++i) {
            y = base_.inverse(y);
            Eigen::FullPivLU<Matrix> lu(generator(y));
            if (!lu.isInvertible()) throw Error(ErrorCode::not_injective, "generator not invertible on backward orbit");
            p.push(lu.inverse());
        }
    }
    return p.product();
}

CocycleSystem CocycleSystem::rebase(int m) const {
    CocycleSystem self = *this;
    auto gen = [self, m](const Vector& x) { return self.orbit_product(x, m).matrix(); };
    return CocycleSystem(base_.power(m), gen, dim_, norm_, name_ + "^" + std::to_string(m));
}

}  // namespace domsplit
