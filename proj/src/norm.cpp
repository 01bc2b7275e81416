#include "domsplit/norm.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "domsplit/error.hpp"

namespace domsplit {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::dimension_mismatch: return "dimension mismatch";
        case ErrorCode::zero_subspace: return "zero subspace";
        case ErrorCode::not_complemented: return "not complemented";
        case ErrorCode::rank_deficient: return "rank deficient";
        case ErrorCode::not_injective: return "not injective";
        case ErrorCode::bound_not_applicable: return "bound not applicable";
        case ErrorCode::cap_exceeded: return "dimension cap exceeded";
        case ErrorCode::horizon_exceeded: return "horizon exceeded";
        case ErrorCode::sample_mismatch: return "sample mismatch";
        case ErrorCode::precondition: return "precondition failed";
        case ErrorCode::config: return "config error";
        case ErrorCode::io: return "io error";
    }
    return "error";
}

double lp_value(const Vector& y, double p) {
    if (p == infinity) return y.size() ? y.cwiseAbs().maxCoeff() : 0.0;
    if (p == 1.0) return y.cwiseAbs().sum();
    if (p == 2.0) return y.norm();
    const double scale = y.size() ? y.cwiseAbs().maxCoeff() : 0.0;
    if (scale == 0.0) return 0.0;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) acc += std::pow(std::abs(y(i)) / scale, p);
    return scale * std::pow(acc, 1.0 / p);
}

namespace {

void check_p(double p) {
    if (!(p >= 1.0)) throw Error(ErrorCode::precondition, "norm exponent must be >= 1");
}

double conjugate(double p) {
    if (p == 1.0) return infinity;
    if (p == infinity) return 1.0;
    return p / (p - 1.0);
}

}  // namespace

Norm Norm::euclidean(int dim) { return Norm(Kind::euclidean, Vector::Ones(dim), 2.0); }

Norm Norm::lp(int dim, double p) {
    check_p(p);
    return Norm(Kind::lp, Vector::Ones(dim), p);
}

Norm Norm::weighted(const Vector& weights, double p) {
    check_p(p);
    if (weights.size() == 0 || (weights.array() <= 0.0).any())
        throw Error(ErrorCode::precondition, "weights must be positive");
    return Norm(Kind::weighted, weights, p);
}

Norm Norm::parse(const std::string& spec, int dim) {
    auto parse_p = [](const std::string& s) {
        if (s == "inf") return infinity;
        return std::stod(s);
    };
    if (spec == "euclidean" || spec == "l2") return euclidean(dim);
    if (spec == "l1") return lp(dim, 1.0);
    if (spec == "linf") return lp(dim, infinity);
    if (spec.rfind("lp:", 0) == 0) return lp(dim, parse_p(spec.substr(3)));
    if (spec.rfind("weighted:", 0) == 0) {
        std::string body = spec.substr(9);
        double p = 2.0;
        if (auto at = body.find('@'); at != std::string::npos) {
            p = parse_p(body.substr(at + 1));
            body = body.substr(0, at);
        }
        std::vector<double> w;
        std::stringstream ss(body);
        for (std::string item; std::getline(ss, item, ',');) w.push_back(std::stod(item));
        if (static_cast<int>(w.size()) != dim)
            throw Error(ErrorCode::dimension_mismatch, "weight count differs from dimension");
        return weighted(Eigen::Map<Vector>(w.data(), dim), p);
    }
    throw Error(ErrorCode::precondition, "unknown norm '" + spec + "'");
}

bool Norm::is_euclidean() const {
    return p_ == 2.0 && (weights_.array() == 1.0).all();
}

double Norm::operator()(const Vector& x) const {
    if (x.size() != weights_.size()) throw Error(ErrorCode::dimension_mismatch, "norm argument");
    if (kind_ == Kind::weighted) return lp_value(weights_.cwiseProduct(x), p_);
    return lp_value(x, p_);
}

double Norm::dual(const Vector& f) const {
    if (f.size() != weights_.size()) throw Error(ErrorCode::dimension_mismatch, "dual norm argument");
    return lp_value(f.cwiseQuotient(weights_), conjugate(p_));
}

Norm Norm::dual_norm() const {
    const double q = conjugate(p_);
    if (kind_ == Kind::euclidean) return *this;
    if (kind_ == Kind::lp) return lp(dim(), q);
    return weighted(weights_.cwiseInverse(), q);
}

Vector Norm::norming_functional(const Vector& x) const {
    const Vector y = weights_.cwiseProduct(x);
    const double ny = lp_value(y, p_);
    if (ny == 0.0) throw Error(ErrorCode::zero_subspace, "norming functional of zero vector");
    Vector g = Vector::Zero(y.size());
    if (p_ == infinity) {
        Eigen::Index j = 0;
        const double top = y.cwiseAbs().maxCoeff();
        while (std::abs(y(j)) < top) ++j;
        g(j) = y(j) > 0 ? 1.0 : -1.0;
    } else if (p_ == 1.0) {
        for (Eigen::Index i = 0; i < y.size(); ++i) g(i) = y(i) > 0 ? 1.0 : (y(i) < 0 ? -1.0 : 0.0);
    } else {
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            const double a = std::abs(y(i)) / ny;
            g(i) = (y(i) >= 0 ? 1.0 : -1.0) * std::pow(a, p_ - 1.0);
        }
    }
    return weights_.cwiseProduct(g);
}

std::string Norm::to_string() const {
    auto fmt_p = [](double p) {
        if (p == infinity) return std::string("inf");
        std::ostringstream os;
        os << p;
        return os.str();
    };
    if (kind_ == Kind::euclidean) return "euclidean";
    if (kind_ == Kind::lp) {
        if (p_ == 1.0) return "l1";
        if (p_ == infinity) return "linf";
        if (p_ == 2.0) return "l2";
        return "lp:" + fmt_p(p_);
    }
    std::ostringstream os;
    os << "weighted:";
    for (Eigen::Index i = 0; i < weights_.size(); ++i) os << (i ? "," : "") << weights_(i);
    os << "@" << fmt_p(p_);
    return os.str();
}

bool Norm::operator==(const Norm& other) const {
    return p_ == other.p_ && weights_.size() == other.weights_.size() && weights_ == other.weights_;
}

}  // namespace domsplit
