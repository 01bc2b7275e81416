#pragma once

#include <string>
#include <vector>

#include "domsplit/cocycle.hpp"
#include "domsplit/extremal.hpp"
#include "domsplit/subspace.hpp"

namespace domsplit {

// bogo:  c_{k+1}(A^n_x) / c_k(A^n_x)
// magic: max{c_{k+1}(A^n_x), c_{k+1}(A^n_Tx)} / c_k(A^{n+1}_x)
// magic_simplified: the invertible form, c_{k+1}(A^n_x) / c_k(A^n_x) through Gelfand numbers
enum class Criterion { bogo, magic, magic_simplified };
const char* criterion_name(Criterion c);
Criterion parse_criterion(const std::string& s);

struct RunOptions {
    unsigned jobs = 1;
    SearchOptions search;
};

// ratio_n <= k tau^n; tau from least squares on log ratio over n >= fit_from, k the envelope
// constant over every tabulated n.
struct EnvelopeFit {
    double k = 1.0;
    double tau = 1.0;
    double slope = 0.0;
    double intercept = 0.0;
    int fit_from = 1;
};
EnvelopeFit fit_envelope(const std::vector<double>& ratios, int fit_from);

struct DominationCertificate {
    int k = 1;
    Criterion criterion = Criterion::bogo;
    int n_max = 0;
    std::vector<double> sup_ratios;  // n = 1..n_max
    EnvelopeFit fit;
    double margin = 0.01;
    bool pass = false;
    std::string diagnostic;
};

DominationCertificate detect_domination(const CocycleSystem& c, int k, int n_max, Criterion criterion,
                                        const RunOptions& opts = {});

struct ConvergenceTable {
    std::vector<double> gaps;  // gaps[i] = d_H(X_{i+2}, X_{i+1})
    bool converged = false;
    int stabilization_index = 0;  // first n after which the gaps stop increasing
    double measured_rate = 0.0;   // exp(slope) of log gaps above the noise floor
};

struct UpperResult {
    Subspace e;
    ConvergenceTable table;
};
// Limit of the top-k left singular subspaces of A^n at T^{-n} x.
UpperResult construct_upper(const CocycleSystem& c, const Vector& x, int k, double tol, int n_max, double tau_fit);

struct LowerResult {
    Subspace f;
    ConvergenceTable table;
    double projection_norm = 0.0;  // ||pi_{E//F}|| in the cocycle norm
};
// Limit of the complements of E adapted to A^n_x.
LowerResult construct_lower(const CocycleSystem& c, const Vector& x, const Subspace& e, double tol, int n_max,
                            const SearchOptions& search = {});

struct PointSplitting {
    Vector x;
    Subspace e, f;
    ConvergenceTable upper, lower;
    double projection_norm = 0.0;
};

struct SplittingReport {
    int k = 1;
    double tol = 1e-8;
    int n_max = 60;
    double tau = 1.0;
    std::vector<PointSplitting> points;
};

SplittingReport construct_splitting(const CocycleSystem& c, const DominationCertificate& cert, double tol,
                                    const RunOptions& opts = {});

struct Verification {
    double equivariance_e = 0.0;
    double equivariance_f = 0.0;
    std::vector<double> sup_ratios;  // sup_x ||A^n|F|| / m(A^n|E), n = 1..n_max
    EnvelopeFit envelope;
    double k_tilde = 0.0;
    double equivariance_tol = 1e-6;
    bool pass = false;
    std::string diagnostic;
};

Verification verify_splitting(const CocycleSystem& c, const SplittingReport& report, int n_max,
                              const RunOptions& opts = {});

struct RBound {
    double log_estimate = 0.0;  // log of inf det(A^n|E) / prod_{i<=k} sigma_i(A^n)
    double kappa = 0.0;
    double k_const = 0.0;  // max(K_fit, 1): the hypothesis includes n = 0
    double tau = 0.0;
    int q_index = 0;
    double log_bound = 0.0;          // theorem constants (3 kappa^3 K, 36k/(1 - tau))
    int q_index_variant = 0;
    double log_bound_variant = 0.0;  // lemma constants (12 kappa^3 K, 2k/(1 - tau))
    bool holds = false;
    int measured_index = 0;  // largest upper stabilization index over the samples
};

RBound r_bound_certificate(const CocycleSystem& c, const SplittingReport& report,
                           const DominationCertificate& cert, int n_max);
// Closed-form bound alone.
double theorem_log_bound(int k, double kappa, double k_const, double tau, int* q_index = nullptr);
double variant_log_bound(int k, double kappa, double k_const, double tau, int* q_index = nullptr);

struct ConverseResult {
    double c0 = 0.0;
    double k_envelope = 0.0;
    double tau = 0.0;
    double k_prime = 0.0;
    double worst_ratio = 0.0;  // max over x, n of lhs / (K' tau^n c_k(A^{n+1}_x))
    bool holds = false;
};

ConverseResult converse_constant(const CocycleSystem& c, const SplittingReport& report,
                                 const Verification& verification, int n_max, const RunOptions& opts = {});

struct Uniqueness {
    double max_e = 0.0;
    double max_f = 0.0;
};
Uniqueness uniqueness_check(const SplittingReport& a, const SplittingReport& b);

}  // namespace domsplit
