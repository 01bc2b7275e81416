#pragma once

#include <string>
#include <vector>

#include "domsplit/cocycle.hpp"
#include "domsplit/splitting.hpp"

namespace domsplit {

// coefficient * cos(2 pi harmonic y_component) or the sine version
struct FieldTerm {
    Matrix coefficient;
    int component = 0;
    bool sine = false;
    int harmonic = 1;
};

// M(y) = constant + sum of trigonometric terms in the base coordinates
struct FieldSpec {
    std::string kind = "constant";
    Matrix constant;
    std::vector<FieldTerm> terms;

    static FieldSpec constant_matrix(const Matrix& m);
    // diag(diagonal) plus diagonal trigonometric forcing
    static FieldSpec diagonal_trig(const Vector& diagonal, std::vector<FieldTerm> forcing);
    // [[0, omega], [-omega, 0]]
    static FieldSpec rotation(double omega);
    static FieldSpec coupled(const Matrix& m, std::vector<FieldTerm> terms);

    Matrix at(const Vector& y) const;
    bool is_diagonal() const;
    int dim() const { return static_cast<int>(constant.rows()); }
};

// Linear flow on the torus, or a single fixed point when frequency is empty.
struct FlowBase {
    Vector frequency;
    std::vector<int> grid;

    static FlowBase fixed_point();
    static FlowBase torus(const Vector& frequency, const std::vector<int>& grid);
    bool is_fixed() const { return frequency.size() == 0; }
    int point_dim() const { return is_fixed() ? 1 : static_cast<int>(frequency.size()); }
};

struct FlowEvaluation {
    Matrix value;
    double error_estimate = 0.0;  // Richardson: |B_h - B_{h/2}| / 15
};

class FlowCocycle {
public:
    FlowCocycle(FlowBase base, FieldSpec field, Norm norm, double step = 1.0 / 256.0,
                double t_max = 64.0);

    const FlowBase& base() const { return base_; }
    const FieldSpec& field() const { return field_; }
    const Norm& norm() const { return norm_; }
    int dim() const { return field_.dim(); }
    double step() const { return step_; }
    double t_max() const { return t_max_; }
    const std::vector<Vector>& samples() const { return samples_; }

    Vector flow_point(const Vector& x, double t) const;
    // fixed-step RK4: floor(t / h) full steps and one partial step
    Matrix integrate(const Vector& x, double t, double h) const;
    // B at t = i dt, i = 0..count; the step is shrunk so dt is a whole number of steps
    std::vector<Matrix> trajectory(const Vector& x, double dt, int count) const;
    bool has_closed_form() const { return field_.is_diagonal(); }
    Matrix closed_form(const Vector& x, double t) const;

private:
    FlowBase base_;
    FieldSpec field_;
    Norm norm_;
    double step_;
    double t_max_;
    std::vector<Vector> samples_;
};

FlowEvaluation evaluate_flow(const FlowCocycle& fc, const Vector& x, double t);

// step used for the time-1/m map: (1/m) / ceil((1/m) / h)
double discretization_step(double h, int m);
// generator B(x, 1/m) over the time-1/m map
CocycleSystem discretize_flow(const FlowCocycle& fc, int m);

struct FlowDomination {
    int k = 1;
    double t_max = 0.0;
    double dt = 0.125;
    int eps_grid = 33;
    std::vector<double> times;
    // sup_x sup_eps c_{k+1}(B^t at phi^eps x) / c_k(B^{t+1}_x)
    std::vector<double> sup_ratios;
    double gamma = 0.0;
    double log_c = 0.0;  // envelope constant: max_t log ratio + gamma t
    double margin = 0.01;
    bool pass = false;
    std::string diagnostic;
};

FlowDomination continuous_domination_check(const FlowCocycle& fc, int k, double t_max, int eps_grid = 33,
                                           const RunOptions& opts = {});

struct FlowSplitting {
    std::vector<int> m_list;
    std::vector<SplittingReport> reports;
    std::vector<DominationCertificate> certificates;
    // max d_H over points and bundles between the splittings of m_list[i] and m_list[j], i < j
    std::vector<std::vector<double>> agreement;
    double agreement_tol = 1e-5;
    bool agree = false;
    int worst_i = -1, worst_j = -1;
    // sup_x |B^t|F| / m(B^t|E) on t = i dt, from the first splitting
    std::vector<double> times;
    std::vector<double> ratios;
    double gamma = 0.0;
    double log_c = 0.0;
    double half_time_ratio = 0.0;  // ratio at t = 0.5
    double sup_norm_unit_time = 0.0;   // max |B(x, t)| for t in [0, 1]
    double min_on_e_unit_time = 0.0;   // min m(B(x, t)|E(x)) for t in [0, 1]
    bool pass = false;
    std::string diagnostic;
};

FlowSplitting flow_splitting(const FlowCocycle& fc, const FlowDomination& cert, const std::vector<int>& m_list,
                             int n_max, double tol, double t_max, const RunOptions& opts = {});

}  // namespace domsplit
