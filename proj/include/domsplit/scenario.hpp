#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "domsplit/cocycle.hpp"
#include "domsplit/flow.hpp"
#include "domsplit/splitting.hpp"

namespace domsplit {

// c * cos(2 pi h x_component) or the sine version
struct TrigTerm {
    double coefficient = 0.0;
    bool sine = false;
    int harmonic = 1;
    int component = 0;
};

struct TrigPoly {
    double constant = 0.0;
    std::vector<TrigTerm> terms;
    double operator()(const Vector& x) const;
};

struct BaseSpec {
    std::string kind = "cycle";  // cycle | rotation | torus | flow
    int length = 1;
    double alpha = 0.0;
    Vector shift;           // torus translation
    Vector frequency;       // flow; empty for a fixed point
    std::vector<int> grid;  // rotation, torus, flow
};

struct GeneratorSpec {
    // constant | cycle | rotation | conjugated_diagonal | schrodinger | random_near_diagonal
    std::string kind = "constant";
    Matrix matrix;
    std::vector<Matrix> matrices;
    double angle_constant = 0.0;  // rotation
    Vector diagonal;
    TrigPoly angle;
    std::string frame = "symmetric";  // symmetric | cohomologous
    double energy = 0.0;
    TrigPoly potential;
    double perturbation = 0.0;
    std::uint64_t seed = 0;
};

struct AnalysisSpec {
    int k = 1;
    int n_max = 60;
    double tol = 1e-8;
    int grid = 128;
    std::uint64_t seed = 20240607;
    Criterion criterion = Criterion::bogo;
    int horizon = 100000;
};

struct FlowSpec {
    bool present = false;
    FieldSpec field;
    double step = 1.0 / 256.0;
    double horizon = 64.0;
    std::vector<int> m_list{1, 2, 3};
    double t_max = 8.0;
    int eps_grid = 33;
};

struct ScenarioConfig {
    std::string name;
    int dim = 2;
    std::string norm = "euclidean";
    BaseSpec base;
    GeneratorSpec generator;
    AnalysisSpec analysis;
    FlowSpec flow;
    std::string output_dir;
    // validated config with every default filled in, keys sorted
    std::string canonical;
};

// Parses and validates; errors name the offending field path or the line of a syntax error.
ScenarioConfig parse_config(const std::string& text, const std::string& source = "<config>");
ScenarioConfig load_config(const std::string& path);
// the canonical text rebuilt from the fields
std::string materialize(const ScenarioConfig& cfg);

// "3/2", "-1/4", "golden" or a plain decimal
double parse_scalar(const std::string& text);

CocycleSystem build_cocycle(const ScenarioConfig& cfg);
FlowCocycle build_flow(const ScenarioConfig& cfg);
bool is_flow(const ScenarioConfig& cfg);

}  // namespace domsplit
