#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "domsplit/linalg.hpp"

namespace domsplit {

struct Violation {
    std::string check;
    int trial = 0;
    std::uint64_t seed = 0;
    std::string detail;
    // shrunk instance: matrices and subspace bases in the order the check names them
    std::vector<Matrix> counterexample;
};

struct SuiteResult {
    std::string suite;
    int trials = 0;
    int dim = 0;
    std::uint64_t seed = 0;
    long checks = 0;
    long skipped = 0;  // instances outside a precondition
    std::vector<Violation> violations;
    std::map<std::string, double> measured;  // empirical constants, max over trials
};

const std::vector<std::string>& suite_names();
// dim is the largest ambient dimension drawn; trials run with seeds mixed from seed
SuiteResult run_suite(const std::string& suite, int trials, std::uint64_t seed, int dim);

}  // namespace domsplit
