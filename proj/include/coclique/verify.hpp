#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "coclique/rational.hpp"

namespace coclique {

struct VerifyOptions {
    uint64_t seed = 20240101;
    int graphs = 100;       // random graphs per edge probability
    int clique_max_n = 12;  // vertex bound for clique differentials
    int quasi_max_n = 10;   // vertex bound for pseudo-clique differentials
    std::vector<double> edge_probs = {0.3, 0.5, 0.8};
    std::vector<Rational> thetas = {{4, 5}, {9, 10}, {1, 1}};
    int threads = 1;
};

struct VerifyResult {
    uint64_t graphs_checked = 0;
    std::vector<std::string> failures;

    bool ok() const { return failures.empty(); }
};

// Differential suite: enumeration modules against the exhaustive subset
// oracles on seeded random graphs.
VerifyResult run_differential_suite(const VerifyOptions& options);

} // namespace coclique
