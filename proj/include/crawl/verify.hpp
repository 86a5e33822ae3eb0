#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "crawl/exec.hpp"
#include "crawl/model.hpp"

namespace crawl {

struct CheckResult {
    std::string name;    // property, e.g. "value-monotone"
    std::string where;   // offending source / lambda / k, or summary figures
    bool pass = false;
};

struct VerifyTolerances {
    double index_agreement = 1e-6;  // |oracle - closed form| <= max(tol, tol*gamma)
    std::int64_t lattice_k_max = 25;
    double convexity_slack = 1e-8;     // times u_star
    double lipschitz_slack = 1e-6;     // relative on 1/(1-alpha)
    double vanishing_rel = 0.01;       // (1-delta) V(u) vs beta
    std::int64_t sweep_points = 50;
    double delta = 0.99;               // discount for value-property checks
    double delta_vanishing = 0.999;
    std::int64_t grid_n = 2001;
};

/// Runs the per-source verification battery: discounted value-function
/// properties (monotone, convex, Lipschitz), the vanishing-discount match
/// against the exact cycle average, the passive-set sweep structure, and
/// closed-form-vs-oracle index agreement on the lattice.
std::vector<CheckResult> run_verification(const FleetParams& fleet,
                                          const VerifyTolerances& tol,
                                          Exec exec = Exec::OpenMP);

}  // namespace crawl
