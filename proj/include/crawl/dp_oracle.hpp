#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "crawl/exec.hpp"
#include "crawl/model.hpp"

namespace crawl {

/// Single-source control problem with a per-period subsidy for idling:
/// crawling earns the state x, idling earns C * lambda_subsidy.
struct SubsidyProblem {
    SourceParams params;
    double lambda_subsidy = 0.0;
};

/// Value function tabulated on a uniform grid over [u, u_star].
struct ValueFunction {
    std::vector<double> grid;
    std::vector<double> values;
    double beta = 0.0;            // average-reward constant, where applicable
    double residual = 0.0;        // sup-norm Bellman residual of `values`
    std::int64_t iterations = 0;

    /// Piecewise-linear evaluation, clamped to the grid range.
    double at(double x) const;
};

struct DiscountedOptions {
    std::int64_t grid_n = 4001;
    double tol = 1e-9;  // guaranteed sup-norm distance to the grid fixed point
    std::int64_t max_iterations = 5'000'000;
    Exec exec = Exec::OpenMP;
    const ValueFunction* warm_start = nullptr;  // optional initial values, same grid
};

/// Value iteration for the discounted equation
///
///   V(x) = max( C lambda + delta V(alpha x + u),  x + delta V(u) )
///
/// on a uniform grid with linear interpolation of alpha x + u. Iterates the
/// Bellman operator (Jacobi sweeps, serial or OpenMP) until the bracket
/// bounds certify ||V - V*|| <= tol, then applies the midpoint correction.
/// Throws std::runtime_error with the residual if the iteration cap is hit,
/// which signals tol too tight for the requested accuracy.
ValueFunction solve_discounted(const SubsidyProblem& prob, double delta,
                               const DiscountedOptions& opts = {});

/// Average reward of the length-n crawl cycle: idle n-1 periods, then crawl:
///   (C lambda (n-1) + (1 - alpha^n) u_star) / n.
double cycle_average(std::int64_t n, double lambda_subsidy, const SourceParams& p);

struct AveragePolicyValue {
    double beta = 0.0;                        // optimal long-run average reward
    std::optional<std::int64_t> best_period;  // cycle length; nullopt = never crawl
};

/// Exact average-reward solution over the lattice of cyclic policies:
///   beta = max( C lambda, max_{1<=n<=n_max} cycle_average(n) ).
AveragePolicyValue solve_average_lattice(const SubsidyProblem& prob,
                                         std::int64_t n_max = 2000);

/// Subsidy at which cycles of length k and k+1 tie, found by bisection on
/// the cycle averages. Independent reference for the closed-form index on
/// the lattice. Throws std::runtime_error on bracket failure.
double oracle_index_lattice(std::int64_t k, const SourceParams& p,
                            double tol = 1e-11);

struct OracleOptions {
    double delta = 0.9999;        // discount approximating the average problem
    std::int64_t grid_n = 1001;
    double value_tol = 1e-5;      // solve accuracy once the bracket is tight
    double lattice_snap = 1e-9;   // relative snap distance onto lattice states
    // Grids this small do not amortize per-sweep fork/join, so the solves
    // default to the serial kernel.
    Exec exec = Exec::Serial;
};

/// Subsidy at which crawling and idling tie at state x. Lattice states take
/// the cycle-average route; other states bisect the action comparison
/// C lambda + delta V(alpha x + u) vs x + delta V(u) under discounted
/// solves (warm-started across the bisection). Bracket is [0, 2 u_star/C];
/// bracket failure throws, as it would contradict indexability.
double oracle_index(double x, const SourceParams& p, double tol = 1e-9,
                    const OracleOptions& opts = {});

/// Passive/active split of the state space extracted from a solved V.
struct ActivePassivePartition {
    double lambda = 0.0;
    double threshold = 0.0;  // passive on [u, threshold); +inf = all passive
    std::int64_t sign_changes = 0;
    bool all_active = false;
    bool all_passive = false;

    bool single_interval() const { return sign_changes <= 1; }
};

/// Solves the subsidy problem for every lambda (ascending) and extracts the
/// passive-set threshold from each solved value function. Solves are
/// independent and may run in parallel; results are ordered by lambda.
std::vector<ActivePassivePartition> passive_set_sweep(
    const SourceParams& p, std::span<const double> lambdas, double delta,
    std::int64_t grid_n, Exec exec = Exec::OpenMP);

}  // namespace crawl
