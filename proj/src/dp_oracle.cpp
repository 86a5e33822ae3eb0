#include "crawl/dp_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <omp.h>

#include "crawl/whittle.hpp"

namespace crawl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct InterpPlan {
    // alpha * grid[i] + u lands between grid[lo[i]] and grid[lo[i]+1] with
    // weight w[i] on the upper point.
    std::vector<std::int64_t> lo;
    std::vector<double> w;
};

InterpPlan plan_passive_interp(const std::vector<double>& grid, const SourceParams& p) {
    const auto n = static_cast<std::int64_t>(grid.size());
    const double h = (grid.back() - grid.front()) / static_cast<double>(n - 1);
    InterpPlan plan;
    plan.lo.resize(n);
    plan.w.resize(n);
    for (std::int64_t i = 0; i < n; ++i) {
        const double y = p.alpha * grid[i] + p.u;
        double pos = (y - grid.front()) / h;
        pos = std::clamp(pos, 0.0, static_cast<double>(n - 1));
        auto lo = static_cast<std::int64_t>(pos);
        lo = std::min(lo, n - 2);
        plan.lo[i] = lo;
        plan.w[i] = pos - static_cast<double>(lo);
    }
    return plan;
}

struct SweepStats {
    double dmin = 0.0;
    double dmax = 0.0;
};

// One Jacobi sweep of the Bellman operator over [first, last); returns
// min/max of TV - V on that range. Shared by the serial and OpenMP drivers
// so both produce identical values.
inline SweepStats bellman_sweep_range(const std::vector<double>& v, std::vector<double>& tv,
                                      const std::vector<double>& grid, const InterpPlan& plan,
                                      double idle_reward, double delta, std::int64_t first,
                                      std::int64_t last) {
    const double v_at_u = v[0];
    double dmin = kInf;
    double dmax = -kInf;
    for (std::int64_t i = first; i < last; ++i) {
        const double vy = v[plan.lo[i]] * (1.0 - plan.w[i]) + v[plan.lo[i] + 1] * plan.w[i];
        const double passive = idle_reward + delta * vy;
        const double active = grid[i] + delta * v_at_u;
        const double out = std::max(passive, active);
        tv[i] = out;
        const double d = out - v[i];
        dmin = std::min(dmin, d);
        dmax = std::max(dmax, d);
    }
    return {dmin, dmax};
}

struct IterationResult {
    SweepStats last;
    std::int64_t iters = 0;
    bool converged = false;
};

// Iterates until the bracket certificate amplify * span(TV - V) <= tol.
IterationResult iterate_serial(std::vector<double>& v, std::vector<double>& next,
                               const std::vector<double>& grid, const InterpPlan& plan,
                               double idle_reward, double delta, double amplify, double tol,
                               std::int64_t max_iterations) {
    const auto n = static_cast<std::int64_t>(grid.size());
    IterationResult result;
    while (true) {
        result.last = bellman_sweep_range(v, next, grid, plan, idle_reward, delta, 0, n);
        v.swap(next);
        ++result.iters;
        if (amplify * (result.last.dmax - result.last.dmin) <= tol) {
            result.converged = true;
            return result;
        }
        if (result.iters >= max_iterations) return result;
    }
}

// Same iteration with one persistent parallel region; each sweep is an
// `omp for` with the min/max merged across threads, so the arithmetic and
// the iteration count match the serial driver exactly.
IterationResult iterate_openmp(std::vector<double>& v, std::vector<double>& next,
                               const std::vector<double>& grid, const InterpPlan& plan,
                               double idle_reward, double delta, double amplify, double tol,
                               std::int64_t max_iterations) {
    const auto n = static_cast<std::int64_t>(grid.size());
    IterationResult result;
    struct alignas(64) Slot {
        SweepStats stats;
    };
    std::vector<Slot> slots[2];
    slots[0].resize(static_cast<std::size_t>(omp_get_max_threads()));
    slots[1].resize(static_cast<std::size_t>(omp_get_max_threads()));
    bool final_in_next = false;
#pragma omp parallel
    {
        const std::int64_t nth = omp_get_num_threads();
        const std::int64_t tid = omp_get_thread_num();
        const std::int64_t chunk = (n + nth - 1) / nth;
        const std::int64_t first = std::min(tid * chunk, n);
        const std::int64_t last = std::min(first + chunk, n);

        // Every thread replays the merge and bookkeeping identically, so one
        // barrier per sweep is the only synchronization point. Slot arrays
        // alternate by sweep parity so the next sweep's stats never overwrite
        // slots a slower thread is still merging.
        std::vector<double>* src = &v;
        std::vector<double>* dst = &next;
        std::int64_t iters = 0;
        for (;;) {
            std::vector<Slot>& sweep_slots = slots[iters & 1];
            sweep_slots[tid].stats =
                bellman_sweep_range(*src, *dst, grid, plan, idle_reward, delta, first, last);
#pragma omp barrier
            SweepStats merged{kInf, -kInf};
            for (std::int64_t t = 0; t < nth; ++t) {
                merged.dmin = std::min(merged.dmin, sweep_slots[t].stats.dmin);
                merged.dmax = std::max(merged.dmax, sweep_slots[t].stats.dmax);
            }
            std::swap(src, dst);
            ++iters;
            const bool converged = amplify * (merged.dmax - merged.dmin) <= tol;
            if (converged || iters >= max_iterations) {
                if (tid == 0) {
                    result.last = merged;
                    result.iters = iters;
                    result.converged = converged;
                    final_in_next = src == &next;
                }
                break;
            }
        }
    }
    if (final_in_next) v.swap(next);
    return result;
}

void validate_problem(const SubsidyProblem& prob) {
    const SourceParams& p = prob.params;
    if (!(p.alpha > 0.0 && p.alpha < 1.0 && p.u > 0.0 && p.u_star > p.u && p.cost > 0.0))
        throw std::invalid_argument("subsidy problem: params not derived or invalid");
}

}  // namespace

double ValueFunction::at(double x) const {
    const auto n = static_cast<std::int64_t>(grid.size());
    if (n == 0) throw std::logic_error("ValueFunction::at on empty grid");
    if (x <= grid.front()) return values.front();
    if (x >= grid.back()) return values.back();
    const double h = (grid.back() - grid.front()) / static_cast<double>(n - 1);
    double pos = (x - grid.front()) / h;
    auto lo = std::min(static_cast<std::int64_t>(pos), n - 2);
    const double w = pos - static_cast<double>(lo);
    return values[lo] * (1.0 - w) + values[lo + 1] * w;
}

ValueFunction solve_discounted(const SubsidyProblem& prob, double delta,
                               const DiscountedOptions& opts) {
    validate_problem(prob);
    if (!(delta >= 0.0 && delta < 1.0))
        throw std::invalid_argument("solve_discounted: delta must lie in [0, 1)");
    if (opts.grid_n < 2)
        throw std::invalid_argument("solve_discounted: grid_n must be >= 2");
    if (!(opts.tol > 0.0))
        throw std::invalid_argument("solve_discounted: tol must be > 0");

    const SourceParams& p = prob.params;
    const auto n = opts.grid_n;

    ValueFunction vf;
    vf.grid.resize(n);
    const double h = (p.u_star - p.u) / static_cast<double>(n - 1);
    for (std::int64_t i = 0; i < n; ++i)
        vf.grid[i] = p.u + h * static_cast<double>(i);
    vf.grid.back() = p.u_star;

    if (opts.warm_start != nullptr) {
        const ValueFunction& ws = *opts.warm_start;
        if (ws.values.size() != static_cast<std::size_t>(n) || ws.grid.size() != static_cast<std::size_t>(n) ||
            ws.grid.front() != vf.grid.front() || ws.grid.back() != vf.grid.back())
            throw std::invalid_argument("solve_discounted: warm start grid mismatch");
        vf.values = ws.values;
    } else {
        vf.values.assign(n, 0.0);
    }

    const InterpPlan plan = plan_passive_interp(vf.grid, p);
    const double idle_reward = p.cost * prob.lambda_subsidy;
    const double amplify = delta / std::max(1.0 - delta, std::numeric_limits<double>::min());

    // Bracket bounds: V* lies within [TV + amplify*dmin, TV + amplify*dmax],
    // so the midpoint correction leaves at most amplify*span/2 <= tol/2.
    std::vector<double> next(n);
    const IterationResult result =
        opts.exec == Exec::OpenMP
            ? iterate_openmp(vf.values, next, vf.grid, plan, idle_reward, delta, amplify,
                             opts.tol, opts.max_iterations)
            : iterate_serial(vf.values, next, vf.grid, plan, idle_reward, delta, amplify,
                             opts.tol, opts.max_iterations);
    if (!result.converged)
        throw std::runtime_error(
            "solve_discounted: no convergence after " + std::to_string(result.iters) +
            " iterations, residual " +
            std::to_string(std::max(std::abs(result.last.dmin), std::abs(result.last.dmax))) +
            " (tol too tight for this grid/discount)");
    const double correction = amplify * 0.5 * (result.last.dmax + result.last.dmin);
    for (double& v : vf.values) v += correction;

    const SweepStats res = bellman_sweep_range(vf.values, next, vf.grid, plan, idle_reward,
                                               delta, 0, static_cast<std::int64_t>(n));
    vf.residual = std::max(std::abs(res.dmin), std::abs(res.dmax));
    vf.iterations = result.iters;
    return vf;
}

double cycle_average(std::int64_t n, double lambda_subsidy, const SourceParams& p) {
    if (n < 1) throw std::invalid_argument("cycle_average: n must be >= 1");
    const double nd = static_cast<double>(n);
    const double collected = (1.0 - std::pow(p.alpha, nd)) * p.u_star;
    return (p.cost * lambda_subsidy * (nd - 1.0) + collected) / nd;
}

AveragePolicyValue solve_average_lattice(const SubsidyProblem& prob, std::int64_t n_max) {
    validate_problem(prob);
    if (n_max < 1) throw std::invalid_argument("solve_average_lattice: n_max must be >= 1");
    const SourceParams& p = prob.params;
    double best = -kInf;
    std::int64_t best_n = 1;
    for (std::int64_t n = 1; n <= n_max; ++n) {
        const double v = cycle_average(n, prob.lambda_subsidy, p);
        if (v > best) {
            best = v;
            best_n = n;
        }
    }
    const double never = p.cost * prob.lambda_subsidy;
    if (never > best) return {never, std::nullopt};
    return {best, best_n};
}

double oracle_index_lattice(std::int64_t k, const SourceParams& p, double tol) {
    if (k < 1) throw std::invalid_argument("oracle_index_lattice: k must be >= 1");
    if (!(tol > 0.0)) throw std::invalid_argument("oracle_index_lattice: tol must be > 0");
    // Subsidy gain per period grows with the cycle length, so
    // g(lambda) = avg(k+1) - avg(k) is increasing and brackets the tie.
    const auto g = [&](double lambda) {
        return cycle_average(k + 1, lambda, p) - cycle_average(k, lambda, p);
    };
    double lo = 0.0;
    double hi = 2.0 * p.u_star / p.cost;
    if (!(g(lo) < 0.0 && g(hi) > 0.0))
        throw std::runtime_error("oracle_index_lattice: bracket failure at k=" + std::to_string(k));
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (g(mid) > 0.0)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

double oracle_index(double x, const SourceParams& p, double tol, const OracleOptions& opts) {
    validate_problem({p, 0.0});
    if (!(x >= p.u && x < p.u_star))
        throw std::invalid_argument("oracle_index: x must lie in [u, u_star)");
    if (!(tol > 0.0)) throw std::invalid_argument("oracle_index: tol must be > 0");

    const std::int64_t k = eta(x, p);
    if (std::abs(x - lattice_state(k, p)) <= opts.lattice_snap * p.u_star)
        return oracle_index_lattice(k, p, tol);

    // Off-lattice: bisect the action comparison under a discounted solve.
    DiscountedOptions dopts;
    dopts.grid_n = opts.grid_n;
    dopts.exec = opts.exec;
    ValueFunction solved;
    bool have_solved = false;
    const double y = p.alpha * x + p.u;
    // While the bracket is wide only the sign of g matters, so the solve
    // tolerance tracks the bracket width.
    const auto g = [&](double lambda, double width) {
        dopts.tol = std::clamp(0.02 * p.cost * width, opts.value_tol, 0.05 * p.u_star);
        dopts.warm_start = have_solved ? &solved : nullptr;
        solved = solve_discounted({p, lambda}, opts.delta, dopts);
        have_solved = true;
        const double passive = p.cost * lambda + opts.delta * solved.at(y);
        const double active = x + opts.delta * solved.values.front();
        return passive - active;
    };
    double lo = 0.0;
    double hi = 2.0 * p.u_star / p.cost;
    if (!(g(lo, hi - lo) < 0.0))
        throw std::runtime_error("oracle_index: lower bracket not active at x=" + std::to_string(x));
    if (!(g(hi, hi - lo) > 0.0))
        throw std::runtime_error("oracle_index: upper bracket not passive at x=" + std::to_string(x));
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (g(mid, hi - lo) > 0.0)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

namespace {

ActivePassivePartition extract_partition(const ValueFunction& vf, const SubsidyProblem& prob,
                                         double delta) {
    const SourceParams& p = prob.params;
    const auto n = static_cast<std::int64_t>(vf.grid.size());
    const double idle = p.cost * prob.lambda_subsidy;
    ActivePassivePartition part;
    part.lambda = prob.lambda_subsidy;
    bool prev_passive = false;
    std::int64_t first_active = -1;
    bool any_active = false;
    bool any_passive = false;
    for (std::int64_t i = 0; i < n; ++i) {
        const double y = p.alpha * vf.grid[i] + p.u;
        const bool passive = idle + delta * vf.at(y) > vf.grid[i] + delta * vf.values.front();
        if (i > 0 && passive != prev_passive) ++part.sign_changes;
        if (passive)
            any_passive = true;
        else {
            any_active = true;
            if (first_active < 0) first_active = i;
        }
        prev_passive = passive;
    }
    part.all_active = !any_passive;
    part.all_passive = !any_active;
    if (!any_passive)
        part.threshold = vf.grid.front();  // B empty
    else if (!any_active)
        part.threshold = kInf;
    else
        part.threshold = vf.grid[first_active];
    return part;
}

}  // namespace

std::vector<ActivePassivePartition> passive_set_sweep(const SourceParams& p,
                                                      std::span<const double> lambdas,
                                                      double delta, std::int64_t grid_n,
                                                      Exec exec) {
    for (std::size_t j = 1; j < lambdas.size(); ++j)
        if (lambdas[j] < lambdas[j - 1])
            throw std::invalid_argument("passive_set_sweep: lambdas must be ascending");

    const auto m = static_cast<std::int64_t>(lambdas.size());
    std::vector<ActivePassivePartition> out(m);
    DiscountedOptions dopts;
    dopts.grid_n = grid_n;
    dopts.tol = 1e-9;
    dopts.exec = Exec::Serial;  // solves are the unit of parallelism here

    if (exec == Exec::OpenMP) {
#pragma omp parallel for schedule(dynamic) firstprivate(dopts)
        for (std::int64_t j = 0; j < m; ++j) {
            const SubsidyProblem prob{p, lambdas[j]};
            const ValueFunction vf = solve_discounted(prob, delta, dopts);
            out[j] = extract_partition(vf, prob, delta);
        }
    } else {
        for (std::int64_t j = 0; j < m; ++j) {
            const SubsidyProblem prob{p, lambdas[j]};
            const ValueFunction vf = solve_discounted(prob, delta, dopts);
            out[j] = extract_partition(vf, prob, delta);
        }
    }
    return out;
}

}  // namespace crawl
