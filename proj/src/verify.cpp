#include "crawl/verify.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "crawl/dp_oracle.hpp"
#include "crawl/whittle.hpp"

namespace crawl {

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

void check_value_properties(std::size_t id, const SourceParams& p, const VerifyTolerances& tol,
                            Exec exec, std::vector<CheckResult>& out) {
    const std::string src = "source " + std::to_string(id + 1);
    const SubsidyProblem prob{p, 0.6 * p.u_star / p.cost};
    DiscountedOptions opts;
    opts.grid_n = tol.grid_n;
    opts.tol = 1e-9 * p.u_star;
    opts.exec = exec;
    const ValueFunction vf = solve_discounted(prob, tol.delta, opts);

    const double h = (p.u_star - p.u) / static_cast<double>(tol.grid_n - 1);
    bool monotone = true, convex = true, lipschitz = true;
    std::string detail_m = src, detail_c = src, detail_l = src;
    const double lip_bound = (1.0 + tol.lipschitz_slack) / (1.0 - p.alpha) * h;
    const double convex_floor = -tol.convexity_slack * p.u_star;
    for (std::size_t i = 0; i + 1 < vf.values.size(); ++i) {
        const double d = vf.values[i + 1] - vf.values[i];
        if (d < -1e-9 * p.u_star && monotone) {
            monotone = false;
            detail_m += " drops at x=" + fmt(vf.grid[i]);
        }
        if (std::abs(d) > lip_bound && lipschitz) {
            lipschitz = false;
            detail_l += " slope " + fmt(d / h) + " at x=" + fmt(vf.grid[i]);
        }
        if (i > 0) {
            const double second = vf.values[i + 1] - 2.0 * vf.values[i] + vf.values[i - 1];
            if (second < convex_floor && convex) {
                convex = false;
                detail_c += " second diff " + fmt(second) + " at x=" + fmt(vf.grid[i]);
            }
        }
    }
    out.push_back({"value-monotone", detail_m, monotone});
    out.push_back({"value-convex", detail_c, convex});
    out.push_back({"value-lipschitz", detail_l, lipschitz});

    const double beta = solve_average_lattice(prob).beta;
    DiscountedOptions vopts = opts;
    vopts.tol = 1e-6 * p.u_star;
    const ValueFunction vvf = solve_discounted(prob, tol.delta_vanishing, vopts);
    const double level = (1.0 - tol.delta_vanishing) * vvf.values.front();
    const double rel = std::abs(level - beta) / beta;
    out.push_back({"vanishing-discount",
                   src + " (1-delta)V(u)=" + fmt(level) + " beta=" + fmt(beta) + " rel=" + fmt(rel),
                   rel <= tol.vanishing_rel});
}

void check_sweep(std::size_t id, const SourceParams& p, const VerifyTolerances& tol, Exec exec,
                 std::vector<CheckResult>& out) {
    const std::string src = "source " + std::to_string(id + 1);
    std::vector<double> lambdas(tol.sweep_points);
    const double hi = 2.0 * p.u_star / p.cost;
    for (std::int64_t j = 0; j < tol.sweep_points; ++j)
        lambdas[j] = hi * static_cast<double>(j) / static_cast<double>(tol.sweep_points - 1);
    const auto parts = passive_set_sweep(p, lambdas, tol.delta, tol.grid_n, exec);

    bool intervals = true, monotone = true;
    std::string detail_i = src, detail_m = src;
    for (std::size_t j = 0; j < parts.size(); ++j) {
        if (!parts[j].single_interval() && intervals) {
            intervals = false;
            detail_i += " " + std::to_string(parts[j].sign_changes) +
                        " sign changes at lambda=" + fmt(parts[j].lambda);
        }
        if (j > 0 && parts[j].threshold < parts[j - 1].threshold && monotone) {
            monotone = false;
            detail_m += " threshold drops at lambda=" + fmt(parts[j].lambda);
        }
    }
    const bool ends = parts.front().all_active && parts.back().all_passive;
    out.push_back({"sweep-single-interval", detail_i, intervals});
    out.push_back({"sweep-monotone", detail_m, monotone});
    out.push_back({"sweep-endpoints",
                   src + (ends ? " all-active at 0, all-passive at 2u*/C" : " unexpected end regimes"),
                   ends});
}

void check_index_agreement(std::size_t id, const SourceParams& p, const VerifyTolerances& tol,
                           std::vector<CheckResult>& out) {
    const std::string src = "source " + std::to_string(id + 1);
    double worst = 0.0;
    std::int64_t worst_k = 0;
    bool pass = true;
    for (std::int64_t k = 1; k <= tol.lattice_k_max; ++k) {
        const double closed = whittle_index(lattice_state(k, p), p);
        const double oracle = oracle_index_lattice(k, p, 1e-11);
        const double err = std::abs(closed - oracle);
        if (err > worst) {
            worst = err;
            worst_k = k;
        }
        if (err > std::max(tol.index_agreement, tol.index_agreement * closed)) pass = false;
    }
    out.push_back({"index-agreement",
                   src + " worst |closed-oracle|=" + fmt(worst) + " at k=" + std::to_string(worst_k),
                   pass});
}

}  // namespace

std::vector<CheckResult> run_verification(const FleetParams& fleet, const VerifyTolerances& tol,
                                          Exec exec) {
    std::vector<CheckResult> out;
    for (std::size_t i = 0; i < fleet.size(); ++i) {
        const SourceParams& p = fleet.sources[i];
        check_value_properties(i, p, tol, exec, out);
        check_sweep(i, p, tol, exec, out);
        check_index_agreement(i, p, tol, out);
    }
    return out;
}

}  // namespace crawl
