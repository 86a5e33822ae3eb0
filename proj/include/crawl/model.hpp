#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace crawl {

/// One source of decaying content plus the constants derived from it.
///
/// Content arrives at Poisson rate `lambda_rate`, each item worth `xi_mean`
/// on average and losing value at rate `mu`. With crawl period T:
///
///   alpha  = exp(-mu T)                     per-period decay factor
///   u      = (lambda xi / mu) (1 - alpha)   expected value accrued per period
///   u_star = u / (1 - alpha)                saturation level if never crawled
///
/// The state x of a source is the expected total value of its uncrawled
/// content; crawling collects x and resets the source.
struct SourceParams {
    double lambda_rate = 0.0;  // arrivals per unit time
    double xi_mean = 0.0;      // mean initial value of one item
    double mu = 0.0;           // value decay rate
    double cost = 0.0;         // crawl cost C
    double period = 0.0;       // crawl period T (shared across the fleet)

    // Derived; populated by make_source().
    double alpha = 0.0;
    double u = 0.0;
    double u_star = 0.0;
};

struct DerivedConstants {
    double alpha = 0.0;
    double u = 0.0;
    double u_star = 0.0;
};

/// Computes alpha, u and u_star from the primitive fields. Throws
/// std::invalid_argument unless lambda_rate, xi_mean, mu and period are all
/// strictly positive and mu*period is large enough that alpha < 1.
DerivedConstants derive_constants(const SourceParams& p);

/// Validates and returns a fully derived SourceParams.
SourceParams make_source(double lambda_rate, double xi_mean, double mu,
                         double cost, double period);

/// N sources on a common crawl clock with per-period activation budget M.
struct FleetParams {
    std::vector<SourceParams> sources;
    double period = 1.0;
    double budget = 1.0;  // M

    std::size_t size() const { return sources.size(); }
};

/// Validates 0 < budget <= sum of costs and that all sources share `period`.
FleetParams make_fleet(std::vector<SourceParams> sources, double budget);

/// Passive (no-crawl) transition: x -> alpha x + u. Fixed point u_star.
inline double passive_step(double x, const SourceParams& p) {
    return p.alpha * x + p.u;
}

/// Post-crawl state: the source resets to u regardless of x.
inline double active_step(const SourceParams& p) { return p.u; }

/// n passive steps from x in closed form: alpha^n x + (1 - alpha^n) u_star.
double passive_orbit(double x, std::int64_t n, const SourceParams& p);

/// k-th state reachable after a crawl: x_k = (1 - alpha^k) u_star; x_1 = u.
double lattice_state(std::int64_t k, const SourceParams& p);

}  // namespace crawl
