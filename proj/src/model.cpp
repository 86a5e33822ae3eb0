#include "crawl/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace crawl {

DerivedConstants derive_constants(const SourceParams& p) {
    if (!(p.lambda_rate > 0.0))
        throw std::invalid_argument("source: lambda_rate must be > 0");
    if (!(p.xi_mean > 0.0))
        throw std::invalid_argument("source: xi_mean must be > 0");
    if (!(p.mu > 0.0))
        throw std::invalid_argument("source: mu must be > 0");
    if (!(p.period > 0.0))
        throw std::invalid_argument("source: period must be > 0");

    DerivedConstants d;
    d.alpha = std::exp(-p.mu * p.period);
    if (d.alpha >= 1.0)
        throw std::invalid_argument("source: mu*period too small, alpha rounds to 1");
    d.u_star = p.lambda_rate * p.xi_mean / p.mu;
    d.u = d.u_star * (1.0 - d.alpha);
    return d;
}

SourceParams make_source(double lambda_rate, double xi_mean, double mu,
                         double cost, double period) {
    if (!(cost > 0.0))
        throw std::invalid_argument("source: cost must be > 0");
    SourceParams p;
    p.lambda_rate = lambda_rate;
    p.xi_mean = xi_mean;
    p.mu = mu;
    p.cost = cost;
    p.period = period;
    const DerivedConstants d = derive_constants(p);
    p.alpha = d.alpha;
    p.u = d.u;
    p.u_star = d.u_star;
    return p;
}

FleetParams make_fleet(std::vector<SourceParams> sources, double budget) {
    if (sources.empty())
        throw std::invalid_argument("fleet: needs at least one source");
    double total_cost = 0.0;
    const double period = sources.front().period;
    for (const SourceParams& s : sources) {
        if (s.period != period)
            throw std::invalid_argument("fleet: all sources must share one crawl period");
        total_cost += s.cost;
    }
    if (!(budget > 0.0))
        throw std::invalid_argument("fleet: budget must be > 0");
    if (budget > total_cost)
        throw std::invalid_argument(
            "fleet: budget " + std::to_string(budget) +
            " exceeds total crawl cost " + std::to_string(total_cost));
    FleetParams f;
    f.sources = std::move(sources);
    f.period = period;
    f.budget = budget;
    return f;
}

double passive_orbit(double x, std::int64_t n, const SourceParams& p) {
    if (n < 0) throw std::invalid_argument("passive_orbit: n must be >= 0");
    const double an = std::pow(p.alpha, static_cast<double>(n));
    return an * x + (1.0 - an) * p.u_star;
}

double lattice_state(std::int64_t k, const SourceParams& p) {
    if (k < 1) throw std::invalid_argument("lattice_state: k must be >= 1");
    return (1.0 - std::pow(p.alpha, static_cast<double>(k))) * p.u_star;
}

}  // namespace crawl
