#include <cmath>
#include <random>
#include <stdexcept>

#include <doctest.h>

#include "crawl/model.hpp"
#include "table1.hpp"

using namespace crawl;

namespace {
bool close(double a, double b, double rel) {
    return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}
}  // namespace

TEST_CASE("derived constants match the benchmark fleet") {
    const FleetParams fleet = table1::fleet(1.0);
    for (int i = 0; i < 4; ++i) {
        const SourceParams& p = fleet.sources[i];
        CHECK(close(p.alpha, table1::kAlpha[i], 1e-14));
        CHECK(close(p.u, table1::kU[i], 1e-13));
        CHECK(close(p.u_star, table1::kUStar[i], 1e-13));
        // u_star = u / (1 - alpha) = lambda xi / mu, both routes
        CHECK(close(p.u / (1.0 - p.alpha), p.lambda_rate * p.xi_mean / p.mu, 1e-12));
        CHECK(p.u < p.u_star);
        CHECK(p.alpha > 0.0);
        CHECK(p.alpha < 1.0);
    }
    // crawling source 1 every period collects u_1 each time: the reported
    // single-source figure is 179.79
    CHECK(std::abs(fleet.sources[0].u - 179.79) < 0.05);
}

TEST_CASE("large mu*T drives u to u_star") {
    const SourceParams p = make_source(250.0, 1.0, 40.0, 1.0, 1.0);
    CHECK(p.alpha < 1e-17);
    CHECK(close(p.u, p.u_star, 1e-12));
}

TEST_CASE("invalid parameters are rejected") {
    CHECK_THROWS_AS(make_source(250.0, 1.0, 0.0, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(make_source(250.0, 1.0, -0.7, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(make_source(0.0, 1.0, 0.7, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(make_source(250.0, 0.0, 0.7, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(make_source(250.0, 1.0, 0.7, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(make_source(250.0, 1.0, 0.7, 0.0, 1.0), std::invalid_argument);
    // mu*T so small that alpha rounds up to 1
    CHECK_THROWS_AS(make_source(250.0, 1.0, 1e-20, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("fleet validation") {
    auto sources = table1::fleet(1.0).sources;
    CHECK_THROWS_AS(make_fleet(sources, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(make_fleet(sources, 4.5), std::invalid_argument);  // > sum of costs
    CHECK_NOTHROW(make_fleet(sources, 4.0));                          // == sum of costs
    sources[2] = make_source(250.0, 0.2, 0.7, 1.0, 2.0);              // different period
    CHECK_THROWS_AS(make_fleet(sources, 1.0), std::invalid_argument);
}

TEST_CASE("passive and active steps") {
    const FleetParams fleet = table1::fleet(1.0);
    const SourceParams& s1 = fleet.sources[0];

    CHECK(close(passive_step(s1.u_star, s1), s1.u_star, 1e-12));  // fixed point
    CHECK(passive_step(0.0, s1) == s1.u);
    CHECK(close(passive_step(s1.u, s1), table1::kState1AtK2, 1e-12));

    CHECK(active_step(s1) == s1.u);
    CHECK(close(active_step(fleet.sources[1]), 147.66, 1e-4));

    const SourceParams tiny = make_source(250.0, 1e-30, 0.7, 1.0, 1.0);
    CHECK(active_step(tiny) < 1e-25);
}

TEST_CASE("closed-form orbit equals the stepped orbit") {
    std::mt19937_64 rng(20240809);
    std::uniform_real_distribution<double> mu_dist(0.05, 3.0);
    std::uniform_real_distribution<double> xi_dist(0.05, 5.0);
    std::uniform_real_distribution<double> frac(0.0, 2.0);
    for (int rep = 0; rep < 40; ++rep) {
        const SourceParams p = make_source(250.0, xi_dist(rng), mu_dist(rng), 1.0, 1.0);
        const double x0 = frac(rng) * p.u_star;
        double x = x0;
        for (std::int64_t n = 0; n <= 60; ++n) {
            CHECK(close(passive_orbit(x0, n, p), x, 1e-12));
            x = passive_step(x, p);
        }
    }
}

TEST_CASE("passive orbits are monotone toward u_star") {
    const SourceParams p = table1::fleet(1.0).sources[1];
    double x = 0.3 * p.u;  // below the recurrent range
    for (int n = 0; n < 80; ++n) {
        const double next = passive_step(x, p);
        CHECK(next >= x - 1e-12 * p.u_star);
        CHECK(next <= p.u_star * (1.0 + 1e-12));
        x = next;
    }
    x = 1.8 * p.u_star;  // transient above
    for (int n = 0; n < 80; ++n) {
        const double next = passive_step(x, p);
        CHECK(next <= x + 1e-12 * p.u_star);
        CHECK(next >= p.u_star * (1.0 - 1e-12));
        x = next;
    }
}

TEST_CASE("reachable lattice after one crawl") {
    for (const SourceParams& p : table1::fleet(1.0).sources) {
        double x = p.u;  // state right after a crawl
        for (std::int64_t n = 0; n <= 60; ++n) {
            CHECK(close(x, lattice_state(n + 1, p), 1e-12));
            x = passive_step(x, p);
        }
    }
    CHECK_THROWS_AS(lattice_state(0, table1::fleet(1.0).sources[0]), std::invalid_argument);
}
