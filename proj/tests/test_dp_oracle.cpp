#include <stdexcept>
#include <cmath>
#include <vector>

#include <doctest.h>

#include "crawl/dp_oracle.hpp"
#include "crawl/whittle.hpp"
#include "table1.hpp"

using namespace crawl;

namespace {

bool close(double a, double b, double rel) {
    return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

std::vector<double> linspace(double lo, double hi, std::int64_t n) {
    std::vector<double> out(n);
    for (std::int64_t i = 0; i < n; ++i)
        out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return out;
}

}  // namespace

TEST_CASE("delta = 0 reduces to the one-step problem") {
    const SourceParams& p = table1::fleet(1.0).sources[0];
    const double lambda = 0.7 * p.u_star / p.cost;  // max bites both branches
    DiscountedOptions opts;
    opts.grid_n = 501;
    const ValueFunction vf = solve_discounted({p, lambda}, 0.0, opts);
    for (std::size_t i = 0; i < vf.grid.size(); ++i)
        CHECK(vf.values[i] == std::max(p.cost * lambda, vf.grid[i]));
    CHECK(vf.residual == 0.0);
}

TEST_CASE("very negative subsidy makes crawling always optimal") {
    const SourceParams& p = table1::fleet(1.0).sources[1];
    const double delta = 0.9;
    DiscountedOptions opts;
    opts.grid_n = 1001;
    opts.tol = 1e-9 * p.u_star;
    const ValueFunction vf = solve_discounted({p, -p.u_star / p.cost}, delta, opts);
    CHECK(close(vf.values.front(), p.u / (1.0 - delta), 1e-9));
    for (std::size_t i = 0; i < vf.grid.size(); ++i)
        CHECK(close(vf.values[i], vf.grid[i] + delta * p.u / (1.0 - delta), 1e-9));
}

TEST_CASE("large subsidy makes idling always optimal") {
    const SourceParams& p = table1::fleet(1.0).sources[0];
    const double delta = 0.99;
    const double lambda = 2.0 * p.u_star / p.cost;
    DiscountedOptions opts;
    opts.grid_n = 1001;
    opts.tol = 1e-9 * p.u_star;
    const ValueFunction vf = solve_discounted({p, lambda}, delta, opts);
    for (double v : vf.values) CHECK(close(v, p.cost * lambda / (1.0 - delta), 1e-9));

    const std::vector<double> one{lambda};
    const auto parts = passive_set_sweep(p, one, delta, 501);
    CHECK(parts.front().all_passive);
}

TEST_CASE("solved value functions are monotone, convex and Lipschitz") {
    for (const SourceParams& p : table1::fleet(1.0).sources) {
        for (double delta : {0.9, 0.99}) {
            DiscountedOptions opts;
            opts.grid_n = 2001;
            opts.tol = 1e-9 * p.u_star;
            const ValueFunction vf = solve_discounted({p, 0.6 * p.u_star / p.cost}, delta, opts);
            const double h = (p.u_star - p.u) / 2000.0;
            const double lip = h / (1.0 - p.alpha) * (1.0 + 1e-6);
            for (std::size_t i = 0; i + 1 < vf.values.size(); ++i) {
                const double d = vf.values[i + 1] - vf.values[i];
                CHECK(d >= -1e-9 * p.u_star);
                CHECK(std::abs(d) <= lip);
                if (i > 0) {
                    const double second = vf.values[i + 1] - 2 * vf.values[i] + vf.values[i - 1];
                    CHECK(second >= -1e-8 * p.u_star);
                }
            }
        }
    }
}

TEST_CASE("two starting points land on the same fixed point") {
    const SourceParams& p = table1::fleet(1.0).sources[0];
    const double tol = 1e-8;
    DiscountedOptions opts;
    opts.grid_n = 1001;
    opts.tol = tol;
    const SubsidyProblem prob{p, 180.0};
    const ValueFunction a = solve_discounted(prob, 0.99, opts);

    ValueFunction start = a;
    for (double& v : start.values) v = 5e5;
    opts.warm_start = &start;
    const ValueFunction b = solve_discounted(prob, 0.99, opts);
    for (std::size_t i = 0; i < a.values.size(); ++i)
        CHECK(std::abs(a.values[i] - b.values[i]) <= 10.0 * tol);
}

TEST_CASE("warm start grid mismatch is rejected") {
    const SourceParams& p = table1::fleet(1.0).sources[0];
    DiscountedOptions opts;
    opts.grid_n = 501;
    const ValueFunction a = solve_discounted({p, 10.0}, 0.9, opts);
    opts.grid_n = 601;
    opts.warm_start = &a;
    CHECK_THROWS_AS((solve_discounted({p, 10.0}, 0.9, opts)), std::invalid_argument);
}

TEST_CASE("vanishing discount approaches the exact cycle average") {
    for (const SourceParams& p : table1::fleet(1.0).sources) {
        const SubsidyProblem prob{p, 0.6 * p.u_star / p.cost};
        const double beta = solve_average_lattice(prob).beta;
        double prev_err = 1e100;
        for (double delta : {0.9, 0.99, 0.999}) {
            DiscountedOptions opts;
            opts.grid_n = 2001;
            opts.tol = 1e-6 * p.u_star;
            const ValueFunction vf = solve_discounted(prob, delta, opts);
            const double err = std::abs((1.0 - delta) * vf.values.front() - beta) / beta;
            CHECK(err < prev_err);
            prev_err = err;
        }
        CHECK(prev_err <= 0.01);
    }
}

TEST_CASE("cycle averages: zero subsidy, tie subsidy, huge subsidy") {
    const SourceParams& p = table1::fleet(1.0).sources[1];

    const AveragePolicyValue at_zero = solve_average_lattice({p, 0.0});
    CHECK(close(at_zero.beta, p.u, 1e-12));
    CHECK(at_zero.best_period == 1);
    double brute = 0.0;
    for (std::int64_t n = 1; n <= 500; ++n) brute = std::max(brute, cycle_average(n, 0.0, p));
    CHECK(close(at_zero.beta, brute, 1e-12));

    const double tie = (1.0 - p.alpha) * p.u / p.cost;  // gamma at x = u
    CHECK(close(cycle_average(1, tie, p), cycle_average(2, tie, p), 1e-12));
    CHECK(close(solve_average_lattice({p, tie}).beta, p.u, 1e-12));

    const AveragePolicyValue at_huge = solve_average_lattice({p, 1e9});
    CHECK(at_huge.beta == p.cost * 1e9);
    CHECK(!at_huge.best_period.has_value());

    const double above = 1.5 * p.u_star / p.cost;
    CHECK(solve_average_lattice({p, above}).beta == p.cost * above);
    CHECK(!solve_average_lattice({p, above}).best_period.has_value());
}

TEST_CASE("lattice oracle reproduces the closed form") {
    const FleetParams fleet = table1::fleet(1.0);
    CHECK(close(oracle_index_lattice(1, fleet.sources[0]), table1::kIndexAtU[0], 1e-9));
    for (const SourceParams& p : fleet.sources) {
        for (std::int64_t k = 1; k <= 25; ++k) {
            const double closed = whittle_index(lattice_state(k, p), p);
            const double oracle = oracle_index_lattice(k, p);
            CHECK(std::abs(closed - oracle) <= std::max(1e-6, 1e-6 * closed));
        }
    }
}

TEST_CASE("doubling the cost halves the oracle index") {
    const SourceParams base = make_source(250.0, 0.2, 0.7, 1.0, 1.0);
    const SourceParams doubled = make_source(250.0, 0.2, 0.7, 2.0, 1.0);
    for (std::int64_t k : {1, 3, 8}) {
        const double a = oracle_index_lattice(k, base);
        const double b = oracle_index_lattice(k, doubled);
        CHECK(close(2.0 * b, a, 1e-7));
    }
}

TEST_CASE("oracle_index routes lattice states through the cycle ties") {
    const FleetParams fleet = table1::fleet(1.0);
    const SourceParams& s1 = fleet.sources[0];
    const SourceParams& s2 = fleet.sources[1];
    CHECK(close(oracle_index(s1.u, s1, 1e-9), whittle_index(s1.u, s1), 1e-7));
    const double x3 = lattice_state(3, s2);
    CHECK(close(oracle_index(x3, s2, 1e-9), whittle_index(x3, s2), 1e-6));
    CHECK_THROWS_AS(oracle_index(0.5 * s1.u, s1, 1e-9), std::invalid_argument);
    CHECK_THROWS_AS(oracle_index(s1.u_star, s1, 1e-9), std::invalid_argument);
}

TEST_CASE("off-lattice oracle agrees with the closed form under discounting") {
    const SourceParams& p = table1::fleet(1.0).sources[0];
    const double x = 0.5 * (p.u + p.u_star);  // between lattice points 1 and 2
    const double closed = whittle_index(x, p);
    OracleOptions opts;
    const double oracle = oracle_index(x, p, 5e-4 * closed, opts);
    CHECK(std::abs(oracle - closed) <= 2e-3 * closed);
}

TEST_CASE("passive sets grow with the subsidy as one interval") {
    for (const SourceParams& p : table1::fleet(1.0).sources) {
        const auto lambdas = linspace(0.0, 2.0 * p.u_star / p.cost, 21);
        const auto parts = passive_set_sweep(p, lambdas, 0.99, 1501);
        REQUIRE(parts.size() == lambdas.size());
        CHECK(parts.front().all_active);
        CHECK(parts.back().all_passive);
        for (std::size_t j = 0; j < parts.size(); ++j) {
            CHECK(parts[j].single_interval());
            if (j > 0) CHECK(parts[j].threshold >= parts[j - 1].threshold);
        }
    }
}

TEST_CASE("sweep regimes straddle the index range") {
    const SourceParams& p = table1::fleet(1.0).sources[0];
    const double gamma_u = whittle_index(p.u, p);
    const std::vector<double> lambdas{0.9 * gamma_u, 0.6 * p.u_star / p.cost,
                                      1.1 * p.u_star / p.cost};
    const auto parts = passive_set_sweep(p, lambdas, 0.99, 2001);
    CHECK(parts[0].all_active);  // below the smallest index
    CHECK(!parts[1].all_active);
    CHECK(!parts[1].all_passive);
    CHECK(parts[1].threshold > p.u);
    CHECK(parts[1].threshold < p.u_star);
    CHECK(parts[2].all_passive);  // above the largest index
}

TEST_CASE("sweep results are identical serial and parallel") {
    const SourceParams& p = table1::fleet(1.0).sources[2];
    const auto lambdas = linspace(0.0, 2.0 * p.u_star / p.cost, 9);
    const auto serial = passive_set_sweep(p, lambdas, 0.99, 801, Exec::Serial);
    const auto parallel = passive_set_sweep(p, lambdas, 0.99, 801, Exec::OpenMP);
    REQUIRE(serial.size() == parallel.size());
    for (std::size_t j = 0; j < serial.size(); ++j) {
        CHECK(serial[j].threshold == parallel[j].threshold);
        CHECK(serial[j].sign_changes == parallel[j].sign_changes);
    }
}

TEST_CASE("unsorted lambdas and bad options are rejected") {
    const SourceParams& p = table1::fleet(1.0).sources[0];
    const std::vector<double> bad{1.0, 0.5};
    CHECK_THROWS_AS(passive_set_sweep(p, bad, 0.99, 501), std::invalid_argument);
    DiscountedOptions opts;
    CHECK_THROWS_AS((solve_discounted({p, 0.0}, 1.0, opts)), std::invalid_argument);
    CHECK_THROWS_AS((solve_discounted({p, 0.0}, -0.1, opts)), std::invalid_argument);
    opts.grid_n = 1;
    CHECK_THROWS_AS((solve_discounted({p, 0.0}, 0.9, opts)), std::invalid_argument);
    CHECK_THROWS_AS((solve_average_lattice({p, 0.0}, 0)), std::invalid_argument);
    CHECK_THROWS_AS(oracle_index_lattice(0, p), std::invalid_argument);
}

TEST_CASE("iteration cap reports non-convergence") {
    const SourceParams& p = table1::fleet(1.0).sources[0];
    DiscountedOptions opts;
    opts.grid_n = 501;
    opts.tol = 1e-12;
    opts.max_iterations = 3;
    CHECK_THROWS_AS((solve_discounted({p, 100.0}, 0.999, opts)), std::runtime_error);
}

TEST_CASE("serial and OpenMP Bellman solves are bit-identical") {
    const SourceParams& p = table1::fleet(1.0).sources[1];
    DiscountedOptions opts;
    opts.grid_n = 2001;
    opts.tol = 1e-9 * p.u_star;
    opts.exec = Exec::Serial;
    const ValueFunction a = solve_discounted({p, 300.0}, 0.99, opts);
    opts.exec = Exec::OpenMP;
    const ValueFunction b = solve_discounted({p, 300.0}, 0.99, opts);
    CHECK(a.values == b.values);
    CHECK(a.iterations == b.iterations);
}
