#include "crawl/whittle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace crawl {

namespace {
// Keeps ceil() from bumping exact lattice hits to k+1 on rounding noise.
// The log argument u - (1-alpha) x cancels to alpha^k u on the lattice, so
// its relative error grows like eps/alpha^k; 1e-4 absorbs that up to k ~ 35,
// beyond which an off-by-one shifts the index by only ~ alpha^k u.
constexpr double kCeilSlack = 1e-4;
}  // namespace

std::int64_t eta_cap(const SourceParams& p) {
    const double cap =
        std::ceil(std::log(std::numeric_limits<double>::epsilon()) / std::log(p.alpha));
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(cap));
}

std::int64_t eta(double x, const SourceParams& p) {
    const std::int64_t cap = eta_cap(p);
    const double slack = p.u - (1.0 - p.alpha) * x;
    if (slack <= 0.0) return cap;  // x at or above u_star
    const double raw = std::log(slack / p.u) / std::log(p.alpha);
    const auto k = static_cast<std::int64_t>(std::ceil(raw - kCeilSlack));
    return std::clamp<std::int64_t>(k, 1, cap);
}

double whittle_index(double x, const SourceParams& p) {
    const double slack = p.u - (1.0 - p.alpha) * x;
    if (slack <= 0.0) return x / p.cost;  // continuation beyond u_star
    const auto k = static_cast<double>(eta(x, p));
    const double geom = (1.0 - std::pow(p.alpha, k)) / (1.0 - p.alpha) * p.u;
    return (k * ((1.0 - p.alpha) * x - p.u) + geom) / p.cost;
}

double lattice_index(std::int64_t k, const SourceParams& p) {
    if (k < 1) throw std::invalid_argument("lattice_index: k must be >= 1");
    const double xk = lattice_state(k, p);
    return (static_cast<double>(k) * ((1.0 - p.alpha) * xk - p.u) + xk) / p.cost;
}

void whittle_index_batch(std::span<const double> states, const SourceParams& p,
                         std::span<double> out, Exec exec) {
    if (out.size() != states.size())
        throw std::invalid_argument("whittle_index_batch: size mismatch");
    const auto n = static_cast<std::int64_t>(states.size());
    if (exec == Exec::OpenMP) {
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < n; ++i) out[i] = whittle_index(states[i], p);
    } else {
        for (std::int64_t i = 0; i < n; ++i) out[i] = whittle_index(states[i], p);
    }
}

}  // namespace crawl
