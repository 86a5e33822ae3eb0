#pragma once

#include <cstdint>
#include <span>

#include "crawl/exec.hpp"
#include "crawl/model.hpp"

namespace crawl {

/// Largest hitting time resolvable in double precision,
/// ceil(log_alpha(machine epsilon)); eta() never returns more.
std::int64_t eta_cap(const SourceParams& p);

/// Number of periods a freshly crawled source needs to climb back to x:
///
///   eta(x) = ceil( log_alpha( (u - (1-alpha) x) / u ) ),  clamped to [1, eta_cap]
///
/// On the reachable lattice x_k = (1 - alpha^k) u_star this is exactly k.
/// States at or above u_star (log argument <= 0) return the cap.
std::int64_t eta(double x, const SourceParams& p);

/// Closed-form crawl priority:
///
///   gamma(x) = [ eta(x) ((1-alpha) x - u) + (1 - alpha^eta(x)) u / (1-alpha) ] / C
///
/// extended with gamma(x) = x / C for x >= u_star, which is the monotone
/// continuation of the limit u_star / C. Nondecreasing in x, positive on
/// (0, inf), and bounded by u_star / C on [0, u_star].
double whittle_index(double x, const SourceParams& p);

/// The same priority on the lattice x_k, via the simplified form
/// gamma(x_k) = [ k ((1-alpha) x_k - u) + x_k ] / C. Agrees with
/// whittle_index(lattice_state(k)) to rounding error.
double lattice_index(std::int64_t k, const SourceParams& p);

/// Evaluates whittle_index over a batch of states. Serial and OpenMP paths
/// perform identical arithmetic per element.
void whittle_index_batch(std::span<const double> states, const SourceParams& p,
                         std::span<double> out, Exec exec = Exec::OpenMP);

}  // namespace crawl
