#pragma once

namespace crawl {

/// Kernel dispatch for the data-parallel paths. Serial is the reference
/// implementation; both variants perform identical per-element arithmetic.
enum class Exec { Serial, OpenMP };

}  // namespace crawl
