#pragma once

namespace crawl {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace crawl
