#pragma once

#include <filesystem>

#include <json.hpp>

#include "crawl/sim.hpp"

namespace crawl {

/// Writes `epoch,source,state,index,action,reward` rows, one per
/// (epoch, source), with 1-based source ids. Throws std::runtime_error on
/// I/O failure. Output is byte-stable for identical traces.
void write_trace_csv(const std::filesystem::path& path, const Trace& trace);

nlohmann::json summary_to_json(const Summary& summary);

}  // namespace crawl
