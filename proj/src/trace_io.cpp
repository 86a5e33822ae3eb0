#include "crawl/trace_io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace crawl {

namespace {

void append_number(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    out += buf;
}

}  // namespace

void write_trace_csv(const std::filesystem::path& path, const Trace& trace) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open trace file " + path.string());
    std::string buf = "epoch,source,state,index,action,reward\n";
    for (const EpochRecord& rec : trace) {
        for (std::size_t i = 0; i < rec.states.size(); ++i) {
            buf += std::to_string(rec.epoch);
            buf += ',';
            buf += std::to_string(i + 1);
            buf += ',';
            append_number(buf, rec.states[i]);
            buf += ',';
            append_number(buf, rec.indices[i]);
            buf += ',';
            buf += rec.actions[i] ? '1' : '0';
            buf += ',';
            append_number(buf, rec.rewards[i]);
            buf += '\n';
        }
        if (buf.size() > (1u << 20)) {
            file << buf;
            buf.clear();
        }
    }
    file << buf;
    if (!file) throw std::runtime_error("failed writing trace file " + path.string());
}

nlohmann::json summary_to_json(const Summary& summary) {
    nlohmann::json per_source = nlohmann::json::array();
    for (const SourceStats& s : summary.per_source) {
        nlohmann::json hist = nlohmann::json::object();
        for (const auto& [gap, count] : s.intercrawl_histogram)
            hist[std::to_string(gap)] = count;
        per_source.push_back({{"crawl_count", s.crawl_count}, {"intercrawl_histogram", hist}});
    }
    nlohmann::json cycle;
    if (summary.cycle.has_value()) {
        nlohmann::json pattern = nlohmann::json::array();
        for (const ActionVector& row : summary.cycle->pattern) {
            nlohmann::json bits = nlohmann::json::array();
            for (std::uint8_t b : row) bits.push_back(static_cast<int>(b));
            pattern.push_back(bits);
        }
        cycle = {{"period", summary.cycle->period}, {"pattern", pattern}};
    } else {
        cycle = {{"period", nullptr}};
    }
    nlohmann::json out{
        {"horizon", summary.horizon},
        {"warmup", summary.warmup},
        {"average_reward", summary.average_reward},
        {"average_reward_no_warmup", summary.average_reward_no_warmup},
        {"average_cost", summary.average_cost},
        {"per_source", per_source},
        {"cycle", cycle},
        {"budget_clips", summary.budget_clips},
    };
    if (summary.rr_cursor_final.has_value()) out["rr_cursor_final"] = *summary.rr_cursor_final;
    return out;
}

}  // namespace crawl
