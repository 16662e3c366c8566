#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mf/diagnostics.hpp"

namespace mfbench {

inline constexpr const char* kTraceHeader = "iter,error,sigma_r_core,leakage_x,leakage_y,weak_opt,eta_used,elapsed_ns";
inline constexpr const char* kConfigPrefix = "# config: ";

struct TraceFile {
  std::string config;  // serialized config from the leading comment line
  std::vector<mf::IterRecord> records;
};

/// "%.17g".
std::string format_full(double v);

std::string trace_to_csv(const std::string& config, const std::vector<mf::IterRecord>& records);
void write_trace(const std::filesystem::path& path, const std::string& config,
                 const std::vector<mf::IterRecord>& records);

/// Throws IoError "<file>:<line>: <reason>" on unreadable or malformed input.
TraceFile read_trace(const std::filesystem::path& path);
TraceFile parse_trace(const std::string& text, const std::string& name);

}  // namespace mfbench
