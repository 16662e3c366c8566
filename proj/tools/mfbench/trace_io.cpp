#include "trace_io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "config.hpp"

namespace mfbench {

std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string trace_to_csv(const std::string& config, const std::vector<mf::IterRecord>& records) {
  std::string out;
  out += kConfigPrefix;
  out += config;
  out += '\n';
  out += kTraceHeader;
  out += '\n';
  for (const auto& r : records) {
    out += std::to_string(r.t);
    for (double v : {r.error, r.sigma_r_core, r.leakage_x, r.leakage_y, r.weak_opt, r.eta_used}) {
      out += ',';
      out += format_full(v);
    }
    out += ',';
    out += std::to_string(r.elapsed_ns);
    out += '\n';
  }
  return out;
}

void write_trace(const std::filesystem::path& path, const std::string& config,
                 const std::vector<mf::IterRecord>& records) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
  f << trace_to_csv(config, records);
  f.close();
  if (!f) throw IoError("failed writing '" + path.string() + "'");
}

namespace {

[[noreturn]] void malformed(const std::string& name, int line, const std::string& why) {
  throw IoError(name + ":" + std::to_string(line) + ": " + why);
}

bool parse_num(const std::string& s, double& out) {
  if (s.empty()) return false;
  errno = 0;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && errno != ERANGE;
}

bool parse_int(const std::string& s, long long& out) {
  if (s.empty()) return false;
  errno = 0;
  char* end = nullptr;
  out = std::strtoll(s.c_str(), &end, 10);
  return end == s.c_str() + s.size() && errno == 0;
}

}  // namespace

TraceFile parse_trace(const std::string& text, const std::string& name) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  TraceFile out;

  auto next = [&]() {
    if (!std::getline(in, line)) return false;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  };

  if (!next()) malformed(name, 1, "empty file");
  const std::string prefix = kConfigPrefix;
  if (line.rfind(prefix, 0) != 0) malformed(name, lineno, "expected '# config: ...' line");
  out.config = line.substr(prefix.size());
  if (!next()) malformed(name, 2, "missing header");
  if (line != kTraceHeader) malformed(name, lineno, "unexpected header '" + line + "'");

  while (next()) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    if (fields.size() != 8) malformed(name, lineno, "expected 8 fields, got " + std::to_string(fields.size()));
    mf::IterRecord r;
    long long t = 0;
    long long ns = 0;
    if (!parse_int(fields[0], t)) malformed(name, lineno, "bad iter '" + fields[0] + "'");
    double* targets[] = {&r.error, &r.sigma_r_core, &r.leakage_x, &r.leakage_y, &r.weak_opt, &r.eta_used};
    for (int i = 0; i < 6; ++i) {
      if (!parse_num(fields[i + 1], *targets[i])) malformed(name, lineno, "bad number '" + fields[i + 1] + "'");
    }
    if (!parse_int(fields[7], ns)) malformed(name, lineno, "bad elapsed_ns '" + fields[7] + "'");
    r.t = static_cast<int>(t);
    r.elapsed_ns = ns;
    if (!out.records.empty() && r.t != out.records.back().t + 1) malformed(name, lineno, "non-consecutive iter");
    out.records.push_back(r);
  }
  return out;
}

TraceFile read_trace(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError(path.string() + ": cannot open for reading");
  std::ostringstream buf;
  buf << f.rdbuf();
  if (f.bad()) throw IoError(path.string() + ": read failed");
  return parse_trace(buf.str(), path.string());
}

}  // namespace mfbench
