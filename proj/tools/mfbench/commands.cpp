#include "commands.hpp"

#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include "mf/initialization.hpp"
#include "mf/nora.hpp"
#include "trace_io.hpp"

namespace mfbench {

namespace fs = std::filesystem;

ExperimentConfig nora_defaults() {
  ExperimentConfig c;
  c.label = "nora";
  c.task = Task::nora;
  c.kind = mf::Kind::asymmetric;
  c.m = 32;
  c.n = 32;
  c.spectrum = "list:2,1.5,1,0.5";
  c.r = 4;
  c.xi = 0.1;
  c.lambda = 1e-6;
  c.schedule = "fixed:0.5";
  c.max_iters = 500;
  return c;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<std::pair<std::string, std::string>> read_config_file(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError(path.string() + ": cannot open for reading");
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ';')) {
      item = trim(item);
      if (item.empty()) continue;
      const auto eq = item.find('=');
      if (eq == std::string::npos) {
        throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected key=value, got '" + item + "'");
      }
      std::string key = trim(item.substr(0, eq));
      if (!is_known_key(key)) {
        throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": unknown config key '" + key + "'");
      }
      out.emplace_back(std::move(key), trim(item.substr(eq + 1)));
    }
  }
  return out;
}

std::vector<ExperimentConfig> assemble(const RunRequest& request, const ExperimentConfig& defaults) {
  std::vector<ExperimentConfig> arms =
      request.preset ? expand_preset(*request.preset, request.scale) : std::vector<ExperimentConfig>{defaults};
  if (!request.preset && request.scale == Scale::paper && defaults.task == Task::factorize) {
    for (auto& c : arms) c.m = c.n = scale_dim(Scale::paper);
  }
  std::vector<std::pair<std::string, std::string>> sets;
  if (request.config_file) sets = read_config_file(*request.config_file);
  sets.insert(sets.end(), request.sets.begin(), request.sets.end());
  bool r_given = false;
  for (const auto& [key, value] : sets) {
    if (key == "r") r_given = true;
  }

  for (auto& c : arms) {
    for (const auto& [key, value] : sets) set_key(c, key, value);
    if (request.regime) {
      const auto r_a = static_cast<int>(mf::parse_spectrum(c.spectrum).size());
      int r = r_a;
      if (*request.regime == mf::Regime::op) r = 3 * r_a;
      if (*request.regime == mf::Regime::up) r = std::max(1, r_a / 2);
      if (r_given && c.r != r) {
        throw ConfigError("invalid value for key 'r': " + std::to_string(c.r) + " conflicts with --regime " +
                          std::string(mf::to_string(*request.regime)));
      }
      c.r = r;
    }
    validate(c);
  }
  std::set<std::string> labels;
  for (const auto& c : arms) {
    if (!labels.insert(c.label).second) throw ConfigError("duplicate label '" + c.label + "'");
  }
  return arms;
}

std::string run_id_for(const ExperimentConfig& c, std::uint64_t seed) {
  return c.label + "-s" + std::to_string(seed);
}

RunResult execute(const ExperimentConfig& c, std::uint64_t seed, const std::string& id_prefix) {
  RunResult res;
  res.config = c;
  res.config.seed = seed;
  res.config.repeats = 1;
  res.run_id = id_prefix + run_id_for(c, seed);
  try {
    if (c.task == Task::nora) {
      const auto lf = build_nora_problem(c, seed);
      res.problem = mf::make_problem(lf.a_eff(), lf.r, mf::Kind::asymmetric);
      res.trace = mf::nora::run_nora(lf, nora_config(c, seed), c.variant);
    } else {
      res.problem = build_problem(c, seed);
      const mf::InitResult init = mf::initialize(res.problem, init_spec(c, seed));
      res.trace = mf::run(res.problem, init, solver_config(c, res.problem));
    }
  } catch (const mf::InvalidArgument& e) {
    throw ConfigError(std::string("invalid experiment: ") + e.what());
  }
  res.trace.config = serialize(res.config);
  res.verdict = evaluate(res.config, res.problem, res.trace.records, res.trace.termination, res.run_id);
  return res;
}

namespace {

void ensure_dir(const fs::path& out) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec || !fs::is_directory(out)) throw IoError("cannot create output directory '" + out.string() + "'");
}

std::string final_value(const mf::Trace& t, bool weak) {
  if (t.records.empty()) return "na";
  return format_full(weak ? t.records.back().weak_opt : t.records.back().error);
}

void log_result(std::ostream& log, const RunResult& r) {
  log << r.run_id << ": " << mf::to_string(r.verdict.rate.verdict) << " (" << mf::to_string(r.trace.termination)
      << ", " << r.trace.records.size() << " records, final error " << final_value(r.trace, false)
      << ", final weak_opt " << final_value(r.trace, true) << ")\n";
}

}  // namespace

int cmd_run(const std::vector<ExperimentConfig>& configs, const fs::path& out, std::ostream& log) {
  ensure_dir(out);
  std::vector<Verdict> verdicts;
  for (const auto& c : configs) {
    for (int i = 0; i < c.repeats; ++i) {
      const RunResult r = execute(c, repeat_seed(c, i));
      write_trace(out / (r.run_id + ".csv"), r.trace.config, r.trace.records);
      verdicts.push_back(r.verdict);
      log_result(log, r);
    }
  }
  write_verdicts(out / "verdicts.csv", verdicts);
  return 0;
}

GridAxis parse_grid_axis(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos) throw ConfigError("grid axis '" + spec + "' must look like key=v1,v2");
  GridAxis axis;
  axis.key = trim(spec.substr(0, eq));
  for (char& ch : axis.key) {
    if (ch == '-') ch = '_';
  }
  if (axis.key != "eta" && !is_known_key(axis.key)) throw ConfigError("unknown grid key '" + axis.key + "'");
  if (axis.key == "label" || axis.key == "repeats" || axis.key == "task") {
    throw ConfigError("key '" + axis.key + "' cannot be swept");
  }
  const std::string body = spec.substr(eq + 1);
  const char sep = body.find('|') != std::string::npos ? '|' : ',';
  std::stringstream ss(body);
  std::string v;
  while (std::getline(ss, v, sep)) {
    v = trim(v);
    if (!v.empty()) axis.values.push_back(v);
  }
  if (axis.values.empty()) throw ConfigError("grid axis '" + axis.key + "' has no values");
  return axis;
}

int cmd_sweep(const std::vector<ExperimentConfig>& base, const std::vector<GridAxis>& grid, const fs::path& out,
              std::ostream& log) {
  if (grid.empty()) throw ConfigError("sweep needs at least one --grid axis");
  if (grid.size() > 3) throw ConfigError("sweep supports at most 3 grid axes");
  std::set<std::string> seen;
  for (const auto& a : grid) {
    if (a.values.empty()) throw ConfigError("grid axis '" + a.key + "' has no values");
    if (!seen.insert(a.key).second) throw ConfigError("grid axis '" + a.key + "' given twice");
  }

  // Expand the cross product in row-major grid order and validate every cell
  // before running anything.
  struct Cell {
    int index;
    ExperimentConfig config;
    std::vector<std::string> values;
  };
  std::vector<Cell> cells;
  std::size_t total = 1;
  for (const auto& a : grid) total *= a.values.size();
  int index = 0;
  for (const auto& b : base) {
    for (std::size_t flat = 0; flat < total; ++flat) {
      Cell cell{index++, b, {}};
      std::size_t rem = flat;
      std::vector<std::size_t> pick(grid.size());
      for (std::size_t k = grid.size(); k-- > 0;) {
        pick[k] = rem % grid[k].values.size();
        rem /= grid[k].values.size();
      }
      for (std::size_t k = 0; k < grid.size(); ++k) {
        const std::string& v = grid[k].values[pick[k]];
        if (grid[k].key == "eta") {
          set_key(cell.config, "schedule", "fixed:" + v);
        } else {
          set_key(cell.config, grid[k].key, v);
        }
        cell.values.push_back(v);
      }
      validate(cell.config);
      cells.push_back(std::move(cell));
    }
  }

  ensure_dir(out);
  std::vector<Verdict> verdicts;
  std::ofstream summary(out / "summary.csv", std::ios::binary);
  if (!summary) throw IoError("cannot open '" + (out / "summary.csv").string() + "' for writing");
  summary << "cell,run_id,seed";
  for (const auto& a : grid) summary << ',' << a.key;
  summary << ",final_error,final_weak_opt,plateau,verdict,termination\n";

  for (const auto& cell : cells) {
    for (int i = 0; i < cell.config.repeats; ++i) {
      const std::uint64_t seed = repeat_seed(cell.config, i);
      const RunResult r = execute(cell.config, seed, "c" + std::to_string(cell.index) + "-");
      write_trace(out / (r.run_id + ".csv"), r.trace.config, r.trace.records);
      verdicts.push_back(r.verdict);
      log_result(log, r);
      summary << cell.index << ',' << r.run_id << ',' << seed;
      for (const auto& v : cell.values) summary << ',' << v;
      summary << ',' << final_value(r.trace, false) << ',' << final_value(r.trace, true) << ','
              << (r.verdict.plateau >= 0.0 ? format_full(r.verdict.plateau) : "na") << ','
              << mf::to_string(r.verdict.rate.verdict) << ',' << mf::to_string(r.trace.termination) << '\n';
    }
  }
  summary.close();
  if (!summary) throw IoError("failed writing summary.csv");
  write_verdicts(out / "verdicts.csv", verdicts);
  return 0;
}

int cmd_report(const std::vector<fs::path>& traces, std::ostream& out) {
  if (traces.empty()) throw ConfigError("report needs at least one trace file");
  // Parse everything first so a bad file produces no partial report.
  struct Loaded {
    fs::path path;
    TraceFile file;
    ExperimentConfig config;
  };
  std::vector<Loaded> loaded;
  for (const auto& p : traces) {
    Loaded l{p, read_trace(p), {}};
    try {
      l.config = parse_config(l.file.config);
      validate(l.config);
    } catch (const ConfigError& e) {
      throw IoError(p.string() + ":1: bad config line: " + e.what());
    }
    loaded.push_back(std::move(l));
  }
  bool first = true;
  for (const auto& l : loaded) {
    if (!first) out << '\n';
    first = false;
    mf::Problem problem;
    try {
      problem = problem_for(l.config);
    } catch (const mf::InvalidArgument& e) {
      throw IoError(l.path.string() + ":1: config does not describe a valid problem: " + e.what());
    }
    const mf::Termination term = infer_termination(l.config, problem, l.file.records);
    const Verdict v =
        evaluate(l.config, problem, l.file.records, term, run_id_for(l.config, l.config.seed));
    out << "== " << l.path.string() << '\n';
    out << "run_id: " << v.run_id << '\n';
    out << "config: " << l.file.config << '\n';
    out << "records: " << l.file.records.size() << '\n';
    if (!l.file.records.empty()) {
      out << "final_error: " << format_full(l.file.records.back().error) << '\n';
      out << "final_weak_opt: " << format_full(l.file.records.back().weak_opt) << '\n';
    }
    out << "termination: " << mf::to_string(term) << '\n';
    out << "verdict: " << mf::to_string(v.rate.verdict) << '\n';
    out << "phase2_slope: " << format_full(v.rate.phase2_slope) << '\n';
    out << "contraction: " << format_full(v.rate.contraction) << '\n';
    if (v.rate.low_confidence) out << "note: low-confidence rate fit\n";
    out << "align_ok: " << to_string(v.align) << '\n';
    out << "sigma_bound_ok: " << to_string(v.sigma_bound) << '\n';
    out << "quad_contract_ok: " << to_string(v.quad_contract) << '\n';
    out << "weakopt_plateau_ok: " << to_string(v.weakopt_plateau) << '\n';
  }
  return 0;
}

}  // namespace mfbench
