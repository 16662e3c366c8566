#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace mfbench {

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw ConfigError("cannot format number");
  return std::string(buf, ptr);
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r' || s.front() == '\n')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '\n')) s.remove_suffix(1);
  return s;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
  throw ConfigError("invalid value '" + std::string(value) + "' for key '" + std::string(key) + "'");
}

double parse_double(std::string_view key, std::string_view v) {
  v = trim(v);
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) bad_value(key, v);
  return out;
}

template <typename Int>
Int parse_int(std::string_view key, std::string_view v) {
  v = trim(v);
  Int out{};
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) bad_value(key, v);
  return out;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view task_name(Task t) { return t == Task::factorize ? "factorize" : "nora"; }

}  // namespace

bool is_known_key(std::string_view key) {
  return std::find(std::begin(kKeys), std::end(kKeys), key) != std::end(kKeys);
}

void set_key(ExperimentConfig& c, std::string_view key, std::string_view raw) {
  const std::string_view v = trim(raw);
  if (key == "label") {
    if (v.empty() || v.find_first_of(";=/\\ ,") != std::string_view::npos) bad_value(key, v);
    c.label = std::string(v);
  } else if (key == "task") {
    if (v == "factorize") c.task = Task::factorize;
    else if (v == "nora") c.task = Task::nora;
    else bad_value(key, v);
  } else if (key == "kind") {
    if (v == "sym") c.kind = mf::Kind::symmetric;
    else if (v == "asym") c.kind = mf::Kind::asymmetric;
    else bad_value(key, v);
  } else if (key == "m") {
    c.m = parse_int<int>(key, v);
  } else if (key == "n") {
    c.n = parse_int<int>(key, v);
  } else if (key == "spectrum") {
    try {
      (void)mf::parse_spectrum(v);
    } catch (const mf::InvalidArgument& e) {
      throw ConfigError("invalid value for key 'spectrum': " + std::string(e.what()));
    }
    c.spectrum = std::string(v);
  } else if (key == "r") {
    c.r = parse_int<int>(key, v);
  } else if (key == "init") {
    if (v == "nystrom") c.init = mf::InitKind::nystrom;
    else if (v == "small") c.init = mf::InitKind::small_gaussian;
    else if (v == "perturbed") c.init = mf::InitKind::perturbed_nystrom;
    else if (v == "grad") c.init = mf::InitKind::nystrom_via_gradient;
    else bad_value(key, v);
  } else if (key == "xi") {
    c.xi = parse_double(key, v);
  } else if (key == "zeta") {
    c.zeta = parse_double(key, v);
  } else if (key == "xi_n") {
    c.xi_n = parse_double(key, v);
  } else if (key == "solver") {
    auto m = mf::method_from_string(v);
    if (!m) bad_value(key, v);
    c.solver = *m;
  } else if (key == "schedule") {
    try {
      (void)parse_schedule(v, nullptr, 1);
    } catch (const mf::InvalidArgument& e) {
      throw ConfigError("invalid value for key 'schedule': " + std::string(e.what()));
    }
    c.schedule = std::string(v);
  } else if (key == "lambda") {
    c.lambda = parse_double(key, v);
  } else if (key == "max_iters") {
    c.max_iters = parse_int<int>(key, v);
  } else if (key == "tol") {
    c.tol = parse_double(key, v);
  } else if (key == "seed") {
    c.seed = parse_int<std::uint64_t>(key, v);
  } else if (key == "repeats") {
    c.repeats = parse_int<int>(key, v);
  } else if (key == "variant") {
    if (v == "nora") c.variant = mf::nora::Variant::nora;
    else if (v == "nora-plus") c.variant = mf::nora::Variant::nora_plus;
    else bad_value(key, v);
  } else if (key == "normalize") {
    if (v == "true" || v == "1") c.normalize = true;
    else if (v == "false" || v == "0") c.normalize = false;
    else bad_value(key, v);
  } else {
    throw ConfigError("unknown config key '" + std::string(key) + "'");
  }
}

std::string serialize(const ExperimentConfig& c) {
  std::string out;
  auto put = [&out](std::string_view key, const std::string& value) {
    if (!out.empty()) out += ';';
    out += key;
    out += '=';
    out += value;
  };
  put("label", c.label);
  put("task", std::string(task_name(c.task)));
  put("kind", std::string(mf::to_string(c.kind)));
  put("m", std::to_string(c.m));
  put("n", std::to_string(c.n));
  put("spectrum", c.spectrum);
  put("r", std::to_string(c.r));
  put("init", std::string(mf::to_string(c.init)));
  put("xi", format_double(c.xi));
  put("zeta", format_double(c.zeta));
  put("xi_n", format_double(c.xi_n));
  put("solver", std::string(mf::to_string(c.solver)));
  put("schedule", c.schedule);
  put("lambda", format_double(c.lambda));
  put("max_iters", std::to_string(c.max_iters));
  put("tol", format_double(c.tol));
  put("seed", std::to_string(c.seed));
  put("repeats", std::to_string(c.repeats));
  put("variant", std::string(mf::nora::to_string(c.variant)));
  put("normalize", c.normalize ? "true" : "false");
  return out;
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig c;
  text = trim(text);
  if (text.empty()) return c;
  // Spectrum/schedule values contain ',' and ':' but never ';'.
  for (std::string_view item : split(text, ';')) {
    item = trim(item);
    if (item.empty()) continue;
    const std::size_t eq = item.find('=');
    if (eq == std::string_view::npos) throw ConfigError("malformed config entry '" + std::string(item) + "' (expected key=value)");
    const std::string_view key = trim(item.substr(0, eq));
    if (!is_known_key(key)) throw ConfigError("unknown config key '" + std::string(key) + "'");
    set_key(c, key, item.substr(eq + 1));
  }
  return c;
}

mf::Schedule parse_schedule(std::string_view text, const mf::Problem* problem, int max_iters) {
  text = trim(text);
  const std::size_t colon = text.find(':');
  const std::string_view kind = text.substr(0, colon);
  const std::string_view body = colon == std::string_view::npos ? std::string_view() : text.substr(colon + 1);
  auto nums = [&](std::string_view part) {
    std::vector<double> out;
    if (part.empty()) return out;
    for (auto tok : split(part, ',')) {
      tok = trim(tok);
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size()) {
        throw mf::InvalidArgument("bad number '" + std::string(tok) + "' in schedule '" + std::string(text) + "'");
      }
      out.push_back(v);
    }
    return out;
  };
  mf::Schedule s;
  if (kind == "fixed") {
    const auto v = nums(body);
    if (v.size() != 1) throw mf::InvalidArgument("schedule fixed needs one step size");
    s = mf::Schedule::fixed_rate(v[0]);
  } else if (kind == "two_phase") {
    const auto v = nums(body);
    if (v.size() != 3) throw mf::InvalidArgument("schedule two_phase needs eta1,t1,eta2");
    s = mf::Schedule::two_phase_rate(v[0], static_cast<int>(v[1]), v[2]);
  } else if (kind == "theorem") {
    const auto v = nums(body);
    if (v.size() > 1) throw mf::InvalidArgument("schedule theorem takes at most the constant c");
    const double c = v.empty() ? 1.0 : v[0];
    if (!(c > 0.0)) throw mf::InvalidArgument("schedule theorem needs c > 0");
    if (!problem) return mf::Schedule::two_phase_rate(0.5, 0, 0.5);
    s = mf::Schedule::theorem_two_phase(*problem, max_iters, c);
  } else if (kind == "step_decay") {
    if (body.empty()) {
      s = mf::Schedule::default_step_decay();
    } else {
      const std::size_t at = body.find('@');
      if (at == std::string_view::npos) throw mf::InvalidArgument("schedule step_decay needs levels@switches");
      const auto levels = nums(body.substr(0, at));
      const auto sw = nums(body.substr(at + 1));
      std::vector<int> switches;
      if (sw.size() == 1 && levels.size() > 2) {
        for (std::size_t i = 1; i < levels.size(); ++i) switches.push_back(static_cast<int>(sw[0]) * static_cast<int>(i));
      } else {
        for (double d : sw) switches.push_back(static_cast<int>(d));
      }
      s = mf::Schedule::step_decay_rate(levels, switches);
    }
  } else {
    throw mf::InvalidArgument("unknown schedule '" + std::string(text) + "'");
  }
  s.validate();
  return s;
}

void validate(const ExperimentConfig& c) {
  if (c.m < 1) throw ConfigError("invalid value for key 'm': must be >= 1");
  if (c.kind == mf::Kind::asymmetric && c.n < 1) throw ConfigError("invalid value for key 'n': must be >= 1");
  if (c.r < 1) throw ConfigError("invalid value for key 'r': must be >= 1");
  if (c.repeats < 1) throw ConfigError("invalid value for key 'repeats': must be >= 1");
  if (c.max_iters < 0) throw ConfigError("invalid value for key 'max_iters': must be >= 0");
  if (!(c.tol > 0.0)) throw ConfigError("invalid value for key 'tol': must be positive");
  if (!(c.xi > 0.0)) throw ConfigError("invalid value for key 'xi': must be positive");
  if (!(c.zeta > 0.0)) throw ConfigError("invalid value for key 'zeta': must be positive");
  if (!(c.xi_n >= 0.0)) throw ConfigError("invalid value for key 'xi_n': must be non-negative");
  if (!(c.lambda >= 0.0)) throw ConfigError("invalid value for key 'lambda': must be non-negative");
  std::vector<double> spec;
  try {
    spec = mf::parse_spectrum(c.spectrum);
  } catch (const mf::InvalidArgument& e) {
    throw ConfigError("invalid value for key 'spectrum': " + std::string(e.what()));
  }
  const int cols = (c.kind == mf::Kind::symmetric && c.task == Task::factorize) ? c.m : c.n;
  if (static_cast<int>(spec.size()) > std::min(c.m, cols)) {
    throw ConfigError("invalid value for key 'spectrum': more values than min(m, n)");
  }
  if (c.task == Task::factorize && c.solver == mf::Method::scaledgd_lambda && !(c.lambda > 0.0)) {
    throw ConfigError("invalid value for key 'lambda': scaledgd-lambda needs lambda > 0");
  }
  if (c.task == Task::nora && c.kind != mf::Kind::asymmetric) {
    throw ConfigError("invalid value for key 'kind': nora is asymmetric");
  }
  try {
    (void)parse_schedule(c.schedule, nullptr, c.max_iters);
  } catch (const mf::InvalidArgument& e) {
    throw ConfigError("invalid value for key 'schedule': " + std::string(e.what()));
  }
}

mf::TargetSpec target_spec(const ExperimentConfig& c, std::uint64_t seed) {
  mf::TargetSpec t;
  t.m = c.m;
  t.symmetric = c.kind == mf::Kind::symmetric;
  t.n = t.symmetric ? c.m : c.n;
  t.spectrum = mf::parse_spectrum(c.spectrum);
  t.seed = mf::Seed(seed);
  return t;
}

mf::Problem build_problem(const ExperimentConfig& c, std::uint64_t seed) {
  return mf::make_problem(target_spec(c, seed), c.r);
}

mf::InitSpec init_spec(const ExperimentConfig& c, std::uint64_t seed) {
  mf::InitSpec s;
  s.kind = c.init;
  s.xi = c.xi;
  s.zeta = c.zeta;
  s.xi_n = c.xi_n;
  // The sketch is drawn independently of the target's rotations.
  s.seed = mf::Seed(seed).offset(1000);
  return s;
}

mf::SolverConfig solver_config(const ExperimentConfig& c, const mf::Problem& problem) {
  mf::SolverConfig s;
  s.method = c.solver;
  s.schedule = parse_schedule(c.schedule, &problem, c.max_iters);
  s.lambda = c.lambda;
  s.max_iters = c.max_iters;
  s.tol = c.tol;
  return s;
}

mf::nora::LinearFinetuneProblem build_nora_problem(const ExperimentConfig& c, std::uint64_t seed) {
  mf::TargetSpec spec;
  spec.m = c.m;
  spec.n = c.n;
  spec.symmetric = false;
  spec.spectrum = mf::parse_spectrum(c.spectrum);
  spec.seed = mf::Seed(seed);
  mf::nora::LinearFinetuneProblem p;
  // Pretrained weight: a random orthogonal-like map, full column space.
  p.w0 = mf::orthonormalize(mf::gaussian(c.m, c.n, 1.0, mf::Seed(seed).offset(2)));
  p.b = p.w0 + mf::synthesize_target(spec);
  p.r = c.r;
  return p;
}

mf::nora::NoraConfig nora_config(const ExperimentConfig& c, std::uint64_t seed) {
  mf::nora::NoraConfig n;
  n.xi = c.xi;
  n.lambda = c.lambda;
  n.lr = nominal_eta(c);
  n.normalize = c.normalize;
  n.max_iters = c.max_iters;
  n.tol = c.tol;
  n.seed = mf::Seed(seed).offset(1000);
  return n;
}

bool is_fixed_schedule(const ExperimentConfig& c) { return c.schedule.rfind("fixed:", 0) == 0; }

double nominal_eta(const ExperimentConfig& c) {
  const mf::Schedule s = parse_schedule(c.schedule, nullptr, c.max_iters);
  switch (s.kind) {
    case mf::ScheduleKind::fixed: return s.eta;
    case mf::ScheduleKind::two_phase: return s.eta2;
    case mf::ScheduleKind::step_decay: return s.levels.front();
  }
  return s.eta;
}

}  // namespace mfbench
