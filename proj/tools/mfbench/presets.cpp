#include "presets.hpp"

namespace mfbench {

int scale_dim(Scale s) { return s == Scale::desk ? 100 : 1000; }

std::vector<std::string_view> preset_names() { return {"fig1a", "fig1b", "fig1c", "fig5a", "fig5b", "ep", "op", "up"}; }

namespace {

ExperimentConfig base(Scale scale, std::string_view spectrum, int r) {
  ExperimentConfig c;
  c.m = scale_dim(scale);
  c.n = c.m;
  c.spectrum = std::string(spectrum);
  c.r = r;
  c.max_iters = 200;
  return c;
}

ExperimentConfig arm(ExperimentConfig c, std::string label, mf::Method solver, mf::InitKind init,
                     std::string schedule) {
  c.label = std::move(label);
  c.solver = solver;
  c.init = init;
  c.schedule = std::move(schedule);
  return c;
}

}  // namespace

std::vector<ExperimentConfig> expand_preset(std::string_view name, Scale scale) {
  using mf::InitKind;
  using mf::Method;
  const ExperimentConfig ep = base(scale, kEpSpectrum, 20);
  const ExperimentConfig op = base(scale, kEpSpectrum, 60);
  if (name == "fig1a") {
    return {arm(ep, "gd-small", Method::gd, InitKind::small_gaussian, "fixed:0.01"),
            arm(ep, "scaledgd-small", Method::scaledgd, InitKind::small_gaussian, "fixed:0.5"),
            arm(ep, "scaledgd-nystrom", Method::scaledgd, InitKind::nystrom, "fixed:0.5")};
  }
  if (name == "fig1b") {
    std::vector<ExperimentConfig> out;
    for (double xi : {0.1, 1.0, 10.0}) {
      ExperimentConfig c = arm(ep, "nystrom-xi" + format_double(xi), Method::scaledgd, InitKind::nystrom, "fixed:0.5");
      c.xi = xi;
      out.push_back(c);
    }
    ExperimentConfig p = arm(ep, "perturbed-1e-6", Method::scaledgd, InitKind::perturbed_nystrom, "fixed:0.5");
    p.xi_n = 1e-6;
    out.push_back(p);
    return out;
  }
  if (name == "fig1c") {
    ExperimentConfig up = base(scale, kUpSpectrum, 20);
    up.max_iters = 2000;
    std::vector<ExperimentConfig> out;
    for (const char* eta : {"0.5", "0.1", "0.01"}) {
      out.push_back(arm(up, std::string("eta") + eta, Method::scaledgd, InitKind::nystrom, std::string("fixed:") + eta));
    }
    out.push_back(arm(up, "step-decay", Method::scaledgd, InitKind::nystrom, "step_decay"));
    return out;
  }
  if (name == "fig5a") {
    return {arm(op, "gd-small", Method::gd, InitKind::small_gaussian, "fixed:0.01"),
            arm(op, "scaledgd-lambda", Method::scaledgd_lambda, InitKind::nystrom, "fixed:0.5"),
            arm(op, "scaledgd-pinv-nystrom", Method::scaledgd_pinv, InitKind::nystrom, "fixed:0.5")};
  }
  if (name == "fig5b") {
    ExperimentConfig p = arm(op, "scaledgd-pinv-perturbed", Method::scaledgd_pinv, InitKind::perturbed_nystrom, "fixed:0.5");
    p.xi_n = 1e-6;
    return {arm(op, "scaledgd-pinv-nystrom", Method::scaledgd_pinv, InitKind::nystrom, "fixed:0.5"), p};
  }
  if (name == "ep") return {arm(ep, "ep", Method::scaledgd, InitKind::nystrom, "fixed:0.5")};
  if (name == "op") return {arm(op, "op", Method::scaledgd_pinv, InitKind::nystrom, "fixed:0.5")};
  if (name == "up") {
    ExperimentConfig up = base(scale, kUpSpectrum, 20);
    up.max_iters = 2000;
    return {arm(up, "up", Method::scaledgd, InitKind::nystrom, "fixed:0.1")};
  }
  throw ConfigError("unknown preset '" + std::string(name) + "'");
}

}  // namespace mfbench
