// netflow: run, sweep and verify symmetric network flows.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

#include "netflow/netflow.hpp"

namespace {

void print_summary(const netflow::RunSpec& spec, const netflow::RunOutcome& out) {
  const auto& r = out.report;
  std::printf("initial   %s\n", std::string(netflow::to_string(r.initial_type)).c_str());
  for (const auto& e : out.log.events()) {
    std::printf("event     %-10s t=%.6f  %s", std::string(netflow::to_string(e.kind)).c_str(), e.t,
                std::string(netflow::to_string(e.before)).c_str());
    if (e.after) std::printf(" -> %s", std::string(netflow::to_string(*e.after)).c_str());
    std::printf("\n");
  }
  for (const auto& a : r.area_rates) {
    std::printf("area      %s[%zu] rate %.5f (expected %.5f)\n",
                std::string(netflow::to_string(a.type)).c_str(), a.region, a.measured, a.expected);
  }
  for (const auto& f : r.expander_fits) {
    std::printf("expander  c=%.4f exponent=%.4f %s\n", f.c, f.exponent, f.passes() ? "ok" : "out of range");
  }
  for (const auto& l : r.lines) {
    std::printf("line      angle=%.6f i: %d -> %d  %s\n", l.angle, l.certification.first_i,
                l.certification.last_i, l.certification.pass ? "monotone" : "NOT monotone");
    for (const auto& v : l.certification.violations) {
      std::printf("          (%c) t=%.6f %s\n", v.clause, v.t, v.detail.c_str());
    }
  }
  if (r.limit) std::printf("limit     %s\n", std::string(netflow::to_string(*r.limit)).c_str());
  if (out.failure) std::printf("failure   %s\n", out.failure->c_str());
  std::printf("result    %s -> %s\n", out.passed ? "PASS" : "FAIL", spec.out_dir.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Curvature flow of symmetric networks with restarts"};
  app.require_subcommand(1);

  netflow::RunSpec spec;
  std::string preset = "theta", anchors, network_file, scheme;
  double angle = spec.line_angles.front();
  auto* run = app.add_subcommand("run", "simulate one network and write its artifacts");
  run->add_option("--preset", preset, "tree, lens, theta or eyeglasses")
      ->check(CLI::IsMember({"tree", "lens", "theta", "eyeglasses"}));
  run->add_option("--network", network_file, "initial network record instead of a preset");
  run->add_option("--anchors", anchors, "tree anchor X,Y");
  run->add_option("--scale", spec.scale, "preset scale")->check(CLI::PositiveNumber);
  run->add_option("--angle", angle, "test line angle in radians");
  run->add_option("--n", spec.n_points, "points on the defining curve")->check(CLI::Range(8, 1 << 20));
  run->add_option("--out", spec.out_dir, "artifact directory");
  run->add_option("--snapshots-every", spec.snapshots_every, "extra snapshot cadence in steps");
  run->add_option("--cfl", spec.solver.cfl);
  run->add_option("--dt-max", spec.solver.dt_max);
  run->add_option("--restart-scale", spec.solver.restart_scale);
  run->add_option("--scheme", scheme)->check(CLI::IsMember({"semi_implicit", "explicit"}));

  std::string config;
  auto* sweep = app.add_subcommand("sweep", "run a parameter sweep in parallel");
  sweep->add_option("--config", config, "key=value sweep file")->required()->check(CLI::ExistingFile);

  std::string dir;
  auto* verify = app.add_subcommand("verify", "re-certify an artifact directory");
  verify->add_option("dir", dir)->required()->check(CLI::ExistingDirectory);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      spec.preset = netflow::parse_network_type(preset);
      spec.line_angles = {angle};
      if (!network_file.empty()) spec.network_file = network_file;
      if (!anchors.empty()) spec.anchor = netflow::parse_anchor(anchors);
      if (!scheme.empty()) spec.solver.scheme = netflow::parse_scheme(scheme);
      const auto out = netflow::simulate(spec);
      netflow::write_artifacts(spec, out, spec.out_dir);
      print_summary(spec, out);
      return out.passed ? 0 : 1;
    }
    if (*sweep) {
      std::ifstream is(config);
      const auto plan = netflow::parse_sweep(is);
      std::printf("sweep: %zu runs -> %s\n", plan.runs.size(), plan.out_dir.c_str());
      return netflow::run_sweep(plan);
    }
    const auto v = netflow::verify(dir);
    for (const auto& m : v.messages) std::printf("%s\n", m.c_str());
    std::printf("%s\n", v.ok ? "verified" : "verification FAILED");
    return v.ok ? 0 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "netflow: %s\n", e.what());
    return 2;
  }
}
