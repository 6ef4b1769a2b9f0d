#pragma once

// Runs of the extended flow: preset or file input, the event/restart loop,
// intersection sampling, and the artifact directory (write and verify).

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "netflow/diagnostics.hpp"
#include "netflow/flow.hpp"
#include "netflow/geometry.hpp"
#include "netflow/io.hpp"
#include "netflow/presets.hpp"
#include "netflow/svg.hpp"
#include "netflow/transitions.hpp"

namespace netflow {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// RunSpec
// ---------------------------------------------------------------------------

struct SolverOverrides {
  std::optional<double> dt_max;
  std::optional<double> cfl;
  std::optional<int> respacing_interval;
  std::optional<double> junction_tol;
  std::optional<double> kappa_blowup;
  std::optional<double> t_max;
  std::optional<Scheme> scheme;
  std::optional<double> restart_scale;
  std::optional<double> junction_grading;
};

inline std::string_view to_string(Scheme s) {
  return s == Scheme::SemiImplicit ? "semi_implicit" : "explicit";
}

inline Scheme parse_scheme(std::string_view s) {
  if (s == "semi_implicit") return Scheme::SemiImplicit;
  if (s == "explicit") return Scheme::Explicit;
  throw ContractError("unknown scheme '" + std::string(s) + "'");
}

struct RunSpec {
  NetworkType preset = NetworkType::Theta;
  /// Custom initial network (network record); replaces the preset.
  std::optional<std::string> network_file;
  std::optional<Point2> anchor;
  double scale = 1.0;
  std::vector<double> line_angles{std::numbers::pi / 4.0};
  int n_points = 200;
  SolverOverrides solver;
  /// Snapshot cadence in solver steps; 0 keeps only the event snapshots.
  int snapshots_every = 0;
  std::string out_dir = "netflow_out";
  int max_events = 32;
  /// Post-restart distance window for the expander fit, in units of δ0.
  double expander_window = 4.0;

  void validate() const {
    if (network_file && anchor) throw ContractError("anchors apply to presets only");
    if (anchor && !network_file && preset != NetworkType::Tree) {
      throw ContractError("anchors apply to the tree preset only");
    }
    if (!(scale > 0.0)) throw ContractError("scale must be positive");
    if (line_angles.empty()) throw ContractError("at least one test line is needed");
    for (double a : line_angles) TestLine{a};
    if (n_points < 8) throw ContractError("n must be at least 8");
    if (snapshots_every < 0 || max_events < 1) throw ContractError("bad output settings");
    if (!(expander_window > 1.0)) throw ContractError("expander_window must exceed 1");
  }
};

inline SymmetricNetwork initial_network(const RunSpec& spec) {
  if (spec.network_file) {
    SymmetricNetwork net = load_network(*spec.network_file);
    const auto bad = check_invariants(net);
    if (!bad.empty()) throw ContractError("invalid network file: " + bad.front());
    return net;
  }
  return build_preset(spec.preset, spec.scale, spec.anchor);
}

inline SolverConfig resolve_config(const RunSpec& spec, const SymmetricNetwork& net) {
  SolverConfig cfg = SolverConfig::for_network(net, spec.n_points);
  const auto& o = spec.solver;
  if (o.dt_max) cfg.dt_max = *o.dt_max;
  if (o.cfl) cfg.cfl = *o.cfl;
  if (o.respacing_interval) cfg.respacing_interval = *o.respacing_interval;
  if (o.junction_tol) cfg.junction_tol = *o.junction_tol;
  if (o.kappa_blowup) cfg.kappa_blowup = *o.kappa_blowup;
  if (o.t_max) cfg.t_max = *o.t_max;
  if (o.scheme) cfg.scheme = *o.scheme;
  if (o.restart_scale) cfg.restart_scale = *o.restart_scale;
  if (o.junction_grading) cfg.junction_grading = *o.junction_grading;
  cfg.validate();
  return cfg;
}

// ---------------------------------------------------------------------------
// Extended flow
// ---------------------------------------------------------------------------

struct Snapshot {
  std::string label;
  SymmetricState state;
};

struct RestartRecord {
  double t_k = 0.0;
  std::vector<DistanceSample> distances;
  std::optional<ExpanderFit> fit;
};

struct RunOutcome {
  SymmetricNetwork initial;
  SolverConfig cfg;
  EventLog log;
  std::vector<IntersectionSeries> series;
  std::vector<AreaPhase> areas;
  std::vector<RestartRecord> restarts;
  std::vector<Snapshot> snapshots;
  std::optional<SymmetricState> final_state;
  RunReport report;
  std::optional<std::string> failure;
  std::optional<SymmetricState> abort_before;
  std::vector<Point2> abort_attempted;
  bool terminal_ok = false;
  bool passed = false;
};

/// Whether the terminal event is the one expected for the initial type.
inline bool terminal_matches(const RunReport& r) {
  if (!r.terminal) return false;
  switch (r.initial_type) {
    case NetworkType::Theta:
    case NetworkType::Eyeglasses:
      return *r.terminal == EventKind::Blowup && r.terminal_type == NetworkType::Eyeglasses;
    case NetworkType::Lens:
      return *r.terminal == EventKind::Blowup && r.type0_count == 0;
    case NetworkType::Tree:
      return *r.terminal == EventKind::Converged &&
             (r.limit == LimitClass::SteinerTree || r.limit == LimitClass::StandardCross);
  }
  return false;
}

/// Runs the extended flow described by `spec`. No files are written.
inline RunOutcome simulate(const RunSpec& spec) {
  spec.validate();
  RunOutcome out;
  out.initial = initial_network(spec);
  out.cfg = resolve_config(spec, out.initial);
  const SolverConfig& cfg = out.cfg;
  const double diameter = network_diameter(out.initial);

  std::vector<TestLine> lines;
  for (double a : spec.line_angles) {
    lines.emplace_back(a);
    out.series.emplace_back(a);
  }

  std::size_t phase_begin = 0;
  auto open_area_phase = [&](const SymmetricNetwork& net) {
    phase_begin = out.areas.size();
    if (!has_regions(net.type)) return;
    const auto regions = enclosed_area(net).size();
    for (std::size_t r = 0; r < regions; ++r) out.areas.push_back({net.type, r, {}});
  };
  auto sample = [&](const SymmetricState& s) {
    if (!out.series.front().empty() && !(s.t > out.series.front().samples().back().t)) return;
    for (std::size_t k = 0; k < lines.size(); ++k) {
      const auto c = sample_i(s, lines[k]);
      out.series[k].append({s.t, c.count, c.tangency});
    }
    if (has_regions(s.net.type)) {
      const auto a = enclosed_area(s.net);
      for (std::size_t r = 0; r < a.size(); ++r) out.areas[phase_begin + r].samples.push_back({s.t, a[r]});
    }
  };
  auto snapshot = [&](std::string label, const SymmetricState& s) {
    out.snapshots.push_back({std::move(label), s});
  };

  SymmetricState state = initial_state(out.initial, cfg);
  open_area_phase(state.net);
  sample(state);
  snapshot("initial", state);

  RestartRecord* recording = nullptr;
  const double window = spec.expander_window * cfg.delta0();
  bool finished = false;
  for (int ev = 0; ev < spec.max_events && !finished; ++ev) {
    int k = 0;
    auto observer = [&](const SymmetricState& s, const StepInfo& info) {
      ++k;
      if (info.junction_distance < 10.0 * cfg.junction_tol || k % 10 == 0) sample(s);
      if (spec.snapshots_every > 0 && s.steps % static_cast<std::uint64_t>(spec.snapshots_every) == 0) {
        snapshot("step", s);
      }
      if (recording) {
        if (info.junction_distance <= window) {
          recording->distances.push_back({s.t, info.junction_distance});
        } else {
          recording = nullptr;
        }
      }
    };
    RunResult r;
    try {
      r = run_until_event(state, cfg, observer);
    } catch (const SolverAbort& e) {
      out.failure = std::string("solver abort: ") + e.what();
      out.abort_before = e.before();
      out.abort_attempted = e.attempted();
      break;
    }
    recording = nullptr;
    sample(r.state);
    if (r.event == EventKind::Type0) {
      const double t_k = estimate_singular_time(r.state);
      SymmetricState next;
      try {
        next = standard_transition(r.state, cfg);
      } catch (const std::exception& e) {
        out.failure = std::string("restart failed: ") + e.what();
        out.final_state = r.state;
        break;
      }
      out.log.append({t_k, EventKind::Type0, r.state.net.type, next.net.type});
      snapshot("event" + std::to_string(ev) + "_before", r.state);
      snapshot("event" + std::to_string(ev) + "_after", next);
      open_area_phase(next.net);
      sample(next);
      out.restarts.push_back({t_k, {{next.t, next.net.junction_distance()}}, std::nullopt});
      recording = &out.restarts.back();
      state = std::move(next);
    } else {
      out.log.append({r.state.t, r.event, r.state.net.type, std::nullopt});
      snapshot("final", r.state);
      out.final_state = r.state;
      finished = true;
    }
  }
  if (!finished && !out.failure) {
    out.failure = "event budget exhausted";
    out.final_state = state;
  }

  std::vector<ExpanderFit> fits;
  for (auto& rr : out.restarts) {
    if (rr.distances.size() >= 20) {
      try {
        rr.fit = fit_expander_bound(rr.distances, rr.t_k);
        fits.push_back(*rr.fit);
      } catch (const ContractError&) {
        // left unfitted; reported as missing
      }
    }
  }
  std::optional<LimitClass> limit;
  if (out.final_state && out.final_state->net.type == NetworkType::Tree && out.log.finished() &&
      out.log.events().back().kind == EventKind::Converged) {
    limit = classify_limit(*out.final_state, cfg, {1e-3 / diameter, 1e-3});
  }
  out.report = run_report(out.initial.type, out.log, out.series, out.areas, std::move(fits), limit);
  out.terminal_ok = terminal_matches(out.report);
  out.passed = !out.failure && out.terminal_ok && out.report.monotone();
  return out;
}

// ---------------------------------------------------------------------------
// Records
// ---------------------------------------------------------------------------

inline Json to_json(const Event& e) {
  Json j;
  j["t"] = e.t;
  j["kind"] = to_string(e.kind);
  j["net_type_before"] = to_string(e.before);
  j["net_type_after"] = e.after ? Json(to_string(*e.after)) : Json(nullptr);
  return j;
}

inline Json to_json(const EventLog& log) {
  Json j;
  j["events"] = Json::array();
  for (const auto& e : log.events()) j["events"].push_back(to_json(e));
  j["terminal_time"] = log.terminal_time() ? Json(*log.terminal_time()) : Json(nullptr);
  return j;
}

inline EventLog event_log_from_json(const Json& j) {
  EventLog log;
  for (const auto& e : j.at("events")) {
    Event ev;
    ev.t = e.at("t").get<double>();
    ev.kind = parse_event_kind(e.at("kind").get<std::string>());
    ev.before = parse_network_type(e.at("net_type_before").get<std::string>());
    if (!e.at("net_type_after").is_null()) {
      ev.after = parse_network_type(e.at("net_type_after").get<std::string>());
    }
    log.append(ev);
  }
  return log;
}

inline Json to_json(const ExpanderFit& f) {
  Json j;
  j["c"] = f.c;
  j["exponent"] = f.exponent;
  j["window"] = {f.window_begin, f.window_end};
  j["residual"] = f.residual;
  j["passes"] = f.passes();
  return j;
}

inline Json to_json(const Certification& c) {
  Json j;
  j["pass"] = c.pass;
  j["first_i"] = c.first_i;
  j["last_i"] = c.last_i;
  j["violations"] = Json::array();
  for (const auto& v : c.violations) {
    j["violations"].push_back({{"clause", std::string(1, v.clause)}, {"t", v.t}, {"detail", v.detail}});
  }
  return j;
}

inline void write_series_csv(std::ostream& os, const IntersectionSeries& s) {
  os << "t,i,tangency\n";
  for (const auto& x : s.samples()) os << format_real(x.t) << ',' << x.i << ',' << (x.tangency ? 1 : 0) << '\n';
}

inline IntersectionSeries read_series_csv(std::istream& is, double angle) {
  IntersectionSeries s(angle);
  std::string line;
  if (!std::getline(is, line) || line != "t,i,tangency") throw FormatError("series header must be 't,i,tangency'");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string t, i, g;
    if (!std::getline(ss, t, ',') || !std::getline(ss, i, ',') || !std::getline(ss, g)) {
      throw FormatError("malformed series row: '" + line + "'");
    }
    try {
      s.append({std::stod(t), std::stoi(i), g == "1"});
    } catch (const std::logic_error& e) {
      throw FormatError("malformed series row: '" + line + "' (" + e.what() + ")");
    }
  }
  return s;
}

inline void write_distances_csv(std::ostream& os, const std::vector<DistanceSample>& d) {
  os << "t,d\n";
  for (const auto& x : d) os << format_real(x.t) << ',' << format_real(x.d) << '\n';
}

inline std::vector<DistanceSample> read_distances_csv(std::istream& is) {
  std::vector<DistanceSample> out;
  std::string line;
  if (!std::getline(is, line) || line != "t,d") throw FormatError("distance header must be 't,d'");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw FormatError("malformed distance row: '" + line + "'");
    out.push_back({std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1))});
  }
  return out;
}

inline Json snapshot_sidecar(const SymmetricState& s) {
  Json j;
  j["t"] = s.t;
  j["steps"] = s.steps;
  j["type"] = to_string(s.net.type);
  j["max_kappa"] = max_abs(nodal_curvature(s.net));
  const Point2 p = s.net.junction();
  j["junction_pos"] = {p.x1, p.x2};
  const double arc = s.net.defining.length();
  const double bridge = has_bridge(s.net.type) ? 2.0 * norm(p) : 0.0;
  j["lengths"] = {{"defining", arc}, {"network", 4.0 * arc + bridge}};
  j["areas"] = has_regions(s.net.type) ? Json(enclosed_area(s.net)) : Json::array();
  return j;
}

inline Json spec_json(const RunSpec& spec, const SolverConfig& cfg) {
  Json j;
  if (spec.network_file) {
    j["network_file"] = *spec.network_file;
  } else {
    j["preset"] = to_string(spec.preset);
  }
  j["anchors"] = spec.anchor ? Json{spec.anchor->x1, spec.anchor->x2} : Json(nullptr);
  j["scale"] = spec.scale;
  j["angles"] = spec.line_angles;
  j["n"] = spec.n_points;
  j["snapshots_every"] = spec.snapshots_every;
  j["max_events"] = spec.max_events;
  j["expander_window"] = spec.expander_window;
  j["solver"] = {{"n_points", cfg.n_points},
                 {"dt_max", cfg.dt_max},
                 {"cfl", cfg.cfl},
                 {"respacing_interval", cfg.respacing_interval},
                 {"geom_tol", cfg.geom_tol},
                 {"junction_tol", cfg.junction_tol},
                 {"kappa_blowup", cfg.kappa_blowup},
                 {"t_max", cfg.t_max},
                 {"scheme", to_string(cfg.scheme)},
                 {"rest_speed", cfg.rest_speed},
                 {"rest_steps", cfg.rest_steps},
                 {"restart_scale", cfg.delta0()},
                 {"junction_grading", cfg.junction_grading}};
  return j;
}

inline void write_text(const fs::path& p, const std::string& text) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  os << text;
}

inline std::string read_text(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

inline std::string series_file(std::size_t k) { return "series_" + std::to_string(k) + ".csv"; }
inline std::string expander_file(std::size_t k) { return "expander_" + std::to_string(k) + ".csv"; }

/// Writes every artifact of `out` into `dir` (created if needed).
inline void write_artifacts(const RunSpec& spec, const RunOutcome& out, const fs::path& dir) {
  fs::create_directories(dir / "snapshots");
  auto dump = [](const Json& j) { return j.dump(2) + "\n"; };

  const double extent = 0.55 * network_diameter(out.initial) + 1e-12;
  Json snaps = Json::array();
  for (std::size_t k = 0; k < out.snapshots.size(); ++k) {
    const auto& s = out.snapshots[k];
    char stem[64];
    std::snprintf(stem, sizeof stem, "snap_%04zu_%s", k, s.label.c_str());
    std::ostringstream net, svg;
    write_network(net, s.state.net);
    write_svg(svg, s.state.net, s.state.t, spec.line_angles, extent);
    write_text(dir / "snapshots" / (std::string(stem) + ".net"), net.str());
    write_text(dir / "snapshots" / (std::string(stem) + ".svg"), svg.str());
    write_text(dir / "snapshots" / (std::string(stem) + ".json"), dump(snapshot_sidecar(s.state)));
    snaps.push_back(std::string("snapshots/") + stem);
  }

  Json lines = Json::array();
  for (std::size_t k = 0; k < out.series.size(); ++k) {
    std::ostringstream os;
    write_series_csv(os, out.series[k]);
    write_text(dir / series_file(k), os.str());
    lines.push_back({{"angle", out.series[k].angle()},
                     {"file", series_file(k)},
                     {"certification", to_json(out.report.lines[k].certification)}});
  }

  Json restarts = Json::array();
  for (std::size_t k = 0; k < out.restarts.size(); ++k) {
    std::ostringstream os;
    write_distances_csv(os, out.restarts[k].distances);
    write_text(dir / expander_file(k), os.str());
    restarts.push_back({{"t_k", out.restarts[k].t_k},
                        {"file", expander_file(k)},
                        {"fit", out.restarts[k].fit ? to_json(*out.restarts[k].fit) : Json(nullptr)}});
  }

  std::ostringstream areas;
  areas << "phase,type,region,t,area\n";
  for (std::size_t p = 0; p < out.areas.size(); ++p) {
    for (const auto& s : out.areas[p].samples) {
      areas << p << ',' << to_string(out.areas[p].type) << ',' << out.areas[p].region << ','
            << format_real(s.t) << ',' << format_real(s.v) << '\n';
    }
  }
  write_text(dir / "areas.csv", areas.str());
  write_text(dir / "events.json", dump(to_json(out.log)));

  const auto& r = out.report;
  Json rep;
  rep["spec"] = spec_json(spec, out.cfg);
  rep["initial_type"] = to_string(r.initial_type);
  rep["type0_count"] = r.type0_count;
  rep["terminal"] = r.terminal ? Json(to_string(*r.terminal)) : Json(nullptr);
  rep["terminal_type"] = r.terminal_type ? Json(to_string(*r.terminal_type)) : Json(nullptr);
  rep["expected_terminal"] = to_string(expected_terminal(r.initial_type));
  rep["flow_time"] = r.flow_time;
  rep["area_rates"] = Json::array();
  for (const auto& a : r.area_rates) {
    rep["area_rates"].push_back({{"type", to_string(a.type)},
                                 {"region", a.region},
                                 {"measured", a.measured},
                                 {"expected", a.expected},
                                 {"relative_error", a.relative_error()}});
  }
  rep["restarts"] = restarts;
  rep["lines"] = lines;
  rep["limit"] = r.limit ? Json(to_string(*r.limit)) : Json(nullptr);
  if (out.final_state && out.final_state->net.type == NetworkType::Tree) {
    const Point2 j = out.final_state->net.junction();
    rep["final_junction"] = {j.x1, j.x2};
  }
  rep["snapshots"] = snaps;
  rep["monotone"] = r.monotone();
  rep["terminal_ok"] = out.terminal_ok;
  rep["failure"] = out.failure ? Json(*out.failure) : Json(nullptr);
  rep["passed"] = out.passed;
  write_text(dir / "report.json", dump(rep));

  if (out.abort_before) {
    std::ostringstream before;
    write_network(before, out.abort_before->net);
    Json ab;
    ab["message"] = *out.failure;
    ab["t"] = out.abort_before->t;
    ab["steps"] = out.abort_before->steps;
    ab["attempted"] = Json::array();
    for (const auto& p : out.abort_attempted) ab["attempted"].push_back({p.x1, p.x2});
    write_text(dir / "abort_state.net", before.str());
    write_text(dir / "abort.json", dump(ab));
  }
}

/// Simulates and writes artifacts; returns the process exit status.
inline int run(const RunSpec& spec) {
  const RunOutcome out = simulate(spec);
  write_artifacts(spec, out, spec.out_dir);
  return out.passed ? 0 : 1;
}

// ---------------------------------------------------------------------------
// Offline verification
// ---------------------------------------------------------------------------

struct VerifyResult {
  bool ok = true;
  std::vector<std::string> messages;

  void fail(std::string m) {
    ok = false;
    messages.push_back(std::move(m));
  }
};

/// Re-certifies an artifact directory from its files alone: reparses every
/// record, recomputes the certifications and expander fits and checks the
/// terminal event against the initial type.
inline VerifyResult verify(const fs::path& dir) {
  VerifyResult v;
  try {
    const Json rep = Json::parse(read_text(dir / "report.json"));
    const EventLog log = event_log_from_json(Json::parse(read_text(dir / "events.json")));

    RunReport r;
    r.initial_type = parse_network_type(rep.at("initial_type").get<std::string>());
    r.type0_count = log.type0_count();
    if (!log.finished()) {
      v.fail("event log has no terminal event");
    } else {
      r.terminal = log.events().back().kind;
      r.terminal_type = log.events().back().before;
    }
    if (!rep.at("limit").is_null()) {
      const auto l = rep.at("limit").get<std::string>();
      r.limit = l == "steiner_tree" ? LimitClass::SteinerTree
              : l == "standard_cross" ? LimitClass::StandardCross
                                      : LimitClass::Undecided;
    }
    if (!terminal_matches(r)) v.fail("terminal event does not match the initial type");
    if (!rep.at("failure").is_null()) v.fail("run failed: " + rep.at("failure").get<std::string>());

    for (const auto& line : rep.at("lines")) {
      std::istringstream is(read_text(dir / line.at("file").get<std::string>()));
      const auto series = read_series_csv(is, line.at("angle").get<double>());
      const auto cert = certify_monotone(series, log);
      if (!cert.pass) {
        v.fail(line.at("file").get<std::string>() + ": " + std::to_string(cert.violations.size()) +
               " certification violation(s)");
      }
      if (cert.pass != line.at("certification").at("pass").get<bool>()) {
        v.fail(line.at("file").get<std::string>() + ": stored verdict disagrees with recomputation");
      }
      if (static_cast<int>(log.type0_count()) > cert.first_i) {
        v.fail(line.at("file").get<std::string>() + ": more collisions than initial intersections");
      }
    }
    for (const auto& rs : rep.at("restarts")) {
      std::istringstream is(read_text(dir / rs.at("file").get<std::string>()));
      const auto d = read_distances_csv(is);
      if (d.size() < 20) {
        v.fail(rs.at("file").get<std::string>() + ": too few samples for the expander fit");
        continue;
      }
      const auto fit = fit_expander_bound(d, rs.at("t_k").get<double>());
      if (!fit.passes()) v.fail(rs.at("file").get<std::string>() + ": expander exponent out of range");
    }
    for (const auto& stem : rep.at("snapshots")) {
      const std::string s = stem.get<std::string>();
      const auto net = load_network((dir / (s + ".net")).string());
      const Json side = Json::parse(read_text(dir / (s + ".json")));
      if (side.at("type").get<std::string>() != to_string(net.type)) v.fail(s + ": sidecar type mismatch");
      if (!fs::exists(dir / (s + ".svg"))) v.fail(s + ".svg missing");
    }
  } catch (const std::exception& e) {
    v.fail(std::string("unreadable artifacts: ") + e.what());
  }
  return v;
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

struct SweepPlan {
  std::vector<RunSpec> runs;
  std::vector<std::string> names;
  std::string out_dir = "netflow_sweep";
  unsigned jobs = 0;
};

namespace detail {

inline std::string trim(std::string s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream ss(s);
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

inline double parse_real(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.empty()) throw ContractError(key + ": not a number: '" + text + "'");
  return v;
}

inline int parse_int(const std::string& key, const std::string& text) {
  const double v = parse_real(key, text);
  if (v != std::floor(v)) throw ContractError(key + ": not an integer: '" + text + "'");
  return static_cast<int>(v);
}

}  // namespace detail

/// Parses "X,Y".
inline Point2 parse_anchor(const std::string& text) {
  const auto parts = detail::split(text, ',');
  if (parts.size() != 2) throw ContractError("anchors must be given as X,Y");
  return {detail::parse_real("anchors", parts[0]), detail::parse_real("anchors", parts[1])};
}

/// Applies one key=value setting to a run.
inline void apply_setting(RunSpec& spec, const std::string& key, const std::string& value) {
  using detail::parse_int;
  using detail::parse_real;
  if (key == "preset") {
    spec.preset = parse_network_type(value);
  } else if (key == "network_file") {
    spec.network_file = value;
  } else if (key == "anchors") {
    spec.anchor = parse_anchor(value);
  } else if (key == "scale") {
    spec.scale = parse_real(key, value);
  } else if (key == "angle") {
    spec.line_angles.clear();
    for (const auto& a : detail::split(value, ',')) spec.line_angles.push_back(parse_real(key, a));
  } else if (key == "n") {
    spec.n_points = parse_int(key, value);
  } else if (key == "snapshots_every") {
    spec.snapshots_every = parse_int(key, value);
  } else if (key == "max_events") {
    spec.max_events = parse_int(key, value);
  } else if (key == "expander_window") {
    spec.expander_window = parse_real(key, value);
  } else if (key == "dt_max") {
    spec.solver.dt_max = parse_real(key, value);
  } else if (key == "cfl") {
    spec.solver.cfl = parse_real(key, value);
  } else if (key == "respacing_interval") {
    spec.solver.respacing_interval = parse_int(key, value);
  } else if (key == "junction_tol") {
    spec.solver.junction_tol = parse_real(key, value);
  } else if (key == "kappa_blowup") {
    spec.solver.kappa_blowup = parse_real(key, value);
  } else if (key == "t_max") {
    spec.solver.t_max = parse_real(key, value);
  } else if (key == "scheme") {
    spec.solver.scheme = parse_scheme(value);
  } else if (key == "restart_scale") {
    spec.solver.restart_scale = parse_real(key, value);
  } else if (key == "junction_grading") {
    spec.solver.junction_grading = parse_real(key, value);
  } else {
    throw ContractError("unknown key '" + key + "'");
  }
}

/// Parses a sweep file: `key = value` lines, `#` comments. A value holding
/// several alternatives separated by `;` spans one axis of the sweep; the
/// runs are the cartesian product of all axes. `out` names the parent
/// directory and `jobs` the worker count (0: one per hardware thread).
inline SweepPlan parse_sweep(std::istream& is) {
  SweepPlan plan;
  std::vector<std::pair<std::string, std::vector<std::string>>> axes;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ContractError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key == "out") {
      plan.out_dir = value;
    } else if (key == "jobs") {
      plan.jobs = static_cast<unsigned>(detail::parse_int(key, value));
    } else {
      axes.emplace_back(key, detail::split(value, ';'));
    }
  }
  std::vector<std::size_t> idx(axes.size(), 0);
  while (true) {
    RunSpec spec;
    std::string name;
    for (std::size_t a = 0; a < axes.size(); ++a) {
      apply_setting(spec, axes[a].first, axes[a].second[idx[a]]);
      if (axes[a].second.size() > 1) name += (name.empty() ? "" : "_") + std::to_string(idx[a]);
    }
    spec.validate();
    char buf[32];
    std::snprintf(buf, sizeof buf, "run_%03zu", plan.runs.size());
    spec.out_dir = (fs::path(plan.out_dir) / buf).string();
    plan.names.push_back(buf);
    plan.runs.push_back(std::move(spec));
    std::size_t a = 0;
    while (a < axes.size() && ++idx[a] == axes[a].second.size()) idx[a++] = 0;
    if (a == axes.size()) break;
  }
  return plan;
}

/// Runs every spec of the plan on a worker pool; each run writes its own
/// directory. Returns 0 iff every run passed.
inline int run_sweep(const SweepPlan& plan) {
  const std::size_t n = plan.runs.size();
  std::vector<int> status(n, 1);
  std::vector<std::string> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < n;) {
      try {
        status[k] = run(plan.runs[k]);
      } catch (const std::exception& e) {
        errors[k] = e.what();
        status[k] = 2;
      }
    }
  };
  unsigned jobs = plan.jobs ? plan.jobs : std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, n));
  std::vector<std::thread> pool;
  for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  Json summary = Json::array();
  int worst = 0;
  for (std::size_t k = 0; k < n; ++k) {
    summary.push_back({{"run", plan.names[k]},
                       {"input", plan.runs[k].network_file ? *plan.runs[k].network_file
                                                       : std::string(to_string(plan.runs[k].preset))},
                       {"status", status[k]},
                       {"error", errors[k].empty() ? Json(nullptr) : Json(errors[k])}});
    worst = std::max(worst, status[k]);
  }
  fs::create_directories(plan.out_dir);
  write_text(fs::path(plan.out_dir) / "sweep.json", summary.dump(2) + "\n");
  return worst == 0 ? 0 : 1;
}

}  // namespace netflow
