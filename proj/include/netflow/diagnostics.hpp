#pragma once

// Intersection count i(t) of the defining curve with a test line through
// the origin, its monotonicity certification and the run-level report.

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "netflow/flow.hpp"
#include "netflow/geometry.hpp"
#include "netflow/transitions.hpp"

namespace netflow {

struct IntersectionSample {
  double t = 0.0;
  int i = 0;
  bool tangency = false;
};

class IntersectionSeries {
 public:
  IntersectionSeries() = default;
  explicit IntersectionSeries(double angle) : angle_(angle) {}

  double angle() const { return angle_; }
  const std::vector<IntersectionSample>& samples() const { return samples_; }
  bool empty() const { return samples_.empty(); }
  std::size_t size() const { return samples_.size(); }
  const IntersectionSample& operator[](std::size_t k) const { return samples_[k]; }

  void append(const IntersectionSample& s) {
    if (!samples_.empty() && !(s.t > samples_.back().t)) {
      throw ContractError("intersection samples must have increasing times");
    }
    if (s.i < 0) throw ContractError("intersection counts are nonnegative");
    samples_.push_back(s);
  }

 private:
  double angle_ = 0.0;
  std::vector<IntersectionSample> samples_;
};

/// i(t) for one state. Crossings closer than two segment lengths along the
/// curve are flagged as a tangency in formation.
inline IntersectionCount sample_i(const SymmetricState& state, const TestLine& line) {
  const auto& net = state.net;
  const double tol = 1e-9 * network_diameter(net);
  if (net.anchor && std::abs(line.signed_distance(*net.anchor)) <= tol) {
    throw ContractError("the tree anchor lies on the test line");
  }
  double h = 0.0;
  for (std::size_t k = 0; k < net.defining.segment_count(); ++k) {
    h = std::max(h, net.defining.segment_length(k));
  }
  return count_line_intersections(net.defining.points(), line, tol, 2.0 * h);
}

// ---------------------------------------------------------------------------
// Certification
// ---------------------------------------------------------------------------

struct Violation {
  /// 'a': increase inside a regular interval; 'b': no drop across a
  /// collision; 'c': decrease without a nearby tangency.
  char clause = 'a';
  double t = 0.0;
  std::string detail;
};

struct Certification {
  bool pass = true;
  std::vector<Violation> violations;
  int first_i = 0;
  int last_i = 0;
};

/// Checks that i never increases between collisions, drops by at least one
/// across each collision, and only drops inside a regular interval next to
/// a flagged tangency (within two samples).
inline Certification certify_monotone(const IntersectionSeries& series, const EventLog& log) {
  if (series.empty()) throw ContractError("cannot certify an empty series");
  const auto& s = series.samples();
  const double t0 = s.front().t;
  const double t1 = s.back().t;
  for (const auto& e : log.events()) {
    if (e.t < t0 || e.t > t1) throw ContractError("event outside the sampled time span");
  }
  const std::vector<double> collisions = log.type0_times();
  Certification out;
  out.first_i = s.front().i;
  out.last_i = s.back().i;

  auto crosses_collision = [&](double a, double b) {
    return std::any_of(collisions.begin(), collisions.end(),
                       [&](double tk) { return a < tk && tk <= b; });
  };
  auto fmt = [](int from, int to) {
    return "i " + std::to_string(from) + " -> " + std::to_string(to);
  };

  for (std::size_t j = 0; j + 1 < s.size(); ++j) {
    if (crosses_collision(s[j].t, s[j + 1].t)) continue;
    if (s[j + 1].i > s[j].i) {
      out.violations.push_back({'a', s[j + 1].t, fmt(s[j].i, s[j + 1].i)});
    } else if (s[j + 1].i < s[j].i) {
      const std::size_t lo = j >= 1 ? j - 1 : 0;
      const std::size_t hi = std::min(s.size() - 1, j + 3);
      bool flagged = false;
      for (std::size_t k = lo; k <= hi; ++k) flagged = flagged || s[k].tangency;
      if (!flagged) {
        out.violations.push_back({'c', s[j + 1].t, fmt(s[j].i, s[j + 1].i) + " without tangency"});
      }
    }
  }
  for (double tk : collisions) {
    auto after = std::lower_bound(s.begin(), s.end(), tk,
                                  [](const IntersectionSample& a, double t) { return a.t < t; });
    if (after == s.begin() || after == s.end()) {
      throw ContractError("collision not bracketed by samples");
    }
    const auto before = std::prev(after);
    if (!(after->i <= before->i - 1)) {
      out.violations.push_back({'b', tk, fmt(before->i, after->i) + " across collision"});
    }
  }
  std::sort(out.violations.begin(), out.violations.end(),
            [](const Violation& a, const Violation& b) { return a.t < b.t; });
  out.pass = out.violations.empty();
  return out;
}

// ---------------------------------------------------------------------------
// Report
// ---------------------------------------------------------------------------

struct TimeValue {
  double t;
  double v;
};

/// Least-squares slope of v against t over the middle 60% of the samples
/// (by index).
inline std::optional<double> middle_rate(std::span<const TimeValue> samples) {
  const std::size_t n = samples.size();
  const std::size_t lo = n / 5;
  const std::size_t hi = n - n / 5;
  if (hi < lo + 3) return std::nullopt;
  double st = 0, sv = 0, stt = 0, stv = 0;
  const double m = static_cast<double>(hi - lo);
  for (std::size_t k = lo; k < hi; ++k) {
    st += samples[k].t;
    sv += samples[k].v;
    stt += samples[k].t * samples[k].t;
    stv += samples[k].t * samples[k].v;
  }
  const double den = m * stt - st * st;
  if (!(den > 0.0)) return std::nullopt;
  return (m * stv - st * sv) / den;
}

/// Area samples of one region between two events.
struct AreaPhase {
  NetworkType type = NetworkType::Theta;
  std::size_t region = 0;
  std::vector<TimeValue> samples;
};

struct AreaRate {
  NetworkType type = NetworkType::Theta;
  std::size_t region = 0;
  double measured = 0.0;
  double expected = 0.0;

  double relative_error() const { return std::abs(measured - expected) / expected; }
};

struct LineVerdict {
  double angle = 0.0;
  Certification certification;
};

struct RunReport {
  NetworkType initial_type = NetworkType::Tree;
  std::size_t type0_count = 0;
  std::optional<EventKind> terminal;
  std::optional<NetworkType> terminal_type;
  double flow_time = 0.0;
  std::vector<AreaRate> area_rates;
  std::vector<ExpanderFit> expander_fits;
  std::vector<LineVerdict> lines;
  std::optional<LimitClass> limit;

  bool monotone() const {
    return std::all_of(lines.begin(), lines.end(),
                       [](const LineVerdict& l) { return l.certification.pass; });
  }
};

/// Terminal event expected for runs started from `type`.
inline EventKind expected_terminal(NetworkType type) {
  return type == NetworkType::Tree ? EventKind::Converged : EventKind::Blowup;
}

inline RunReport run_report(NetworkType initial_type, const EventLog& log,
                            std::span<const IntersectionSeries> series,
                            std::span<const AreaPhase> phases, std::vector<ExpanderFit> fits,
                            std::optional<LimitClass> limit = std::nullopt) {
  RunReport r;
  r.initial_type = initial_type;
  r.type0_count = log.type0_count();
  if (!log.events().empty() && log.finished()) {
    r.terminal = log.events().back().kind;
    r.terminal_type = log.events().back().before;
  }
  r.flow_time = log.terminal_time().value_or(series.empty() || series.front().empty()
                                                 ? 0.0
                                                 : series.front().samples().back().t);
  for (const auto& p : phases) {
    if (auto rate = middle_rate(p.samples)) {
      r.area_rates.push_back({p.type, p.region, -*rate, gauss_bonnet_rate(p.type)});
    }
  }
  r.expander_fits = std::move(fits);
  for (const auto& s : series) r.lines.push_back({s.angle(), certify_monotone(s, log)});
  r.limit = limit;
  return r;
}

}  // namespace netflow
