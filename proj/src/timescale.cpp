#include "tscale/timescale.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <string>

#include "tscale/error.hpp"

namespace tscale {

double MeasureDecomposition::continuous_mass() const {
  return std::accumulate(continuous_segments.begin(), continuous_segments.end(), 0.0,
                         [](double acc, const Segment& s) { return acc + s.length(); });
}

double MeasureDecomposition::atomic_mass() const {
  return std::accumulate(atoms.begin(), atoms.end(), 0.0,
                         [](double acc, const Atom& a) { return acc + a.weight; });
}

TimeScale::TimeScale(std::vector<Segment> segments) : segments_(std::move(segments)) {
  if (segments_.empty()) throw InvalidArgument("time scale needs at least one segment");
  if (segments_.front().lo != 0.0) throw InvalidArgument("time scale must contain 0");
  if (segments_.back().hi != 1.0) throw InvalidArgument("time scale must contain 1");
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const Segment& s = segments_[i];
    if (!std::isfinite(s.lo) || !std::isfinite(s.hi) || s.lo > s.hi)
      throw InvalidArgument("segment endpoints out of order");
    if (s.lo < 0.0 || s.hi > 1.0) throw InvalidArgument("time scale must lie in [0, 1]");
    if (i > 0 && !(segments_[i - 1].hi + 2 * kMembershipTol < s.lo))
      throw InvalidArgument("segments must be sorted and separated");
  }
}

TimeScale TimeScale::interval() { return TimeScale({{0.0, 1.0}}); }

TimeScale TimeScale::uniform(int n) {
  if (n < 1) throw InvalidArgument("uniform scale needs n >= 1");
  std::vector<Segment> segs;
  segs.reserve(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) {
    const double t = static_cast<double>(k) / n;
    segs.push_back({t, t});
  }
  return TimeScale(std::move(segs));
}

TimeScale TimeScale::geometric(double q, int n, double floor) {
  if (!(q > 0.0 && q < 1.0)) throw InvalidArgument("geometric ratio must lie in (0, 1)");
  if (n < 0) throw InvalidArgument("geometric scale needs n >= 0");
  if (!(floor > 0.0)) throw InvalidArgument("truncation floor must be positive");
  std::vector<double> points{0.0};
  bool truncated = false;
  for (int k = 0; k <= n; ++k) {
    const double t = std::pow(q, k);
    if (t < floor) {
      truncated = true;
      break;
    }
    points.push_back(t);
  }
  TimeScale ts = from_points(std::move(points));
  ts.truncated_at_zero_ = truncated;
  return ts;
}

TimeScale TimeScale::cantor(int level) {
  if (level < 0 || level > 30) throw InvalidArgument("cantor level must lie in [0, 30]");
  // integer endpoints on the 3^level lattice keep every endpoint a correctly
  // rounded rational after the final division
  std::vector<std::pair<long long, long long>> pieces{{0, 1}};
  for (int l = 0; l < level; ++l) {
    std::vector<std::pair<long long, long long>> next;
    next.reserve(pieces.size() * 2);
    for (auto [a, b] : pieces) {
      a *= 3;
      b *= 3;
      const long long third = (b - a) / 3;
      next.emplace_back(a, a + third);
      next.emplace_back(b - third, b);
    }
    pieces = std::move(next);
  }
  const double scale = std::pow(3.0, level);
  std::vector<Segment> segs;
  segs.reserve(pieces.size());
  for (auto [a, b] : pieces) segs.push_back({a / scale, b / scale});
  return TimeScale(std::move(segs));
}

TimeScale TimeScale::from_points(std::vector<double> points) {
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  std::vector<Segment> segs;
  segs.reserve(points.size());
  for (double p : points) segs.push_back({p, p});
  return TimeScale(std::move(segs));
}

TimeScale::Location TimeScale::locate(double t) const {
  if (!std::isfinite(t)) throw PointNotInTimeScale(t);
  // first segment whose lo exceeds t + tol; the candidate is the one before it
  auto it = std::upper_bound(segments_.begin(), segments_.end(), t + kMembershipTol,
                             [](double v, const Segment& s) { return v < s.lo; });
  if (it == segments_.begin()) throw PointNotInTimeScale(t);
  const std::size_t idx = static_cast<std::size_t>(std::distance(segments_.begin(), it)) - 1;
  const Segment& s = segments_[idx];
  if (t > s.hi + kMembershipTol) throw PointNotInTimeScale(t);
  double p = t;
  if (std::abs(t - s.hi) <= kMembershipTol) {
    p = s.hi;
  } else if (std::abs(t - s.lo) <= kMembershipTol) {
    p = s.lo;
  }
  return {idx, p};
}

bool TimeScale::contains(double t) const noexcept {
  try {
    locate(t);
    return true;
  } catch (const PointNotInTimeScale&) {
    return false;
  }
}

double TimeScale::snap(double t) const { return locate(t).point; }

double TimeScale::forward_jump(double t) const {
  const Location loc = locate(t);
  const Segment& s = segments_[loc.segment];
  if (loc.point != s.hi) return loc.point;
  if (loc.segment + 1 == segments_.size()) return 1.0;
  return segments_[loc.segment + 1].lo;
}

double TimeScale::backward_jump(double t) const {
  const Location loc = locate(t);
  const Segment& s = segments_[loc.segment];
  if (loc.point != s.lo) return loc.point;
  if (loc.segment == 0) return 0.0;
  return segments_[loc.segment - 1].hi;
}

double TimeScale::graininess(double t) const {
  const double p = snap(t);
  return forward_jump(p) - p;
}

PointClass TimeScale::classify(double t) const {
  const double p = snap(t);
  PointClass c;
  if (p != 1.0) {
    const bool scattered = graininess(p) > 0.0 && !(p == 0.0 && truncated_at_zero_);
    c.right_scattered = scattered;
    c.right_dense = !scattered;
  }
  if (p != 0.0) {
    const bool scattered = backward_jump(p) < p;
    c.left_scattered = scattered;
    c.left_dense = !scattered;
  }
  return c;
}

double TimeScale::measure_of_interval(double s, double t) const {
  const double a = snap(s);
  const double b = snap(t);
  if (a > b) throw OrderError("measure_of_interval: s > t");
  return forward_jump(b) - a;
}

MeasureDecomposition lebesgue_decomposition(const TimeScale& ts) {
  MeasureDecomposition d;
  const auto& segs = ts.segments();
  for (std::size_t i = 0; i < segs.size(); ++i) {
    if (!segs[i].degenerate()) d.continuous_segments.push_back(segs[i]);
    if (i + 1 < segs.size()) d.atoms.push_back({segs[i].hi, segs[i + 1].lo - segs[i].hi});
  }
  return d;
}

double delta_integral(const TimeScale& ts,
                      const std::function<double(double)>& f,
                      double s,
                      double t,
                      Window window,
                      int panels) {
  if (panels < 1) throw InvalidArgument("delta_integral needs at least one panel");
  const double a = ts.snap(s);
  const double b = ts.snap(t);
  if (a > b) throw OrderError("delta_integral: window start after end");

  double total = 0.0;
  const auto& segs = ts.segments();
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const Segment& seg = segs[i];
    const double lo = std::max(seg.lo, a);
    const double hi = std::min(seg.hi, b);
    if (lo < hi) {
      const double h = (hi - lo) / panels;
      double acc = 0.0;
      for (int k = 0; k < panels; ++k) acc += f(lo + (k + 0.5) * h);
      total += acc * h;
    }
    // atom at the right end of every segment but the last
    if (i + 1 < segs.size()) {
      const double tau = seg.hi;
      const bool inside = tau >= a && (window == Window::closed ? tau <= b : tau < b);
      if (inside) total += (segs[i + 1].lo - tau) * f(tau);
    }
  }
  return total;
}

namespace {

double parse_double(std::string_view text, std::string_view spec) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty())
    throw ParseError("bad number '" + std::string(text) + "' in time scale spec '" +
                     std::string(spec) + "'");
  return v;
}

int parse_int(std::string_view text, std::string_view spec) {
  const double v = parse_double(text, spec);
  if (v != std::floor(v) || std::abs(v) > 1e9)
    throw ParseError("expected an integer in time scale spec '" + std::string(spec) + "'");
  return static_cast<int>(v);
}

}  // namespace

TimeScale parse_timescale(std::string_view spec) {
  const auto colon = spec.find(':');
  const std::string_view kind = spec.substr(0, colon);
  const std::string_view args = colon == std::string_view::npos ? std::string_view{} : spec.substr(colon + 1);
  try {
    if (kind == "interval" && colon == std::string_view::npos) return TimeScale::interval();
    if (kind == "uniform") return TimeScale::uniform(parse_int(args, spec));
    if (kind == "cantor") return TimeScale::cantor(parse_int(args, spec));
    if (kind == "geometric") {
      const auto comma = args.find(',');
      if (comma == std::string_view::npos) throw ParseError("geometric spec needs '<q>,<n>'");
      return TimeScale::geometric(parse_double(args.substr(0, comma), spec),
                                  parse_int(args.substr(comma + 1), spec));
    }
    if (kind == "explicit") {
      if (args.size() < 2 || args.front() != '[' || args.back() != ']')
        throw ParseError("explicit spec needs a bracketed list");
      std::string_view body = args.substr(1, args.size() - 2);
      std::vector<double> points;
      while (!body.empty()) {
        const auto comma = body.find(',');
        points.push_back(parse_double(body.substr(0, comma), spec));
        if (comma == std::string_view::npos) break;
        body.remove_prefix(comma + 1);
      }
      return TimeScale::from_points(std::move(points));
    }
  } catch (const InvalidArgument& e) {
    throw ParseError("invalid time scale '" + std::string(spec) + "': " + e.what());
  }
  throw ParseError("unknown time scale spec '" + std::string(spec) + "'");
}

}  // namespace tscale
