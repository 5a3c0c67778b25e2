#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace tscale {

/// Closed interval [lo, hi] of a time scale; lo == hi encodes an isolated point.
struct Segment {
  double lo = 0.0;
  double hi = 0.0;

  bool degenerate() const noexcept { return lo == hi; }
  double length() const noexcept { return hi - lo; }
  friend bool operator==(const Segment&, const Segment&) = default;
};

/// Hilger classification of a point. At t = 0 both left flags are false,
/// at t = 1 both right flags are false.
struct PointClass {
  bool right_scattered = false;
  bool right_dense = false;
  bool left_scattered = false;
  bool left_dense = false;

  friend bool operator==(const PointClass&, const PointClass&) = default;
};

struct Atom {
  double t = 0.0;
  double weight = 0.0;
};

/// Lebesgue part plus atoms of the Guseinov measure.
struct MeasureDecomposition {
  std::vector<Segment> continuous_segments;
  std::vector<Atom> atoms;

  double continuous_mass() const;
  double atomic_mass() const;
  double total_mass() const { return continuous_mass() + atomic_mass(); }
};

/// A closed set {0, 1} ⊆ T ⊆ [0, 1] stored as a sorted union of disjoint
/// closed intervals. Immutable after construction.
class TimeScale {
 public:
  /// Points closer than this to the stored set count as members.
  static constexpr double kMembershipTol = 1e-12;
  /// Sequences accumulating at 0 are cut below this value.
  static constexpr double kDefaultFloor = 1e-6;

  explicit TimeScale(std::vector<Segment> segments);

  static TimeScale interval();
  /// {k/n : 0 <= k <= n}.
  static TimeScale uniform(int n);
  /// {0} ∪ {q^k : 0 <= k <= n}; terms below `floor` are dropped and the
  /// scale is marked as a truncated accumulation at 0.
  static TimeScale geometric(double q, int n, double floor = kDefaultFloor);
  /// Level-n approximation of the triadic Cantor set (2^n segments).
  static TimeScale cantor(int level);
  /// Finite scale; points are sorted and deduplicated.
  static TimeScale from_points(std::vector<double> points);

  const std::vector<Segment>& segments() const noexcept { return segments_; }
  std::size_t segment_count() const noexcept { return segments_.size(); }

  /// True when the representation cut off a sequence accumulating at 0.
  /// In that case 0 is reported right-dense by classify() even though the
  /// finite representation gives it a residual atom.
  bool truncated_at_zero() const noexcept { return truncated_at_zero_; }

  bool contains(double t) const noexcept;

  double forward_jump(double t) const;
  double backward_jump(double t) const;
  double graininess(double t) const;
  PointClass classify(double t) const;

  /// λ_Δ([s, t]_T) = σ(t) − s.
  double measure_of_interval(double s, double t) const;

  /// Stored value of the member point within tolerance of t.
  double snap(double t) const;

  friend bool operator==(const TimeScale&, const TimeScale&) = default;

 private:
  struct Location {
    std::size_t segment;
    double point;  // snapped to an endpoint when within tolerance
  };

  Location locate(double t) const;

  std::vector<Segment> segments_;
  bool truncated_at_zero_ = false;
};

MeasureDecomposition lebesgue_decomposition(const TimeScale& ts);

enum class Window {
  half_open,  // [s, t)_T
  closed,     // [s, t]_T
};

/// ∫_{window} f dλ_Δ: exact atom sum plus composite midpoint rule with
/// `panels` panels on each continuous piece.
double delta_integral(const TimeScale& ts,
                      const std::function<double(double)>& f,
                      double s,
                      double t,
                      Window window = Window::half_open,
                      int panels = 64);

/// Parses `interval`, `uniform:<n>`, `geometric:<q>,<n>`, `cantor:<level>`
/// or `explicit:[p0,...,pk]`.
TimeScale parse_timescale(std::string_view spec);

}  // namespace tscale
