#include "tscale/drift.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <optional>

#include "tscale/error.hpp"

namespace tscale {

DriftFunctional::DriftFunctional(std::string name, double bound, Eval eval)
    : name_(std::move(name)), bound_(bound), eval_(std::move(eval)) {
  if (!(bound_ >= 0.0) || !std::isfinite(bound_))
    throw InvalidArgument("drift bound must be finite and nonnegative");
  if (!eval_) throw InvalidArgument("drift needs an evaluator");
}

DriftFunctional DriftFunctional::non_adapted(std::string name, double bound, Eval eval) {
  DriftFunctional d(std::move(name), bound, std::move(eval));
  d.adapted_ = false;
  return d;
}

double DriftFunctional::operator()(std::size_t node, std::span<const double> path,
                                   const DeltaGrid& grid) const {
  if (adapted_) return eval_(node, path.first(node + 1), grid);
  return eval_(node, path, grid);
}

bool DriftFunctional::within_bound(double value) const noexcept {
  return std::abs(value) <= bound_ * (1.0 + 1e-12);
}

DriftFunctional sin_delay_drift(double a, RhoConvention rho) {
  const bool exact = rho == RhoConvention::exact;
  return DriftFunctional(exact ? "sin" : "sin-mesh", std::abs(a),
                         [a, exact](std::size_t k, std::span<const double> x, const DeltaGrid& g) {
                           const std::size_t prev = exact ? g.rho_index(k) : g.mesh_predecessor(k);
                           return a * std::sin(x[k] - x[prev]);
                         });
}

DriftFunctional constant_drift(double c) {
  return DriftFunctional("constant", std::abs(c),
                         [c](std::size_t, std::span<const double>, const DeltaGrid&) { return c; });
}

DriftFunctional markov_drift(std::string name, std::function<double(double, double)> g, double bound) {
  return DriftFunctional(std::move(name), bound,
                         [g = std::move(g)](std::size_t k, std::span<const double> x,
                                            const DeltaGrid& grid) { return g(grid.time(k), x[k]); });
}

DriftFunctional tabulated_past_drift(std::vector<std::size_t> lags, std::vector<double> weights,
                                     double amplitude) {
  if (lags.size() != weights.size() || lags.empty())
    throw InvalidArgument("past drift needs matching, nonempty lags and weights");
  return DriftFunctional(
      "past", std::abs(amplitude),
      [lags = std::move(lags), weights = std::move(weights), amplitude](
          std::size_t k, std::span<const double> x, const DeltaGrid&) {
        double s = 0.0;
        for (std::size_t i = 0; i < lags.size(); ++i) s += weights[i] * x[k - std::min(k, lags[i])];
        return amplitude * std::tanh(s);
      });
}

DriftFunctional lookahead_drift(double a) {
  return DriftFunctional::non_adapted(
      "lookahead", std::abs(a), [a](std::size_t k, std::span<const double> x, const DeltaGrid&) {
        const std::size_t ahead = std::min(k + 2, x.size() - 1);
        return a * std::sin(x[ahead] - x[k]);
      });
}

namespace {

double number(std::string_view text, std::string_view spec) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v))
    throw ParseError("bad number in drift spec '" + std::string(spec) + "'");
  return v;
}

}  // namespace

DriftFunctional parse_drift(std::string_view spec) {
  std::string_view body = spec;
  std::optional<double> bound_override;
  if (const auto at = body.find('@'); at != std::string_view::npos) {
    bound_override = number(body.substr(at + 1), spec);
    body = body.substr(0, at);
  }
  const auto colon = body.find(':');
  const std::string_view kind = body.substr(0, colon);
  const bool has_arg = colon != std::string_view::npos;
  auto arg = [&] {
    if (!has_arg) throw ParseError("drift '" + std::string(kind) + "' needs a parameter");
    return number(body.substr(colon + 1), spec);
  };

  auto with_bound = [&](DriftFunctional d) {
    if (!bound_override) return d;
    // same evaluator, declared bound replaced
    const bool adapted = d.adapted();
    DriftFunctional::Eval eval = [d](std::size_t k, std::span<const double> x, const DeltaGrid& g) {
      return d(k, x, g);
    };
    if (adapted) return DriftFunctional(d.name(), *bound_override, std::move(eval));
    return DriftFunctional::non_adapted(d.name(), *bound_override, std::move(eval));
  };

  if (kind == "zero" && !has_arg) return with_bound(constant_drift(0.0));
  if (kind == "constant") return with_bound(constant_drift(arg()));
  if (kind == "sin") return with_bound(sin_delay_drift(arg(), RhoConvention::exact));
  if (kind == "sin-mesh") return with_bound(sin_delay_drift(arg(), RhoConvention::mesh_predecessor));
  if (kind == "markov-sin") {
    const double a = arg();
    return with_bound(markov_drift(
        "markov-sin", [a](double, double x) { return a * std::sin(x); }, std::abs(a)));
  }
  if (kind == "past") return with_bound(tabulated_past_drift({1, 2, 4}, {1.0, -0.5, 0.25}, arg()));
  if (kind == "lookahead") return with_bound(lookahead_drift(arg()));
  throw ParseError("unknown drift spec '" + std::string(spec) + "'");
}

}  // namespace tscale
