#include "tscale/verify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "tscale/error.hpp"
#include "tscale/parallel.hpp"
#include "tscale/stats.hpp"

namespace tscale {

namespace {

constexpr double kZThreshold = 3.0;

void require_size(const PathEnsemble& ensemble) {
  if (ensemble.size() < kMinEnsemble) throw EnsembleTooSmall(ensemble.size(), kMinEnsemble);
}

/// Node indices at the given fractions of the last node, never node 0.
std::vector<std::size_t> nodes_at(const DeltaGrid& g, std::initializer_list<double> fractions) {
  const std::size_t last = g.node_count() - 1;
  std::vector<std::size_t> out;
  for (double f : fractions) {
    const auto k = static_cast<std::size_t>(std::lround(f * static_cast<double>(last)));
    out.push_back(std::clamp<std::size_t>(k, 1, last));
  }
  return out;
}

std::string time_label(const DeltaGrid& g, std::size_t node) {
  std::ostringstream os;
  os << std::setprecision(6) << g.time(node);
  return os.str();
}

}  // namespace

TestReport make_report(std::string name, double statistic, double threshold,
                       std::size_t sample_size, std::uint64_t seed) {
  TestReport r;
  r.name = std::move(name);
  r.statistic = statistic;
  r.threshold = threshold;
  r.sample_size = sample_size;
  r.pass = statistic <= threshold;  // NaN fails
  r.seed = seed;
  return r;
}

std::vector<TestReport> brownianity_suite(const PathEnsemble& ensemble, unsigned workers) {
  require_size(ensemble);
  const DeltaGrid& g = *ensemble.grid;
  const std::size_t n = ensemble.size();
  const std::size_t cells = g.cell_count();
  const std::uint64_t seed = ensemble.seed;

  // standardized[j * n + i] = (W_{j+1} − W_j) / √w_j for path i
  std::vector<double> standardized(cells * n);
  std::vector<double> mean_z(cells), var_z(cells);
  parallel_for(cells, workers, [&](std::size_t j) {
    std::vector<double> inc(n), sq(n);
    const double w = g.weight(j);
    for (std::size_t i = 0; i < n; ++i) {
      const auto v = ensemble.paths[i].values();
      inc[i] = v[j + 1] - v[j];
      sq[i] = inc[i] * inc[i];
      standardized[j * n + i] = inc[i] / std::sqrt(w);
    }
    const auto m = stats::mean_estimate(inc);
    const auto s = stats::mean_estimate(sq);
    mean_z[j] = stats::z_score(m.mean, 0.0, m.standard_error);
    var_z[j] = stats::z_score(s.mean, w, s.standard_error);
  });

  std::vector<TestReport> out;
  out.push_back(make_report("increment_mean", *std::max_element(mean_z.begin(), mean_z.end()),
                            kZThreshold, n, seed));
  out.push_back(make_report("increment_variance", *std::max_element(var_z.begin(), var_z.end()),
                            kZThreshold, n, seed));

  const auto picks = nodes_at(g, {0.25, 0.5, 0.75, 1.0});
  const std::array<std::pair<std::size_t, std::size_t>, 5> pairs{{{picks[0], picks[1]},
                                                                  {picks[1], picks[2]},
                                                                  {picks[0], picks[3]},
                                                                  {picks[2], picks[3]},
                                                                  {picks[1], picks[1]}}};
  double cov_z = 0.0;
  for (const auto& [a, b] : pairs) {
    std::vector<double> prod(n);
    for (std::size_t i = 0; i < n; ++i) prod[i] = ensemble.paths[i].value(a) * ensemble.paths[i].value(b);
    const auto e = stats::mean_estimate(prod);
    cov_z = std::max(cov_z, stats::z_score(e.mean, std::min(g.time(a), g.time(b)), e.standard_error));
  }
  out.push_back(make_report("covariance", cov_z, kZThreshold, n, seed));

  for (double lambda : {0.5, 1.0, 2.0}) {
    std::vector<double> re(standardized.size()), im(standardized.size());
    for (std::size_t i = 0; i < standardized.size(); ++i) {
      re[i] = std::cos(lambda * standardized[i]);
      im[i] = std::sin(lambda * standardized[i]);
    }
    const auto er = stats::mean_estimate(re);
    const auto ei = stats::mean_estimate(im);
    const double z = std::max(stats::z_score(er.mean, std::exp(-0.5 * lambda * lambda), er.standard_error),
                              stats::z_score(ei.mean, 0.0, ei.standard_error));
    std::ostringstream name;
    name << "char_function_lambda_" << lambda;
    out.push_back(make_report(name.str(), z, kZThreshold, standardized.size(), seed));
  }

  const std::size_t pooled = standardized.size();
  out.push_back(make_report("ks_normality", stats::ks_statistic_normal(std::move(standardized)),
                            stats::ks_critical_value_1pct(pooled), pooled, seed));
  return out;
}

TestReport girsanov_mean_check(const CMPath& h, const PathEnsemble& ensemble, GirsanovMode mode) {
  require_size(ensemble);
  std::vector<double> d(ensemble.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    d[i] = mode == GirsanovMode::standard ? girsanov_density(h, ensemble.paths[i]).density
                                          : std::exp(paley_wiener(h, ensemble.paths[i]));
  }
  const auto e = stats::mean_estimate(d);
  return make_report(mode == GirsanovMode::standard ? "girsanov_mean" : "girsanov_mean_no_half_norm",
                     stats::z_score(e.mean, 1.0, e.standard_error), kZThreshold, d.size(),
                     ensemble.seed);
}

std::vector<TestReport> change_of_variables_check(const CMPath& h, const PathEnsemble& ensemble) {
  require_size(ensemble);
  const DeltaGrid& g = *ensemble.grid;
  const std::size_t n = ensemble.size();
  std::vector<double> density(n);
  for (std::size_t i = 0; i < n; ++i) density[i] = girsanov_density(h, ensemble.paths[i]).density;

  std::vector<TestReport> out;
  for (std::size_t node : nodes_at(g, {1.0 / 3.0, 2.0 / 3.0, 1.0})) {
    for (int power : {1, 2}) {
      std::vector<double> diff(n);
      for (std::size_t i = 0; i < n; ++i) {
        const double w = ensemble.paths[i].value(node);
        const double shifted = w + h.value(node);
        diff[i] = std::pow(shifted, power) - std::pow(w, power) * density[i];
      }
      const auto e = stats::mean_estimate(diff);
      out.push_back(make_report("change_of_variables_m" + std::to_string(power) + "_t" +
                                    time_label(g, node),
                                stats::z_score(e.mean, 0.0, e.standard_error), kZThreshold, n,
                                ensemble.seed));
    }
  }
  return out;
}

TestReport paley_wiener_variance_check(const CMPath& h, const PathEnsemble& ensemble) {
  require_size(ensemble);
  std::vector<double> sq(ensemble.size());
  for (std::size_t i = 0; i < sq.size(); ++i) {
    const double x = paley_wiener(h, ensemble.paths[i]);
    sq[i] = x * x;
  }
  const auto e = stats::mean_estimate(sq);
  return make_report("paley_wiener_variance", stats::z_score(e.mean, h.norm_squared(), e.standard_error),
                     kZThreshold, sq.size(), ensemble.seed);
}

std::vector<TestReport> law_equivalence_check(const DriftFunctional& drift,
                                              const PathEnsemble& ensemble,
                                              const SolveReport& report) {
  if (!report.converged) throw NotConverged("law_equivalence_check needs a converged solve");
  require_size(ensemble);
  const DeltaGrid& g = *ensemble.grid;
  const std::size_t n = ensemble.size();
  const auto xs = strong_solution_map(drift, ensemble, report);

  std::vector<double> weight(n);
  std::size_t violations = report.bound_violations;
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = xs[i].values();
    double log_w = 0.0;
    for (std::size_t j = 0; j < g.cell_count(); ++j) {
      const double beta = drift(j, x, g);
      if (!drift.within_bound(beta)) ++violations;
      log_w += -beta * (x[j + 1] - x[j]) + 0.5 * beta * beta * g.weight(j);
    }
    weight[i] = std::exp(log_w);
  }

  std::vector<TestReport> out;
  const auto bad = static_cast<double>(std::count_if(weight.begin(), weight.end(), [](double w) {
    return !(std::isfinite(w) && w > 0.0);
  }));
  out.push_back(make_report("law_weight_positive", bad, 0.0, n, ensemble.seed));
  out.push_back(make_report("drift_bound", static_cast<double>(violations), 0.0, n, ensemble.seed));

  for (std::size_t node : nodes_at(g, {0.25, 0.5, 0.75, 1.0})) {
    for (int power : {1, 2}) {
      std::vector<double> diff(n);
      for (std::size_t i = 0; i < n; ++i)
        diff[i] = std::pow(xs[i].value(node), power) * weight[i] -
                  std::pow(ensemble.paths[i].value(node), power);
      const auto e = stats::mean_estimate(diff);
      out.push_back(make_report("law_m" + std::to_string(power) + "_t" + time_label(g, node),
                                stats::z_score(e.mean, 0.0, e.standard_error), kZThreshold, n,
                                ensemble.seed));
    }
  }
  return out;
}

TestReport filtration_prefix_check(const DriftFunctional& drift, const PathEnsemble& ensemble,
                                   const SolveReport& report, std::size_t probes,
                                   std::uint64_t seed) {
  if (!report.converged) throw NotConverged("filtration_prefix_check needs a converged solve");
  if (ensemble.paths.empty()) throw InvalidArgument("filtration_prefix_check needs paths");
  const DeltaGrid& g = *ensemble.grid;
  const std::size_t nodes = g.node_count();
  if (nodes < 3) throw InvalidArgument("filtration_prefix_check needs at least 3 nodes");
  const StrongSolutionMap F(drift, report);

  auto perturbed_after = [&](const SampledPath& p, std::size_t k, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> v(p.values().begin(), p.values().end());
    for (std::size_t j = k + 1; j < nodes; ++j) v[j] += normal(rng);
    return SampledPath(p.grid_ptr(), std::move(v));
  };
  auto prefix_gap = [](const SampledPath& a, const SampledPath& b, std::size_t k) {
    double worst = 0.0;
    for (std::size_t j = 0; j <= k; ++j) worst = std::max(worst, std::abs(a.value(j) - b.value(j)));
    return worst;
  };

  double worst = 0.0;
  for (std::size_t p = 0; p < probes; ++p) {
    Rng rng(stream_seed(seed, p));
    const std::size_t i = std::uniform_int_distribution<std::size_t>(0, ensemble.size() - 1)(rng);
    const std::size_t k = std::uniform_int_distribution<std::size_t>(0, nodes - 2)(rng);
    const SampledPath& b = ensemble.paths[i];

    const SampledPath x = F(b);
    worst = std::max(worst, prefix_gap(x, F(perturbed_after(b, k, rng)), k));
    worst = std::max(worst, prefix_gap(inverse_map(drift, x),
                                       inverse_map(drift, perturbed_after(x, k, rng)), k));
  }
  return make_report("filtration_prefix", worst, kPrefixTolerance, probes, seed);
}

std::string summary_line(const TestReport& r) {
  std::ostringstream os;
  os << (r.pass ? "PASS " : "FAIL ") << r.name << std::setprecision(6)
     << " statistic=" << r.statistic << " threshold=" << r.threshold << " n=" << r.sample_size
     << " seed=" << r.seed;
  return os.str();
}

bool all_pass(const std::vector<TestReport>& reports) {
  return std::all_of(reports.begin(), reports.end(), [](const TestReport& r) { return r.pass; });
}

}  // namespace tscale
