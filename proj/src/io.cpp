#include "tscale/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "tscale/error.hpp"

namespace tscale {

namespace {

std::vector<double> parse_row(const std::string& line, std::size_t row) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= line.size()) {
    std::size_t end = line.find(',', pos);
    if (end == std::string::npos) end = line.size();
    double v = 0.0;
    const char* first = line.data() + pos;
    const char* last = line.data() + end;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (first == last || ec != std::errc{} || ptr != last)
      throw ParseError("paths csv: bad number on row " + std::to_string(row));
    out.push_back(v);
    pos = end + 1;
  }
  return out;
}

}  // namespace

std::string format_double(double x) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10) << x;
  return os.str();
}

void write_ensemble_csv(std::ostream& os, const PathEnsemble& ensemble) {
  const auto times = ensemble.grid->times();
  for (std::size_t k = 0; k < times.size(); ++k) os << (k ? "," : "") << format_double(times[k]);
  os << '\n';
  for (const auto& p : ensemble.paths) {
    const auto v = p.values();
    for (std::size_t k = 0; k < v.size(); ++k) os << (k ? "," : "") << format_double(v[k]);
    os << '\n';
  }
}

PathEnsemble read_ensemble_csv(std::istream& is, const TimeScale& ts, std::uint64_t seed) {
  std::string line;
  if (!std::getline(is, line)) throw ParseError("paths csv: missing header");
  auto grid = std::make_shared<const DeltaGrid>(DeltaGrid::from_nodes(ts, parse_row(line, 0)));
  PathEnsemble ensemble{grid, {}, seed};
  std::size_t row = 0;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty()) continue;
    auto values = parse_row(line, row);
    if (values.size() != grid->node_count())
      throw ParseError("paths csv: row " + std::to_string(row) + " has the wrong width");
    ensemble.paths.emplace_back(grid, std::move(values));
  }
  return ensemble;
}

nlohmann::json ensemble_metadata(const PathEnsemble& ensemble, std::string_view timescale_spec) {
  return {
      {"timescale", std::string(timescale_spec)},
      {"mesh", ensemble.grid->mesh()},
      {"nodes", ensemble.grid->node_count()},
      {"cells", ensemble.grid->cell_count()},
      {"n_paths", ensemble.size()},
      {"seed", ensemble.seed},
      {"generator", "mt19937_64, one splitmix64-seeded stream per path"},
  };
}

void to_json(nlohmann::json& j, const Segment& s) { j = {{"lo", s.lo}, {"hi", s.hi}}; }

void to_json(nlohmann::json& j, const Atom& a) { j = {{"t", a.t}, {"weight", a.weight}}; }

void to_json(nlohmann::json& j, const MeasureDecomposition& d) {
  j = {{"continuous_segments", d.continuous_segments},
       {"atoms", d.atoms},
       {"continuous_mass", d.continuous_mass()},
       {"atomic_mass", d.atomic_mass()},
       {"total_mass", d.total_mass()}};
}

void to_json(nlohmann::json& j, const SolveReport& r) {
  j = {{"converged", r.converged},
       {"iterations", r.iterations},
       {"tolerance", r.tolerance},
       {"residual_history", r.residual_history},
       {"epsilon_history", r.epsilon_history},
       {"max_residual_ratio", r.max_residual_ratio()},
       {"bound_violations", r.bound_violations},
       {"warnings", r.warnings},
       {"seed", r.seed}};
}

void to_json(nlohmann::json& j, const TestReport& r) {
  j = {{"name", r.name},           {"statistic", r.statistic}, {"threshold", r.threshold},
       {"sample_size", r.sample_size}, {"pass", r.pass},       {"seed", r.seed}};
}

void to_json(nlohmann::json& j, const ContractionTrial& t) {
  j = {{"trial", t.trial},       {"epsilon", t.epsilon}, {"numerator", t.numerator},
       {"denominator", t.denominator}, {"ratio", t.ratio}, {"skipped", t.skipped}};
}

void write_residuals_csv(std::ostream& os, const SolveReport& report) {
  os << "iteration,residual,log10_residual,epsilon\n";
  for (std::size_t i = 0; i < report.residual_history.size(); ++i) {
    const double r = report.residual_history[i];
    os << i << ',' << format_double(r) << ',' << format_double(std::log10(r)) << ',';
    if (i > 0) os << format_double(report.epsilon_history[i - 1]);
    os << '\n';
  }
}

void write_trials_csv(std::ostream& os, const ContractionEstimate& estimate) {
  os << "trial,epsilon,numerator,denominator,ratio,skipped\n";
  for (const auto& t : estimate.trials) {
    os << t.trial << ',' << format_double(t.epsilon) << ',' << format_double(t.numerator) << ','
       << format_double(t.denominator) << ',' << format_double(t.ratio) << ',' << (t.skipped ? 1 : 0)
       << '\n';
  }
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error("failed writing " + path.string());
}

}  // namespace tscale
