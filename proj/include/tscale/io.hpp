#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tscale/solver.hpp"
#include "tscale/timescale.hpp"
#include "tscale/verify.hpp"
#include "tscale/wiener.hpp"

namespace tscale {

/// Shortest text that reads back to the same double (17 significant digits).
std::string format_double(double x);

/// Header row of node times, then one row of node values per path.
void write_ensemble_csv(std::ostream& os, const PathEnsemble& ensemble);

/// Inverse of write_ensemble_csv. The header times must be points of `ts`.
PathEnsemble read_ensemble_csv(std::istream& is, const TimeScale& ts, std::uint64_t seed = 0);

/// Sidecar for paths.csv: time scale spec, mesh, sizes, seed, generator.
nlohmann::json ensemble_metadata(const PathEnsemble& ensemble, std::string_view timescale_spec);

void to_json(nlohmann::json& j, const Segment& s);
void to_json(nlohmann::json& j, const Atom& a);
void to_json(nlohmann::json& j, const MeasureDecomposition& d);
/// Everything except the per-path shifts.
void to_json(nlohmann::json& j, const SolveReport& r);
void to_json(nlohmann::json& j, const TestReport& r);
void to_json(nlohmann::json& j, const ContractionTrial& t);

/// iteration,residual,log10_residual,epsilon
void write_residuals_csv(std::ostream& os, const SolveReport& report);

/// trial,epsilon,numerator,denominator,ratio,skipped
void write_trials_csv(std::ostream& os, const ContractionEstimate& estimate);

void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace tscale
