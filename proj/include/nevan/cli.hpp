#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nevan/nevanlinna.hpp"
#include "nevan/symbolic.hpp"
#include "nevan/theorems.hpp"

namespace nevan::cli {

/// Names accepted in a scenario's "checks" list.
const std::vector<std::string>& known_checks();

struct CheckSpec {
  std::string name;
  /// Check-specific options (everything in the entry except "check").
  nlohmann::json options = nlohmann::json::object();
};

/// A parsed and validated scenario file. See README.md for the schema.
struct Scenario {
  std::string name;
  std::string description;
  std::size_t p = 1;
  std::size_t n = 1;
  ProjectiveMap map{{Polynomial::constant(1, 1), Polynomial::variable(1, 0)}};
  HyperplaneFamily hyperplanes{{{1, 0}, {0, 1}}};
  unsigned d = 0;
  RadiusGrid grid = RadiusGrid::standard();
  QuadratureSpec quad;
  std::vector<Truncation> truncations;
  std::size_t lines = 400;
  std::uint64_t seed = 0;
  std::vector<CheckSpec> checks;
};

/// Throws ConfigError with a message that names the offending field.
Scenario parse_scenario(const nlohmann::json& doc, const std::string& fallback_name = "scenario");
Scenario load_scenario(const std::filesystem::path& path);

/// Command-line overrides applied on top of a scenario.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> grid_max;
  std::optional<std::size_t> quad_nodes;
  std::size_t threads = 1;
};

void apply_overrides(Scenario& scenario, const Overrides& overrides);

enum class CheckStatus { Pass, Fail, Error, NumericFailure };
std::string to_string(CheckStatus status);

struct CheckOutcome {
  std::string name;
  /// Distinguishes repeated checks, e.g. "fmt[H2]".
  std::string label;
  CheckStatus status = CheckStatus::Fail;
  std::string error;
  std::optional<VerificationReport> report;
};

struct ScenarioResult {
  FunctionalProfile profile;
  std::vector<CheckOutcome> checks;
  /// 0 all pass, 1 some check failed, 3 numeric failure.
  int exit_code = 0;
};

/// Runs the profile and every requested check. Checks are dispatched to a pool of
/// `threads` workers; results are merged in declaration order so the output does not
/// depend on the thread count. Throws ConfigError for inputs the checks cannot accept
/// and NumericError when the profile itself cannot be computed.
ScenarioResult run_scenario(const Scenario& scenario, std::size_t threads = 1);

/// One row per radius: r, T, then m and N[t] for each hyperplane (plus standard
/// errors of the estimated levels when p >= 2). 17 significant digits.
void write_profile_csv(std::ostream& out, const FunctionalProfile& profile);
nlohmann::json report_json(const Scenario& scenario, const ScenarioResult& result);
void write_report_text(std::ostream& out, const Scenario& scenario, const ScenarioResult& result);

struct CatalogEntry {
  std::string name;
  std::string description;
  std::vector<std::string> checks;
  std::filesystem::path path;
};

/// Every *.json scenario in `dir`, sorted by name.
std::vector<CatalogEntry> catalog(const std::filesystem::path& dir);

/// Bundled scenario directory (compile-time default, NEVAN_SCENARIO_DIR overrides).
std::filesystem::path scenario_dir();

/// Resolves a --config argument: an existing path, else a bundled scenario name.
std::filesystem::path resolve_config(const std::string& arg);

/// Full command-line entry point; returns the process exit code.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nevan::cli
