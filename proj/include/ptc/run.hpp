// run.hpp: scenario execution shared by the CLI and the acceptance suite.
//
// A run resolves the scenario into one quantum integration per sweep member
// (plus the matching classical trajectory and any Husimi grids), validates
// the rate hierarchy, and can emit the whole result as data files plus a
// manifest.  Members execute in parallel up to the configured degree; the
// manifest is written once at the end.

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ptc/classical.hpp"
#include "ptc/config.hpp"
#include "ptc/master_eq.hpp"
#include "ptc/observables.hpp"
#include "ptc/params.hpp"

namespace ptc {

struct MemberResult {
    std::string label;          // empty for a single-member scenario
    EffectiveRates rates;       // angular
    double delta = 0.0;         // angular
    Cplx epsilon{0.0, 0.0};     // drive actually used (angular)
    double n_bar0 = 0.0;        // thermal initial state (0 = vacuum)
    bool thermal = false;
    std::optional<double> omega2_khz; // the member's sweep value, when swept
    double rescale_factor = 1.0; // (Omega_2 / 2pi kHz)^2, or 1 without lasers
    Trajectory trajectory;
    InvariantSummary invariants;
    ClassicalTrajectory classical;           // when "classical" is requested
    std::vector<HusimiGrid> husimi;          // aligned with scenario husimi_at_ms
    double classical_radius = 0.0;           // sqrt(g / 2 kappa)
    std::optional<ValidationReport> validation; // per-member chain (lasers only)
    double wall_seconds = 0.0;
};

struct RunResult {
    RunConfig config;                          // resolved (canonical) config
    std::optional<ValidationReport> validation; // absent for direct-rate runs
    std::vector<MemberResult> members;
    double wall_seconds = 0.0;
};

struct RunOptions {
    int parallel = 1;
    bool force = false; // proceed past a hard validation failure
    // Abort threshold: a link below this ratio is a hard failure.
    double hard_ratio = 2.0;
    double validation_threshold = 10.0;
};

// Raised when the rate hierarchy fails hard and force is not set.
class ValidationFailure : public std::runtime_error {
  public:
    explicit ValidationFailure(const std::string& what) : std::runtime_error(what) {}
};

RunResult run_scenario(const RunConfig& config, const RunOptions& options = {});

struct OutputOptions {
    std::filesystem::path out_dir;
    bool csv = true;
    bool json = true;
    bool husimi_long = false; // additionally emit flat q, p, Q files
};

// Writes trajectory/classical/husimi/validation files per the scenario's
// output list, the canonical config dump, and manifest.json.  Returns the
// written file names.  Throws std::runtime_error on I/O failure.
std::vector<std::string> write_outputs(const RunResult& result, const OutputOptions& options);

// The manifest document (timing fields live under "timing").
nlohmann::ordered_json manifest_json(const RunResult& result);

} // namespace ptc
