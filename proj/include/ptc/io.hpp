// io.hpp: text output helpers shared by the CLI and the exporters.  All
// numeric output uses full round-trip precision.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ptc/adiabatic.hpp"
#include "ptc/classical.hpp"
#include "ptc/master_eq.hpp"
#include "ptc/observables.hpp"
#include "ptc/params.hpp"

namespace ptc {

// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

// Trajectory CSV: t_ms, Na, rescaled_Na, purity, p0..pK (populations when
// recorded).  rescale_factor multiplies Na into the rescaled column.
std::string trajectory_csv(const Trajectory& trajectory, double rescale_factor);

// Classical CSV: t_ms, re_alpha, im_alpha, abs2_alpha.
std::string classical_csv(const ClassicalTrajectory& trajectory);

// Husimi matrix CSV (resolution x resolution Q values, rows indexed by q)
// and the flat q, p, Q long format.
std::string husimi_csv(const HusimiGrid& grid);
std::string husimi_long_csv(const HusimiGrid& grid);
nlohmann::ordered_json husimi_axes_json(const HusimiGrid& grid);

nlohmann::ordered_json validation_report_json(const ValidationReport& report);

// Operator dump: dimension plus nonzero entries as (row, col, re, im).
nlohmann::ordered_json operator_json(const Operator& op, double zero_tol = 0.0);
nlohmann::ordered_json effective_model_json(const EffectiveModel& model);

void write_text_file(const std::filesystem::path& path, const std::string& content);

} // namespace ptc
