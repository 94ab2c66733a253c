// config.hpp: the flat key = value run-configuration format.
//
// Grammar: '#' starts a comment, blank lines are ignored, '[section]' lines
// open a section, and every other line is 'key = value' inside the current
// section.  Values are numbers (full round-trip precision), names, or
// comma-separated lists.  Unknown sections or keys are errors.  Frequencies
// are nu-values in kHz; phases in rad; times in ms.
//
// The emitter produces a canonical form: parse(emit(c)) reproduces c
// exactly, and the run pipeline always routes through this text form, so a
// preset run and a run from its dumped config are bitwise the same run.

#pragma once

#include <string>

#include "ptc/presets.hpp"

namespace ptc {

struct IntegratorConfig {
    double rtol = 1e-8;
    double atol = 1e-12;
    double max_trace_drift = 1e-8;
    double max_hermiticity = 1e-10;
    double min_eigenvalue = -1e-6;
    int eigenvalue_stride = 1;
};

struct RunConfig {
    Scenario scenario;
    IntegratorConfig integrator;
};

// Throws std::domain_error with a line reference on malformed input.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

std::string emit_config(const RunConfig& config);

// preset(name) wrapped with default integrator settings, canonicalized
// through one emit/parse round.
RunConfig config_for_preset(const std::string& name);

} // namespace ptc
