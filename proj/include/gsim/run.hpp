#pragma once

#include <iosfwd>
#include <string>

#include "gsim/config.hpp"
#include "gsim/scenarios.hpp"

namespace gsim {

inline constexpr const char* kVersion = "0.1.0";

HbtConfig make_hbt_config(const RunConfig& cfg);
GhostConfig make_ghost_config(const RunConfig& cfg);

// Resolved temporal-mode count: the explicit value, or the suggested-M
// helper when the config says auto.
double resolve_temporal_modes(const RunConfig& cfg);

// Executes the configured scenario, writes CSV outputs plus a manifest
// under out_prefix, and logs a human-readable summary. Returns the process
// exit code (0 success, 2 config error, 3 numerical/geometry error,
// 4 insufficient statistics).
int run_scenario(const RunConfig& cfg, const std::string& out_prefix, std::ostream& log);

// Quick built-in sanity suite (Gaussian beam, propagation energy,
// exponential moments, Poisson counts, intensity-correlation identity).
// Prints one pass/fail line per check.
bool run_selftest(std::ostream& log);

}  // namespace gsim
