#pragma once

// Scenario drivers behind the CLI. Each writes its files into `outdir` and
// returns the JSON summary text (also written as summary.json).

#include <string>

#include "vpbwave/config.hpp"

namespace vpb {

const char* version_string();

std::string cmd_riemann(const RunConfig& cfg, const std::string& outdir);
std::string cmd_ansatz(const RunConfig& cfg, const std::string& outdir);
std::string cmd_simulate(const RunConfig& cfg, const std::string& outdir);
std::string cmd_kinetic_check(const RunConfig& cfg, const std::string& outdir);
std::string cmd_fit(const RunConfig& cfg, const std::string& outdir);

/// Dispatches on cfg.scenario.
std::string run_scenario(const RunConfig& cfg, const std::string& outdir);

}  // namespace vpb
