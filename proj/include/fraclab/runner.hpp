#pragma once

#include <string>

#include "fraclab/config.hpp"

namespace fraclab {

/// Executes a subcommand ({specfun-test, eigs, reduce, runge, dtn, transfer,
/// instability, all}), writing CSV tables and a JSON manifest into cfg.out.
/// Returns 0 iff every hard assertion passed (fitted-constant checks only
/// warn). CSV bytes are deterministic for a fixed seed; timing lives only in
/// the manifest.
int run_subcommand(const std::string& name, const ExperimentConfig& cfg);

}  // namespace fraclab
