#pragma once

#include <filesystem>
#include <istream>
#include <string>

#include "hdloc/simharness.hpp"

namespace hdloc::cli {

/// Flat `key = value` text, one pair per line, `#` starts a comment.
/// Keys are the ExperimentConfig field names (scenario, n, p, allocation,
/// signal, tests, alpha, reps, master_seed, size_corrected, null_reps,
/// trace_mode) plus the law parameters distribution, df, gamma, tau and rho.
/// Unknown or repeated keys are errors naming the line.
ExperimentConfig parse_run_config(std::istream& in);
ExperimentConfig read_run_config(const std::filesystem::path& path);

}  // namespace hdloc::cli
