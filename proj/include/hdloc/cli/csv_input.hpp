#pragma once

#include <filesystem>
#include <istream>

#include "hdloc/core_math.hpp"

namespace hdloc::cli {

/// Parses comma-separated numeric rows into an n x p sample. Rows and
/// columns in error messages are 1-based and count physical lines, so a
/// skipped header is row 1. Blank lines are ignored.
SampleMatrix parse_csv_matrix(std::istream& in, bool skip_header);
SampleMatrix read_csv_matrix(const std::filesystem::path& path, bool skip_header);

}  // namespace hdloc::cli
