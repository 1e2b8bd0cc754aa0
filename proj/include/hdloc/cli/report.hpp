#pragma once

#include <iosfwd>
#include <string>

#include "hdloc/simharness.hpp"

namespace hdloc::cli {

/// Machine-readable PowerTable. Reals are written with 17 significant digits
/// and a missing critical value as an empty cell, so read_power_csv returns
/// identical values.
void write_power_csv(std::ostream& out, const PowerTable& table);
PowerTable read_power_csv(std::istream& in);

/// Cell-level CSV of a table artifact with the published value and the
/// deviation next to each reproduced one.
void write_artifact_csv(std::ostream& out, const TableArtifact& artifact);

/// Human-readable rendering laid out like the published tables. Each cell
/// shows "ours (published)".
void write_artifact_markdown(std::ostream& out, const TableArtifact& artifact);

/// Percent with one decimal.
std::string percent(double rate);

}  // namespace hdloc::cli
