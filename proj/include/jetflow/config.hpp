#pragma once

#include <filesystem>
#include <string>

#include "jetflow/core.hpp"
#include "jetflow/integrate.hpp"
#include "jetflow/mesh.hpp"
#include "jetflow/partition.hpp"

namespace jetflow {

/// Everything a case file can set.
///
/// Format: one `key = value` per line, `#` starts a comment. Flow keys use the
/// FlowConfig field names; grid keys the GridSpec names; run keys are
/// iterations, wall_clock_limit, output_every, checkpoint_every, stats_from and
/// rk_alphas (five comma-separated numbers); npx and npz set the decomposition.
/// Unknown keys and malformed values raise ConfigError with the line number.
struct CaseConfig {
  FlowConfig flow = FlowConfig::jet(1.4, 1.57e6);
  GridSpec grid;
  PartitionSpec decomposition;
  RunPlan plan;
};

CaseConfig parse_case(const std::string& text);
CaseConfig read_case(const std::filesystem::path& path);

/// Canonical text form that parse_case reads back to the same values.
std::string format_case(const CaseConfig& c);

}  // namespace jetflow
