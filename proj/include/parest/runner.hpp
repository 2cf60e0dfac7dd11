#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace parest::cli {

struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
};

/// Executes the command described by a JSON config file. Writes the command's
/// CSV outputs and report.txt into the output directory.
///
/// Exit codes: 0 pass, 1 inequality or convergence failure, 2 invalid input,
/// 3 resource limit hit (shift cap, iteration budget).
int run(const std::string& config_path, const RunOverrides& overrides = {});

/// Formats with 12 significant digits, the fixed precision of every CSV cell.
std::string format_number(double v);

}  // namespace parest::cli
