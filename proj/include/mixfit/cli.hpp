// Command-line driver. `run` is the whole program minus argument parsing, so
// it can be exercised in-process.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>

#include "mixfit/io.hpp"
#include "mixfit/simulate.hpp"
#include "mixfit/solvers.hpp"

namespace mixfit::cli {

enum class Subcommand { Fit, Quantify, Cost, Simulate, Report };

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitBoundaryAlarm = 2;

struct CliConfig {
  Subcommand subcommand = Subcommand::Fit;
  std::optional<std::filesystem::path> training;
  std::optional<std::filesystem::path> test;
  std::optional<std::filesystem::path> report;
  std::optional<std::filesystem::path> costs;
  std::optional<std::filesystem::path> scenario;
  SolverConfig solver;
  io::Format format = io::Format::Text;
  int precision = 1;
  std::uint64_t seed = 0;
  ShiftKind kind = ShiftKind::PriorProbability;
  std::size_t classes = 2;
  std::size_t bins = 8;
  /// Aggregated reports round shares to 0.1%; five bands can be 0.25% off.
  double share_tolerance = 5e-3;

  void validate() const;
};

/// Exit status: 0 success, 2 boundary alarm (document still written), 1 error.
int run(const CliConfig& config, std::ostream& out, std::ostream& err);

}  // namespace mixfit::cli
