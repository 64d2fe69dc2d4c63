#pragma once

#include <cstdint>
#include <exception>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "cpce/artifacts.hpp"
#include "cpce/scenario.hpp"

namespace cpce {

/// Overrides and execution settings shared by all stages.
struct RunOptions {
  std::optional<std::uint64_t> seed;     ///< replaces validation.seed
  std::optional<int> k;                  ///< replaces quadrature.k
  std::optional<std::size_t> samples;    ///< replaces validation.samples
  unsigned threads = 1;
  std::ostream* log = nullptr;           ///< one progress line per stage; null for quiet
};

struct StageOutput {
  std::filesystem::path path;
  std::string sha256;
  double seconds = 0.0;
};

/// Loads a scenario file and applies the overrides in `options`.
Scenario load_scenario(const std::filesystem::path& path, const RunOptions& options);

StageOutput cmd_basis(const std::filesystem::path& scenario, const std::filesystem::path& out,
                      const RunOptions& options = {});

/// Rejects a basis artifact built from a different scenario file.
StageOutput cmd_expand(const std::filesystem::path& scenario, const std::filesystem::path& basis,
                       const std::filesystem::path& out, const RunOptions& options = {});

/// Writes the solution report even when the problem is infeasible, then throws
/// NumericalError for any status other than optimal.
StageOutput cmd_solve(const std::filesystem::path& scenario, const std::filesystem::path& coefficients,
                      const std::filesystem::path& out, const RunOptions& options = {});

struct ValidateOutput {
  StageOutput report;                 ///< validation.json
  std::vector<ManifestEntry> tables;  ///< CSV files, paths relative to the output directory
};

/// Writes validation.json, validation.csv, summary.csv and histogram CSVs into
/// `out_dir`.
ValidateOutput cmd_validate(const std::filesystem::path& scenario,
                            const std::filesystem::path& coefficients,
                            const std::filesystem::path& solution, const std::filesystem::path& out_dir,
                            const RunOptions& options = {});

/// All four stages into `out_dir` plus manifest.json. The scenario is validated
/// before anything is written.
Manifest cmd_run(const std::filesystem::path& scenario, const std::filesystem::path& out_dir,
                 const RunOptions& options = {});

/// 0 success, 1 infeasible or numerical failure, 2 invalid input, 3 resource
/// budget exceeded.
int exit_code_for(const std::exception& e) noexcept;

}  // namespace cpce
