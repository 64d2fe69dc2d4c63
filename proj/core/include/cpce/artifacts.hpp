#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "cpce/basis.hpp"
#include "cpce/pce.hpp"
#include "cpce/procurement.hpp"
#include "cpce/validation.hpp"

namespace cpce {

/// Lower-case hex SHA-256 digest.
std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
/// Writes through a temporary sibling and renames, so readers never see a
/// partially written artifact.
void write_text_file(const std::filesystem::path& path, std::string_view text);

struct BasisArtifact {
  std::string scenario_sha256;
  int k = 0;
  OrthonormalBasis basis;
  MomentTable moments;
  double seconds = 0.0;
};

struct CoefficientArtifact {
  std::string scenario_sha256;
  std::string basis_sha256;
  int k = 0;
  OrthonormalBasis basis;  ///< copy of the basis the coefficients refer to
  std::vector<std::string> bid_ids;
  PceMatrix pce;
  std::vector<double> expansion_errors;  ///< per bid, max relative error
  std::size_t error_samples = 0;
  std::uint64_t error_seed = 0;
  double seconds = 0.0;
};

struct SolutionArtifact {
  std::string scenario_sha256;
  std::string coefficients_sha256;
  ProcurementSpec spec;
  QuantilePair lambda;
  ProcurementSolution solution;
  std::array<ConstraintMargin, 4> margins{};
  double seconds = 0.0;
};

std::string to_json(const BasisArtifact& a);
std::string to_json(const CoefficientArtifact& a);
std::string to_json(const SolutionArtifact& a);

/// The parsers throw ValidationError naming `source` on malformed input.
BasisArtifact parse_basis_artifact(std::string_view text, std::string_view source);
CoefficientArtifact parse_coefficient_artifact(std::string_view text, std::string_view source);
SolutionArtifact parse_solution_artifact(std::string_view text, std::string_view source);

/// Validation report as JSON. Contains no timings or paths, so equal inputs
/// give byte-identical output.
std::string validation_json(const ValidationReport& report, std::string_view scenario_sha256,
                            const ProcurementSolution& solution);

/// One row per (constraint, sampling mode).
std::string validation_csv(const ValidationReport& report);

/// One row per constraint with dependent and independent columns side by side.
std::string summary_csv(const ValidationReport& report);

/// bin_left,bin_right,count_true,count_expansion
std::string expansion_histogram_csv(const ExpansionComparison& cmp);

/// bin_left,bin_right,count_dependent,count_independent
std::string procured_histogram_csv(const ProcuredHistogram& h);

struct ManifestEntry {
  std::string stage;
  std::string path;  ///< relative to the manifest's directory
  std::string sha256;
  double seconds = 0.0;
};

struct Manifest {
  std::string version;
  std::string scenario;
  std::string scenario_sha256;
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  int k = 0;
  unsigned threads = 1;
  std::vector<ManifestEntry> artifacts;  ///< one per pipeline stage
  std::vector<ManifestEntry> tables;     ///< CSV outputs of the validation stage
  double total_seconds = 0.0;
};

std::string to_json(const Manifest& m);
Manifest parse_manifest(std::string_view text, std::string_view source);

}  // namespace cpce
