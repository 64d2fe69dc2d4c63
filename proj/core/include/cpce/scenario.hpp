#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "cpce/basis.hpp"
#include "cpce/pce.hpp"
#include "cpce/procurement.hpp"

namespace cpce {

inline constexpr int kScenarioSchemaVersion = 1;

struct MonomialConfig {
  int max_degree = 1;
  std::vector<std::vector<Index>> groups;
  bool keep_cross_terms = true;
  std::vector<Exponents> whitelist;
};

struct QuadratureConfig {
  std::optional<int> k;  ///< unset: derived from bid degree and max_degree
  std::uint64_t node_budget = kDefaultNodeBudget;
};

struct ValidationConfig {
  std::size_t samples = 100000;
  std::uint64_t seed = 1;
  std::size_t bins = 60;
};

/// Everything one pipeline run needs: input model, basis configuration, bids and
/// the procurement problem.
struct Scenario {
  std::string name;
  std::size_t dimension = 0;
  std::vector<Marginal> marginals;
  Eigen::MatrixXd correlation;
  MonomialConfig monomials;
  QuadratureConfig quadrature;
  std::vector<BidFunction> bids;
  /// reserve/tie limits and epsilon; n_x, n_y and costs are filled from `bids`.
  ProcurementSpec procurement;
  ValidationConfig validation;

  JointModel model() const;
  MonomialFilter filter() const;
  /// Quadrature order used for both the moment table and the projections.
  int quadrature_order() const;
  IntegrationOptions integration(unsigned threads = 1) const;
};

/// Parses and validates a scenario document. Syntax errors report line and
/// column; schema errors report the field path and the line it starts on. Both
/// throw ValidationError.
Scenario parse_scenario(std::string_view text, std::string_view source = "<scenario>");

Scenario load_scenario(const std::filesystem::path& path);

/// Canonical JSON text (two-space indent, shortest round-trip doubles).
std::string to_json(const Scenario& scenario);

/// Built-in scenarios: "normal8", "beta8", "toy1d".
Scenario canonical_scenario(std::string_view name);
std::vector<std::string> canonical_scenario_names();

}  // namespace cpce
