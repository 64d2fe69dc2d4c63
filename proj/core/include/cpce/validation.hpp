#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cpce/procurement.hpp"

namespace cpce {

/// Linear interpolation between order statistics ("type 7"). `sorted` must be
/// ascending and non-empty; p in [0, 1].
double empirical_quantile(std::span<const double> sorted, double p);

/// Half-width of the distribution-free order-statistic interval for the
/// p-quantile at z standard errors: (X_(np + z s) - X_(np - z s)) / 2 with
/// s = sqrt(n p (1 - p)). With z = 1 this estimates the quantile's standard error.
double quantile_standard_error(std::span<const double> sorted, double p, double z = 1.0);

struct Histogram {
  std::vector<double> edges;  ///< bins + 1 ascending edges
  std::vector<std::size_t> counts;
};

/// Equal-width bins over [min, max]; the maximum lands in the last bin. Throws
/// ParameterError for empty input or bins == 0.
Histogram histogram(std::span<const double> values, std::size_t bins);

/// Counts against fixed edges; values outside are clamped into the end bins.
std::vector<std::size_t> histogram_counts(std::span<const double> values,
                                          std::span<const double> edges);

enum class SamplingMode { dependent, independent };

const char* to_string(SamplingMode mode) noexcept;

struct ConstraintRecord {
  ConstraintId id = ConstraintId::reserve_x;
  SamplingMode mode = SamplingMode::dependent;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  double percentile_lo = 0.0;  ///< empirical epsilon-quantile
  double percentile_hi = 0.0;  ///< empirical (1 - epsilon)-quantile
  double percentile_lo_se = 0.0;
  double percentile_hi_se = 0.0;
  double mean = 0.0;
  double stddev = 0.0;
  double violation_rate = 0.0;
  double bound = 0.0;
};

struct ExpansionSummary {
  std::string bid_id;
  double max_relative_error = 0.0;
  double mean_true = 0.0;
  double mean_expansion = 0.0;
};

/// Procured power histogram, dependent vs independent sampling on common edges.
struct ProcuredHistogram {
  ConstraintId id = ConstraintId::reserve_x;
  std::vector<double> edges;
  std::vector<std::size_t> counts_dependent;
  std::vector<std::size_t> counts_independent;
};

struct ValidationReport {
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  double epsilon = 0.01;
  std::string quantile_estimator = "type7-linear-order-statistics";
  std::vector<ConstraintRecord> records;  ///< four dependent records, then four independent
  std::vector<ExpansionSummary> expansion;
  std::vector<ProcuredHistogram> histograms;

  const ConstraintRecord& record(ConstraintId id, SamplingMode mode) const;
};

struct ValidateOptions {
  std::size_t bins = 60;
  unsigned threads = 1;
};

/// Samples n points from the copula model and from the independence model (same
/// seed), evaluates the true bid functions and reports empirical percentiles and
/// violation rates of the four procured-power sums at `solution`.
ValidationReport validate(const ProcurementSolution& solution, std::span<const BidFunction> bids,
                          const JointModel& model, const ProcurementSpec& spec, std::size_t n,
                          std::uint64_t seed, const ValidateOptions& options = {});

struct ExpansionComparison {
  std::string bid_id;
  double max_relative_error = 0.0;
  double mean_true = 0.0;
  double mean_expansion = 0.0;
  std::vector<double> edges;
  std::vector<std::size_t> counts_true;
  std::vector<std::size_t> counts_expansion;
};

/// Evaluates each bid and its expansion on the same n copula draws.
std::vector<ExpansionComparison> compare_expansion(std::span<const BidFunction> bids,
                                                   const PceMatrix& pce,
                                                   const OrthonormalBasis& basis,
                                                   const JointModel& model, std::size_t n,
                                                   std::uint64_t seed, std::size_t bins = 60,
                                                   unsigned threads = 1);

/// n x Z matrix of bid values at the sample rows.
Eigen::MatrixXd evaluate_bids(std::span<const BidFunction> bids, const RowMatrix& samples);

}  // namespace cpce
