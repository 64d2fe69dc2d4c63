#include "cpce/validation.hpp"

#include <algorithm>
#include <cmath>

#include "cpce/errors.hpp"

namespace cpce {

namespace {

struct Moments {
  double mean = 0.0;
  double stddev = 0.0;
};

Moments sample_moments(std::span<const double> v) {
  Moments m;
  if (v.empty()) return m;
  double sum = 0.0;
  for (double x : v) sum += x;
  m.mean = sum / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - m.mean) * (x - m.mean);
  m.stddev = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
  return m;
}

std::vector<double> common_edges(std::span<const double> a, std::span<const double> b,
                                 std::size_t bins) {
  std::vector<double> both(a.begin(), a.end());
  both.insert(both.end(), b.begin(), b.end());
  return histogram(both, bins).edges;
}

}  // namespace

double empirical_quantile(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw ParameterError("empirical_quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("empirical_quantile: p outside [0, 1]");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double quantile_standard_error(std::span<const double> sorted, double p, double z) {
  if (sorted.empty()) throw ParameterError("quantile_standard_error of an empty sample");
  const double n = static_cast<double>(sorted.size());
  const double spread = z * std::sqrt(n * p * (1.0 - p));
  const double last = n - 1.0;
  const auto lo = static_cast<std::size_t>(std::clamp(std::floor(n * p - spread), 0.0, last));
  const auto hi = static_cast<std::size_t>(std::clamp(std::ceil(n * p + spread), 0.0, last));
  return 0.5 * (sorted[hi] - sorted[lo]);
}

Histogram histogram(std::span<const double> values, std::size_t bins) {
  if (values.empty()) throw ParameterError("histogram of an empty sample");
  if (bins == 0) throw ParameterError("histogram needs at least one bin");
  const auto [min_it, max_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *min_it;
  const double hi = *max_it;
  Histogram h;
  h.edges.resize(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) {
    h.edges[i] = i == bins ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins);
  }
  h.counts = histogram_counts(values, h.edges);
  return h;
}

std::vector<std::size_t> histogram_counts(std::span<const double> values,
                                          std::span<const double> edges) {
  if (edges.size() < 2) throw ParameterError("histogram needs at least two edges");
  const std::size_t bins = edges.size() - 1;
  std::vector<std::size_t> counts(bins, 0);
  const double lo = edges.front();
  const double width = (edges.back() - lo) / static_cast<double>(bins);
  for (double v : values) {
    std::size_t bin = 0;
    if (width > 0.0) {
      const double pos = std::floor((v - lo) / width);
      bin = pos <= 0.0 ? 0 : std::min(static_cast<std::size_t>(pos), bins - 1);
    }
    ++counts[bin];
  }
  return counts;
}

const char* to_string(SamplingMode mode) noexcept {
  return mode == SamplingMode::dependent ? "dependent" : "independent";
}

const ConstraintRecord& ValidationReport::record(ConstraintId id, SamplingMode mode) const {
  for (const auto& r : records) {
    if (r.id == id && r.mode == mode) return r;
  }
  throw Error(ErrorKind::internal, "validation report lacks the requested record");
}

Eigen::MatrixXd evaluate_bids(std::span<const BidFunction> bids, const RowMatrix& samples) {
  Eigen::MatrixXd values(samples.rows(), static_cast<Eigen::Index>(bids.size()));
  std::vector<double> xi(static_cast<std::size_t>(samples.cols()));
  for (Eigen::Index r = 0; r < samples.rows(); ++r) {
    for (Eigen::Index c = 0; c < samples.cols(); ++c) xi[static_cast<std::size_t>(c)] = samples(r, c);
    for (std::size_t j = 0; j < bids.size(); ++j) {
      values(r, static_cast<Eigen::Index>(j)) = bids[j].evaluate(xi);
    }
  }
  return values;
}

ValidationReport validate(const ProcurementSolution& solution, std::span<const BidFunction> bids,
                          const JointModel& model, const ProcurementSpec& spec, std::size_t n,
                          std::uint64_t seed, const ValidateOptions& options) {
  if (n == 0) throw ParameterError("validate needs at least one sample");
  if (bids.size() != spec.bids()) throw ParameterError("bid count differs from the procurement spec");

  ValidationReport report;
  report.samples = n;
  report.seed = seed;
  report.epsilon = spec.epsilon;

  const SampleOptions sopt{options.threads};
  const Eigen::MatrixXd dependent = evaluate_bids(bids, sample(model, n, seed, sopt));
  const Eigen::MatrixXd independent = evaluate_bids(bids, sample_independent(model, n, seed, sopt));

  std::vector<std::vector<double>> sums_dep;
  std::vector<std::vector<double>> sums_ind;
  for (SamplingMode mode : {SamplingMode::dependent, SamplingMode::independent}) {
    const Eigen::MatrixXd& values = mode == SamplingMode::dependent ? dependent : independent;
    for (ConstraintId id : kAllConstraints) {
      const Eigen::VectorXd w = constraint_weights(id, spec, solution.x, solution.y);
      const Eigen::VectorXd sums = values * w;
      std::vector<double> sorted(sums.data(), sums.data() + sums.size());

      ConstraintRecord rec;
      rec.id = id;
      rec.mode = mode;
      rec.samples = n;
      rec.seed = seed;
      rec.bound = constraint_bound(id, spec);
      std::size_t violations = 0;
      for (double s : sorted) {
        if (is_lower_bound(id) ? s < rec.bound : s > rec.bound) ++violations;
      }
      rec.violation_rate = static_cast<double>(violations) / static_cast<double>(n);
      const Moments m = sample_moments(sorted);
      rec.mean = m.mean;
      rec.stddev = m.stddev;
      std::sort(sorted.begin(), sorted.end());
      rec.percentile_lo = empirical_quantile(sorted, spec.epsilon);
      rec.percentile_hi = empirical_quantile(sorted, 1.0 - spec.epsilon);
      rec.percentile_lo_se = quantile_standard_error(sorted, spec.epsilon);
      rec.percentile_hi_se = quantile_standard_error(sorted, 1.0 - spec.epsilon);
      report.records.push_back(rec);
      (mode == SamplingMode::dependent ? sums_dep : sums_ind).push_back(std::move(sorted));
    }
  }

  for (std::size_t i = 0; i < kAllConstraints.size(); ++i) {
    ProcuredHistogram h;
    h.id = kAllConstraints[i];
    h.edges = common_edges(sums_dep[i], sums_ind[i], options.bins);
    h.counts_dependent = histogram_counts(sums_dep[i], h.edges);
    h.counts_independent = histogram_counts(sums_ind[i], h.edges);
    report.histograms.push_back(std::move(h));
  }
  return report;
}

std::vector<ExpansionComparison> compare_expansion(std::span<const BidFunction> bids,
                                                   const PceMatrix& pce,
                                                   const OrthonormalBasis& basis,
                                                   const JointModel& model, std::size_t n,
                                                   std::uint64_t seed, std::size_t bins,
                                                   unsigned threads) {
  if (pce.bids() != bids.size()) throw ParameterError("coefficient matrix does not match the bids");
  const RowMatrix samples = sample(model, n, seed, SampleOptions{threads});
  const Eigen::MatrixXd truth = evaluate_bids(bids, samples);

  Eigen::MatrixXd psi(samples.rows(), static_cast<Eigen::Index>(basis.size()));
  std::vector<double> xi(static_cast<std::size_t>(samples.cols()));
  for (Eigen::Index r = 0; r < samples.rows(); ++r) {
    for (Eigen::Index c = 0; c < samples.cols(); ++c) xi[static_cast<std::size_t>(c)] = samples(r, c);
    psi.row(r) = evaluate_basis(basis, xi).transpose();
  }

  std::vector<ExpansionComparison> out;
  for (std::size_t j = 0; j < bids.size(); ++j) {
    const Eigen::VectorXd approx = psi * pce.column(j);
    const Eigen::VectorXd exact = truth.col(static_cast<Eigen::Index>(j));
    ExpansionComparison cmp;
    cmp.bid_id = bids[j].id();
    cmp.mean_true = exact.mean();
    cmp.mean_expansion = approx.mean();
    for (Eigen::Index r = 0; r < exact.size(); ++r) {
      cmp.max_relative_error = std::max(
          cmp.max_relative_error, std::fabs(exact[r] - approx[r]) / std::max(std::fabs(exact[r]), 1e-12));
    }
    std::span<const double> a(exact.data(), static_cast<std::size_t>(exact.size()));
    std::span<const double> b(approx.data(), static_cast<std::size_t>(approx.size()));
    cmp.edges = common_edges(a, b, bins);
    cmp.counts_true = histogram_counts(a, cmp.edges);
    cmp.counts_expansion = histogram_counts(b, cmp.edges);
    out.push_back(std::move(cmp));
  }
  return out;
}

}  // namespace cpce
