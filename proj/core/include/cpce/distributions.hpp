#pragma once

#include <string>
#include <variant>

namespace cpce {

/// Standard normal CDF.
double std_normal_cdf(double x) noexcept;

/// Standard normal density.
double std_normal_pdf(double x) noexcept;

/// Inverse of the standard normal CDF. Throws DomainError unless 0 < p < 1.
double std_normal_inv_cdf(double p);

/// Regularized incomplete beta function I_x(a, b) for 0 <= x <= 1.
double regularized_incomplete_beta(double a, double b, double x);

struct NormalParams {
  double mean = 0.0;
  double stddev = 1.0;
};

/// Beta(alpha, beta) rescaled from [0, 1] onto [lower, upper].
struct BetaParams {
  double alpha = 1.0;
  double beta = 1.0;
  double lower = 0.0;
  double upper = 1.0;
};

struct UniformParams {
  double lower = 0.0;
  double upper = 1.0;
};

/// One-dimensional marginal distribution. Immutable; parameters are validated on
/// construction.
class Marginal {
 public:
  using Params = std::variant<NormalParams, BetaParams, UniformParams>;

  static Marginal normal(double mean, double stddev);
  static Marginal beta(double alpha, double beta, double lower = 0.0, double upper = 1.0);
  static Marginal uniform(double lower, double upper);
  static Marginal standard_normal() { return normal(0.0, 1.0); }

  const Params& params() const noexcept { return params_; }
  bool is_normal() const noexcept { return std::holds_alternative<NormalParams>(params_); }

  double pdf(double x) const;
  double cdf(double x) const;
  /// Throws DomainError unless 0 < p < 1.
  double inv_cdf(double p) const;

  /// F^{-1}(Phi(y)): maps a standard-normal latent value onto this marginal. The
  /// tail probability is clamped to [1e-15, 1 - 1e-15] first; the normal family
  /// uses the exact affine map.
  double from_latent(double y) const;

  double mean() const;
  double variance() const;

  /// Support edges; infinite for the normal family.
  double support_lower() const;
  double support_upper() const;

  std::string describe() const;

  friend bool operator==(const Marginal& a, const Marginal& b);

 private:
  explicit Marginal(Params p) : params_(p) {}
  Params params_;
};

bool operator==(const NormalParams& a, const NormalParams& b);
bool operator==(const BetaParams& a, const BetaParams& b);
bool operator==(const UniformParams& a, const UniformParams& b);

inline double marginal_pdf(const Marginal& m, double x) { return m.pdf(x); }
inline double marginal_cdf(const Marginal& m, double x) { return m.cdf(x); }
inline double marginal_inv_cdf(const Marginal& m, double p) { return m.inv_cdf(p); }

}  // namespace cpce
