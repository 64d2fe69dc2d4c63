#include "cpce/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "cpce/errors.hpp"

namespace cpce {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;
constexpr double kSqrt2Pi = 2.50662827463100050242;

// Lower-tail rational approximation (Acklam), |rel err| < 1.15e-9 before refinement.
double inv_cdf_initial(double p) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549671010115750e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

// Continued fraction for the incomplete beta function, modified Lentz.
double beta_continued_fraction(double a, double b, double x) {
  constexpr int max_iter = 500;
  constexpr double eps = 1e-16;
  constexpr double tiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= max_iter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < eps) break;
  }
  return h;
}

double log_beta(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

double unit_beta_pdf(double a, double b, double t) {
  if (t < 0.0 || t > 1.0) return 0.0;
  if (t == 0.0) {
    if (a < 1.0) return std::numeric_limits<double>::infinity();
    return a == 1.0 ? std::exp(-log_beta(a, b)) : 0.0;
  }
  if (t == 1.0) {
    if (b < 1.0) return std::numeric_limits<double>::infinity();
    return b == 1.0 ? std::exp(-log_beta(a, b)) : 0.0;
  }
  return std::exp((a - 1.0) * std::log(t) + (b - 1.0) * std::log1p(-t) - log_beta(a, b));
}

// Safeguarded Newton on I_t(a, b) = p over the bracket [0, 1].
double unit_beta_inv_cdf(double a, double b, double p) {
  double lo = 0.0;
  double hi = 1.0;
  double t = a / (a + b);
  for (int iter = 0; iter < 200; ++iter) {
    const double f = regularized_incomplete_beta(a, b, t) - p;
    if (f == 0.0) return t;
    if (f < 0.0) {
      lo = t;
    } else {
      hi = t;
    }
    const double dens = unit_beta_pdf(a, b, t);
    double next = (dens > 0.0 && std::isfinite(dens)) ? t - f / dens : lo - 1.0;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (std::fabs(next - t) <= 4.0 * eps * t || hi - lo <= 2.0 * eps * hi) {
      return next;
    }
    t = next;
  }
  return t;
}

void require_open_probability(double p, const char* where) {
  if (!(p > 0.0 && p < 1.0)) {
    std::ostringstream msg;
    msg << where << ": probability " << p << " outside (0, 1)";
    throw DomainError(msg.str());
  }
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::domain: return "domain";
    case ErrorKind::parameter: return "parameter";
    case ErrorKind::validation: return "validation";
    case ErrorKind::numerical: return "numerical";
    case ErrorKind::resource: return "resource";
    case ErrorKind::evaluation: return "evaluation";
    case ErrorKind::configuration: return "configuration";
    case ErrorKind::internal: return "internal";
  }
  return "unknown";
}

double std_normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x * kInvSqrt2); }

double std_normal_pdf(double x) noexcept { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double std_normal_inv_cdf(double p) {
  require_open_probability(p, "std_normal_inv_cdf");
  if (p == 0.5) return 0.0;
  // 1 - p is exact for p in [0.5, 1), so the upper tail folds onto the lower one
  // without losing digits.
  if (p > 0.5) return -std_normal_inv_cdf(1.0 - p);

  double x = inv_cdf_initial(p);
  for (int step = 0; step < 2; ++step) {
    const double e = std_normal_cdf(x) - p;
    const double u = e * kSqrt2Pi * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
  }
  return x;
}

double regularized_incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front = a * std::log(x) + b * std::log1p(-x) - log_beta(a, b);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return std::exp(log_front) * beta_continued_fraction(a, b, x) / a;
  }
  return 1.0 - std::exp(log_front) * beta_continued_fraction(b, a, 1.0 - x) / b;
}

Marginal Marginal::normal(double mean, double stddev) {
  if (!std::isfinite(mean) || !(stddev > 0.0) || !std::isfinite(stddev)) {
    throw ParameterError("normal marginal requires finite mean and stddev > 0");
  }
  return Marginal(NormalParams{mean, stddev});
}

Marginal Marginal::beta(double alpha, double beta, double lower, double upper) {
  if (!(alpha > 0.0) || !(beta > 0.0) || !std::isfinite(alpha) || !std::isfinite(beta)) {
    throw ParameterError("beta marginal requires alpha > 0 and beta > 0");
  }
  if (!std::isfinite(lower) || !std::isfinite(upper) || !(lower < upper)) {
    throw ParameterError("beta marginal requires finite lower < upper");
  }
  return Marginal(BetaParams{alpha, beta, lower, upper});
}

Marginal Marginal::uniform(double lower, double upper) {
  if (!std::isfinite(lower) || !std::isfinite(upper) || !(lower < upper)) {
    throw ParameterError("uniform marginal requires finite lower < upper");
  }
  return Marginal(UniformParams{lower, upper});
}

double Marginal::pdf(double x) const {
  return std::visit(
      overloaded{
          [x](const NormalParams& n) { return std_normal_pdf((x - n.mean) / n.stddev) / n.stddev; },
          [x](const BetaParams& b) {
            const double width = b.upper - b.lower;
            return unit_beta_pdf(b.alpha, b.beta, (x - b.lower) / width) / width;
          },
          [x](const UniformParams& u) {
            return (x < u.lower || x > u.upper) ? 0.0 : 1.0 / (u.upper - u.lower);
          },
      },
      params_);
}

double Marginal::cdf(double x) const {
  return std::visit(
      overloaded{
          [x](const NormalParams& n) { return std_normal_cdf((x - n.mean) / n.stddev); },
          [x](const BetaParams& b) {
            const double t = (x - b.lower) / (b.upper - b.lower);
            return regularized_incomplete_beta(b.alpha, b.beta, t);
          },
          [x](const UniformParams& u) {
            return std::clamp((x - u.lower) / (u.upper - u.lower), 0.0, 1.0);
          },
      },
      params_);
}

double Marginal::inv_cdf(double p) const {
  require_open_probability(p, "marginal_inv_cdf");
  return std::visit(
      overloaded{
          [p](const NormalParams& n) { return n.mean + n.stddev * std_normal_inv_cdf(p); },
          [p](const BetaParams& b) {
            return b.lower + (b.upper - b.lower) * unit_beta_inv_cdf(b.alpha, b.beta, p);
          },
          [p](const UniformParams& u) { return u.lower + (u.upper - u.lower) * p; },
      },
      params_);
}

double Marginal::from_latent(double y) const {
  constexpr double floor = 1e-15;
  if (const auto* n = std::get_if<NormalParams>(&params_)) {
    const double bound = -std_normal_inv_cdf(floor);
    return n->mean + n->stddev * std::clamp(y, -bound, bound);
  }
  // Work with the smaller tail so that u near 1 keeps its digits.
  const bool upper = y > 0.0;
  const double tail = std::max(std_normal_cdf(upper ? -y : y), floor);
  if (const auto* b = std::get_if<BetaParams>(&params_)) {
    const double width = b->upper - b->lower;
    if (upper) return b->upper - width * unit_beta_inv_cdf(b->beta, b->alpha, tail);
    return b->lower + width * unit_beta_inv_cdf(b->alpha, b->beta, tail);
  }
  const auto& u = std::get<UniformParams>(params_);
  const double width = u.upper - u.lower;
  return upper ? u.upper - width * tail : u.lower + width * tail;
}

double Marginal::mean() const {
  return std::visit(overloaded{
                        [](const NormalParams& n) { return n.mean; },
                        [](const BetaParams& b) {
                          return b.lower + (b.upper - b.lower) * b.alpha / (b.alpha + b.beta);
                        },
                        [](const UniformParams& u) { return 0.5 * (u.lower + u.upper); },
                    },
                    params_);
}

double Marginal::variance() const {
  return std::visit(overloaded{
                        [](const NormalParams& n) { return n.stddev * n.stddev; },
                        [](const BetaParams& b) {
                          const double s = b.alpha + b.beta;
                          const double w = b.upper - b.lower;
                          return w * w * b.alpha * b.beta / (s * s * (s + 1.0));
                        },
                        [](const UniformParams& u) {
                          const double w = u.upper - u.lower;
                          return w * w / 12.0;
                        },
                    },
                    params_);
}

double Marginal::support_lower() const {
  return std::visit(overloaded{
                        [](const NormalParams&) { return -std::numeric_limits<double>::infinity(); },
                        [](const BetaParams& b) { return b.lower; },
                        [](const UniformParams& u) { return u.lower; },
                    },
                    params_);
}

double Marginal::support_upper() const {
  return std::visit(overloaded{
                        [](const NormalParams&) { return std::numeric_limits<double>::infinity(); },
                        [](const BetaParams& b) { return b.upper; },
                        [](const UniformParams& u) { return u.upper; },
                    },
                    params_);
}

std::string Marginal::describe() const {
  std::ostringstream out;
  std::visit(overloaded{
                 [&](const NormalParams& n) { out << "Normal(" << n.mean << ", " << n.stddev << ")"; },
                 [&](const BetaParams& b) {
                   out << "Beta(" << b.alpha << ", " << b.beta << ", " << b.lower << ", " << b.upper
                       << ")";
                 },
                 [&](const UniformParams& u) { out << "Uniform(" << u.lower << ", " << u.upper << ")"; },
             },
             params_);
  return out.str();
}

bool operator==(const NormalParams& a, const NormalParams& b) {
  return a.mean == b.mean && a.stddev == b.stddev;
}
bool operator==(const BetaParams& a, const BetaParams& b) {
  return a.alpha == b.alpha && a.beta == b.beta && a.lower == b.lower && a.upper == b.upper;
}
bool operator==(const UniformParams& a, const UniformParams& b) {
  return a.lower == b.lower && a.upper == b.upper;
}
bool operator==(const Marginal& a, const Marginal& b) { return a.params_ == b.params_; }

}  // namespace cpce
