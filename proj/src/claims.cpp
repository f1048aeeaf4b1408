#include "mfpe/claims.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "mfpe/parallel.hpp"

namespace mfpe {
namespace {

void require_unit(double u, const char* what) {
  if (!(u >= 0.0 && u <= 1.0)) {
    throw std::domain_error(std::string(what) + " must lie in [0,1], got " + std::to_string(u));
  }
}

void require_open_unit(double u, const char* what) {
  if (!(u > 0.0 && u < 1.0)) {
    throw std::domain_error(std::string(what) + " must lie in (0,1), got " + std::to_string(u));
  }
}

// Keeps a probability strictly inside (0,1) so quantile transforms stay finite.
double clamp_open(double u) {
  constexpr double lo = std::numeric_limits<double>::min();
  const double hi = std::nextafter(1.0, 0.0);
  return std::clamp(u, lo, hi);
}

}  // namespace

LognormalMarginal::LognormalMarginal(double mu, double sigma) : mu_(mu), sigma_(sigma) {
  if (!std::isfinite(mu)) throw std::invalid_argument("lognormal mu must be finite");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw std::invalid_argument("lognormal sigma must be > 0, got " + std::to_string(sigma));
  }
}

LognormalMarginal LognormalMarginal::from_mean(double mean, double sigma) {
  if (!(mean > 0.0) || !std::isfinite(mean)) {
    throw std::invalid_argument("lognormal mean must be > 0, got " + std::to_string(mean));
  }
  return LognormalMarginal(std::log(mean) - 0.5 * sigma * sigma, sigma);
}

double LognormalMarginal::mean() const { return std::exp(mu_ + 0.5 * sigma_ * sigma_); }

double LognormalMarginal::cdf(double x) const {
  if (x <= 0.0) return 0.0;
  return norm_cdf((std::log(x) - mu_) / sigma_);
}

double LognormalMarginal::quantile(double u) const { return std::exp(mu_ + sigma_ * norm_quantile(u)); }

FrankCopula::FrankCopula(double alpha) : alpha_(alpha) {
  if (!std::isfinite(alpha) || std::abs(alpha) > kMaxAbsAlpha) {
    throw std::invalid_argument("Frank copula alpha must be finite with |alpha| <= 700, got " + std::to_string(alpha));
  }
}

double FrankCopula::cdf(double u1, double u2) const {
  require_unit(u1, "copula u1");
  require_unit(u2, "copula u2");
  if (is_independence()) return u1 * u2;
  const double a = alpha_;
  const double ratio = std::expm1(-a * u1) * std::expm1(-a * u2) / std::expm1(-a);
  return std::clamp(-std::log1p(ratio) / a, 0.0, std::min(u1, u2));
}

// With x = exp(-a u1), both conditional formulas below are written so that
// every sum adds terms of one sign; the textbook forms cancel badly for
// large |alpha|.
double FrankCopula::conditional_cdf(double u1, double u2) const {
  require_unit(u1, "copula u1");
  require_unit(u2, "copula u2");
  if (is_independence()) return u2;
  const double a = alpha_;
  const double head = std::exp(-a * u1) * std::expm1(a * u2);
  const double tail = -std::expm1(-a * (1.0 - u2));
  return head / (head + tail);
}

double FrankCopula::conditional_inverse(double u1, double v2) const {
  require_open_unit(u1, "conditioning value u1");
  require_open_unit(v2, "conditional level v2");
  if (is_independence()) return v2;
  const double a = alpha_;
  const double base = std::exp(-a * u1) * (1.0 - v2);
  if (std::abs(a) <= 1.0) return std::log1p(-v2 * std::expm1(-a) / (base + v2 * std::exp(-a))) / a;
  return (std::log(base + v2) - std::log(base + v2 * std::exp(-a))) / a;
}

std::pair<double, double> sample_pair(const ClaimsModel& model, Rng& rng) {
  const double u1 = uniform(rng);
  const double v2 = uniform(rng);
  const double u2 = clamp_open(model.copula().conditional_inverse(u1, v2));
  return {model.branch1().quantile(u1), model.branch2().quantile(u2)};
}

std::vector<double> sample_total(const ClaimsModel& model, const RngStream& stream, std::size_t n_paths) {
  if (n_paths == 0) throw std::invalid_argument("sample_total: n_paths must be >= 1");
  std::vector<double> totals(n_paths);
  constexpr std::size_t kBlock = 8192;
  const std::size_t blocks = (n_paths + kBlock - 1) / kBlock;
  parallel_for(blocks, [&](std::size_t b) {
    const std::size_t end = std::min(n_paths, (b + 1) * kBlock);
    for (std::size_t i = b * kBlock; i < end; ++i) {
      Rng rng = stream.substream(i).engine();
      const auto [s1, s2] = sample_pair(model, rng);
      totals[i] = s1 + s2;
    }
  });
  return totals;
}

double comonotonic_upper_bound_quantile(const ClaimsModel& model, double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("comonotonic quantile: p must lie in (0,1)");
  return model.branch1().quantile(p) + model.branch2().quantile(p);
}

double empirical_var(std::span<const double> samples, double p) {
  if (samples.empty()) throw std::invalid_argument("empirical_var: empty sample");
  if (!(p > 0.0 && p <= 1.0)) throw std::domain_error("empirical_var: p must lie in (0,1]");

  const auto n = static_cast<double>(samples.size());
  // Guard against p*N landing one ulp above an integer (e.g. 0.7 * 10).
  const double position = p * n * (1.0 - 8.0 * std::numeric_limits<double>::epsilon());
  auto rank = static_cast<std::size_t>(std::ceil(position));
  rank = std::clamp<std::size_t>(rank, 1, samples.size());

  std::vector<double> copy(samples.begin(), samples.end());
  auto nth = copy.begin() + static_cast<std::ptrdiff_t>(rank - 1);
  std::nth_element(copy.begin(), nth, copy.end());
  return *nth;
}

}  // namespace mfpe
