#include "mfpe/assets.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "mfpe/parallel.hpp"

namespace mfpe {
namespace {

constexpr std::size_t kMaxMixtureTerms = 100000;

}  // namespace

void JumpDiffusionParams::validate() const {
  if (!std::isfinite(mu)) throw std::invalid_argument("market.mu must be finite");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw std::invalid_argument("market.sigma must be > 0, got " + std::to_string(sigma));
  }
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("market.lambda must be >= 0, got " + std::to_string(lambda));
  }
  if (!(sigma_u >= 0.0) || !std::isfinite(sigma_u)) {
    throw std::invalid_argument("market.sigma_u must be >= 0, got " + std::to_string(sigma_u));
  }
}

MarketModel::MarketModel(JumpDiffusionParams risky, double riskless_rate, double horizon)
    : risky_(risky), riskless_rate_(riskless_rate), horizon_(horizon) {
  risky_.validate();
  if (!std::isfinite(riskless_rate)) throw std::invalid_argument("market.r must be finite");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw std::invalid_argument("market.horizon must be > 0, got " + std::to_string(horizon));
  }
}

double MarketModel::bond_value() const { return std::exp(riskless_rate_ * horizon_); }

double MarketModel::log_drift() const { return (risky_.mu - 0.5 * risky_.sigma * risky_.sigma) * horizon_; }

MarketModel MarketModel::without_jumps() const {
  JumpDiffusionParams params = risky_;
  params.sigma_u = 0.0;
  return MarketModel(params, riskless_rate_, horizon_);
}

Allocation::Allocation(double omega1) : omega1_(omega1) {
  if (!(omega1 >= 0.0 && omega1 <= 1.0)) {
    throw std::invalid_argument("allocation omega1 must lie in [0,1], got " + std::to_string(omega1));
  }
}

JumpMixture::JumpMixture(const MarketModel& market, double tail_tolerance) : drift_(market.log_drift()) {
  const auto& p = market.risky();
  const double t = market.horizon();
  const double diffusion_var = p.sigma * p.sigma * t;
  const double intensity = p.lambda * t;

  if (!p.has_jumps()) {
    terms_.push_back({1.0, std::sqrt(diffusion_var)});
    return;
  }

  const double log_intensity = std::log(intensity);
  auto weight = [&](std::size_t n) {
    const auto k = static_cast<double>(n);
    return std::exp(-intensity + k * log_intensity - std::lgamma(k + 1.0));
  };

  for (std::size_t n = 0;; ++n) {
    if (n >= kMaxMixtureTerms) throw std::runtime_error("jump mixture: truncation did not converge");
    const auto k = static_cast<double>(n);
    terms_.push_back({weight(n), std::sqrt(k * p.sigma_u * p.sigma_u + diffusion_var)});
    // Poisson tail beyond n is at most w(n+1) / (1 - intensity / (n + 2)).
    const double ratio = intensity / (k + 2.0);
    if (ratio < 1.0 && weight(n + 1) / (1.0 - ratio) < tail_tolerance) break;
  }
}

double JumpMixture::cdf_log(double log_x) const {
  double total = 0.0;
  for (const auto& term : terms_) total += term.weight * norm_cdf((log_x - drift_) / term.stddev);
  return std::clamp(total, 0.0, 1.0);
}

double sample_risky(const MarketModel& market, Rng& rng) {
  const auto& p = market.risky();
  const double t = market.horizon();
  double log_value = market.log_drift() + p.sigma * std::sqrt(t) * std_normal(rng);
  const std::uint64_t jumps = poisson(rng, p.lambda * t);
  for (std::uint64_t k = 0; k < jumps; ++k) log_value += p.sigma_u * std_normal(rng);
  return std::exp(log_value);
}

std::vector<double> sample_risky_paths(const MarketModel& market, const RngStream& stream, std::size_t n_paths) {
  if (n_paths == 0) throw std::invalid_argument("sample_risky_paths: n_paths must be >= 1");
  std::vector<double> values(n_paths);
  constexpr std::size_t kBlock = 8192;
  const std::size_t blocks = (n_paths + kBlock - 1) / kBlock;
  parallel_for(blocks, [&](std::size_t b) {
    const std::size_t end = std::min(n_paths, (b + 1) * kBlock);
    for (std::size_t i = b * kBlock; i < end; ++i) {
      Rng rng = stream.substream(i).engine();
      values[i] = sample_risky(market, rng);
    }
  });
  return values;
}

double cdf_risky(const MarketModel& market, double x) {
  if (!(x > 0.0)) throw std::domain_error("cdf_risky: x must be > 0, got " + std::to_string(x));
  if (std::isinf(x)) return 1.0;
  return JumpMixture(market).cdf_log(std::log(x));
}

double power_moment(const MarketModel& market, double p) {
  const auto& a = market.risky();
  const double t = market.horizon();
  const double exponent = p * market.log_drift() + 0.5 * p * p * a.sigma * a.sigma * t +
                          a.lambda * t * std::expm1(0.5 * p * p * a.sigma_u * a.sigma_u);
  return std::exp(exponent);
}

double portfolio_return(const MarketModel& market, Allocation allocation, double risky_value) {
  if (!(risky_value > 0.0)) throw std::domain_error("portfolio_return: risky value must be > 0");
  return allocation.omega1() * risky_value + allocation.omega2() * market.bond_value();
}

const char* to_string(Feasibility feasibility) {
  switch (feasibility) {
    case Feasibility::interior:
      return "interior";
    case Feasibility::all_bond:
      return "all_bond";
    case Feasibility::all_risky:
      return "all_risky";
  }
  return "unknown";
}

double interior_drift_upper_bound(const MarketModel& market) {
  const auto& a = market.risky();
  const double su2 = a.sigma_u * a.sigma_u;
  return market.riskless_rate() + 2.0 * a.sigma * a.sigma + a.lambda * (std::exp(2.0 * su2) - std::exp(0.5 * su2));
}

Feasibility mfpe_feasibility(const MarketModel& market) {
  const double mu = market.risky().mu;
  if (mu <= market.riskless_rate()) return Feasibility::all_bond;
  if (mu >= interior_drift_upper_bound(market)) return Feasibility::all_risky;
  return Feasibility::interior;
}

}  // namespace mfpe
