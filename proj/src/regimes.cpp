#include "mfpe/regimes.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>

#include "mfpe/parallel.hpp"

namespace mfpe {
namespace {

// Per-sample shortfall probabilities below this are dropped. Samples are
// visited in descending order and the kernel is monotone, so everything after
// the first negligible sample is negligible too.
constexpr double kNegligible = 1e-16;

constexpr int kMaxBracketGrowth = 200;
constexpr int kMaxBisection = 400;

}  // namespace

const char* to_string(Regime regime) { return regime == Regime::french ? "french" : "solvency2"; }

void RegimeParams::validate() const {
  if (!(loading_rate >= 0.0) || !std::isfinite(loading_rate)) {
    throw std::invalid_argument("regime.gamma must be >= 0");
  }
  if (!std::isfinite(margin_rate) || margin_rate < 0.0) throw std::invalid_argument("regime.margin_rate must be >= 0");
  if (!(provision_confidence > 0.0 && provision_confidence < 1.0)) {
    throw std::invalid_argument("regime.provision_confidence must lie in (0,1)");
  }
  if (!(ruin_confidence > 0.0 && ruin_confidence < 1.0)) {
    throw std::invalid_argument("regime.ruin_confidence must lie in (0,1)");
  }
}

LossSamples::LossSamples(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw std::invalid_argument("loss samples must not be empty");
  for (double v : values_) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("loss samples must be finite and >= 0");
  }
  mean_ = std::accumulate(values_.begin(), values_.end(), 0.0) / static_cast<double>(values_.size());
  std::sort(values_.begin(), values_.end(), std::greater<>());
}

ShortfallKernel::ShortfallKernel(const MarketModel& market, Allocation allocation)
    : omega1_(allocation.omega1()), bond_(market.bond_value()) {
  const JumpMixture mixture(market);
  drift_ = mixture.drift();
  for (const auto& term : mixture.terms()) {
    terms_.push_back({term.weight, 1.0 / (std::numbers::sqrt2 * term.stddev)});
  }
}

double ShortfallKernel::operator()(double ratio) const {
  if (omega1_ == 0.0) return ratio > bond_ ? 1.0 : 0.0;
  const double rho = (ratio - (1.0 - omega1_) * bond_) / omega1_;
  if (!(rho > 0.0)) return 0.0;
  if (std::isinf(rho)) return 1.0;
  const double centred = std::log(rho) - drift_;
  double total = 0.0;
  for (const auto& term : terms_) total += term.weight * 0.5 * std::erfc(-centred * term.inv_scale);
  return std::min(total, 1.0);
}

ProbabilityEstimate ShortfallKernel::ruin_probability(const LossSamples& losses, double total_assets) const {
  if (!(total_assets > 0.0)) return {1.0, 0.0};
  const double scale = 1.0 / total_assets;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (double s : losses.descending()) {
    const double g = (*this)(s * scale);
    if (g < kNegligible) break;
    sum += g;
    sum_sq += g * g;
  }
  const auto n = static_cast<double>(losses.size());
  const double mean = sum / n;
  const double variance = n > 1.0 ? std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0)) : 0.0;
  return {mean, std::sqrt(variance / n)};
}

double ShortfallKernel::ruin_probability_value(const LossSamples& losses, double total_assets) const {
  if (!(total_assets > 0.0)) return 1.0;
  const double scale = 1.0 / total_assets;
  double sum = 0.0;
  for (double s : losses.descending()) {
    const double g = (*this)(s * scale);
    if (g < kNegligible) break;
    sum += g;
  }
  return sum / static_cast<double>(losses.size());
}

BalanceSheet french_balance_sheet(const ClaimsModel& claims, const RegimeParams& params) {
  params.validate();
  BalanceSheet sheet;
  sheet.regime = Regime::french;
  sheet.provisions_by_branch = {claims.branch1().mean(), claims.branch2().mean()};
  sheet.provisions_total = sheet.provisions_by_branch[0] + sheet.provisions_by_branch[1];
  sheet.required_capital = params.margin_rate * (1.0 + params.loading_rate) * claims.expected_total();
  return sheet;
}

double market_value_margin_factor(double sigma, double p) {
  if (!(sigma > 0.0)) throw std::invalid_argument("market value margin: sigma must be > 0");
  return std::expm1(sigma * norm_quantile(p) - 0.5 * sigma * sigma);
}

std::vector<double> s2_provisions(const ClaimsModel& claims, const MarketModel& market, const RegimeParams& params) {
  params.validate();
  const double discount = market.riskless_rate() * market.horizon();
  const double z = norm_quantile(params.provision_confidence);
  std::vector<double> provisions;
  for (const auto* branch : {&claims.branch1(), &claims.branch2()}) {
    provisions.push_back(std::exp(branch->mu() - discount + branch->sigma() * z));
  }
  return provisions;
}

double target_capital(const LossSamples& losses, const MarketModel& market, Allocation allocation,
                      double provisions_total, const RegimeParams& params, double tol) {
  params.validate();
  if (!(tol > 0.0)) throw std::invalid_argument("target_capital: tolerance must be > 0");
  if (!(provisions_total >= 0.0) || !std::isfinite(provisions_total)) {
    throw std::invalid_argument("target_capital: provisions must be finite and >= 0");
  }

  const ShortfallKernel kernel(market, allocation);
  const double limit = params.ruin_tolerance();
  auto feasible = [&](double capital) {
    return kernel.ruin_probability_value(losses, capital + provisions_total) <= limit;
  };

  if (feasible(0.0)) return 0.0;

  double lo = 0.0;
  double hi = std::max(tol, 0.25 * std::max(provisions_total, losses.mean()));
  for (int grow = 0; !feasible(hi); ++grow) {
    if (grow >= kMaxBracketGrowth || !std::isfinite(hi)) {
      throw SolverError("target_capital: could not bracket the required capital");
    }
    lo = hi;
    hi *= 2.0;
  }
  for (int iter = 0; hi - lo > tol; ++iter) {
    if (iter >= kMaxBisection) throw SolverError("target_capital: bisection did not converge");
    const double mid = 0.5 * (lo + hi);
    if (feasible(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

std::vector<CapitalPoint> target_capital_curve(const LossSamples& losses, const MarketModel& market,
                                               double provisions_total, const RegimeParams& params,
                                               std::span<const double> omega_grid, double tol) {
  std::vector<CapitalPoint> curve(omega_grid.size());
  parallel_for(omega_grid.size(), [&](std::size_t i) {
    const Allocation allocation(omega_grid[i]);
    curve[i] = {omega_grid[i], target_capital(losses, market, allocation, provisions_total, params, tol)};
  });
  return curve;
}

BalanceSheet s2_balance_sheet(const ClaimsModel& claims, const MarketModel& market, const RegimeParams& params,
                              const LossSamples& losses, Allocation allocation, double tol) {
  BalanceSheet sheet;
  sheet.regime = Regime::solvency2;
  sheet.allocation = allocation;
  sheet.provisions_by_branch = s2_provisions(claims, market, params);
  sheet.provisions_total = sheet.provisions_by_branch[0] + sheet.provisions_by_branch[1];
  sheet.required_capital = target_capital(losses, market, allocation, sheet.provisions_total, params, tol);
  return sheet;
}

}  // namespace mfpe
