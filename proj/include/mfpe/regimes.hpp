#pragma once

// Regulatory balance sheets: technical provisions L0 and required capital E0R
// under the French regime (premium-based solvency margin, undiscounted
// expected claims) and a Solvency-2-style regime (discounted VaR provisions,
// target capital bounding the one-period ruin probability).

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mfpe/assets.hpp"
#include "mfpe/claims.hpp"

namespace mfpe {

enum class Regime { french, solvency2 };

const char* to_string(Regime regime);

struct RegimeParams {
  double loading_rate = 0.15;           ///< premium loading gamma
  double margin_rate = 0.18;            ///< French solvency-margin factor
  double provision_confidence = 0.75;   ///< VaR level of Solvency-2 provisions
  double ruin_confidence = 0.995;       ///< survival probability the target capital secures

  void validate() const;
  double ruin_tolerance() const { return 1.0 - ruin_confidence; }
};

struct BalanceSheet {
  std::vector<double> provisions_by_branch;
  double provisions_total = 0.0;
  double required_capital = 0.0;
  Regime regime = Regime::french;
  std::optional<Allocation> allocation;  ///< set only for solvency2

  double total_liabilities() const { return provisions_total + required_capital; }
};

/// Thrown when the target-capital search fails to bracket or converge.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Simulated aggregate losses, held sorted in descending order so tail
/// computations can stop once contributions vanish.
class LossSamples {
 public:
  explicit LossSamples(std::vector<double> values);

  std::span<const double> descending() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double mean() const { return mean_; }

 private:
  std::vector<double> values_;
  double mean_ = 0.0;
};

struct ProbabilityEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

/// Conditional probability that the portfolio return falls short of a
/// required ratio s / (E0 + L0):
///   omega1 == 0: 1{ratio > exp(r t)}
///   otherwise:   P[A1 <= rho], rho = (ratio - (1 - omega1) exp(r t)) / omega1,
///                0 when rho <= 0.
class ShortfallKernel {
 public:
  ShortfallKernel(const MarketModel& market, Allocation allocation);

  double operator()(double ratio) const;

  /// Mean of the kernel over the losses at s / total_assets, with its
  /// Monte Carlo standard error. total_assets <= 0 means certain ruin.
  ProbabilityEstimate ruin_probability(const LossSamples& losses, double total_assets) const;

  /// Same estimate without the standard error.
  double ruin_probability_value(const LossSamples& losses, double total_assets) const;

 private:
  struct Term {
    double weight;
    double inv_scale;  // 1 / (sqrt(2) stddev)
  };

  double omega1_;
  double bond_;
  double drift_;
  std::vector<Term> terms_;
};

/// L0^i = E[S_i], E0R = margin_rate (1 + gamma) E[S1 + S2].
BalanceSheet french_balance_sheet(const ClaimsModel& claims, const RegimeParams& params);

/// exp(sigma Phi^{-1}(p) - sigma^2 / 2) - 1, so that VaR_p = (1 + factor) E[S]
/// for a lognormal claim with log-scale dispersion sigma.
double market_value_margin_factor(double sigma, double p);

/// L0^i = VaR(S_i, provision_confidence) exp(-r t), lognormal closed form.
std::vector<double> s2_provisions(const ClaimsModel& claims, const MarketModel& market, const RegimeParams& params);

/// Smallest E0 >= 0 (to within `tol`) whose estimated ruin probability at
/// total assets E0 + provisions_total is at most 1 - ruin_confidence.
/// Bisection over a geometrically grown bracket.
double target_capital(const LossSamples& losses, const MarketModel& market, Allocation allocation,
                      double provisions_total, const RegimeParams& params, double tol = 0.01);

struct CapitalPoint {
  double omega1 = 0.0;
  double capital = 0.0;
};

/// target_capital at each grid allocation against the same losses.
std::vector<CapitalPoint> target_capital_curve(const LossSamples& losses, const MarketModel& market,
                                               double provisions_total, const RegimeParams& params,
                                               std::span<const double> omega_grid, double tol = 0.01);

/// Solvency-2 balance sheet at a given allocation.
BalanceSheet s2_balance_sheet(const ClaimsModel& claims, const MarketModel& market, const RegimeParams& params,
                              const LossSamples& losses, Allocation allocation, double tol = 0.01);

}  // namespace mfpe
