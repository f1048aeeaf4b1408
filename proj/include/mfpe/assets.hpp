#pragma once

// Two-asset market: a jump-diffusion risky asset and a riskless bond.
//
//   A1(t) = exp{(mu - sigma^2/2) t + sigma B_t + sum_{k <= N_t} U_k},
//   N_t ~ Poisson(lambda t), U_k ~ N(0, sigma_u^2),
//   A2(t) = exp(r t).

#include <cstddef>
#include <span>
#include <vector>

#include "mfpe/stochastic.hpp"

namespace mfpe {

struct JumpDiffusionParams {
  double mu = 0.06;
  double sigma = 0.15;
  double lambda = 0.5;
  double sigma_u = 0.2;  ///< jump standard deviation

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
  bool has_jumps() const { return lambda > 0.0 && sigma_u > 0.0; }
};

class MarketModel {
 public:
  MarketModel(JumpDiffusionParams risky, double riskless_rate, double horizon = 1.0);

  const JumpDiffusionParams& risky() const { return risky_; }
  double riskless_rate() const { return riskless_rate_; }
  double horizon() const { return horizon_; }

  /// exp(r t)
  double bond_value() const;
  /// (mu - sigma^2/2) t, the median of log A1(t).
  double log_drift() const;

  /// Same market with the jump component removed (sigma_u = 0).
  MarketModel without_jumps() const;

 private:
  JumpDiffusionParams risky_;
  double riskless_rate_;
  double horizon_;
};

/// Risky-asset weight omega1 in [0,1]; the bond holds 1 - omega1.
class Allocation {
 public:
  explicit Allocation(double omega1);
  double omega1() const { return omega1_; }
  double omega2() const { return 1.0 - omega1_; }

 private:
  double omega1_;
};

/// Poisson mixture of centred normals describing log A1(t) - log_drift():
/// weight_n = P[N_t = n], stddev_n = sqrt(n sigma_u^2 + t sigma^2).
/// Truncated where the remaining Poisson mass is below `tail_tolerance`.
class JumpMixture {
 public:
  struct Term {
    double weight;
    double stddev;
  };

  static constexpr double kDefaultTailTolerance = 1e-12;

  explicit JumpMixture(const MarketModel& market, double tail_tolerance = kDefaultTailTolerance);

  std::span<const Term> terms() const { return terms_; }
  double drift() const { return drift_; }

  /// P[log A1(t) <= log_x]
  double cdf_log(double log_x) const;

 private:
  std::vector<Term> terms_;
  double drift_;
};

/// One terminal value A1(t). Consumes one normal for the diffusion, then the
/// jump count, then one normal per jump.
double sample_risky(const MarketModel& market, Rng& rng);

/// `n_paths` terminal values; path i uses stream.substream(i).
std::vector<double> sample_risky_paths(const MarketModel& market, const RngStream& stream, std::size_t n_paths);

/// P[A1(t) <= x]. Throws std::domain_error for x <= 0.
double cdf_risky(const MarketModel& market, double x);

/// E[A1(t)^p] = exp{p (mu - sigma^2/2) t + p^2 sigma^2 t / 2 + lambda t (exp(p^2 sigma_u^2 / 2) - 1)}.
double power_moment(const MarketModel& market, double p);

/// omega1 A1 + (1 - omega1) exp(r t). Throws for risky_value <= 0.
double portfolio_return(const MarketModel& market, Allocation allocation, double risky_value);

enum class Feasibility { interior, all_bond, all_risky };

const char* to_string(Feasibility feasibility);

/// r + 2 sigma^2 + lambda (exp(2 sigma_u^2) - exp(sigma_u^2 / 2)): above this
/// drift, E[1/portfolio return] is minimised by holding only the risky asset.
double interior_drift_upper_bound(const MarketModel& market);

/// Where min E[(omega A1 + (1 - omega) A2)^{-1}] is attained.
Feasibility mfpe_feasibility(const MarketModel& market);

}  // namespace mfpe
