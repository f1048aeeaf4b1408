#pragma once

// Two-branch claims model: lognormal marginals coupled by a Frank copula.

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "mfpe/stochastic.hpp"

namespace mfpe {

/// LN(mu, sigma): log S ~ N(mu, sigma^2).
class LognormalMarginal {
 public:
  LognormalMarginal(double mu, double sigma);

  /// Marginal whose mean equals `mean` exactly: mu = ln(mean) - sigma^2/2.
  static LognormalMarginal from_mean(double mean, double sigma);

  double mu() const { return mu_; }
  double sigma() const { return sigma_; }

  double mean() const;
  double cdf(double x) const;
  double quantile(double u) const;

 private:
  double mu_;
  double sigma_;
};

/// Frank copula with parameter alpha. alpha == 0 is the independence copula.
class FrankCopula {
 public:
  /// |alpha| above this bound overflows exp(-alpha u) for negative alpha.
  static constexpr double kMaxAbsAlpha = 700.0;

  explicit FrankCopula(double alpha);

  double alpha() const { return alpha_; }
  bool is_independence() const { return alpha_ == 0.0; }

  /// C(u1, u2). Throws std::domain_error outside [0,1]^2.
  double cdf(double u1, double u2) const;

  /// P[U2 <= u2 | U1 = u1] = dC/du1.
  double conditional_cdf(double u1, double u2) const;

  /// u2 with conditional_cdf(u1, u2) == v2. Both inputs must lie in (0,1).
  double conditional_inverse(double u1, double v2) const;

 private:
  double alpha_;
};

class ClaimsModel {
 public:
  ClaimsModel(LognormalMarginal branch1, LognormalMarginal branch2, FrankCopula copula)
      : branch1_(branch1), branch2_(branch2), copula_(copula) {}

  const LognormalMarginal& branch1() const { return branch1_; }
  const LognormalMarginal& branch2() const { return branch2_; }
  const FrankCopula& copula() const { return copula_; }

  double expected_total() const { return branch1_.mean() + branch2_.mean(); }

 private:
  LognormalMarginal branch1_;
  LognormalMarginal branch2_;
  FrankCopula copula_;
};

/// One (S1, S2) draw by the conditional-distribution method: u1 = v1,
/// u2 = C_{u1}^{-1}(v2), then the marginal quantile transforms.
std::pair<double, double> sample_pair(const ClaimsModel& model, Rng& rng);

/// `n_paths` draws of S1 + S2; path i uses stream.substream(i).
std::vector<double> sample_total(const ClaimsModel& model, const RngStream& stream, std::size_t n_paths);

/// Quantile at level p of sum_i exp(mu_i + sigma_i Phi^{-1}(U)).
double comonotonic_upper_bound_quantile(const ClaimsModel& model, double p);

/// inf{x : F_N(x) >= p}, i.e. the ceil(p N)-th order statistic.
double empirical_var(std::span<const double> samples, double p);

}  // namespace mfpe
