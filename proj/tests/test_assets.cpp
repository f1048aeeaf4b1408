#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "mfpe/assets.hpp"

using namespace mfpe;

namespace {

const MarketModel kReference(JumpDiffusionParams{}, 0.0344);

struct Moments {
  double mean;
  double std_error;
};

Moments mc_power(const std::vector<double>& a, double p) {
  double s = 0.0, s2 = 0.0;
  for (double x : a) {
    const double v = std::pow(x, p);
    s += v;
    s2 += v * v;
  }
  const double n = static_cast<double>(a.size());
  const double mean = s / n;
  return {mean, std::sqrt((s2 / n - mean * mean) / n)};
}

}  // namespace

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(JumpDiffusionParams({0.06, 0.0, 0.5, 0.2}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(JumpDiffusionParams({0.06, 0.15, -0.1, 0.2}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(JumpDiffusionParams({0.06, 0.15, 0.5, -0.2}).validate(), std::invalid_argument);
  CHECK_NOTHROW(JumpDiffusionParams({0.06, 0.15, 0.0, 0.0}).validate());
  CHECK_THROWS(Allocation(-0.01));
  CHECK_THROWS(Allocation(1.01));
  CHECK(Allocation(0.3).omega2() == doctest::Approx(0.7));
  CHECK(kReference.bond_value() == std::exp(0.0344));
  CHECK_FALSE(kReference.without_jumps().risky().has_jumps());
}

TEST_CASE("near-deterministic risky asset") {
  const MarketModel m(JumpDiffusionParams{0.06, 1e-9, 0.0, 0.0}, 0.0344);
  auto rng = RngStream(31).engine();
  for (int i = 0; i < 100; ++i) CHECK(sample_risky(m, rng) == doctest::Approx(std::exp(0.06)).epsilon(1e-7));
}

TEST_CASE("power moments") {
  CHECK(power_moment(kReference, 0.0) == doctest::Approx(1.0));
  CHECK(power_moment(kReference, 1.0) == doctest::Approx(std::exp(0.06 + 0.5 * std::expm1(0.02))).epsilon(1e-14));
  CHECK(power_moment(kReference, 1.0) == doctest::Approx(1.07262).epsilon(1e-5));
  CHECK(power_moment(kReference, -1.0) == doctest::Approx(0.97297).epsilon(1e-5));

  const auto a = sample_risky_paths(kReference, RngStream(32), 1000000);
  for (double p : {-2.0, -1.0, 1.0, 2.0}) {
    const auto mc = mc_power(a, p);
    CHECK(std::abs(mc.mean - power_moment(kReference, p)) < 4.0 * mc.std_error);
  }
  CHECK(std::abs(mc_power(a, 1.0).mean - 1.07262) < 0.002);
  CHECK(std::abs(mc_power(a, -2.0).mean / power_moment(kReference, -2.0) - 1.0) < 0.01);

  double below_one = 0.0;
  for (double x : a) below_one += x <= 1.0;
  CHECK(std::abs(below_one / a.size() - cdf_risky(kReference, 1.0)) < 0.002);
}

TEST_CASE("risky cdf") {
  const double median = std::exp(kReference.log_drift());
  CHECK(std::abs(cdf_risky(kReference, median) - 0.5) < 1e-12);  // truncated tail mass
  CHECK(cdf_risky(kReference.without_jumps(), median) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK_THROWS_AS(cdf_risky(kReference, 0.0), std::domain_error);

  double previous = 0.0;
  for (double lx = -6.0; lx <= 6.0; lx += 0.05) {
    const double f = cdf_risky(kReference, std::exp(lx));
    CHECK(f >= previous);
    CHECK(f >= 0.0);
    CHECK(f <= 1.0);
    previous = f;
  }
  CHECK(cdf_risky(kReference, std::exp(-6.0)) < 1e-6);
  CHECK(cdf_risky(kReference, std::exp(6.0)) > 1.0 - 1e-6);
}

TEST_CASE("series truncation") {
  const JumpMixture mix(kReference);
  const auto terms = mix.terms();
  REQUIRE(terms.size() >= 8);
  double mass = 0.0;
  for (const auto& t : terms) mass += t.weight;
  CHECK(1.0 - mass < 1e-12);

  const double lt = 0.5;
  const std::size_t next = terms.size();
  const double next_weight = std::exp(-lt + next * std::log(lt) - std::lgamma(next + 1.0));
  CHECK(next_weight < 1e-12);

  CHECK(JumpMixture(kReference.without_jumps()).terms().size() == 1);
}

TEST_CASE("geometric Brownian reduction") {
  const MarketModel gbm(JumpDiffusionParams{0.06, 0.15, 0.0, 0.2}, 0.0344);
  for (double x : {0.5, 0.9, 1.0, 1.1, 2.0}) {
    const double z = (std::log(x) - (0.06 - 0.5 * 0.0225)) / 0.15;
    CHECK(cdf_risky(gbm, x) == doctest::Approx(norm_cdf(z)).epsilon(1e-14));
  }
  const auto a = sample_risky_paths(gbm, RngStream(33), 200000);
  double below = 0.0;
  for (double v : a) below += v <= 1.05;
  CHECK(std::abs(below / a.size() - cdf_risky(gbm, 1.05)) < 0.004);
}

TEST_CASE("jump and no-jump samples share the diffusion draw") {
  auto r1 = RngStream(34).engine();
  auto r2 = RngStream(34).engine();
  const double with = sample_risky(kReference, r1);
  const double without = sample_risky(kReference.without_jumps(), r2);
  auto r3 = RngStream(34).engine();
  CHECK(without == doctest::Approx(std::exp(kReference.log_drift() + 0.15 * std_normal(r3))));
  CHECK(with > 0.0);
}

TEST_CASE("portfolio return") {
  CHECK(portfolio_return(kReference, Allocation(0.0), 1.2) == doctest::Approx(1.035).epsilon(1e-4));
  CHECK(portfolio_return(kReference, Allocation(1.0), 1.2) == 1.2);
  CHECK(portfolio_return(kReference, Allocation(0.5), kReference.bond_value()) == doctest::Approx(kReference.bond_value()));
  CHECK_THROWS(portfolio_return(kReference, Allocation(0.5), 0.0));
}

TEST_CASE("feasibility of an interior optimum") {
  CHECK(interior_drift_upper_bound(kReference) == doctest::Approx(0.11094).epsilon(1e-5 / 0.11094));
  CHECK(mfpe_feasibility(kReference) == Feasibility::interior);

  auto low = JumpDiffusionParams{};
  low.mu = 0.02;
  CHECK(mfpe_feasibility(MarketModel(low, 0.0344)) == Feasibility::all_bond);
  auto high = JumpDiffusionParams{};
  high.mu = 0.2;
  CHECK(mfpe_feasibility(MarketModel(high, 0.0344)) == Feasibility::all_risky);
  CHECK(std::string(to_string(Feasibility::interior)) == "interior");
}
