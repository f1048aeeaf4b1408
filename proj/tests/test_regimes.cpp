#include <doctest.h>

#include <cmath>
#include <vector>

#include "mfpe/config.hpp"
#include "mfpe/regimes.hpp"

using namespace mfpe;

namespace {

const MarketModel kReference(JumpDiffusionParams{}, 0.0344);

const LossSamples& shared_losses() {
  static const LossSamples losses(sample_total(default_config().claims_model(), RngStream(41), 100000));
  return losses;
}

}  // namespace

TEST_CASE("french balance sheet") {
  const auto claims = default_config().claims_model();
  const auto sheet = french_balance_sheet(claims, RegimeParams{});
  CHECK(sheet.provisions_by_branch.size() == 2);
  CHECK(std::abs(sheet.provisions_by_branch[0] / 150.0 - 1.0) < 1e-12);
  CHECK(std::abs(sheet.provisions_by_branch[1] / 50.0 - 1.0) < 1e-12);
  CHECK(std::abs(sheet.provisions_total / 200.0 - 1.0) < 1e-12);
  CHECK(std::abs(sheet.required_capital / 41.4 - 1.0) < 1e-12);
  CHECK(std::abs(sheet.total_liabilities() / 241.4 - 1.0) < 1e-12);
  CHECK(sheet.regime == Regime::french);
  CHECK_FALSE(sheet.allocation.has_value());

  RegimeParams no_loading;
  no_loading.loading_rate = 0.0;
  CHECK(french_balance_sheet(claims, no_loading).required_capital == doctest::Approx(36.0).epsilon(1e-12));
}

TEST_CASE("french capital ignores the market") {
  const auto claims = default_config().claims_model();
  const auto a = french_balance_sheet(claims, RegimeParams{});
  const auto b = french_balance_sheet(claims, RegimeParams{});
  CHECK(a.required_capital == b.required_capital);
  CHECK(a.provisions_by_branch == b.provisions_by_branch);
}

TEST_CASE("solvency-2 provisions") {
  const auto claims = default_config().claims_model();
  const RegimeParams params;
  const auto p = s2_provisions(claims, kReference, params);
  CHECK(std::abs(p[0] - 148.55) < 0.01);
  CHECK(std::abs(p[1] - 57.97) < 0.01);
  CHECK(std::abs(p[0] + p[1] - 206.52) < 0.01);
  CHECK(std::abs((p[0] + p[1]) / 200.0 - 1.0326) < 0.0003);

  const double discount = std::exp(-0.0344);
  CHECK(std::abs(p[0] - discount * (1.0 + market_value_margin_factor(0.0377, 0.75)) * claims.branch1().mean()) < 1e-10);
  CHECK(std::abs(p[1] - discount * (1.0 + market_value_margin_factor(0.374, 0.75)) * claims.branch2().mean()) < 1e-10);

  const ClaimsModel tight(LognormalMarginal(5.0, 1e-9), LognormalMarginal(3.0, 1e-9), FrankCopula(1.0));
  const auto q = s2_provisions(tight, kReference, params);
  CHECK(q[0] == doctest::Approx(std::exp(5.0 - 0.0344)).epsilon(1e-8));
  CHECK(q[0] < tight.branch1().mean());
}

TEST_CASE("market value margin factor") {
  CHECK(market_value_margin_factor(0.0377, 0.75) == doctest::Approx(0.02473).epsilon(1e-4 / 0.02473));
  CHECK(std::abs(market_value_margin_factor(0.3, norm_cdf(0.15))) < 1e-14);
  double previous = -1.0;
  for (double p = 0.05; p < 1.0; p += 0.05) {
    const double f = market_value_margin_factor(0.374, p);
    CHECK(f > previous);
    previous = f;
  }
}

TEST_CASE("shortfall kernel degenerate cases") {
  const ShortfallKernel bond(kReference, Allocation(0.0));
  CHECK(bond(1.0) == 0.0);
  CHECK(bond(1.04) == 1.0);
  const ShortfallKernel mixed(kReference, Allocation(0.5));
  CHECK(mixed(0.4) == 0.0);
  CHECK(mixed(0.6) > 0.0);
  const ShortfallKernel risky(kReference, Allocation(1.0));
  CHECK(risky(1.0) == doctest::Approx(cdf_risky(kReference, 1.0)).epsilon(1e-12));
}

TEST_CASE("ruin probability vanishes with large assets") {
  const auto& losses = shared_losses();
  const ShortfallKernel k(kReference, Allocation(0.4));
  CHECK(k.ruin_probability_value(losses, 1e6) < 1e-12);
  CHECK(k.ruin_probability_value(losses, 0.0) == 1.0);
}

TEST_CASE("ruin probability decreases with capital") {
  const auto& losses = shared_losses();
  for (double w : {0.0, 0.1, 0.5, 1.0}) {
    const ShortfallKernel k(kReference, Allocation(w));
    double previous = 1.0;
    for (double assets = 200.0; assets <= 400.0; assets += 5.0) {
      const double p = k.ruin_probability_value(losses, assets);
      CHECK(p <= previous);
      previous = p;
    }
  }
}

TEST_CASE("target capital brackets the tolerance") {
  const auto& losses = shared_losses();
  const RegimeParams params;
  const double l0 = 206.525725867;
  const double tol = 0.01;
  for (double w : {0.0, 0.061, 0.3, 1.0}) {
    const Allocation a(w);
    const double e = target_capital(losses, kReference, a, l0, params, tol);
    const ShortfallKernel k(kReference, a);
    CHECK(k.ruin_probability_value(losses, e + l0) <= params.ruin_tolerance());
    CHECK(k.ruin_probability_value(losses, e - tol + l0) > params.ruin_tolerance());
  }
}

TEST_CASE("target capital is non-increasing in provisions") {
  const auto& losses = shared_losses();
  const RegimeParams params;
  for (double w : {0.05, 0.5}) {
    double previous = 1e9;
    for (double l0 : {180.0, 200.0, 220.0, 240.0}) {
      const double e = target_capital(losses, kReference, Allocation(w), l0, params);
      CHECK(e <= previous + 0.01);
      previous = e;
    }
  }
  CHECK(target_capital(losses, kReference, Allocation(0.0), 1e4, params) == 0.0);
}

TEST_CASE("target capital curve and balance sheet") {
  const auto& losses = shared_losses();
  const RegimeParams params;
  const auto provisions = s2_provisions(default_config().claims_model(), kReference, params);
  const double l0 = provisions[0] + provisions[1];
  const std::vector<double> grid{0.0, 0.5, 1.0};
  const auto curve = target_capital_curve(losses, kReference, l0, params, grid);
  REQUIRE(curve.size() == 3);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(curve[i].omega1 == grid[i]);
    CHECK(curve[i].capital == target_capital(losses, kReference, Allocation(grid[i]), l0, params));
  }
  CHECK(curve[2].capital > curve[0].capital);

  const auto sheet = s2_balance_sheet(default_config().claims_model(), kReference, params, losses, Allocation(0.5));
  CHECK(sheet.regime == Regime::solvency2);
  REQUIRE(sheet.allocation.has_value());
  CHECK(sheet.allocation->omega1() == 0.5);
  CHECK(sheet.provisions_total == doctest::Approx(l0).epsilon(1e-10));
  CHECK(sheet.required_capital == curve[1].capital);
}

TEST_CASE("loss samples are held in descending order") {
  const LossSamples s(std::vector<double>{1.0, 4.0, 2.0, 3.0});
  const auto d = s.descending();
  CHECK(std::vector<double>(d.begin(), d.end()) == std::vector<double>{4.0, 3.0, 2.0, 1.0});
  CHECK(s.mean() == 2.5);
}
