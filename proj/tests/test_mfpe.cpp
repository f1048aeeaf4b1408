#include <doctest.h>

#include <cmath>
#include <vector>

#include "mfpe/config.hpp"
#include "mfpe/golden_section.hpp"
#include "mfpe/mfpe.hpp"

using namespace mfpe;

namespace {

const MarketModel kReference(JumpDiffusionParams{}, 0.0344);

const ClaimsModel& claims() {
  static const ClaimsModel model = default_config().claims_model();
  return model;
}

const SampleSet& samples(bool jumps) {
  static const SampleSet with = draw_sample_set(claims(), kReference, RngStream(51), 100000);
  static const SampleSet without = draw_sample_set(claims(), kReference.without_jumps(), RngStream(51), 100000);
  return jumps ? with : without;
}

}  // namespace

TEST_CASE("golden section") {
  const auto r = golden_section_minimize([](double x) { return (x - 0.3) * (x - 0.3); }, 0.0, 1.0, 1e-6);
  CHECK(r.x == doctest::Approx(0.3).epsilon(1e-5));
  CHECK_FALSE(r.trace.empty());
  for (std::size_t i = 1; i < r.trace.size(); ++i) {
    CHECK(r.trace[i].lower >= r.trace[i - 1].lower);
    CHECK(r.trace[i].upper <= r.trace[i - 1].upper);
  }
  CHECK(r.trace.back().upper - r.trace.back().lower < 1e-6);
  const auto edge = golden_section_minimize([](double x) { return x; }, 0.0, 1.0, 1e-6);
  CHECK(edge.x < 1e-5);
}

TEST_CASE("omega grid") {
  const auto g = omega_grid(0.01);
  CHECK(g.size() == 101);
  CHECK(g.front() == 0.0);
  CHECK(g.back() == 1.0);
  CHECK(g[39] == doctest::Approx(0.39));
  CHECK(omega_grid(0.3).size() == 5);
  CHECK(omega_grid(0.3).back() == 1.0);
  CHECK_THROWS(omega_grid(0.0));
}

TEST_CASE("sample sets are prefix-stable") {
  const auto small = draw_sample_set(claims(), kReference, RngStream(51), 1000);
  const auto& large = samples(true);
  CHECK(std::equal(small.risky.begin(), small.risky.end(), large.risky.begin()));
}

TEST_CASE("discounted liability mean") {
  const double bond_only = discounted_liability_mean(200.0, kReference, Allocation(0.0), 10, RngStream(52));
  CHECK(bond_only == 200.0 / std::exp(0.0344));
  CHECK(inverse_return_mean(kReference, Allocation(0.0), {}).std_error == 0.0);

  const double risky_only = discounted_liability_mean(200.0, kReference, Allocation(1.0), 400000, RngStream(53));
  CHECK(std::abs(risky_only - 200.0 * power_moment(kReference, -1.0)) < 0.3);
  CHECK(std::abs(risky_only - 194.59) < 0.3);
  CHECK_THROWS(discounted_liability_mean(0.0, kReference, Allocation(0.5), 10, RngStream(52)));
}

TEST_CASE("Jensen bound on every allocation") {
  const auto& risky = samples(true).risky;
  for (double w : omega_grid(0.05)) {
    const Allocation a(w);
    double mean_return = 0.0;
    for (double x : risky) mean_return += portfolio_return(kReference, a, x);
    mean_return /= static_cast<double>(risky.size());
    CHECK(inverse_return_mean(kReference, a, risky).value >= (1.0 - 1e-12) / mean_return);
  }
}

TEST_CASE("ruin probability wrapper") {
  const auto& s = samples(true);
  CHECK(ruin_probability(s.losses, kReference, Allocation(0.3), 1e7).value == 0.0);
  CHECK_THROWS(ruin_probability(s.losses, kReference, Allocation(0.3), 0.0));
}

TEST_CASE("french study on the reference scenario") {
  const auto grid = omega_grid(0.01);
  const auto study = french_objective_curve(claims(), kReference, RegimeParams{}, grid, samples(true), samples(true));
  REQUIRE(study.feasibility.has_value());
  CHECK(*study.feasibility == Feasibility::interior);
  CHECK(study.grid.size() == grid.size());
  CHECK(study.optimum.omega1 > 0.3);
  CHECK(study.optimum.omega1 < 0.5);
  CHECK(study.optimum.capital == doctest::Approx(41.4));
  for (const auto& p : study.grid) CHECK(study.optimum.objective >= p.objective - 1e-12);

  // Convexity of E[1/R] in omega on common random numbers.
  for (std::size_t i = 1; i + 1 < study.grid.size(); ++i) {
    const double d2 = study.grid[i - 1].economic_provision - 2.0 * study.grid[i].economic_provision +
                      study.grid[i + 1].economic_provision;
    CHECK(d2 >= -1e-9);
  }
}

TEST_CASE("french study with a low drift holds bonds only") {
  auto params = JumpDiffusionParams{};
  params.mu = 0.03;
  const MarketModel low(params, 0.0344);
  const auto set = draw_sample_set(claims(), low, RngStream(54), 20000);
  const auto study = french_objective_curve(claims(), low, RegimeParams{}, omega_grid(0.05), set, set);
  CHECK(*study.feasibility == Feasibility::all_bond);
  CHECK(study.optimum.omega1 == 0.0);
}

TEST_CASE("argmax is invariant under affine transforms") {
  const auto grid = omega_grid(0.01);
  const auto& risky = samples(true).risky;
  auto phi = [&](double w) { return -inverse_return_mean(kReference, Allocation(w), risky).value; };
  std::vector<double> values;
  for (double w : grid) values.push_back(phi(w));

  const auto base = maximize_on_grid(grid, values, phi, 1e-4);
  for (const auto& [shift, scale] : std::vector<std::pair<double, double>>{{1.0, 1.0}, {0.0, 3.0}, {-5.0, 0.5}}) {
    std::vector<double> transformed;
    for (double v : values) transformed.push_back(scale * v + shift);
    const auto t = maximize_on_grid(grid, transformed, [&](double w) { return scale * phi(w) + shift; }, 1e-4);
    CHECK(t.grid_index == base.grid_index);
    CHECK(t.argmax == doctest::Approx(base.argmax).epsilon(1e-6));
  }
}

TEST_CASE("solvency-2 objective at the bond-only allocation") {
  const auto& s = samples(true);
  const RegimeParams params;
  const auto p = s2_objective(claims(), kReference, params, Allocation(0.0), s);
  const auto provisions = s2_provisions(claims(), kReference, params);
  const double l0 = provisions[0] + provisions[1];
  CHECK(p.provisions_total == l0);
  CHECK(p.economic_provision == doctest::Approx(claims().expected_total() * std::exp(-0.0344)).epsilon(1e-14));
  CHECK(p.excess_objective() * p.capital ==
        doctest::Approx(l0 - claims().expected_total() * std::exp(-0.0344)).epsilon(1e-10));
  CHECK(p.ruin_prob <= params.ruin_tolerance());
}

TEST_CASE("solvency-2 studies with and without jumps") {
  const RegimeParams params;
  const auto grid = omega_grid(0.02);
  const auto jumps = s2_optimize(claims(), kReference, params, grid, samples(true), samples(true));
  const auto no_jumps = s2_optimize(claims(), kReference.without_jumps(), params, grid, samples(false), samples(false));

  for (const auto* study : {&jumps, &no_jumps}) {
    CHECK(study->regime == Regime::solvency2);
    CHECK(std::abs(study->optimum.ruin_prob - params.ruin_tolerance()) < 2e-4);
    CHECK(study->optimum.ruin_prob <= params.ruin_tolerance());
    for (const auto& p : study->grid) CHECK(study->optimum.objective >= p.objective - 1e-3);
  }
  CHECK(jumps.optimum.omega1 < no_jumps.optimum.omega1);

  // Reusing a precomputed capital curve gives the same study.
  const auto provisions = s2_provisions(claims(), kReference, params);
  const auto curve = target_capital_curve(samples(true).losses, kReference, provisions[0] + provisions[1], params, grid);
  const auto reused = s2_optimize(claims(), kReference, params, curve, samples(true), samples(true));
  CHECK(reused.optimum.omega1 == jumps.optimum.omega1);
  CHECK(reused.optimum.capital == jumps.optimum.capital);
}

TEST_CASE("capital ratio curve") {
  const RegimeParams params;
  const std::vector<double> grid{0.0, 0.25, 0.5, 1.0};
  const auto ratios =
      capital_ratio_curve(claims(), kReference, kReference.without_jumps(), params, grid, samples(true).losses);
  REQUIRE(ratios.size() == grid.size());
  CHECK(ratios.front().ratio == 1.0);
  CHECK(ratios.back().ratio > 1.5);
  for (const auto& r : ratios) CHECK(r.ratio >= 1.0 - 1e-3);

  auto other = JumpDiffusionParams{};
  other.mu = 0.07;
  CHECK_THROWS(capital_ratio_curve(claims(), kReference, MarketModel(other, 0.0344), params, grid, samples(true).losses));
}
