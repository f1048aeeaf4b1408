#include "mfpe/mfpe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "mfpe/parallel.hpp"

namespace mfpe {
namespace {

void require_grid(std::span<const double> grid) {
  if (grid.empty()) throw std::invalid_argument("allocation grid must not be empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0 && grid[i] <= 1.0)) throw std::invalid_argument("allocation grid must lie within [0,1]");
    if (i > 0 && !(grid[i] > grid[i - 1])) throw std::invalid_argument("allocation grid must be strictly increasing");
  }
}

double safe_ratio(double numerator, double capital) {
  return capital > 0.0 ? numerator / capital : std::numeric_limits<double>::infinity();
}

// Memoised evaluation on the refinement sample set.
class Evaluations {
 public:
  explicit Evaluations(std::function<ObjectiveSample(double)> evaluate) : evaluate_(std::move(evaluate)) {}

  const ObjectiveSample& at(double omega1) {
    auto it = cache_.find(omega1);
    if (it == cache_.end()) it = cache_.emplace(omega1, evaluate_(omega1)).first;
    return it->second;
  }

 private:
  std::function<ObjectiveSample(double)> evaluate_;
  std::map<double, ObjectiveSample> cache_;
};

AllocationStudy finish_study(Regime regime, std::span<const double> grid, std::vector<ObjectiveSample> points,
                             Evaluations& final_eval, double refine_tol, std::size_t curve_paths,
                             std::size_t final_paths) {
  AllocationStudy study;
  study.regime = regime;
  study.curve_paths = curve_paths;
  study.final_paths = final_paths;

  std::vector<double> values(points.size());
  std::transform(points.begin(), points.end(), values.begin(), [](const auto& p) { return p.objective; });
  study.grid = std::move(points);

  const auto best = maximize_on_grid(grid, values, [&](double w) { return final_eval.at(w).objective; }, refine_tol);
  study.optimum = final_eval.at(best.argmax);
  study.refinement = best.trace;
  return study;
}

const SampleSet& final_or_curve(const std::optional<SampleSet>& final_set, const SampleSet& curve) {
  return final_set ? *final_set : curve;
}

}  // namespace

LossSamples draw_losses(const ClaimsModel& claims, const RngStream& stream, std::size_t n_paths) {
  return LossSamples(sample_total(claims, stream.substream(1), n_paths));
}

std::vector<double> draw_risky(const MarketModel& market, const RngStream& stream, std::size_t n_paths) {
  return sample_risky_paths(market, stream.substream(2), n_paths);
}

SampleSet draw_sample_set(const ClaimsModel& claims, const MarketModel& market, const RngStream& stream,
                          std::size_t n_paths) {
  return SampleSet{draw_losses(claims, stream, n_paths), draw_risky(market, stream, n_paths)};
}

std::vector<double> omega_grid(double step) {
  if (!(step > 0.0 && step <= 1.0)) throw std::invalid_argument("grid step must lie in (0,1]");
  const auto intervals = static_cast<std::size_t>(std::ceil(1.0 / step - 1e-9));
  std::vector<double> grid;
  grid.reserve(intervals + 1);
  for (std::size_t i = 0; i < intervals; ++i) grid.push_back(static_cast<double>(i) * step);
  grid.push_back(1.0);
  return grid;
}

MeanEstimate inverse_return_mean(const MarketModel& market, Allocation allocation,
                                 std::span<const double> risky_values) {
  const double bond = market.bond_value();
  if (allocation.omega1() == 0.0) return {1.0 / bond, 0.0};
  if (risky_values.empty()) throw std::invalid_argument("inverse_return_mean: no risky paths");

  const double w = allocation.omega1();
  const double bond_part = (1.0 - w) * bond;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (double a : risky_values) {
    const double inv = 1.0 / (w * a + bond_part);
    sum += inv;
    sum_sq += inv * inv;
  }
  const auto n = static_cast<double>(risky_values.size());
  const double mean = sum / n;
  const double variance = n > 1.0 ? std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0)) : 0.0;
  return {mean, std::sqrt(variance / n)};
}

double discounted_liability_mean(double claims_mean, const MarketModel& market, Allocation allocation,
                                 std::span<const double> risky_values) {
  if (!(claims_mean > 0.0)) throw std::invalid_argument("discounted_liability_mean: claims mean must be > 0");
  return claims_mean * inverse_return_mean(market, allocation, risky_values).value;
}

double discounted_liability_mean(double claims_mean, const MarketModel& market, Allocation allocation,
                                 std::size_t n_paths, const RngStream& stream) {
  if (allocation.omega1() == 0.0) return discounted_liability_mean(claims_mean, market, allocation, {});
  const auto risky = sample_risky_paths(market, stream, n_paths);
  return discounted_liability_mean(claims_mean, market, allocation, risky);
}

ProbabilityEstimate ruin_probability(const LossSamples& losses, const MarketModel& market, Allocation allocation,
                                     double total_assets) {
  if (!(total_assets > 0.0)) throw std::invalid_argument("ruin_probability: total assets must be > 0");
  return ShortfallKernel(market, allocation).ruin_probability(losses, total_assets);
}

ScalarOptimum maximize_on_grid(std::span<const double> grid, std::span<const double> grid_values,
                               const std::function<double(double)>& objective, double tol) {
  require_grid(grid);
  if (grid.size() != grid_values.size()) throw std::invalid_argument("grid and values differ in length");

  ScalarOptimum result;
  for (std::size_t i = 1; i < grid_values.size(); ++i) {
    if (grid_values[i] > grid_values[result.grid_index]) result.grid_index = i;
  }
  const std::size_t i = result.grid_index;
  const double lo = grid[i == 0 ? 0 : i - 1];
  const double hi = grid[std::min(i + 1, grid.size() - 1)];

  std::vector<double> candidates;
  if (hi > lo) {
    const auto refined = golden_section_minimize([&](double w) { return -objective(w); }, lo, hi, tol);
    result.trace = refined.trace;
    candidates = {refined.x, grid[i], lo, hi};
  } else {
    candidates = {grid[i]};
  }

  result.argmax = candidates.front();
  result.value = objective(result.argmax);
  for (double w : candidates) {
    const double v = objective(w);
    if (v > result.value) {
      result.value = v;
      result.argmax = w;
    }
  }
  return result;
}

ObjectiveSample french_objective(const ClaimsModel& claims, const MarketModel& market, const RegimeParams& params,
                                 Allocation allocation, const SampleSet& samples) {
  const auto sheet = french_balance_sheet(claims, params);
  const auto inverse = inverse_return_mean(market, allocation, samples.risky);
  const auto ruin = ruin_probability(samples.losses, market, allocation, sheet.total_liabilities());

  ObjectiveSample out;
  out.omega1 = allocation.omega1();
  out.capital = sheet.required_capital;
  out.provisions_total = sheet.provisions_total;
  out.economic_provision = claims.expected_total() * inverse.value;
  out.provision_std_error = claims.expected_total() * inverse.std_error;
  out.economic_equity = sheet.total_liabilities() - out.economic_provision;
  out.objective = safe_ratio(out.economic_equity, out.capital);
  out.ruin_prob = ruin.value;
  out.ruin_std_error = ruin.std_error;
  return out;
}

AllocationStudy french_objective_curve(const ClaimsModel& claims, const MarketModel& market,
                                       const RegimeParams& params, std::span<const double> grid,
                                       const SampleSet& curve, const SampleSet& final_set,
                                       const StudyOptions& options) {
  require_grid(grid);
  std::vector<ObjectiveSample> points(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    points[i] = french_objective(claims, market, params, Allocation(grid[i]), curve);
  });

  Evaluations final_eval(
      [&](double w) { return french_objective(claims, market, params, Allocation(w), final_set); });

  const auto feasibility = mfpe_feasibility(market);
  AllocationStudy study;
  if (feasibility == Feasibility::interior) {
    study = finish_study(Regime::french, grid, std::move(points), final_eval, options.refine_tol,
                         curve.losses.size(), final_set.losses.size());
  } else {
    study.regime = Regime::french;
    study.grid = std::move(points);
    study.curve_paths = curve.losses.size();
    study.final_paths = final_set.losses.size();
    study.optimum = final_eval.at(feasibility == Feasibility::all_bond ? 0.0 : 1.0);
  }
  study.feasibility = feasibility;
  return study;
}

AllocationStudy french_objective_curve(const ClaimsModel& claims, const MarketModel& market,
                                       const RegimeParams& params, std::span<const double> grid,
                                       const RngStream& stream, std::size_t curve_paths, std::size_t final_paths,
                                       const StudyOptions& options) {
  const auto curve = draw_sample_set(claims, market, stream, curve_paths);
  std::optional<SampleSet> final_set;
  if (final_paths != curve_paths) final_set = draw_sample_set(claims, market, stream, final_paths);
  return french_objective_curve(claims, market, params, grid, curve, final_or_curve(final_set, curve), options);
}

namespace {

double s2_provisions_total(const ClaimsModel& claims, const MarketModel& market, const RegimeParams& params) {
  const auto provisions = s2_provisions(claims, market, params);
  return provisions[0] + provisions[1];
}

ObjectiveSample s2_objective_at(const ClaimsModel& claims, const MarketModel& market, Allocation allocation,
                                const SampleSet& samples, double provisions_total, double capital) {
  const auto inverse = inverse_return_mean(market, allocation, samples.risky);
  const auto ruin = ruin_probability(samples.losses, market, allocation, capital + provisions_total);

  ObjectiveSample out;
  out.omega1 = allocation.omega1();
  out.capital = capital;
  out.provisions_total = provisions_total;
  out.economic_provision = claims.expected_total() * inverse.value;
  out.provision_std_error = claims.expected_total() * inverse.std_error;
  out.economic_equity = capital + provisions_total - out.economic_provision;
  out.objective = safe_ratio(out.economic_equity, capital);
  out.ruin_prob = ruin.value;
  out.ruin_std_error = ruin.std_error;
  return out;
}

}  // namespace

ObjectiveSample s2_objective(const ClaimsModel& claims, const MarketModel& market, const RegimeParams& params,
                             Allocation allocation, const SampleSet& samples, double capital_tol) {
  const double provisions_total = s2_provisions_total(claims, market, params);
  const double capital = target_capital(samples.losses, market, allocation, provisions_total, params, capital_tol);
  return s2_objective_at(claims, market, allocation, samples, provisions_total, capital);
}

AllocationStudy s2_optimize(const ClaimsModel& claims, const MarketModel& market, const RegimeParams& params,
                            std::span<const CapitalPoint> grid_capitals, const SampleSet& curve,
                            const SampleSet& final_set, const StudyOptions& options) {
  std::vector<double> grid(grid_capitals.size());
  std::transform(grid_capitals.begin(), grid_capitals.end(), grid.begin(), [](const auto& p) { return p.omega1; });
  require_grid(grid);
  const double provisions_total = s2_provisions_total(claims, market, params);
  std::vector<ObjectiveSample> points(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    points[i] = s2_objective_at(claims, market, Allocation(grid[i]), curve, provisions_total,
                                grid_capitals[i].capital);
  });

  Evaluations final_eval([&](double w) {
    return s2_objective(claims, market, params, Allocation(w), final_set, options.capital_tol);
  });
  return finish_study(Regime::solvency2, grid, std::move(points), final_eval, options.refine_tol,
                      curve.losses.size(), final_set.losses.size());
}

AllocationStudy s2_optimize(const ClaimsModel& claims, const MarketModel& market, const RegimeParams& params,
                            std::span<const double> grid, const SampleSet& curve, const SampleSet& final_set,
                            const StudyOptions& options) {
  require_grid(grid);
  std::vector<ObjectiveSample> points(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    points[i] = s2_objective(claims, market, params, Allocation(grid[i]), curve, options.capital_tol);
  });

  Evaluations final_eval([&](double w) {
    return s2_objective(claims, market, params, Allocation(w), final_set, options.capital_tol);
  });
  return finish_study(Regime::solvency2, grid, std::move(points), final_eval, options.refine_tol,
                      curve.losses.size(), final_set.losses.size());
}

AllocationStudy s2_optimize(const ClaimsModel& claims, const MarketModel& market, const RegimeParams& params,
                            std::span<const double> grid, const RngStream& stream, std::size_t curve_paths,
                            std::size_t final_paths, const StudyOptions& options) {
  const auto curve = draw_sample_set(claims, market, stream, curve_paths);
  std::optional<SampleSet> final_set;
  if (final_paths != curve_paths) final_set = draw_sample_set(claims, market, stream, final_paths);
  return s2_optimize(claims, market, params, grid, curve, final_or_curve(final_set, curve), options);
}

std::vector<RatioPoint> capital_ratio_curve(std::span<const CapitalPoint> with_jumps,
                                            std::span<const CapitalPoint> without_jumps) {
  if (with_jumps.size() != without_jumps.size()) throw std::invalid_argument("capital curves differ in length");
  std::vector<RatioPoint> out;
  out.reserve(with_jumps.size());
  for (std::size_t i = 0; i < with_jumps.size(); ++i) {
    const auto& j = with_jumps[i];
    const auto& n = without_jumps[i];
    if (j.omega1 != n.omega1) throw std::invalid_argument("capital curves use different grids");
    double ratio = 1.0;
    if (n.capital > 0.0) {
      ratio = j.capital / n.capital;
    } else if (j.capital > 0.0) {
      ratio = std::numeric_limits<double>::infinity();
    }
    out.push_back({j.omega1, ratio, j.capital, n.capital});
  }
  return out;
}

std::vector<RatioPoint> capital_ratio_curve(const ClaimsModel& claims, const MarketModel& market_jumps,
                                            const MarketModel& market_no_jumps, const RegimeParams& params,
                                            std::span<const double> grid, const LossSamples& losses,
                                            double capital_tol) {
  const auto& a = market_jumps.risky();
  const auto& b = market_no_jumps.risky();
  if (a.mu != b.mu || a.sigma != b.sigma || market_jumps.riskless_rate() != market_no_jumps.riskless_rate() ||
      market_jumps.horizon() != market_no_jumps.horizon()) {
    throw std::invalid_argument("capital_ratio_curve: markets may differ only in their jump parameters");
  }
  require_grid(grid);
  const auto provisions = s2_provisions(claims, market_jumps, params);
  const double provisions_total = provisions[0] + provisions[1];
  const auto jumps = target_capital_curve(losses, market_jumps, provisions_total, params, grid, capital_tol);
  const auto no_jumps = target_capital_curve(losses, market_no_jumps, provisions_total, params, grid, capital_tol);
  return capital_ratio_curve(jumps, no_jumps);
}

}  // namespace mfpe
