#pragma once

// Economic-equity maximisation: for an allocation omega the insurer's value is
// E[Sigma] = E0 + L0 - E[S] E[(portfolio return)^{-1}] and the criterion is
// phi(omega) = E[Sigma] / E0 with E0 the regulatory capital of the regime.
//
// Studies evaluate phi on a coarse omega grid against one fixed set of claim
// and asset paths (common random numbers), then refine the best bracket by
// golden-section search on a second, usually larger, fixed set.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "mfpe/assets.hpp"
#include "mfpe/claims.hpp"
#include "mfpe/golden_section.hpp"
#include "mfpe/regimes.hpp"
#include "mfpe/stochastic.hpp"

namespace mfpe {

struct MeanEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

struct ObjectiveSample {
  double omega1 = 0.0;
  double objective = 0.0;           ///< phi = economic_equity / capital
  double capital = 0.0;             ///< E0R at this allocation
  double ruin_prob = 0.0;           ///< at total assets capital + provisions
  double economic_equity = 0.0;     ///< E[Sigma]
  double economic_provision = 0.0;  ///< E[Lambda] = E[S] E[1/R]
  double provisions_total = 0.0;    ///< L0 of the regime
  double ruin_std_error = 0.0;
  double provision_std_error = 0.0;

  /// phi - 1 = (L0 - E[Lambda]) / E0; same argmax as objective.
  double excess_objective() const { return objective - 1.0; }
};

struct AllocationStudy {
  Regime regime = Regime::french;
  std::optional<Feasibility> feasibility;  ///< French regime only
  std::vector<ObjectiveSample> grid;
  ObjectiveSample optimum;
  std::vector<Bracket> refinement;
  std::size_t curve_paths = 0;
  std::size_t final_paths = 0;
};

/// Fixed claim and risky-asset paths shared by every allocation of a study.
struct SampleSet {
  LossSamples losses;
  std::vector<double> risky;
};

/// Claims use stream.substream(1), risky values stream.substream(2); each is
/// indexed by path, so a smaller set is a prefix of a larger one.
SampleSet draw_sample_set(const ClaimsModel& claims, const MarketModel& market, const RngStream& stream,
                          std::size_t n_paths);
LossSamples draw_losses(const ClaimsModel& claims, const RngStream& stream, std::size_t n_paths);
std::vector<double> draw_risky(const MarketModel& market, const RngStream& stream, std::size_t n_paths);

/// 0, step, 2 step, ..., 1 (the last point is exactly 1).
std::vector<double> omega_grid(double step);

struct StudyOptions {
  double capital_tol = 0.01;
  double refine_tol = 1e-4;
};

/// Sample mean of (omega1 A1 + (1 - omega1) e^{rt})^{-1}; exact for omega1 = 0.
MeanEstimate inverse_return_mean(const MarketModel& market, Allocation allocation, std::span<const double> risky_values);

/// claims_mean * E[(portfolio return)^{-1}], estimated on the given paths.
double discounted_liability_mean(double claims_mean, const MarketModel& market, Allocation allocation,
                                 std::span<const double> risky_values);

/// Same, drawing `n_paths` risky values from `stream` (path i = substream i).
double discounted_liability_mean(double claims_mean, const MarketModel& market, Allocation allocation,
                                 std::size_t n_paths, const RngStream& stream);

/// P[S > total_assets * R], averaging the exact conditional asset shortfall
/// probability over the simulated losses.
ProbabilityEstimate ruin_probability(const LossSamples& losses, const MarketModel& market, Allocation allocation,
                                     double total_assets);

struct ScalarOptimum {
  double argmax = 0.0;
  double value = 0.0;
  std::size_t grid_index = 0;
  std::vector<Bracket> trace;
};

/// Picks the best grid point (first on ties), then golden-section refines
/// `objective` on [grid[i-1], grid[i+1]]. The returned argmax is the best of
/// the refined point, the bracket ends and grid[i], all scored by `objective`.
ScalarOptimum maximize_on_grid(std::span<const double> grid, std::span<const double> grid_values,
                               const std::function<double(double)>& objective, double tol);

ObjectiveSample french_objective(const ClaimsModel& claims, const MarketModel& market, const RegimeParams& params,
                                 Allocation allocation, const SampleSet& samples);

/// French regime: E0R is fixed, so maximising phi is minimising E[1/R].
/// When the drift rules out an interior optimum the corner is returned.
AllocationStudy french_objective_curve(const ClaimsModel& claims, const MarketModel& market,
                                       const RegimeParams& params, std::span<const double> grid,
                                       const SampleSet& curve, const SampleSet& final_set,
                                       const StudyOptions& options = {});

AllocationStudy french_objective_curve(const ClaimsModel& claims, const MarketModel& market,
                                       const RegimeParams& params, std::span<const double> grid,
                                       const RngStream& stream, std::size_t curve_paths, std::size_t final_paths,
                                       const StudyOptions& options = {});

/// Solvency-2 objective at one allocation: provisions from the closed form,
/// capital from the target-capital search on `samples.losses`.
ObjectiveSample s2_objective(const ClaimsModel& claims, const MarketModel& market, const RegimeParams& params,
                             Allocation allocation, const SampleSet& samples, double capital_tol = 0.01);

AllocationStudy s2_optimize(const ClaimsModel& claims, const MarketModel& market, const RegimeParams& params,
                            std::span<const double> grid, const SampleSet& curve, const SampleSet& final_set,
                            const StudyOptions& options = {});

/// Same study reusing a capital curve already computed on `curve.losses`;
/// its allocations form the grid.
AllocationStudy s2_optimize(const ClaimsModel& claims, const MarketModel& market, const RegimeParams& params,
                            std::span<const CapitalPoint> grid_capitals, const SampleSet& curve,
                            const SampleSet& final_set, const StudyOptions& options = {});

AllocationStudy s2_optimize(const ClaimsModel& claims, const MarketModel& market, const RegimeParams& params,
                            std::span<const double> grid, const RngStream& stream, std::size_t curve_paths,
                            std::size_t final_paths, const StudyOptions& options = {});

struct RatioPoint {
  double omega1 = 0.0;
  double ratio = 0.0;
  double capital_jumps = 0.0;
  double capital_no_jumps = 0.0;
};

/// Pointwise ratio of two capital curves on the same grid.
std::vector<RatioPoint> capital_ratio_curve(std::span<const CapitalPoint> with_jumps,
                                            std::span<const CapitalPoint> without_jumps);

/// Target capital with and without jumps on common losses. The two markets
/// must agree on everything but the jump parameters.
std::vector<RatioPoint> capital_ratio_curve(const ClaimsModel& claims, const MarketModel& market_jumps,
                                            const MarketModel& market_no_jumps, const RegimeParams& params,
                                            std::span<const double> grid, const LossSamples& losses,
                                            double capital_tol = 0.01);

}  // namespace mfpe
