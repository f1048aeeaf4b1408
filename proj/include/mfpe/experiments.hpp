#pragma once

// Named experiments behind `mfpe-alloc run`. Each writes <name>.csv and
// <name>-report.txt into the output directory. Intermediate results (sample
// sets, capital curves, studies) are shared between experiments of one run.

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mfpe/config.hpp"
#include "mfpe/mfpe.hpp"

namespace mfpe {

enum class Experiment {
  french_bilan,
  french_mfpe,
  french_ruin,
  s2_bilan,
  s2_capital_curve,
  s2_mfpe,
  nojump_capital_curve,
  capital_ratio,
  nojump_mfpe,
  all,
};

std::string_view to_string(Experiment experiment);
std::optional<Experiment> parse_experiment(std::string_view name);
std::span<const Experiment> single_experiments();

/// Process exit codes of the CLI.
namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int usage = 1;
inline constexpr int config = 2;
inline constexpr int solver = 3;
inline constexpr int io = 4;
}  // namespace exit_code

/// Fixed-precision (12 significant digits) number formatting used in every output file.
std::string format_number(double value);

class ExperimentRunner {
 public:
  explicit ExperimentRunner(ScenarioConfig config);

  /// Runs one experiment (or all of them) and returns the files written.
  std::vector<std::filesystem::path> run(Experiment experiment, const std::filesystem::path& out_dir);

  const ScenarioConfig& config() const { return config_; }

  const SampleSet& curve_samples(bool jumps);
  const SampleSet& final_samples(bool jumps);
  const std::vector<CapitalPoint>& capital_curve(bool jumps);
  const AllocationStudy& french_study();
  const AllocationStudy& s2_study(bool jumps);

 private:
  struct Output {
    std::string csv;
    std::string report;
  };

  Output french_bilan();
  Output french_mfpe();
  Output french_ruin();
  Output s2_bilan();
  Output capital_curve_output(bool jumps);
  Output s2_mfpe_output(bool jumps);
  Output capital_ratio();
  std::string report_header(Experiment experiment, std::string_view regime) const;

  const MarketModel& market(bool jumps) const { return jumps ? market_ : market_no_jumps_; }

  ScenarioConfig config_;
  ClaimsModel claims_;
  MarketModel market_;
  MarketModel market_no_jumps_;
  std::vector<double> grid_;
  RngStream root_;

  std::optional<LossSamples> curve_losses_;
  std::optional<LossSamples> final_losses_;
  std::map<bool, std::unique_ptr<SampleSet>> curve_sets_;
  std::map<bool, std::unique_ptr<SampleSet>> final_sets_;
  std::map<bool, std::vector<CapitalPoint>> capital_curves_;
  std::optional<AllocationStudy> french_study_;
  std::map<bool, AllocationStudy> s2_studies_;
};

}  // namespace mfpe
