#pragma once

// Scenario files: flat `section.key = value` lines, `#` starts a comment.
// Every key is optional; omitted keys take the reference scenario values.

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mfpe/assets.hpp"
#include "mfpe/claims.hpp"
#include "mfpe/regimes.hpp"

namespace mfpe {

struct ClaimsParams {
  double mu1 = 0.0;
  double sigma1 = 0.0377;
  double mu2 = 0.0;
  double sigma2 = 0.3740;
  double alpha = 1.0;
};

struct SimulationParams {
  std::uint64_t seed = 2005;
  std::size_t n_paths_curve = 200'000;
  std::size_t n_paths_final = 1'000'000;
  double grid_step = 0.01;
  double capital_tol = 0.01;
};

struct ScenarioConfig {
  ClaimsParams claims;
  JumpDiffusionParams market;
  double riskless_rate = 0.0344;
  double horizon = 1.0;
  RegimeParams regime;
  SimulationParams simulation;

  ClaimsModel claims_model() const;
  MarketModel market_model() const;
};

/// The reference scenario. Branch log-locations are set so the expected
/// claims are exactly 150 and 50 (mu = ln(mean) - sigma^2 / 2).
ScenarioConfig default_config();

/// Collects every parse and validation problem before throwing.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  std::vector<std::string> errors_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

ScenarioConfig parse_config(std::string_view text);

/// Reads and parses a scenario file; IoError when it cannot be read.
ScenarioConfig load_config(const std::filesystem::path& path);

/// Field-level invariant violations, empty when the config is valid.
std::vector<std::string> validate(const ScenarioConfig& config);

/// Fully resolved config in the same format; parse_config(effective_config(c))
/// reproduces c exactly.
std::string effective_config(const ScenarioConfig& config);

}  // namespace mfpe
