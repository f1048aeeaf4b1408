#include "mfpe/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

namespace mfpe {
namespace {

constexpr double kReferenceMean1 = 150.0;
constexpr double kReferenceMean2 = 50.0;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename T>
std::optional<T> parse_number(std::string_view text) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) return std::nullopt;
  return value;
}

using Entries = std::map<std::string, std::pair<std::string, int>, std::less<>>;

class Reader {
 public:
  Reader(Entries entries, std::vector<std::string>& errors) : entries_(std::move(entries)), errors_(errors) {}

  bool has(std::string_view key) const { return entries_.count(key) != 0; }

  void real(std::string_view key, double& target) {
    const auto* entry = take(key);
    if (entry == nullptr) return;
    if (auto v = parse_number<double>(entry->first)) {
      target = *v;
    } else {
      errors_.push_back(where(*entry, key) + "expected a real number, got '" + entry->first + "'");
    }
  }

  template <typename T>
  void integer(std::string_view key, T& target) {
    const auto* entry = take(key);
    if (entry == nullptr) return;
    if (auto v = parse_number<T>(entry->first)) {
      target = *v;
    } else {
      errors_.push_back(where(*entry, key) + "expected a non-negative integer, got '" + entry->first + "'");
    }
  }

  std::optional<double> optional_real(std::string_view key) {
    if (!has(key)) return std::nullopt;
    double value = 0.0;
    const std::size_t before = errors_.size();
    real(key, value);
    if (errors_.size() != before) return std::nullopt;
    return value;
  }

  void report_unknown() {
    for (const auto& [key, entry] : entries_) {
      if (!used_.count(key)) errors_.push_back(where(entry, key) + "unknown key");
    }
  }

 private:
  const std::pair<std::string, int>* take(std::string_view key) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return nullptr;
    used_.emplace(it->first, 0);
    return &it->second;
  }

  static std::string where(const std::pair<std::string, int>& entry, std::string_view key) {
    return "line " + std::to_string(entry.second) + ": " + std::string(key) + ": ";
  }

  Entries entries_;
  std::map<std::string, int, std::less<>> used_;
  std::vector<std::string>& errors_;
};

void check(std::vector<std::string>& errors, bool ok, std::string_view field, std::string_view constraint,
           double value) {
  if (!ok) {
    errors.push_back(std::string(field) + ": must be " + std::string(constraint) + " (got " + format_real(value) +
                     ")");
  }
}

}  // namespace

ClaimsModel ScenarioConfig::claims_model() const {
  return ClaimsModel(LognormalMarginal(claims.mu1, claims.sigma1), LognormalMarginal(claims.mu2, claims.sigma2),
                     FrankCopula(claims.alpha));
}

MarketModel ScenarioConfig::market_model() const { return MarketModel(market, riskless_rate, horizon); }

ScenarioConfig default_config() {
  ScenarioConfig config;
  config.claims.mu1 = std::log(kReferenceMean1) - 0.5 * config.claims.sigma1 * config.claims.sigma1;
  config.claims.mu2 = std::log(kReferenceMean2) - 0.5 * config.claims.sigma2 * config.claims.sigma2;
  return config;
}

ConfigError::ConfigError(std::vector<std::string> errors)
    : std::runtime_error(errors.empty() ? "invalid configuration" : errors.front()), errors_(std::move(errors)) {}

std::vector<std::string> validate(const ScenarioConfig& c) {
  std::vector<std::string> errors;
  auto finite = [](double v) { return std::isfinite(v); };
  check(errors, finite(c.claims.mu1), "claims.mu1", "finite", c.claims.mu1);
  check(errors, finite(c.claims.mu2), "claims.mu2", "finite", c.claims.mu2);
  check(errors, c.claims.sigma1 > 0.0 && finite(c.claims.sigma1), "claims.sigma1", "> 0", c.claims.sigma1);
  check(errors, c.claims.sigma2 > 0.0 && finite(c.claims.sigma2), "claims.sigma2", "> 0", c.claims.sigma2);
  check(errors, finite(c.claims.alpha) && std::abs(c.claims.alpha) <= FrankCopula::kMaxAbsAlpha, "claims.alpha",
        "finite with |alpha| <= 700", c.claims.alpha);
  check(errors, finite(c.market.mu), "market.mu", "finite", c.market.mu);
  check(errors, c.market.sigma > 0.0 && finite(c.market.sigma), "market.sigma", "> 0", c.market.sigma);
  check(errors, c.market.lambda >= 0.0 && finite(c.market.lambda), "market.lambda", ">= 0", c.market.lambda);
  check(errors, c.market.sigma_u >= 0.0 && finite(c.market.sigma_u), "market.sigma_u", ">= 0", c.market.sigma_u);
  check(errors, finite(c.riskless_rate), "market.r", "finite", c.riskless_rate);
  check(errors, c.horizon > 0.0 && finite(c.horizon), "market.horizon", "> 0", c.horizon);
  check(errors, c.regime.loading_rate >= 0.0 && finite(c.regime.loading_rate), "regime.gamma", ">= 0",
        c.regime.loading_rate);
  check(errors, c.regime.margin_rate >= 0.0 && finite(c.regime.margin_rate), "regime.margin_rate", ">= 0",
        c.regime.margin_rate);
  check(errors, c.regime.provision_confidence > 0.0 && c.regime.provision_confidence < 1.0,
        "regime.provision_confidence", "in (0,1)", c.regime.provision_confidence);
  check(errors, c.regime.ruin_confidence > 0.0 && c.regime.ruin_confidence < 1.0, "regime.ruin_confidence",
        "in (0,1)", c.regime.ruin_confidence);
  check(errors, c.simulation.n_paths_curve >= 1, "simulation.n_paths_curve", ">= 1",
        static_cast<double>(c.simulation.n_paths_curve));
  check(errors, c.simulation.n_paths_final >= 1, "simulation.n_paths_final", ">= 1",
        static_cast<double>(c.simulation.n_paths_final));
  check(errors, c.simulation.grid_step > 0.0 && c.simulation.grid_step <= 0.5, "simulation.grid_step", "in (0, 0.5]",
        c.simulation.grid_step);
  check(errors, c.simulation.capital_tol > 0.0 && finite(c.simulation.capital_tol), "simulation.capital_tol", "> 0",
        c.simulation.capital_tol);
  return errors;
}

ScenarioConfig parse_config(std::string_view text) {
  std::vector<std::string> errors;
  Entries entries;

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      errors.push_back("line " + std::to_string(line_no) + ": expected 'key = value'");
      continue;
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty() || value.empty()) {
      errors.push_back("line " + std::to_string(line_no) + ": expected 'key = value'");
      continue;
    }
    if (!entries.emplace(key, std::make_pair(value, line_no)).second) {
      errors.push_back("line " + std::to_string(line_no) + ": " + key + ": duplicate key");
    }
  }

  ScenarioConfig config = default_config();
  Reader in(std::move(entries), errors);

  in.real("claims.sigma1", config.claims.sigma1);
  in.real("claims.sigma2", config.claims.sigma2);
  in.real("claims.alpha", config.claims.alpha);

  // A branch is given either by its log-location mu or by its mean.
  auto resolve_branch = [&](const char* mu_key, const char* mean_key, double reference_mean, double sigma,
                            double& mu) {
    const auto mu_value = in.optional_real(mu_key);
    const auto mean_value = in.optional_real(mean_key);
    if (in.has(mu_key) && in.has(mean_key)) {
      errors.push_back(std::string(mu_key) + ": cannot be combined with " + mean_key);
      return;
    }
    if (mu_value) {
      mu = *mu_value;
      return;
    }
    const double mean = mean_value.value_or(reference_mean);
    if (!(mean > 0.0) || !std::isfinite(mean)) {
      errors.push_back(std::string(mean_key) + ": must be > 0 (got " + format_real(mean) + ")");
      return;
    }
    mu = std::log(mean) - 0.5 * sigma * sigma;
  };
  resolve_branch("claims.mu1", "claims.mean1", kReferenceMean1, config.claims.sigma1, config.claims.mu1);
  resolve_branch("claims.mu2", "claims.mean2", kReferenceMean2, config.claims.sigma2, config.claims.mu2);

  in.real("market.mu", config.market.mu);
  in.real("market.sigma", config.market.sigma);
  in.real("market.lambda", config.market.lambda);
  in.real("market.sigma_u", config.market.sigma_u);
  in.real("market.r", config.riskless_rate);
  in.real("market.horizon", config.horizon);

  in.real("regime.gamma", config.regime.loading_rate);
  in.real("regime.margin_rate", config.regime.margin_rate);
  in.real("regime.provision_confidence", config.regime.provision_confidence);
  in.real("regime.ruin_confidence", config.regime.ruin_confidence);

  in.integer("simulation.seed", config.simulation.seed);
  in.integer("simulation.n_paths_curve", config.simulation.n_paths_curve);
  in.integer("simulation.n_paths_final", config.simulation.n_paths_final);
  in.real("simulation.grid_step", config.simulation.grid_step);
  in.real("simulation.capital_tol", config.simulation.capital_tol);

  in.report_unknown();

  for (auto& e : validate(config)) errors.push_back(std::move(e));
  if (!errors.empty()) throw ConfigError(std::move(errors));
  return config;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot read config file '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << file.rdbuf();
  if (file.bad()) throw IoError("error while reading config file '" + path.string() + "'");
  return parse_config(buffer.str());
}

std::string effective_config(const ScenarioConfig& c) {
  std::ostringstream out;
  auto line = [&](std::string_view key, const std::string& value) { out << key << " = " << value << '\n'; };
  out << "# claims: E[S1] = " << format_real(std::exp(c.claims.mu1 + 0.5 * c.claims.sigma1 * c.claims.sigma1))
      << ", E[S2] = " << format_real(std::exp(c.claims.mu2 + 0.5 * c.claims.sigma2 * c.claims.sigma2)) << '\n';
  line("claims.mu1", format_real(c.claims.mu1));
  line("claims.sigma1", format_real(c.claims.sigma1));
  line("claims.mu2", format_real(c.claims.mu2));
  line("claims.sigma2", format_real(c.claims.sigma2));
  line("claims.alpha", format_real(c.claims.alpha));
  line("market.mu", format_real(c.market.mu));
  line("market.sigma", format_real(c.market.sigma));
  line("market.lambda", format_real(c.market.lambda));
  line("market.sigma_u", format_real(c.market.sigma_u));
  line("market.r", format_real(c.riskless_rate));
  line("market.horizon", format_real(c.horizon));
  line("regime.gamma", format_real(c.regime.loading_rate));
  line("regime.margin_rate", format_real(c.regime.margin_rate));
  line("regime.provision_confidence", format_real(c.regime.provision_confidence));
  line("regime.ruin_confidence", format_real(c.regime.ruin_confidence));
  line("simulation.seed", std::to_string(c.simulation.seed));
  line("simulation.n_paths_curve", std::to_string(c.simulation.n_paths_curve));
  line("simulation.n_paths_final", std::to_string(c.simulation.n_paths_final));
  line("simulation.grid_step", format_real(c.simulation.grid_step));
  line("simulation.capital_tol", format_real(c.simulation.capital_tol));
  return out.str();
}

}  // namespace mfpe
