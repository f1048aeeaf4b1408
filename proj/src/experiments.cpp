#include "mfpe/experiments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <system_error>

namespace mfpe {
namespace {

constexpr std::array<std::pair<Experiment, std::string_view>, 10> kNames{{
    {Experiment::french_bilan, "french-bilan"},
    {Experiment::french_mfpe, "french-mfpe"},
    {Experiment::french_ruin, "french-ruin"},
    {Experiment::s2_bilan, "s2-bilan"},
    {Experiment::s2_capital_curve, "s2-capital-curve"},
    {Experiment::s2_mfpe, "s2-mfpe"},
    {Experiment::nojump_capital_curve, "nojump-capital-curve"},
    {Experiment::capital_ratio, "capital-ratio"},
    {Experiment::nojump_mfpe, "nojump-mfpe"},
    {Experiment::all, "all"},
}};

constexpr std::array<Experiment, 9> kSingles{
    Experiment::french_bilan,     Experiment::french_mfpe,          Experiment::french_ruin,
    Experiment::s2_bilan,         Experiment::s2_capital_curve,     Experiment::s2_mfpe,
    Experiment::nojump_capital_curve, Experiment::capital_ratio,    Experiment::nojump_mfpe,
};

class Csv {
 public:
  explicit Csv(std::initializer_list<std::string_view> header) { row_strings(header); }

  void row(std::initializer_list<double> values) {
    const char* sep = "";
    for (double v : values) {
      out_ << sep << format_number(v);
      sep = ",";
    }
    out_ << '\n';
  }

  void item(std::string_view name, double value) { out_ << name << ',' << format_number(value) << '\n'; }

  std::string str() const { return out_.str(); }

 private:
  void row_strings(std::initializer_list<std::string_view> values) {
    const char* sep = "";
    for (auto v : values) {
      out_ << sep << v;
      sep = ",";
    }
    out_ << '\n';
  }

  std::ostringstream out_;
};

class Report {
 public:
  explicit Report(std::string header) { out_ << header; }

  Report& add(std::string_view key, double value) { return add(key, format_number(value)); }
  Report& add(std::string_view key, std::string_view value) {
    out_ << key << " = " << value << '\n';
    return *this;
  }

  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

const CapitalPoint& min_capital(const std::vector<CapitalPoint>& curve) {
  return *std::min_element(curve.begin(), curve.end(),
                           [](const auto& a, const auto& b) { return a.capital < b.capital; });
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot open " + path.string() + " for writing");
  file << content;
  file.close();
  if (!file) throw IoError("failed writing " + path.string());
}

}  // namespace

std::string_view to_string(Experiment experiment) {
  for (const auto& [e, name] : kNames) {
    if (e == experiment) return name;
  }
  return "unknown";
}

std::optional<Experiment> parse_experiment(std::string_view name) {
  for (const auto& [e, n] : kNames) {
    if (n == name) return e;
  }
  return std::nullopt;
}

std::span<const Experiment> single_experiments() { return kSingles; }

std::string format_number(double value) {
  if (value == 0.0) return "0";  // also folds -0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

ExperimentRunner::ExperimentRunner(ScenarioConfig config)
    : config_(std::move(config)),
      claims_(config_.claims_model()),
      market_(config_.market_model()),
      market_no_jumps_(market_.without_jumps()),
      grid_(omega_grid(config_.simulation.grid_step)),
      root_(config_.simulation.seed) {}

const SampleSet& ExperimentRunner::curve_samples(bool jumps) {
  auto& slot = curve_sets_[jumps];
  if (!slot) {
    const std::size_t n = config_.simulation.n_paths_curve;
    if (!curve_losses_) curve_losses_ = draw_losses(claims_, root_, n);
    slot = std::make_unique<SampleSet>(SampleSet{*curve_losses_, draw_risky(market(jumps), root_, n)});
  }
  return *slot;
}

const SampleSet& ExperimentRunner::final_samples(bool jumps) {
  const std::size_t n = config_.simulation.n_paths_final;
  if (n == config_.simulation.n_paths_curve) return curve_samples(jumps);
  auto& slot = final_sets_[jumps];
  if (!slot) {
    if (!final_losses_) final_losses_ = draw_losses(claims_, root_, n);
    slot = std::make_unique<SampleSet>(SampleSet{*final_losses_, draw_risky(market(jumps), root_, n)});
  }
  return *slot;
}

const std::vector<CapitalPoint>& ExperimentRunner::capital_curve(bool jumps) {
  auto it = capital_curves_.find(jumps);
  if (it == capital_curves_.end()) {
    const auto provisions = s2_provisions(claims_, market(jumps), config_.regime);
    const double provisions_total = provisions[0] + provisions[1];
    it = capital_curves_
             .emplace(jumps, target_capital_curve(curve_samples(jumps).losses, market(jumps), provisions_total,
                                                  config_.regime, grid_, config_.simulation.capital_tol))
             .first;
  }
  return it->second;
}

const AllocationStudy& ExperimentRunner::french_study() {
  if (!french_study_) {
    const StudyOptions options{config_.simulation.capital_tol};
    french_study_ = french_objective_curve(claims_, market_, config_.regime, grid_, curve_samples(true),
                                           final_samples(true), options);
  }
  return *french_study_;
}

const AllocationStudy& ExperimentRunner::s2_study(bool jumps) {
  auto it = s2_studies_.find(jumps);
  if (it == s2_studies_.end()) {
    const StudyOptions options{config_.simulation.capital_tol};
    const auto& curve = capital_curve(jumps);
    it = s2_studies_
             .emplace(jumps, s2_optimize(claims_, market(jumps), config_.regime, curve, curve_samples(jumps),
                                         final_samples(jumps), options))
             .first;
  }
  return it->second;
}

std::vector<std::filesystem::path> ExperimentRunner::run(Experiment experiment, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + out_dir.string() + ": " + ec.message());

  std::vector<std::filesystem::path> written;
  if (experiment == Experiment::all) {
    for (Experiment e : single_experiments()) {
      auto files = run(e, out_dir);
      written.insert(written.end(), files.begin(), files.end());
    }
    return written;
  }

  Output output;
  switch (experiment) {
    case Experiment::french_bilan: output = french_bilan(); break;
    case Experiment::french_mfpe: output = french_mfpe(); break;
    case Experiment::french_ruin: output = french_ruin(); break;
    case Experiment::s2_bilan: output = s2_bilan(); break;
    case Experiment::s2_capital_curve: output = capital_curve_output(true); break;
    case Experiment::s2_mfpe: output = s2_mfpe_output(true); break;
    case Experiment::nojump_capital_curve: output = capital_curve_output(false); break;
    case Experiment::capital_ratio: output = capital_ratio(); break;
    case Experiment::nojump_mfpe: output = s2_mfpe_output(false); break;
    case Experiment::all: break;
  }

  const std::string name(to_string(experiment));
  const auto csv = out_dir / (name + ".csv");
  const auto report = out_dir / (name + "-report.txt");
  write_file(csv, output.csv);
  write_file(report, output.report);
  return {csv, report};
}

std::string ExperimentRunner::report_header(Experiment experiment, std::string_view regime) const {
  const auto& sim = config_.simulation;
  Report r("");
  r.add("experiment", to_string(experiment))
      .add("regime", regime)
      .add("seed", std::to_string(sim.seed))
      .add("paths_curve", std::to_string(sim.n_paths_curve))
      .add("paths_final", std::to_string(sim.n_paths_final))
      .add("grid_step", sim.grid_step)
      .add("capital_tol", sim.capital_tol);
  return r.str();
}

ExperimentRunner::Output ExperimentRunner::french_bilan() {
  const auto sheet = french_balance_sheet(claims_, config_.regime);
  const auto& study = french_study();
  const auto& opt = study.optimum;

  Csv csv({"item", "value"});
  csv.item("provisions_branch1", sheet.provisions_by_branch[0]);
  csv.item("provisions_branch2", sheet.provisions_by_branch[1]);
  csv.item("provisions_total", sheet.provisions_total);
  csv.item("required_capital", sheet.required_capital);
  csv.item("total_liabilities", sheet.total_liabilities());
  csv.item("optimum_omega1", opt.omega1);
  csv.item("economic_provision_at_optimum", opt.economic_provision);
  csv.item("ruin_prob_at_optimum", opt.ruin_prob);

  Report r(report_header(Experiment::french_bilan, to_string(Regime::french)));
  r.add("provisions_branch1", sheet.provisions_by_branch[0])
      .add("provisions_branch2", sheet.provisions_by_branch[1])
      .add("provisions_total", sheet.provisions_total)
      .add("required_capital", sheet.required_capital)
      .add("total_liabilities", sheet.total_liabilities())
      .add("feasibility", to_string(*study.feasibility))
      .add("optimum_omega1", opt.omega1)
      .add("economic_provision", opt.economic_provision)
      .add("economic_provision_std_error", opt.provision_std_error)
      .add("economic_equity", opt.economic_equity)
      .add("objective", opt.objective)
      .add("ruin_prob", opt.ruin_prob)
      .add("ruin_prob_std_error", opt.ruin_std_error);
  return {csv.str(), r.str()};
}

ExperimentRunner::Output ExperimentRunner::french_mfpe() {
  const auto& study = french_study();
  Csv csv({"omega1", "value", "capital", "ruin_prob"});
  for (const auto& p : study.grid) {
    csv.row({p.omega1, 100.0 * p.economic_provision / p.provisions_total, p.capital, p.ruin_prob});
  }

  const auto& opt = study.optimum;
  Report r(report_header(Experiment::french_mfpe, to_string(Regime::french)));
  r.add("value", "economic provision in percent of provisions_total")
      .add("feasibility", to_string(*study.feasibility))
      .add("optimum_omega1", opt.omega1)
      .add("optimum_value", 100.0 * opt.economic_provision / opt.provisions_total)
      .add("economic_provision", opt.economic_provision)
      .add("economic_provision_std_error", opt.provision_std_error)
      .add("objective", opt.objective)
      .add("refinement_iterations", std::to_string(study.refinement.size()));
  return {csv.str(), r.str()};
}

ExperimentRunner::Output ExperimentRunner::french_ruin() {
  const auto& study = french_study();
  Csv csv({"omega1", "value"});
  const ObjectiveSample* best = &study.grid.front();
  for (const auto& p : study.grid) {
    csv.row({p.omega1, p.ruin_prob});
    if (p.ruin_prob < best->ruin_prob) best = &p;
  }

  Report r(report_header(Experiment::french_ruin, to_string(Regime::french)));
  r.add("value", "ruin probability")
      .add("min_ruin_prob", best->ruin_prob)
      .add("min_ruin_prob_std_error", best->ruin_std_error)
      .add("min_ruin_omega1", best->omega1)
      .add("optimum_omega1", study.optimum.omega1)
      .add("ruin_prob_at_optimum", study.optimum.ruin_prob)
      .add("ruin_prob_at_optimum_std_error", study.optimum.ruin_std_error);
  return {csv.str(), r.str()};
}

ExperimentRunner::Output ExperimentRunner::s2_bilan() {
  const auto provisions = s2_provisions(claims_, market_, config_.regime);
  const auto french = french_balance_sheet(claims_, config_.regime);
  const auto& study = s2_study(true);
  const auto& opt = study.optimum;
  const double provisions_total = provisions[0] + provisions[1];

  // Delta method: sd(E0) ~ sd(ruin) / |d ruin / d E0|.
  const auto& losses = final_samples(true).losses;
  const ShortfallKernel kernel(market_, Allocation(opt.omega1));
  constexpr double h = 0.5;
  const double assets = opt.capital + provisions_total;
  const double slope = (kernel.ruin_probability_value(losses, assets + h) -
                        kernel.ruin_probability_value(losses, std::max(assets - h, h))) /
                       (2.0 * h);
  const double capital_se =
      slope != 0.0 ? opt.ruin_std_error / std::abs(slope) : std::numeric_limits<double>::infinity();

  Csv csv({"item", "value"});
  csv.item("provisions_branch1", provisions[0]);
  csv.item("provisions_branch2", provisions[1]);
  csv.item("provisions_total", provisions_total);
  csv.item("required_capital", opt.capital);
  csv.item("total_liabilities", assets);
  csv.item("optimum_omega1", opt.omega1);
  csv.item("economic_equity", opt.economic_equity);
  csv.item("ruin_prob_at_optimum", opt.ruin_prob);

  Report r(report_header(Experiment::s2_bilan, to_string(Regime::solvency2)));
  r.add("provisions_branch1", provisions[0])
      .add("provisions_branch2", provisions[1])
      .add("provisions_total", provisions_total)
      .add("provisions_ratio_to_french", provisions_total / french.provisions_total)
      .add("optimum_omega1", opt.omega1)
      .add("required_capital", opt.capital)
      .add("required_capital_std_error", capital_se)
      .add("total_liabilities", assets)
      .add("economic_provision", opt.economic_provision)
      .add("economic_provision_std_error", opt.provision_std_error)
      .add("economic_equity", opt.economic_equity)
      .add("objective", opt.objective)
      .add("objective_excess", opt.excess_objective())
      .add("ruin_prob", opt.ruin_prob)
      .add("ruin_prob_std_error", opt.ruin_std_error);
  return {csv.str(), r.str()};
}

ExperimentRunner::Output ExperimentRunner::capital_curve_output(bool jumps) {
  const auto& curve = capital_curve(jumps);
  const auto provisions = s2_provisions(claims_, market(jumps), config_.regime);
  const double provisions_total = provisions[0] + provisions[1];

  Csv csv({"omega1", "value"});
  for (const auto& p : curve) csv.row({p.omega1, p.capital});

  const auto& best = min_capital(curve);
  Report r(report_header(jumps ? Experiment::s2_capital_curve : Experiment::nojump_capital_curve,
                         to_string(Regime::solvency2)));
  r.add("value", "target capital")
      .add("jumps", jumps ? "yes" : "no")
      .add("provisions_total", provisions_total)
      .add("min_capital", best.capital)
      .add("min_capital_omega1", best.omega1)
      .add("capital_at_omega1_1", curve.back().capital)
      .add("total_liabilities_at_omega1_1", provisions_total + curve.back().capital);
  return {csv.str(), r.str()};
}

ExperimentRunner::Output ExperimentRunner::s2_mfpe_output(bool jumps) {
  const auto& study = s2_study(jumps);
  Csv csv({"omega1", "value", "capital", "ruin_prob", "value_excess"});
  for (const auto& p : study.grid) csv.row({p.omega1, p.objective, p.capital, p.ruin_prob, p.excess_objective()});

  const auto& opt = study.optimum;
  Report r(report_header(jumps ? Experiment::s2_mfpe : Experiment::nojump_mfpe, to_string(Regime::solvency2)));
  r.add("value", "economic equity over required capital")
      .add("jumps", jumps ? "yes" : "no")
      .add("optimum_omega1", opt.omega1)
      .add("required_capital", opt.capital)
      .add("economic_equity", opt.economic_equity)
      .add("economic_provision", opt.economic_provision)
      .add("economic_provision_std_error", opt.provision_std_error)
      .add("objective", opt.objective)
      .add("objective_excess", opt.excess_objective())
      .add("ruin_prob", opt.ruin_prob)
      .add("ruin_prob_std_error", opt.ruin_std_error)
      .add("refinement_iterations", std::to_string(study.refinement.size()));
  return {csv.str(), r.str()};
}

ExperimentRunner::Output ExperimentRunner::capital_ratio() {
  const auto ratios = capital_ratio_curve(capital_curve(true), capital_curve(false));
  Csv csv({"omega1", "value", "capital_jumps", "capital_no_jumps"});
  for (const auto& p : ratios) csv.row({p.omega1, p.ratio, p.capital_jumps, p.capital_no_jumps});

  const auto lowest = std::min_element(ratios.begin(), ratios.end(),
                                       [](const auto& a, const auto& b) { return a.ratio < b.ratio; });
  Report r(report_header(Experiment::capital_ratio, to_string(Regime::solvency2)));
  r.add("value", "target capital with jumps over target capital without jumps")
      .add("ratio_at_omega1_0", ratios.front().ratio)
      .add("ratio_at_omega1_1", ratios.back().ratio)
      .add("min_ratio", lowest->ratio)
      .add("min_ratio_omega1", lowest->omega1);
  return {csv.str(), r.str()};
}

}  // namespace mfpe
