// macrobell: command-line front end.
//
//   nbs-trace     p_N, p_0 and leakage of the Josephson beam splitter
//   bell-ch       CH statistic S along the (0, 2phi, phi, 3phi) settings
//   kerr-chsh     CHSH correlators of the Kerr cat-state test
//   kerr-sweep    B along alpha = beta
//   kerr-density  joint (X_A, X_B) density after Kerr evolution
//   optimize      (kappa, g) search for a given N
//   verify        invariant suite
//
// Exit codes: 0 success, 1 computation failure, 2 usage error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "macrobell/macrobell.hpp"

namespace {

using json = nlohmann::json;
using namespace macrobell;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

const CLI::Range kPositiveCount(1, std::numeric_limits<int>::max());

struct Common {
  std::string output;
  std::string format = "csv";
  unsigned workers = 0;
};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_.open(path);
      if (!file_) throw DomainError("cannot open output file '" + path + "'");
    }
  }
  std::ostream& out() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

void write_csv(const Common& c, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  Sink sink(c.output);
  std::ostream& os = sink.out();
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << num(row[i]);
    os << '\n';
  }
}

void write_json(const Common& c, const json& j) {
  Sink sink(c.output);
  sink.out() << j.dump(2) << '\n';
}

/// Rows as a JSON array of objects keyed by the CSV header.
json rows_to_json(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
  json out = json::array();
  for (const auto& row : rows) {
    json r;
    for (std::size_t i = 0; i < header.size(); ++i) r[header[i]] = row[i];
    out.push_back(std::move(r));
  }
  return out;
}

std::pair<double, double> parse_range(const std::string& text, const char* flag) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw DomainError(std::string(flag) + " expects lo:hi");
  try {
    return {std::stod(text.substr(0, colon)), std::stod(text.substr(colon + 1))};
  } catch (const std::exception&) {
    throw DomainError(std::string(flag) + " expects numbers lo:hi, got '" + text + "'");
  }
}

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("-o,--output", c.output, "Output file (default stdout)");
  sub->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--workers", c.workers,
                  std::string("Worker threads for sweeps (default $") + kWorkersEnv + " or all cores)");
}

/// Applies values from a JSON config as option defaults, so explicit flags
/// still win.  Keys are option names with '-' or '_'; a nested object named
/// after the subcommand takes precedence over top-level keys.
// Only the subcommand named on the command line is configured: subcommands
// share some option variables, so configuring the others would clobber them.
void apply_config(CLI::App& app, const json& cfg, const std::string& selected) {
  for (CLI::App* sub : app.get_subcommands({})) {
    if (sub->get_name() != selected) continue;
    json scoped = cfg.is_object() ? cfg : json::object();
    if (cfg.contains(sub->get_name()) && cfg.at(sub->get_name()).is_object()) {
      for (const auto& [k, v] : cfg.at(sub->get_name()).items()) scoped[k] = v;
    }
    for (CLI::Option* opt : sub->get_options()) {
      if (opt->get_lnames().empty()) continue;
      const std::string name = opt->get_lnames().front();
      std::string underscored = name;
      std::replace(underscored.begin(), underscored.end(), '-', '_');
      const json* value = nullptr;
      if (scoped.contains(name)) value = &scoped.at(name);
      else if (scoped.contains(underscored)) value = &scoped.at(underscored);
      if (!value) continue;
      std::string text;
      if (value->is_string()) {
        text = value->get<std::string>();
      } else if (value->is_array() && value->size() == 2) {
        text = (*value)[0].dump() + ":" + (*value)[1].dump();
      } else if (value->is_boolean()) {
        text = value->get<bool>() ? "true" : "false";
      } else {
        text = value->dump();
      }
      opt->default_val(text);
    }
  }
}

// ---------------------------------------------------------------------------

struct NbsArgs {
  int N = 2;
  double kappa = 1.0;
  double g = 30.0;
};

void add_nbs_params(CLI::App* sub, NbsArgs& a) {
  sub->add_option("--N", a.N, "Bosons per NOON component")->check(kPositiveCount);
  sub->add_option("--kappa", a.kappa, "Tunnelling strength kappa");
  sub->add_option("--g", a.g, "Nonlinearity g");
}

int run_nbs_trace(const Common& c, const NbsArgs& a, double t_max, int steps) {
  const NbsParams params{a.N, a.kappa, a.g};
  params.validate();
  const std::vector<double> grid = uniform_grid(t_max, steps);
  const NbsTrace trace = nbs_trace(params, grid);
  const SectorHamiltonian h(params, params.N);

  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < trace.times.size(); ++i) {
    const double scaled = trace.scaled_times.empty() ? std::nan("") : trace.scaled_times[i];
    rows.push_back({trace.times[i], scaled, trace.p_N[i], trace.p_0[i], trace.leakage[i]});
  }
  const std::vector<std::string> header{"t", "t_scaled", "p_N", "p_0", "leakage"};

  json summary{{"command", "nbs-trace"},
               {"N", a.N},
               {"kappa", a.kappa},
               {"g", a.g},
               {"t_max", t_max},
               {"steps", steps},
               {"omega_formula", omega_formula(params)},
               {"max_leakage", trace.max_leakage()}};
  summary["omega_fitted"] = trace.omega_fitted ? json(static_cast<double>(*trace.omega_fitted)) : json(nullptr);
  try {
    summary["omega_fitted_exact"] = static_cast<double>(fit_omega(h));
  } catch (const NumericalError&) {
    summary["omega_fitted_exact"] = nullptr;
  }
  if (!trace.omega_fitted) summary["note"] = "no 1/2-crossing of p_N inside the trace; t_scaled is NaN";

  if (c.format == "json") {
    summary["rows"] = rows_to_json(header, rows);
    write_json(c, summary);
  } else {
    write_csv(c, header, rows);
    std::cerr << summary.dump() << '\n';
  }
  return kExitOk;
}

int run_bell_ch(const Common& c, const NbsArgs& a, double phi_min, double phi_max, int phi_steps,
                const std::string& mode_name, double theta) {
  const NbsMode mode = mode_name == "ideal" ? NbsMode::ideal : NbsMode::hamiltonian;
  const NbsParams params{a.N, a.kappa, a.g};
  params.validate();
  if (!(phi_max > phi_min)) throw DomainError("--phi-max must exceed --phi-min");
  if (!std::isfinite(theta)) throw DomainError("--theta must be finite");

  const LocalNbs nbs = LocalNbs::make(params, mode);
  std::vector<double> phis(phi_steps + 1);
  for (int k = 0; k <= phi_steps; ++k) phis[k] = phi_min + (phi_max - phi_min) * k / phi_steps;
  const auto reports = ch_sweep(nbs, phis, theta, resolve_workers(c.workers));

  std::vector<std::vector<double>> rows;
  std::size_t best = 0;
  json intervals = json::array();
  double interval_start = std::nan("");
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const ChReport& r = reports[i];
    rows.push_back({phis[i], r.S, r.p_pp[0], r.p_pp[1], r.p_pp[2], r.p_pp[3], r.p_A_plus, r.p_B_plus});
    if (r.S > reports[best].S) best = i;
    if (r.violation() && std::isnan(interval_start)) interval_start = phis[i];
    if (!r.violation() && !std::isnan(interval_start)) {
      intervals.push_back({interval_start, phis[i - 1]});
      interval_start = std::nan("");
    }
  }
  if (!std::isnan(interval_start)) intervals.push_back({interval_start, phis.back()});

  const Maximum refined = maximize_scalar(
      [&](double phi) { return ch_statistic(nbs, TimeSettings::ch_family(phi), theta).S; },
      std::max(phi_min, phis[best] - (phi_max - phi_min) / phi_steps),
      std::min(phi_max, phis[best] + (phi_max - phi_min) / phi_steps), 16);

  const std::vector<std::string> header{"phi",          "S",           "p_pp_ta_tb", "p_pp_ta_tbp",
                                        "p_pp_tap_tb",  "p_pp_tap_tbp", "p_A_plus",   "p_B_plus"};
  const double pi16 = std::numbers::pi / 16;
  json summary{{"command", "bell-ch"},
               {"mode", to_string(mode)},
               {"N", a.N},
               {"kappa", a.kappa},
               {"g", a.g},
               {"theta", theta},
               {"omega_conversion", nbs.omega()},
               {"peak_S", reports[best].S},
               {"peak_phi", phis[best]},
               {"refined_peak_S", refined.value},
               {"refined_peak_phi", refined.argmax},
               {"ideal_S_at_peak_phi", ideal_ch_closed_form(refined.argmax)},
               {"ideal_S_max", (1.0 + std::numbers::sqrt2) / 2},
               {"S_at_pi_over_16", ch_statistic(nbs, TimeSettings::ch_family(pi16), theta).S},
               {"violation_intervals", intervals},
               {"roughness", sweep_roughness(reports)}};
  if (c.format == "json") {
    summary["rows"] = rows_to_json(header, rows);
    write_json(c, summary);
  } else {
    write_csv(c, header, rows);
    std::cerr << summary.dump() << '\n';
  }
  return kExitOk;
}

void require_cat_amplitude(double amp, const char* name) {
  if (amp < kNearDegenerateAmplitude) {
    throw DegenerateBasisError(std::string(name) + " = " + num(amp) + " is below " + num(kNearDegenerateAmplitude) +
                               ": the cat states |+> and |-> overlap too strongly to define the test");
  }
}

json sign_stats_json(const SignStatistics& s) {
  return json{{"p_pp", s.p_pp}, {"p_pm", s.p_pm}, {"p_mp", s.p_mp}, {"p_mm", s.p_mm}, {"E", s.E()}};
}

int run_kerr_chsh(const Common& c, double alpha, double beta, double omega, int n_max) {
  require_cat_amplitude(alpha, "alpha");
  require_cat_amplitude(beta, "beta");
  const KerrParams params{omega, alpha, beta, n_max};
  params.validate();
  const ChshReport r = chsh_kerr(params);
  const std::array<const char*, 4> pairs{"ta_tb", "ta_tbp", "tap_tb", "tap_tbp"};
  if (c.format == "csv") {
    std::vector<std::vector<double>> rows;
    const std::array<std::pair<double, double>, 4> t{{{r.settings.t_a, r.settings.t_b},
                                                      {r.settings.t_a, r.settings.t_b_prime},
                                                      {r.settings.t_a_prime, r.settings.t_b},
                                                      {r.settings.t_a_prime, r.settings.t_b_prime}}};
    for (std::size_t k = 0; k < 4; ++k) {
      const auto& q = r.quadrants[k];
      rows.push_back({t[k].first, t[k].second, r.E[k], q.p_pp, q.p_pm, q.p_mp, q.p_mm});
    }
    write_csv(c, {"t_a", "t_b", "E", "p_pp", "p_pm", "p_mp", "p_mm"}, rows);
    std::cerr << json{{"B", r.B}}.dump() << '\n';
    return kExitOk;
  }
  json E = json::object();
  json quadrants = json::object();
  for (std::size_t k = 0; k < 4; ++k) {
    E[pairs[k]] = r.E[k];
    quadrants[pairs[k]] = sign_stats_json(r.quadrants[k]);
  }
  write_json(c, json{{"command", "kerr-chsh"},
                     {"alpha", alpha},
                     {"beta", beta},
                     {"omega", omega},
                     {"n_max", r.n_max},
                     {"settings",
                      {{"t_a", r.settings.t_a},
                       {"t_a_prime", r.settings.t_a_prime},
                       {"t_b", r.settings.t_b},
                       {"t_b_prime", r.settings.t_b_prime}}},
                     {"E", E},
                     {"E_values", r.E},
                     {"quadrants", quadrants},
                     {"B", r.B},
                     {"ideal_limit", {{"E_values", {1.0, -1.0 / 3, 1.0 / 3, 7.0 / 9}}, {"B", 22.0 / 9}}}});
  return kExitOk;
}

int run_kerr_sweep(const Common& c, double alpha_min, double alpha_max, int steps, double omega) {
  if (!(alpha_max >= alpha_min)) throw DomainError("--alpha-max must be >= --alpha-min");
  require_cat_amplitude(alpha_min, "alpha-min");
  if (!(omega > 0.0)) throw DomainError("--omega must be > 0");
  std::vector<double> amps(steps + 1);
  for (int k = 0; k <= steps; ++k) amps[k] = alpha_min + (alpha_max - alpha_min) * k / steps;
  const auto reports = chsh_sweep(amps, omega, resolve_workers(c.workers));
  std::vector<std::vector<double>> rows;
  for (const auto& r : reports) rows.push_back({r.alpha, r.B, r.E[0], r.E[1], r.E[2], r.E[3]});
  const std::vector<std::string> header{"alpha", "B", "E1", "E2", "E3", "E4"};
  if (c.format == "json") {
    bool all_violate = true;
    for (const auto& r : reports) all_violate = all_violate && r.B > 2.0;
    write_json(c, json{{"command", "kerr-sweep"},
                       {"omega", omega},
                       {"all_B_above_2", all_violate},
                       {"rows", rows_to_json(header, rows)}});
  } else {
    write_csv(c, header, rows);
  }
  return kExitOk;
}

int run_kerr_density(const Common& c, double alpha, double beta, double ta, double tb, int points, double omega) {
  require_cat_amplitude(alpha, "alpha");
  require_cat_amplitude(beta, "beta");
  const KerrParams params{omega, alpha, beta, 0};
  params.validate();
  const double amp = std::max(alpha, beta);
  const BellCatState bell = prepare_bell_cat(params);
  const TwoModeState evolved = kerr_evolve(bell.state, omega, ta, tb);
  const QuadratureDensity d = joint_quadrature_density(evolved, DensityGrid{density_half_width(amp), points}, amp);
  if (c.format == "json") {
    std::vector<std::vector<double>> grid(d.x.size(), std::vector<double>(d.x.size()));
    for (Eigen::Index i = 0; i < d.x.size(); ++i) {
      for (Eigen::Index j = 0; j < d.x.size(); ++j) grid[i][j] = d.density(i, j);
    }
    std::vector<double> x(d.x.data(), d.x.data() + d.x.size());
    write_json(c, json{{"command", "kerr-density"},
                       {"alpha", alpha},
                       {"beta", beta},
                       {"t_a", ta},
                       {"t_b", tb},
                       {"omega", omega},
                       {"mass", d.mass},
                       {"x", x},
                       {"density", grid}});
    return kExitOk;
  }
  std::vector<std::vector<double>> rows;
  rows.reserve(static_cast<std::size_t>(d.x.size() * d.x.size()));
  for (Eigen::Index i = 0; i < d.x.size(); ++i) {
    for (Eigen::Index j = 0; j < d.x.size(); ++j) rows.push_back({d.x(i), d.x(j), d.density(i, j)});
  }
  write_csv(c, {"x_A", "x_B", "density"}, rows);
  return kExitOk;
}

json objective_json(const NbsObjective& q) {
  return json{{"max_leakage", q.max_leakage},
              {"profile_error", q.profile_error},
              {"score", q.score},
              {"omega_fitted", q.omega_fitted}};
}

int run_optimize(const Common& c, int N, const std::string& kappa_text, const std::string& g_text, int budget,
                 const std::string& reference_text) {
  const auto [k_lo, k_hi] = parse_range(kappa_text, "--kappa-range");
  const auto [g_lo, g_hi] = parse_range(g_text, "--g-range");
  const SearchRange kr{k_lo, k_hi};
  const SearchRange gr{g_lo, g_hi};
  kr.validate("kappa");
  gr.validate("g");
  std::optional<NbsParams> reference;
  if (!reference_text.empty()) {
    const auto [rk, rg] = parse_range(reference_text, "--reference");
    reference = NbsParams{N, rk, rg};
    reference->validate();
  }

  const OptimizeResult r = optimize_nbs(N, kr, gr, budget, resolve_workers(c.workers));
  json out{{"command", "optimize"},
           {"N", N},
           {"kappa_range", {k_lo, k_hi}},
           {"g_range", {g_lo, g_hi}},
           {"budget", budget},
           {"kappa", r.params.kappa},
           {"g", r.params.g},
           {"g_over_kappa", r.params.g / r.params.kappa},
           {"objective", objective_json(r.objective)},
           {"grid_best", {{"kappa", r.grid_best.kappa}, {"g", r.grid_best.g}, {"score", r.grid_best_score}}},
           {"evaluations", r.evaluations},
           {"objective_definition",
            "max over one fitted period of max(1 - p_N - p_0, |p_N - cos^2(omega t)|); "
            "this tool's own quality measure, not one given with the reference parameter sets"}};
  if (reference) {
    const NbsObjective q = nbs_quality(*reference);
    out["reference"] = {{"kappa", reference->kappa}, {"g", reference->g}, {"objective", objective_json(q)}};
    out["beats_reference"] = r.objective.score <= q.score;
  }
  if (c.format == "csv") {
    write_csv(c, {"kappa", "g", "max_leakage", "profile_error", "score", "omega_fitted", "evaluations"},
              {{r.params.kappa, r.params.g, r.objective.max_leakage, r.objective.profile_error, r.objective.score,
                r.objective.omega_fitted, static_cast<double>(r.evaluations)}});
    std::cerr << out.dump() << '\n';
  } else {
    write_json(c, out);
  }
  return kExitOk;
}

int run_verify(const Common& c, const std::string& filter, bool inject_fault) {
  const auto modules = invariant_modules();
  if (!filter.empty() &&
      std::none_of(modules.begin(), modules.end(), [&](const std::string& m) { return m.find(filter) != std::string::npos; })) {
    throw DomainError("--filter '" + filter + "' matches no module");
  }
  const auto results = run_invariants(VerifyOptions{filter, inject_fault});
  bool all_passed = true;
  for (const auto& r : results) all_passed = all_passed && r.passed;

  if (c.format == "json") {
    json rows = json::array();
    for (const auto& r : results) {
      rows.push_back({{"module", r.module},
                      {"name", r.name},
                      {"passed", r.passed},
                      {"residual", std::isfinite(r.residual) ? json(r.residual) : json(nullptr)},
                      {"tolerance", r.tolerance},
                      {"detail", r.detail},
                      {"seconds", r.seconds}});
    }
    write_json(c, json{{"command", "verify"}, {"passed", all_passed}, {"results", rows}});
  } else {
    Sink sink(c.output);
    std::ostream& os = sink.out();
    char line[256];
    std::snprintf(line, sizeof line, "%-6s %-14s %-50s %12s %10s\n", "status", "module", "invariant", "residual",
                  "tolerance");
    os << line;
    for (const auto& r : results) {
      std::snprintf(line, sizeof line, "%-6s %-14s %-50s %12.3e %10.1e  %s\n", r.passed ? "PASS" : "FAIL",
                    r.module.c_str(), r.name.c_str(), r.residual, r.tolerance, r.detail.c_str());
      os << line;
    }
    os << (all_passed ? "all invariants hold" : "invariant failures:") << '\n';
    for (const auto& r : results) {
      if (!r.passed) os << "  " << r.module << ": " << r.name << '\n';
    }
  }
  return all_passed ? kExitOk : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Macroscopic Bell-test simulator"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON file with option values; explicit flags override it");

  Common common;

  NbsArgs trace_args;
  double t_max = 100.0;
  int steps = 2000;
  auto* trace = app.add_subcommand("nbs-trace", "Josephson beam-splitter populations versus time");
  add_nbs_params(trace, trace_args);
  trace->add_option("--t-max", t_max, "Final time (units of 1/kappa when kappa=1)")->check(CLI::PositiveNumber);
  trace->add_option("--steps", steps, "Time intervals")->check(kPositiveCount);
  add_common(trace, common);

  NbsArgs ch_args{10, 10.0, 49.433};
  double phi_min = 0.0;
  double phi_max = std::numbers::pi / 2;
  int phi_steps = 200;
  std::string mode = "hamiltonian";
  double theta = kDefaultNoonPhase;
  auto* ch = app.add_subcommand("bell-ch", "CH statistic along the (0, 2phi, phi, 3phi) settings");
  add_nbs_params(ch, ch_args);
  ch->add_option("--phi-min", phi_min, "First phi");
  ch->add_option("--phi-max", phi_max, "Last phi");
  ch->add_option("--phi-steps", phi_steps, "phi intervals")->check(kPositiveCount);
  ch->add_option("--mode", mode, "Beam-splitter model")->check(CLI::IsMember({"ideal", "hamiltonian"}));
  ch->add_option("--theta", theta, "NOON relative phase (default -pi/2)");
  add_common(ch, common);

  double alpha = 8.0;
  double beta = 8.0;
  double kerr_omega = 1.0;
  int n_max = 0;
  auto* chsh = app.add_subcommand("kerr-chsh", "CHSH test with Kerr-evolved Bell cat states");
  chsh->add_option("--alpha", alpha, "Site-A coherent amplitude");
  chsh->add_option("--beta", beta, "Site-B coherent amplitude");
  chsh->add_option("--omega", kerr_omega, "Kerr strength Omega");
  chsh->add_option("--n-max", n_max, "Fock truncation (0 = automatic)")->check(CLI::NonNegativeNumber);
  add_common(chsh, common);

  double alpha_min = 2.5;
  double alpha_max = 8.0;
  int sweep_steps = 12;
  double sweep_omega = 1.0;
  auto* sweep = app.add_subcommand("kerr-sweep", "CHSH B along alpha = beta");
  sweep->add_option("--alpha-min", alpha_min, "First amplitude");
  sweep->add_option("--alpha-max", alpha_max, "Last amplitude");
  sweep->add_option("--steps", sweep_steps, "Amplitude intervals")->check(kPositiveCount);
  sweep->add_option("--omega", sweep_omega, "Kerr strength Omega");
  add_common(sweep, common);

  double density_alpha = 5.0;
  double density_beta = 5.0;
  double density_omega = 1.0;
  double ta = std::numbers::pi / 3;
  double tb = 0.0;
  int grid_points = 201;
  auto* density = app.add_subcommand("kerr-density", "Joint quadrature density after Kerr evolution");
  density->add_option("--alpha", density_alpha, "Site-A coherent amplitude");
  density->add_option("--beta", density_beta, "Site-B coherent amplitude");
  density->add_option("--ta", ta, "Evolution time at A");
  density->add_option("--tb", tb, "Evolution time at B");
  density->add_option("--grid-points", grid_points, "Points per axis")->check(CLI::Range(3, 4001));
  density->add_option("--omega", density_omega, "Kerr strength Omega");
  add_common(density, common);

  int opt_N = 2;
  std::string kappa_range = "0.1:10";
  std::string g_range = "1:100";
  int budget = 200;
  std::string reference;
  auto* optimize = app.add_subcommand("optimize", "Search (kappa, g) for the best beam splitter at fixed N");
  optimize->add_option("--N", opt_N, "Bosons per NOON component")->check(kPositiveCount);
  optimize->add_option("--kappa-range", kappa_range, "kappa search range lo:hi");
  optimize->add_option("--g-range", g_range, "g search range lo:hi");
  optimize->add_option("--budget", budget, "Objective evaluations (>= 50)")
      ->check(CLI::Range(kMinimumSearchBudget, std::numeric_limits<int>::max()));
  optimize->add_option("--reference", reference, "Also score this kappa:g");
  add_common(optimize, common);

  std::string filter;
  bool inject_fault = false;
  auto* verify = app.add_subcommand("verify", "Run the invariant suite");
  verify->add_option("--filter", filter, "Only modules whose name contains this text");
  verify->add_flag("--inject-fault", inject_fault)->group("");
  add_common(verify, common);

  try {
    // --config must be known before parsing so its values become defaults.
    std::string selected;
    for (int i = 1; i < argc; ++i) {
      const std::string arg = argv[i];
      if (arg == "--config" && i + 1 < argc) config_path = argv[++i];
      else if (selected.empty() && app.get_subcommand_no_throw(arg)) selected = arg;
    }
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw DomainError("cannot read config file '" + config_path + "'");
      json cfg;
      try {
        cfg = json::parse(in);
      } catch (const json::exception& e) {
        throw DomainError("config file '" + config_path + "' is not valid JSON: " + e.what());
      }
      apply_config(app, cfg, selected);
    }
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  } catch (const CLI::Error& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*trace) return run_nbs_trace(common, trace_args, t_max, steps);
    if (*ch) return run_bell_ch(common, ch_args, phi_min, phi_max, phi_steps, mode, theta);
    if (*chsh) return run_kerr_chsh(common, alpha, beta, kerr_omega, n_max);
    if (*sweep) return run_kerr_sweep(common, alpha_min, alpha_max, sweep_steps, sweep_omega);
    if (*density) return run_kerr_density(common, density_alpha, density_beta, ta, tb, grid_points, density_omega);
    if (*optimize) return run_optimize(common, opt_N, kappa_range, g_range, budget, reference);
    if (*verify) return run_verify(common, filter, inject_fault);
  } catch (const DegenerateBasisError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  } catch (const DomainError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}
