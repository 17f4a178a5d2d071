#include "kellygame/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"
#include "kellygame/analytics.hpp"
#include "kellygame/format.hpp"
#include "kellygame/game_solver.hpp"
#include "kellygame/hjb_checker.hpp"
#include "kellygame/monte_carlo.hpp"
#include "kellygame/phi_game.hpp"
#include "kellygame/scenario.hpp"

namespace kelly::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CheckFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string scenario;
  std::string out_dir;
  bool as_json = false;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--scenario", c.scenario, "Scenario JSON file")->required();
  cmd->add_option("--out", c.out_dir, "Write output files into this directory instead of stdout");
  cmd->add_flag("--json", c.as_json, "Emit JSON where the default output is CSV");
  cmd->add_option("--seed", c.seed, "Random seed (deterministic commands ignore it)");
}

/// Writes `content` to DIR/name when --out is given, else to `out`.
void emit(const Common& c, std::ostream& out, const std::string& name, const std::string& content) {
  if (c.out_dir.empty()) {
    out << content;
    return;
  }
  std::error_code ec;
  fs::create_directories(c.out_dir, ec);
  const fs::path path = fs::path(c.out_dir) / name;
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw OutputError("cannot write '" + path.string() + "'");
  f << content;
  f.flush();
  if (!f) throw OutputError("failed writing '" + path.string() + "'");
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json header(const char* command, const Market& m) {
  return {{"schema_version", kSchemaVersion}, {"command", command}, {"market", to_json(m)}};
}

Rule pick_rule(const std::vector<double>& flag, const std::optional<Rule>& from_scenario, const Rule& fallback,
               const Market& m, const char* what) {
  if (!flag.empty()) {
    Rule r(Eigen::Map<const Eigen::VectorXd>(flag.data(), static_cast<Eigen::Index>(flag.size())));
    m.require_dimension(r, what);
    return r;
  }
  return from_scenario ? *from_scenario : fallback;
}

// ---------------------------------------------------------------- equilibrium

void cmd_equilibrium(const Common& c, std::ostream& out) {
  const Scenario s = load_scenario(c.scenario);
  const Market& m = s.market;
  const GameSolution<double> sol = solve_game(m);
  const auto probes = default_probes(m);
  const SaddleReport<double> rep = verify_saddle(m, probes);

  json j = header("equilibrium", m);
  j["kelly"] = to_json(sol.kelly);
  j["growth_rate_at_kelly"] = growth_rate(m, sol.kelly);
  j["value_kernel"] = sol.value_kernel;
  j["value_ratio"] = sol.value_ratio;
  j["kelly_residual"] = sol.residual;
  j["saddle_report"] = {{"probes", rep.probes},
                        {"min_p1_margin", rep.min_p1_margin},
                        {"max_p2_margin", rep.max_p2_margin},
                        {"violations", rep.violations},
                        {"spurious_equalities", rep.spurious_equalities},
                        {"holds", rep.holds()}};
  emit(c, out, "equilibrium.json", dump(j));
  if (!rep.holds()) throw CheckFailed("saddle inequalities violated");
}

// ------------------------------------------------------------- best-response

struct BestResponseArgs {
  std::optional<double> min, max;
  double step = 0.05;
  int asset = 0;
};

void cmd_best_response(const Common& c, const BestResponseArgs& a, std::ostream& out) {
  const Scenario s = load_scenario(c.scenario);
  const Market& m = s.market;
  if (a.asset < 0 || a.asset >= m.dimension()) throw Error(Errc::invalid_argument, "--asset out of range");
  const Rule kelly = kelly_rule(m);
  const double k = kelly[a.asset];
  const double lo = a.min.value_or(k - 2.0);
  const double hi = a.max.value_or(k + 2.0);
  if (!(a.step > 0.0) || !(lo < hi)) throw Error(Errc::invalid_argument, "need --min < --max and --step > 0");
  if (k < lo || k > hi) {
    throw Error(Errc::invalid_argument, "range [" + format_g17(lo) + ", " + format_g17(hi) +
                                            "] does not contain the Kelly weight " + format_g17(k));
  }
  const auto count = static_cast<std::int64_t>(std::floor((hi - lo) / a.step + 1e-9)) + 1;

  std::ostringstream csv;
  json rows = json::array();
  csv << "c,b_kind,c_star_of_b\n";
  for (std::int64_t i = 0; i < count; ++i) {
    const double x = lo + a.step * static_cast<double>(i);
    Rule probe = kelly;
    probe.weights[a.asset] = x;
    const ResponseKind kind = best_response_p1(m, probe).kinds[static_cast<std::size_t>(a.asset)];
    const double c_star = best_response_p2(m, probe)[a.asset];
    csv << format_g17(x) << ',' << to_string(kind) << ',' << format_g17(c_star) << '\n';
    rows.push_back({{"c", x}, {"b_kind", to_string(kind)}, {"c_star_of_b", c_star}});
  }
  if (c.as_json) {
    json j = header("best-response", m);
    j["asset"] = a.asset;
    j["kelly"] = to_json(kelly);
    j["rows"] = std::move(rows);
    emit(c, out, "best_response.json", dump(j));
  } else {
    emit(c, out, "best_response.csv", csv.str());
  }
}

// ------------------------------------------------------------------ simulate

struct SimulateArgs {
  std::vector<double> b, c;
  std::optional<double> horizon;
  std::optional<std::int64_t> steps, paths;
  std::vector<double> at;
  unsigned threads = 0;
};

SimConfig resolve_config(const Scenario& s, std::optional<double> horizon, std::optional<std::int64_t> steps,
                         std::optional<std::int64_t> paths, std::optional<std::uint64_t> seed, unsigned threads) {
  SimConfig cfg = s.sim.value_or(SimConfig{});
  if (horizon) cfg.horizon = *horizon;
  if (steps) cfg.steps = *steps;
  if (paths) cfg.paths = *paths;
  if (seed) cfg.seed = *seed;
  cfg.threads = threads;
  cfg.validate();
  return cfg;
}

json moment_summary(const Eigen::VectorXd& logs, const LogWealthLaw<double>& law, double t) {
  const double n = static_cast<double>(logs.size());
  const double mean = logs.mean();
  const double var = logs.size() > 1 ? (logs.array() - mean).square().sum() / (n - 1.0) : 0.0;
  return {{"mean", mean},
          {"std_dev", std::sqrt(var)},
          {"reference_mean", law.mean(t)},
          {"reference_std_dev", law.stddev(t)}};
}

void cmd_simulate(const Common& c, const SimulateArgs& a, std::ostream& out) {
  const Scenario s = load_scenario(c.scenario);
  const Market& m = s.market;
  const Rule kelly = kelly_rule(m);
  const Rule b = pick_rule(a.b, s.b, kelly, m, "--b");
  const Rule cr = pick_rule(a.c, s.c, kelly, m, "--c");
  const SimConfig cfg = resolve_config(s, a.horizon, a.steps, a.paths, c.seed, a.threads);

  if (cfg.paths == 1) {
    const Trajectory tr = sample_play(m, b, cr, cfg);
    if (c.as_json) {
      json j = header("simulate", m);
      j["b"] = to_json(b);
      j["c"] = to_json(cr);
      j["config"] = to_json(cfg);
      json rows = json::array();
      for (const auto& r : tr.rows) rows.push_back({r.t, r.v1, r.v2, r.ratio});
      j["columns"] = {"t", "v1", "v2", "ratio"};
      j["rows"] = std::move(rows);
      emit(c, out, "sample_play.json", dump(j));
    } else {
      std::ostringstream csv;
      tr.write_csv(csv);
      emit(c, out, "sample_play.csv", csv.str());
    }
    return;
  }

  const PathBatch batch = simulate_paths(m, cfg);
  std::vector<double> at = a.at.empty() ? std::vector<double>{cfg.horizon} : a.at;
  json rows = json::array();
  for (double t : at) {
    const Eigen::Index k = batch.grid_index(t);
    const double tk = batch.times()[k];
    json er = to_json(estimate_expected_ratio(batch, m, b, cr, tk));
    er["reference"] = payoff_kernel(m, b, cr).ratio_at(tk);
    json wp = to_json(estimate_win_probability(batch, m, b, cr, tk));
    wp["reference"] = win_probability(m, b, cr, tk);
    rows.push_back({{"t", tk},
                    {"expected_ratio", std::move(er)},
                    {"win_probability", std::move(wp)},
                    {"log_wealth_b", moment_summary(batch.log_wealth(m, b, tk), log_wealth_law(m, b), tk)},
                    {"log_wealth_c", moment_summary(batch.log_wealth(m, cr, tk), log_wealth_law(m, cr), tk)}});
  }
  json j = header("simulate", m);
  j["b"] = to_json(b);
  j["c"] = to_json(cr);
  j["config"] = to_json(cfg);
  j["payoff_kernel"] = payoff_kernel(m, b, cr).kernel;
  j["at"] = std::move(rows);
  emit(c, out, "estimates.json", dump(j));

  if (!c.out_dir.empty()) {
    // Cross-sectional mean of log wealth at every grid time.
    const LogWealthLaw<double> law_b = log_wealth_law(m, b);
    const LogWealthLaw<double> law_c = log_wealth_law(m, cr);
    const Eigen::VectorXd eb = b.weights.cwiseProduct(m.volatility());
    const Eigen::VectorXd ec = cr.weights.cwiseProduct(m.volatility());
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(batch.paths(), m.dimension());
    std::ostringstream csv;
    csv << "t,mean_log_v1,mean_log_v2\n";
    for (Eigen::Index k = 0; k <= batch.steps(); ++k) {
      if (k > 0)
        for (Eigen::Index p = 0; p < batch.paths(); ++p) w.row(p) += batch.increment(p, k - 1).transpose();
      const double t = batch.times()[k];
      const double mb = law_b.mean(t) + (w * eb).mean();
      const double mc = law_c.mean(t) + (w * ec).mean();
      csv << format_g17(t) << ',' << format_g17(mb) << ',' << format_g17(mc) << '\n';
    }
    emit(c, out, "mean_log_wealth.csv", csv.str());
  }
}

// ------------------------------------------------------------------ phi-game

struct PhiArgs {
  std::string phi = "indicator";
  std::vector<double> b, c;
  double t = 1.0;
  std::int64_t samples = 100000;
  std::string w1, w2;
  unsigned threads = 0;
};

struct RandomizationSpec {
  std::string kind;
  double param = 1.0;

  FairRandomization make() const {
    if (kind == "uniform") return uniform_0_2();
    if (kind == "point") return point_mass(param);
    if (kind == "exponential") return exponential(param);
    throw Error(Errc::invalid_argument, "unknown randomization '" + kind + "'");
  }
};

RandomizationSpec parse_randomization(const std::string& text, const std::string& fallback) {
  const std::string s = text.empty() ? fallback : text;
  const auto colon = s.find(':');
  RandomizationSpec spec{s.substr(0, colon), 1.0};
  if (colon != std::string::npos) {
    try {
      spec.param = std::stod(s.substr(colon + 1));
    } catch (const std::exception&) {
      throw Error(Errc::invalid_argument, "bad randomization parameter in '" + s + "'");
    }
  }
  spec.make();
  return spec;
}

/// Closed-form value of the phi-game payoff where one is known.
json phi_reference(const Market& m, const Rule& b, const Rule& c, const std::string& phi, const RandomizationSpec& w1,
                   const RandomizationSpec& w2, double t) {
  const bool points = w1.kind == "point" && w2.kind == "point";
  const bool same_law = w1.kind == w2.kind && w1.param == w2.param;
  const LogWealthLaw<double> law = log_ratio_law(m, b, c);
  if (phi == "indicator") {
    if (w1.kind == "uniform" && w2.kind == "uniform" && b == c) return 0.5;
    if (points) {
      const double shift = std::log(w1.param / w2.param);
      if (law.variance_rate * t == 0.0) return law.mean(t) + shift >= 0.0 ? 1.0 : 0.0;
      return normal_cdf((law.mean(t) + shift) / law.stddev(t));
    }
  } else if (phi == "identity") {
    if (points) return w1.param / w2.param * payoff_kernel(m, b, c).ratio_at(t);
  } else if (phi == "log") {
    if (points) return std::log(w1.param / w2.param) + law.mean(t);
    if (same_law) return law.mean(t);
  }
  return nullptr;
}

void cmd_phi_game(const Common& c, const PhiArgs& a, std::ostream& out) {
  const Scenario s = load_scenario(c.scenario);
  const Market& m = s.market;
  const PhiFunction phi = phi_by_name(a.phi);
  const Rule kelly = kelly_rule(m);
  const Rule b = pick_rule(a.b, std::nullopt, kelly, m, "--b");
  const Rule cr = pick_rule(a.c, std::nullopt, kelly, m, "--c");
  const std::string fallback = a.phi == "indicator" ? "uniform" : "point";
  const RandomizationSpec w1 = parse_randomization(a.w1, fallback);
  const RandomizationSpec w2 = parse_randomization(a.w2, fallback);
  if (!(a.t > 0.0)) throw Error(Errc::invalid_argument, "--t must be > 0");

  SimConfig cfg{a.t, 1, a.samples, c.seed.value_or(0), a.threads};
  const FairRandomization r1 = w1.make();
  const FairRandomization r2 = w2.make();
  const PhiEstimate est = investment_phi_game_payoff(m, b, cr, r1, r2, phi, a.t, cfg);

  json j = header("phi-game", m);
  j["b"] = to_json(b);
  j["c"] = to_json(cr);
  j["t"] = a.t;
  j["phi"] = phi.name;
  j["w1"] = r1.name();
  j["w2"] = r2.name();
  j["estimate"] = est.estimate.estimate;
  j["std_error"] = est.estimate.std_error;
  j["samples"] = est.estimate.samples;
  j["seed"] = est.estimate.seed;
  j["resampled_zeros"] = est.resampled_zeros;
  j["value_reference"] = phi_reference(m, b, cr, a.phi, w1, w2, a.t);
  emit(c, out, "phi_game.json", dump(j));
}

// ----------------------------------------------------------------- hjb-check

struct HjbArgs {
  std::vector<double> grid_b, grid_c;
  double h = kDefaultHjbStep;
  double tolerance = kDefaultHjbTolerance;
  std::optional<double> probe_b, probe_c;
};

void cmd_hjb_check(const Common& c, const HjbArgs& a, std::ostream& out) {
  const Scenario s = load_scenario(c.scenario);
  const Market& m = s.market;
  if (m.dimension() != 1) throw Error(Errc::invalid_argument, "hjb-check supports single-stock scenarios only");
  const double k = kelly_rule(m)[0];
  std::vector<double> offsets{-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0};
  std::vector<double> def;
  for (double d : offsets) def.push_back(k + d);
  const std::vector<double> grid_b = a.grid_b.empty() ? def : a.grid_b;
  const std::vector<double> grid_c = a.grid_c.empty() ? def : a.grid_c;
  const std::vector<StatePoint> probes{{1.0, 0.0, 1.0, 1.0}, {1.0, 0.0, 2.0, 1.0}, {1.0, 0.0, 1.0, 2.0},
                                       {2.5, 0.3, 1.0, 1.0}};

  const HjbReport rep = verify_mutual_best_response(m, grid_b, grid_c, probes, a.h, a.tolerance);

  const StatePoint unit{1.0, 0.0, 1.0, 1.0};
  const double sb = a.probe_b.value_or(k);
  const double sc = a.probe_c.value_or(k + 0.5);
  const double spot = hjb_rhs(m, ratio_candidate(), unit, sb, sc, a.h);

  double constant_worst = 0.0;
  for (double bb : grid_b)
    for (double cc : grid_c)
      constant_worst = std::max(constant_worst, std::abs(hjb_rhs(m, constant_candidate(1.0), unit, bb, cc, a.h)));
  const bool constant_ok = constant_worst <= a.tolerance;

  json entries = json::array();
  for (const auto& e : rep.entries) {
    entries.push_back({{"role", e.role},
                       {"state", {{"S", e.state.S}, {"t", e.state.t}, {"M1", e.state.M1}, {"M2", e.state.M2}}},
                       {"b", e.b},
                       {"c", e.c},
                       {"residual", e.residual},
                       {"closed_form", e.closed_form},
                       {"pass", e.pass}});
  }
  json j = header("hjb-check", m);
  j["candidate"] = "M1/M2";
  j["kelly"] = rep.kelly;
  j["step"] = rep.step;
  j["tolerance"] = rep.tolerance;
  j["grid_b"] = grid_b;
  j["grid_c"] = grid_c;
  j["entries"] = std::move(entries);
  j["worst_p1_residual"] = rep.worst_p1;
  j["min_p2_residual_off_kelly"] = rep.min_p2_off_kelly;
  j["worst_closed_form_gap"] = rep.worst_closed_form_gap;
  j["terminal_condition"] = rep.terminal_condition;
  j["spot"] = {{"b", sb},
               {"c", sc},
               {"residual", spot},
               {"closed_form", ratio_residual_closed_form(m, unit, sb, sc)}};
  j["constant_candidate"] = {{"max_abs_residual", constant_worst}, {"pass", constant_ok}};
  j["passed"] = rep.passed && constant_ok;
  emit(c, out, "hjb_report.json", dump(j));
  if (!(rep.passed && constant_ok)) throw CheckFailed("HJB residual check failed");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Kelly rebalancing game: equilibrium, simulation and verification tools"};
  app.require_subcommand(1);

  Common eq_common, br_common, sim_common, phi_common, hjb_common;

  auto* eq = app.add_subcommand("equilibrium", "Kelly equilibrium, its growth rate and a saddle-point check");
  add_common(eq, eq_common);

  BestResponseArgs br_args;
  auto* br = app.add_subcommand("best-response", "Best-response curves of both players as CSV");
  add_common(br, br_common);
  br->add_option("--min", br_args.min, "Grid start (default Kelly - 2)");
  br->add_option("--max", br_args.max, "Grid end (default Kelly + 2)");
  br->add_option("--step", br_args.step, "Grid spacing")->capture_default_str();
  br->add_option("--asset", br_args.asset, "Coordinate to sweep; others stay at Kelly")->capture_default_str();

  SimulateArgs sim_args;
  auto* sim = app.add_subcommand("simulate", "Simulate plays of the game");
  add_common(sim, sim_common);
  sim->add_option("--b", sim_args.b, "Player 1 rule (comma separated)")->delimiter(',');
  sim->add_option("--c", sim_args.c, "Player 2 rule (comma separated)")->delimiter(',');
  sim->add_option("--T", sim_args.horizon, "Horizon");
  sim->add_option("--steps", sim_args.steps, "Time steps");
  sim->add_option("--paths", sim_args.paths, "Number of paths; 1 writes a sample-play trajectory");
  sim->add_option("--at", sim_args.at, "Report times for estimates (default T)")->delimiter(',');
  sim->add_option("--threads", sim_args.threads, "Worker threads (0 = all cores)");

  PhiArgs phi_args;
  auto* phi = app.add_subcommand("phi-game", "Estimate the investment phi-game payoff");
  add_common(phi, phi_common);
  phi->add_option("--phi", phi_args.phi, "indicator | identity | log")->capture_default_str();
  phi->add_option("--b", phi_args.b, "Player 1 rule (default Kelly)")->delimiter(',');
  phi->add_option("--c", phi_args.c, "Player 2 rule (default Kelly)")->delimiter(',');
  phi->add_option("--t", phi_args.t, "Time")->capture_default_str();
  phi->add_option("--samples", phi_args.samples, "Monte Carlo samples")->capture_default_str();
  phi->add_option("--w1", phi_args.w1, "Player 1 randomization: uniform | point[:a] | exponential[:mean]");
  phi->add_option("--w2", phi_args.w2, "Player 2 randomization");
  phi->add_option("--threads", phi_args.threads, "Worker threads (0 = all cores)");

  HjbArgs hjb_args;
  auto* hjb = app.add_subcommand("hjb-check", "Finite-difference HJB residual check for J = M1/M2");
  add_common(hjb, hjb_common);
  hjb->add_option("--grid-b", hjb_args.grid_b, "Player 1 controls (default Kelly + {-2..2})")->delimiter(',');
  hjb->add_option("--grid-c", hjb_args.grid_c, "Player 2 controls")->delimiter(',');
  hjb->add_option("--fd-step", hjb_args.h, "Relative finite-difference step")->capture_default_str();
  hjb->add_option("--tol", hjb_args.tolerance, "Identity tolerance")->capture_default_str();
  hjb->add_option("--probe-b", hjb_args.probe_b, "Spot residual b (default Kelly)");
  hjb->add_option("--probe-c", hjb_args.probe_c, "Spot residual c (default Kelly + 0.5)");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsage;
  }

  try {
    if (*eq) cmd_equilibrium(eq_common, out);
    else if (*br) cmd_best_response(br_common, br_args, out);
    else if (*sim) cmd_simulate(sim_common, sim_args, out);
    else if (*phi) cmd_phi_game(phi_common, phi_args, out);
    else if (*hjb) cmd_hjb_check(hjb_common, hjb_args, out);
  } catch (const ScenarioIoError& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  } catch (const OutputError& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  } catch (const ScenarioError& e) {
    err << "error: invalid scenario at " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const CheckFailed& e) {
    err << "check failed: " << e.what() << '\n';
    return kCheckFailed;
  }
  return kSuccess;
}

}  // namespace kelly::cli
