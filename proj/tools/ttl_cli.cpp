// ttl: selection runs, bound verification, oracle comparison and ring
// experiments from the command line.
//
// Exit codes: 0 success, 2 invalid input, 3 trainer or simulation failure,
// 4 a verified bound does not hold.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "ttl/error.hpp"
#include "ttl/format.hpp"
#include "ttl/oracle.hpp"
#include "ttl/random.hpp"
#include "ttl/ringsim.hpp"
#include "ttl/selectors.hpp"
#include "ttl/theory.hpp"
#include "ttl/trainers.hpp"
#include "ttl/verification.hpp"

namespace {

using namespace ttl;

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 2;
constexpr int kExitFailure = 3;
constexpr int kExitViolation = 4;

constexpr std::uint64_t kEvalPurpose = 0x4556414c;  // "EVAL"

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kMissingData:
    case ErrorKind::kCollision:
    case ErrorKind::kTrainingFailed:
      return kExitFailure;
    default:
      return kExitInvalid;
  }
}

// Selector settings from a config file; the ring keys go to the simulator.
struct SelectorConfig {
  std::optional<std::size_t> budget;
  std::optional<double> epsilon;
};

SelectorConfig read_selector_keys(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kValidation, "cannot open config " + path);
  SelectorConfig out;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "transfer_budget") out.budget = std::stoul(value);
    if (key == "termination_criteria") out.epsilon = std::stod(value);
  }
  return out;
}

ring::RingConfig ring_config_from(const std::string& path,
                                  const std::string& mode) {
  ring::RingConfig config;
  if (!path.empty()) config = ring::load_config_file(path, config);
  if (!mode.empty()) config.guidance.mode = ring::parse_mode(mode);
  config.validate();
  return config;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorKind::kValidation, "cannot write " + path.string());
  }
  return out;
}

// ---------------------------------------------------------------- run

struct RunArgs {
  std::string algo = "gttl";
  double d_min = 0.0;
  double d_max = 40.0;
  double resolution = 0.1;
  std::size_t budget = kDefaultBudget;
  double epsilon = kDefaultEpsilon;
  std::optional<double> theta;
  std::optional<double> theta_left;
  std::optional<double> theta_right;
  double j_star = 1.0;
  std::string trainer = "ideal";
  double decay = 0.0;
  double noise = 0.0;
  std::string csv;
  std::size_t ring_budget = 20;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string out = ".";
  std::string config;
};

std::unique_ptr<Trainer> make_trainer(const RunArgs& a) {
  if (a.trainer == "csv") {
    require(!a.csv.empty(), "--trainer csv needs --csv PATH");
    return load_csv_landscape(a.csv);
  }
  if (a.trainer == "ring") {
    return std::make_unique<RingTrainer>(ring_config_from(a.config, ""),
                                         a.ring_budget);
  }
  AnalyticProfile p;
  p.j_star = a.j_star;
  if (a.trainer == "ideal") {
    p.kind = ProfileKind::kIdealConstant;
  } else if (a.trainer == "decaying") {
    p.kind = ProfileKind::kDecaying;
    p.decay = a.decay;
  } else if (a.trainer == "noisy") {
    p.kind = ProfileKind::kNoisy;
    p.noise = a.noise;
  } else {
    throw Error(ErrorKind::kValidation, "unknown trainer '" + a.trainer + "'");
  }
  return std::make_unique<AnalyticTrainer>(p, a.d_min, a.d_max);
}

int cmd_run(RunArgs a, bool budget_given, bool epsilon_given) {
  if (!a.config.empty()) {
    const SelectorConfig sc = read_selector_keys(a.config);
    if (sc.budget && !budget_given) a.budget = *sc.budget;
    if (sc.epsilon && !epsilon_given) a.epsilon = *sc.epsilon;
  }
  const SelectorKind kind = parse_selector(a.algo);
  const HoldRange range(a.d_min, a.d_max, a.resolution);
  const double theta = a.theta.value_or(a.j_star / range.width());
  GapModel model{a.theta_left.value_or(theta), a.theta_right.value_or(theta),
                 a.j_star};
  model.validate();
  if (!model.slope_bounded(range)) {
    std::cerr << "warning: theta exceeds J*/(dmax-dmin)\n";
  }
  const auto trainer = make_trainer(a);

  std::optional<SelectionState> state;
  try {
    switch (kind) {
      case SelectorKind::kGttl:
        state = run_gttl(*trainer, model, range, a.budget, a.epsilon, a.seed);
        break;
      case SelectorKind::kCttl:
        state = run_cttl(*trainer, model, range, a.budget, a.seed);
        break;
      case SelectorKind::kRttl:
        state = run_rttl(*trainer, model, range, a.budget, a.seed);
        break;
      case SelectorKind::kExhaustive:
        state = run_exhaustive(*trainer, model, range, a.seed, a.threads);
        break;
    }
  } catch (const SelectionError& e) {
    std::cerr << "error: " << e.what() << " (after "
              << e.partial().iteration() << " trainings)\n";
    return kExitFailure;
  }

  const std::filesystem::path dir(a.out);
  std::filesystem::create_directories(dir);
  {
    auto f = open_out(dir / "iterations.csv");
    write_iterations_csv(f, *state);
  }
  {
    auto f = open_out(dir / "landscape.csv");
    write_landscape_csv(f, state->landscape);
  }
  std::cout << "algo,K,final_area,mean_performance\n"
            << to_string(kind) << ',' << state->iteration() << ','
            << fmt6(state->area()) << ','
            << fmt6(state->area() / range.width()) << '\n';
  return kExitOk;
}

// ------------------------------------------------------------- verify

int cmd_verify(const std::vector<std::string>& names, VerifyOptions opt) {
  std::vector<Claim> claims;
  for (const auto& n : names) claims.push_back(parse_claim(n));
  if (claims.empty()) {
    claims = {Claim::kT1, Claim::kT2, Claim::kL2, Claim::kL3, Claim::kT4};
  }
  std::vector<BoundReport> reports;
  bool guard_failed = false;
  for (Claim c : claims) {
    try {
      const auto part = verify_claims({c}, opt);
      reports.insert(reports.end(), part.begin(), part.end());
    } catch (const Error& e) {
      std::cerr << to_string(c) << ": " << e.what() << '\n';
      guard_failed = true;
    }
  }
  write_reports_csv(std::cout, reports);
  for (const auto& r : reports) {
    if (!r.holds) return kExitViolation;
  }
  return guard_failed ? kExitInvalid : kExitOk;
}

// ------------------------------------------------------------- oracle

struct OracleArgs {
  double d_min = 0.0;
  double d_max = 1.0;
  std::optional<double> theta;
  double j_star = 1.0;
  std::size_t k_max = 4;
  std::size_t grid = 41;
  unsigned threads = 1;
};

int cmd_oracle(const OracleArgs& a) {
  const HoldRange coarse = HoldRange::with_cells(a.d_min, a.d_max, a.grid);
  const GapModel model = GapModel::symmetric_model(
      a.theta.value_or(a.j_star / coarse.width()), a.j_star);
  const auto trainer = make_ideal_trainer(a.j_star, a.d_min, a.d_max);
  const double cell = coarse.resolution() * a.j_star;
  bool all = true;
  std::cout << "k,best_area,gttl_area,cttl_area,bound,holds\n";
  for (std::size_t k = 1; k <= a.k_max; ++k) {
    const OracleResult best =
        exhaustive_best(coarse, model, k, a.grid, a.threads);
    const double greedy = run_gttl(*trainer, model, coarse, k, 0.0).area();
    const double schedule = run_cttl(*trainer, model, coarse, k).area();
    const double bound = k >= 2 ? suboptimality_bound(coarse, model, k) : 0.0;
    const bool holds = best.best_area - greedy <= bound + cell;
    all = all && holds;
    std::cout << k << ',' << fmt6(best.best_area) << ',' << fmt6(greedy)
              << ',' << fmt6(schedule) << ',' << fmt6(bound) << ','
              << (holds ? "true" : "false") << '\n';
  }
  return all ? kExitOk : kExitViolation;
}

// --------------------------------------------------------------- ring

struct RingArgs {
  std::size_t seeds = 10;
  std::uint64_t seed = 0;
  double delta = 1.0;
  std::vector<double> deltas{0.1, 1, 5, 20, 40};
  std::string mode = "speed";
  std::size_t budget = 20;
  std::string log;
  std::string config;
  unsigned threads = 1;
};

int cmd_ring_baseline(const RingArgs& a) {
  const ring::RingConfig config = ring_config_from(a.config, a.mode);
  require(a.seeds >= 1, "--seeds must be at least 1");
  std::vector<ring::RolloutResult> rows(a.seeds);
  {
    std::vector<std::jthread> pool;
    const unsigned workers = std::max(1u, a.threads);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < a.seeds; i += workers) {
          rows[i] = ring::rollout(config, nullptr,
                                  derive_seed(a.seed, kEvalPurpose, i));
        }
      });
    }
  }
  std::cout << "run,mean_speed,speed_std\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::cout << i << ',' << fmt6(rows[i].mean_speed) << ','
              << fmt6(rows[i].mean_speed_std) << '\n';
  }
  return kExitOk;
}

int cmd_ring_eval(const RingArgs& a, const std::vector<double>& deltas) {
  require(a.budget >= 1, "--budget must be at least 1");
  const ring::RingConfig config = ring_config_from(a.config, a.mode);
  const std::uint64_t seed = derive_seed(a.seed, kEvalPurpose, 0);
  const double baseline = ring::rollout_measure(config, nullptr, seed);

  std::vector<ring::TrainingOutcome> rows(deltas.size());
  {
    std::vector<std::jthread> pool;
    const unsigned workers = std::max(1u, a.threads);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < deltas.size(); i += workers) {
          rows[i] = ring::search_policy(config, deltas[i], a.budget, seed);
        }
      });
    }
  }

  std::cout << "delta,achieved,baseline,improvement,w0,w1,w2,rollouts\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    std::cout << fmt6(deltas[i]) << ',' << fmt6(r.achieved) << ','
              << fmt6(baseline) << ',' << fmt6(r.achieved - baseline) << ','
              << fmt6(r.w0) << ',' << fmt6(r.w1) << ',' << fmt6(r.w2) << ','
              << r.rollouts << '\n';
  }

  if (!a.log.empty()) {
    ring::RingConfig c = config;
    c.guidance.hold = deltas.front();
    ring::LinearSpeedPolicy policy(c, rows.front().w0, rows.front().w1,
                                   rows.front().w2);
    const auto result = ring::rollout(c, &policy, seed, true);
    auto f = open_out(a.log);
    ring::write_trajectory_csv(f, result.trajectory);
  }
  return kExitOk;
}

// -------------------------------------------------------- export-plot

// Melts a run directory into `series,x,y`: achieved and area per
// iteration, and the final landscape.
int cmd_export_plot(const std::string& dir, const std::string& out_path) {
  const std::filesystem::path base(dir);
  std::ostringstream out;
  out << "series,x,y\n";

  auto read_rows = [](const std::filesystem::path& p, std::size_t columns) {
    std::ifstream in(p);
    if (!in) throw Error(ErrorKind::kValidation, "cannot open " + p.string());
    std::vector<std::vector<std::string>> rows;
    std::string line;
    std::getline(in, line);  // header
    std::size_t n = 1;
    while (std::getline(in, line)) {
      ++n;
      if (line.empty()) continue;
      std::vector<std::string> cells;
      std::stringstream ss(line);
      std::string cell;
      while (std::getline(ss, cell, ',')) cells.push_back(cell);
      if (cells.size() != columns) {
        throw Error(ErrorKind::kParse, p.string() + ":" + std::to_string(n) +
                                           ": expected " +
                                           std::to_string(columns) +
                                           " columns");
      }
      rows.push_back(std::move(cells));
    }
    return rows;
  };

  const auto iterations = read_rows(base / "iterations.csv", 4);
  for (const auto& r : iterations) out << "achieved," << r[1] << ',' << r[2] << '\n';
  for (const auto& r : iterations) out << "area," << r[0] << ',' << r[3] << '\n';
  for (const auto& r : read_rows(base / "landscape.csv", 2)) {
    out << "landscape," << r[0] << ',' << r[1] << '\n';
  }

  if (out_path.empty()) {
    std::cout << out.str();
  } else {
    auto f = open_out(out_path);
    f << out.str();
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Temporal transfer learning over guidance hold durations"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "select and train source tasks");
  run_cmd->add_option("--algo", run.algo, "gttl | cttl | rttl | exhaustive");
  run_cmd->add_option("--dmin", run.d_min, "shortest hold duration (s)");
  run_cmd->add_option("--dmax", run.d_max, "longest hold duration (s)");
  run_cmd->add_option("--resolution", run.resolution, "grid spacing (s)");
  auto* budget_opt = run_cmd->add_option("--budget", run.budget, "trainings");
  auto* eps_opt = run_cmd->add_option("--epsilon", run.epsilon,
                                      "stop at (1-eps) A*");
  run_cmd->add_option("--theta", run.theta, "gap slope (default J*/width)");
  run_cmd->add_option("--theta-left", run.theta_left);
  run_cmd->add_option("--theta-right", run.theta_right);
  run_cmd->add_option("--jstar", run.j_star, "performance ceiling");
  run_cmd->add_option("--trainer", run.trainer,
                      "ideal | decaying | noisy | csv | ring");
  run_cmd->add_option("--decay", run.decay, "decaying: fraction lost at dmax");
  run_cmd->add_option("--noise", run.noise, "noisy: uniform amplitude");
  run_cmd->add_option("--csv", run.csv, "csv: landscape file");
  run_cmd->add_option("--ring-budget", run.ring_budget,
                      "ring: rollouts per training");
  run_cmd->add_option("--seed", run.seed);
  run_cmd->add_option("--threads", run.threads);
  run_cmd->add_option("--out", run.out, "output directory");
  run_cmd->add_option("--config", run.config, "key=value parameter file");

  std::vector<std::string> claims;
  VerifyOptions verify;
  auto* verify_cmd = app.add_subcommand("verify", "check bounds numerically");
  verify_cmd->add_option("--claims", claims, "T1,T2,T4,L2,L3")->delimiter(',');
  verify_cmd->add_option("--grid", verify.oracle_cells, "oracle grid cells");
  verify_cmd->add_option("--fine", verify.fine_cells, "selector grid cells");
  verify_cmd->add_option("--kmax", verify.k_max, "largest budget");
  verify_cmd->add_option("--threads", verify.threads);

  OracleArgs oracle;
  auto* oracle_cmd = app.add_subcommand("oracle", "exhaustive best vs GTTL");
  oracle_cmd->add_option("--dmin", oracle.d_min);
  oracle_cmd->add_option("--dmax", oracle.d_max);
  oracle_cmd->add_option("--theta", oracle.theta);
  oracle_cmd->add_option("--jstar", oracle.j_star);
  oracle_cmd->add_option("--kmax", oracle.k_max);
  oracle_cmd->add_option("--grid", oracle.grid);
  oracle_cmd->add_option("--threads", oracle.threads);

  RingArgs ring_args;
  auto* ring_cmd = app.add_subcommand("ring", "single-lane ring experiments");
  ring_cmd->require_subcommand(1);
  auto add_common = [&](CLI::App* c) {
    c->add_option("--seed", ring_args.seed);
    c->add_option("--mode", ring_args.mode, "speed | acceleration");
    c->add_option("--config", ring_args.config, "key=value parameter file");
    c->add_option("--threads", ring_args.threads);
  };
  auto* baseline_cmd = ring_cmd->add_subcommand("baseline", "no guidance");
  baseline_cmd->add_option("--seeds", ring_args.seeds);
  add_common(baseline_cmd);
  auto* eval_cmd = ring_cmd->add_subcommand("eval", "train at one hold");
  eval_cmd->add_option("--delta", ring_args.delta);
  eval_cmd->add_option("--budget", ring_args.budget, "rollouts");
  eval_cmd->add_option("--log", ring_args.log, "trajectory CSV");
  add_common(eval_cmd);
  auto* sweep_cmd = ring_cmd->add_subcommand("sweep", "train at each hold");
  sweep_cmd->add_option("--deltas", ring_args.deltas)->delimiter(',');
  sweep_cmd->add_option("--budget", ring_args.budget, "rollouts per hold");
  sweep_cmd->add_option("--log", ring_args.log, "trajectory CSV (first hold)");
  add_common(sweep_cmd);

  std::string plot_dir = ".";
  std::string plot_out;
  auto* plot_cmd = app.add_subcommand("export-plot", "run CSVs to series,x,y");
  plot_cmd->add_option("dir", plot_dir, "run output directory");
  plot_cmd->add_option("--out", plot_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (*run_cmd) {
      return cmd_run(run, budget_opt->count() > 0, eps_opt->count() > 0);
    }
    if (*verify_cmd) return cmd_verify(claims, verify);
    if (*oracle_cmd) return cmd_oracle(oracle);
    if (*baseline_cmd) return cmd_ring_baseline(ring_args);
    if (*eval_cmd) return cmd_ring_eval(ring_args, {ring_args.delta});
    if (*sweep_cmd) return cmd_ring_eval(ring_args, ring_args.deltas);
    if (*plot_cmd) return cmd_export_plot(plot_dir, plot_out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitInvalid;
}
