// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// fails. Criteria are checked at their stated tolerances; nothing here is
// relaxed to make a line pass.

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ttl/format.hpp"
#include "ttl/landscape.hpp"
#include "ttl/ringsim.hpp"
#include "ttl/theory.hpp"
#include "ttl/verification.hpp"

using namespace ttl;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// All rows hold; otherwise names the first failing ones.
Outcome all_hold(const std::vector<BoundReport>& rows) {
  std::ostringstream bad;
  int failures = 0;
  for (const auto& r : rows) {
    if (r.holds) continue;
    if (failures++ < 3) {
      bad << ' ' << to_string(r.claim) << '[' << r.label << "] lhs=" << fmt6(r.lhs)
          << " rhs=" << fmt6(r.rhs) << ';';
    }
  }
  if (failures == 0) return {true, std::to_string(rows.size()) + " checks hold"};
  return {false, std::to_string(failures) + "/" + std::to_string(rows.size()) +
                     " checks fail:" + bad.str()};
}

Outcome with_time_limit(Outcome o, double elapsed, double limit) {
  o.detail += ", " + fmt6(elapsed) + " s";
  if (elapsed >= limit) {
    o.pass = false;
    o.detail += " exceeds " + fmt6(limit) + " s";
  }
  return o;
}

Outcome criterion1() {
  const auto t0 = Clock::now();
  const Outcome o = all_hold(verify_t1(VerifyOptions{}));
  return with_time_limit(o, seconds_since(t0), 5.0);
}

Outcome criterion2() {
  const auto t0 = Clock::now();
  VerifyOptions opt;
  opt.oracle_cells = 41;
  opt.oracle_k_max = 6;
  const Outcome o = all_hold(verify_l3(opt));
  return with_time_limit(o, seconds_since(t0), 60.0);
}

Outcome criterion3() {
  const HoldRange unit = HoldRange::with_cells(0.0, 1.0, 41);
  const GapModel m = GapModel::symmetric_model(1.0, 1.0);
  std::ostringstream bad;
  for (int i = 0; i <= 4; ++i) {
    const std::size_t k = (std::size_t{1} << i) + 1;
    const double want = 1.0 - std::ldexp(1.0, -(i + 2));
    const double got = ghost_cell_lower_bound(unit, m, k);
    if (got != want) bad << " K=" << k << " gives " << fmt_exact(got) << ';';
  }
  const std::size_t steps = steps_to_cover(1.0 / 16.0);
  if (steps != 5) bad << " steps_to_cover(1/16)=" << steps << ';';
  if (!bad.str().empty()) return {false, bad.str()};
  return {true, "closed form exact for i=0..4, steps_to_cover(1/16)=5"};
}

Outcome criterion4() {
  VerifyOptions opt;
  opt.k_max = 17;
  return all_hold(verify_t4(opt));
}

Outcome criterion5() {
  VerifyOptions opt;
  opt.k_max = 17;
  return all_hold(verify_l2(opt));
}

// Landscape invariants over randomized ranges, slopes and transfer
// sequences. Achieved values are drawn from a curve whose slope stays
// below the gap slopes.
Outcome criterion6() {
  std::mt19937_64 gen(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto values = [](const Landscape& l) {
    return std::vector<double>(l.values().begin(), l.values().end());
  };
  int fail_monotone = 0, fail_idem = 0, fail_order = 0, fail_exact = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const double lo = std::floor(10.0 * u(gen));
    const auto cells = 11 + static_cast<std::size_t>(190.0 * u(gen));
    const HoldRange r = HoldRange::with_cells(lo, lo + 1.0 + 40.0 * u(gen), cells);
    const GapModel m{0.01 + u(gen), 0.01 + u(gen), 1.0 + 5.0 * u(gen)};
    const double slope = u(gen) * std::min(m.theta_left, m.theta_right);
    const double peak = m.j_star * (0.3 + 0.7 * u(gen));
    const double center = r.d_min() + u(gen) * r.width();
    auto truth = [&](double d) {
      return std::max(0.0, peak - slope * std::abs(d - center));
    };
    auto pick = [&] {
      return r.at(std::min(cells - 1, static_cast<std::size_t>(u(gen) * cells)));
    };

    // monotone area, bounded by width * best achieved
    Landscape land(r);
    double prev = 0.0, best = 0.0;
    bool ok = true;
    for (int k = 0; k < 8; ++k) {
      const double s = pick();
      best = std::max(best, truth(s));
      land = apply_transfer(land, m, s, truth(s));
      const double a = aggregate_area(land);
      ok = ok && a >= prev - 1e-12 * (1.0 + prev) &&
           a <= r.width() * best * (1.0 + 1e-12) + 1e-15;
      prev = a;
    }
    fail_monotone += !ok;

    // idempotence
    const double s = pick();
    const double a = m.j_star * u(gen);
    const Landscape once = apply_transfer(land, m, s, a);
    fail_idem += values(once) != values(apply_transfer(once, m, s, a));

    // order invariance
    const double sa = pick(), sb = pick();
    const Landscape ab =
        apply_transfer(apply_transfer(land, m, sa, truth(sa)), m, sb, truth(sb));
    const Landscape ba =
        apply_transfer(apply_transfer(land, m, sb, truth(sb)), m, sa, truth(sa));
    fail_order += values(ab) != values(ba);

    // exactness at the source, for arbitrary achieved values
    Landscape e(r);
    bool exact = true;
    for (int k = 0; k < 4; ++k) {
      const double sk = pick();
      const double ak = m.j_star * u(gen);
      e = apply_transfer(e, m, sk, ak);
      exact = exact && e.at(sk) == ak;
    }
    fail_exact += !exact;
  }
  const int total = fail_monotone + fail_idem + fail_order + fail_exact;
  std::ostringstream d;
  d << "1000 trials each; failures: monotone " << fail_monotone
    << ", idempotence " << fail_idem << ", order " << fail_order
    << ", exact-at-source " << fail_exact;
  return {total == 0, d.str()};
}

Outcome criterion7() {
  const auto t0 = Clock::now();
  ring::RingConfig c;
  c.n_guided = 0;
  int in_band = 0, waves = 0;
  double lo = 1e9, hi = -1e9;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto r = ring::rollout(c, nullptr, seed);
    in_band += r.mean_speed >= 3.0 && r.mean_speed <= 5.0;
    waves += r.mean_speed_std > 0.3;
    lo = std::min(lo, r.mean_speed);
    hi = std::max(hi, r.mean_speed);
  }
  std::ostringstream d;
  d << "mean speed in [" << fmt6(lo) << ", " << fmt6(hi) << "] m/s, "
    << in_band << "/10 inside [3, 5]; speed std > 0.3 in " << waves << "/10";
  const double elapsed = seconds_since(t0);
  return with_time_limit({in_band == 10 && waves >= 7, d.str()}, elapsed, 120.0);
}

Outcome criterion8() {
  const auto t0 = Clock::now();
  const ring::RingConfig c;
  constexpr std::uint64_t seed = 1;
  constexpr std::size_t budget = 20;
  const double baseline = ring::rollout_measure(c, nullptr, seed);
  const std::vector<double> deltas{0.1, 1, 5, 20, 40};
  std::vector<double> achieved;
  int wins = 0;
  for (double d : deltas) {
    achieved.push_back(ring::train_and_measure(c, d, budget, seed).achieved);
    wins += achieved.back() > baseline;
  }
  const double flat = std::abs(achieved.back() - achieved.front()) /
                      achieved.front();
  std::ostringstream d;
  d << "baseline " << fmt6(baseline) << ", guided";
  for (double a : achieved) d << ' ' << fmt6(a);
  d << "; beats baseline " << wins << "/5; |J(40)-J(0.1)|/J(0.1) = "
    << fmt6(flat);
  const double elapsed = seconds_since(t0);
  return with_time_limit({wins >= 4 && flat <= 0.15, d.str()}, elapsed, 600.0);
}

Outcome criterion9() {
  ring::RingConfig coarse;
  coarse.guidance.hold = 2.0;
  ring::RingConfig fine = coarse;
  fine.guidance.hold = 1.0;
  int exact = 0;
  const int cases = 3;
  for (int k = 0; k < cases; ++k) {
    ring::LinearSpeedPolicy p(coarse, 2.5 + 0.5 * k, 0.8, 0.05 * k);
    const auto logged = ring::rollout(coarse, &p, 30 + k, true);
    ring::ReplayPolicy replay(logged.commands, 2);
    const auto again = ring::rollout(fine, &replay, 30 + k, true);
    bool same = logged.trajectory.size() == again.trajectory.size();
    for (std::size_t i = 0; same && i < logged.trajectory.size(); ++i) {
      const auto& x = logged.trajectory[i];
      const auto& y = again.trajectory[i];
      same = x.t == y.t && x.vehicle == y.vehicle && x.position == y.position &&
             x.speed == y.speed;
    }
    exact += same;
  }
  return {exact == cases, std::to_string(exact) + "/" + std::to_string(cases) +
                              " replays bit-exact over the full horizon"};
}

struct CliRun {
  int code;
  std::string out;
};

CliRun run_cli(const std::string& args) {
  const std::string cmd = std::string(TTL_CLI) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return {-1, ""};
  std::string out;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome criterion10() {
  namespace fs = std::filesystem;
  const fs::path base = fs::temp_directory_path() / "ttl_acceptance";
  fs::remove_all(base);
  fs::create_directories(base);
  std::ofstream(base / "short.cfg") << "warmup_steps=100\ntimestep_horizon=200\n";
  const std::string cfg = (base / "short.cfg").string();

  const std::vector<std::string> commands{
      "run --algo rttl --seed 7",
      "run --algo gttl --trainer noisy --noise 0.1 --seed 11",
      "run --algo cttl --trainer decaying --decay 0.3 --budget 6 --seed 2",
      "run --algo exhaustive --dmax 4 --trainer noisy --noise 0.2 --seed 5",
      "run --algo gttl --dmax 10 --resolution 1 --budget 2 --trainer ring "
      "--ring-budget 2 --seed 9 --config " + cfg,
      "ring baseline --seeds 3 --seed 4 --config " + cfg,
      "ring eval --delta 5 --budget 3 --seed 8 --config " + cfg,
      "ring sweep --deltas 1,10 --budget 2 --seed 8 --config " + cfg,
      "oracle --kmax 3",
      "verify --claims T1,L3"};
  int identical = 0;
  std::string first_diff;
  for (std::size_t i = 0; i < commands.size(); ++i) {
    std::string outputs[2];
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path dir = base / ("c" + std::to_string(i) + "_" + std::to_string(rep));
      const fs::path log = dir.string() + ".log.csv";
      std::string args = commands[i];
      if (args.rfind("run", 0) == 0) args += " --out " + dir.string();
      if (args.rfind("ring eval", 0) == 0) args += " --log " + log.string();
      const CliRun r = run_cli(args);
      outputs[rep] = std::to_string(r.code) + "\n" + r.out;
      if (fs::exists(dir)) {
        outputs[rep] += slurp(dir / "iterations.csv") + slurp(dir / "landscape.csv");
      }
      if (fs::exists(log)) outputs[rep] += slurp(log);
    }
    if (outputs[0] == outputs[1]) {
      ++identical;
    } else if (first_diff.empty()) {
      first_diff = "; differs: " + commands[i];
    }
  }
  fs::remove_all(base);
  return {identical == static_cast<int>(commands.size()),
          std::to_string(identical) + "/" + std::to_string(commands.size()) +
              " invocations byte-identical across two runs" + first_diff};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"greedy step certification", criterion1},
      {"coarse-to-fine optimal area", criterion2},
      {"ghost-cell closed form and steps", criterion3},
      {"greedy suboptimality bound", criterion4},
      {"greedy area above ghost-cell bound", criterion5},
      {"landscape invariants", criterion6},
      {"ring baseline band and waves", criterion7},
      {"ring guidance beats baseline", criterion8},
      {"hold refinement replay", criterion9},
      {"CLI determinism", criterion10},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << "criterion " << (i + 1) << ": " << (o.pass ? "PASS" : "FAIL")
              << "  " << criteria[i].first << " -- " << o.detail << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size()
            << " criteria pass" << std::endl;
  return failed == 0 ? 0 : 1;
}
