#include "ttl/trainers.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include "ttl/error.hpp"
#include "ttl/format.hpp"
#include "ttl/random.hpp"

namespace ttl {
namespace {

constexpr std::uint64_t kNoisePurpose = 0x4e4f4953;  // "NOIS"

void check_in_range(double delta, double d_min, double d_max) {
  const double slack = 1e-9 * std::max(1.0, d_max - d_min);
  require(std::isfinite(delta) && delta >= d_min - slack &&
              delta <= d_max + slack,
          "duration " + fmt6(delta) + " outside the trainer's range [" +
              fmt6(d_min) + ", " + fmt6(d_max) + "]");
}

}  // namespace

void AnalyticProfile::validate() const {
  require(std::isfinite(j_star) && j_star >= 0.0, "J* must be non-negative");
  require(decay >= 0.0 && decay <= 1.0, "decay must lie in [0, 1]");
  require(noise >= 0.0, "noise amplitude must be non-negative");
}

AnalyticTrainer::AnalyticTrainer(AnalyticProfile profile, double d_min,
                                 double d_max)
    : profile_(profile), d_min_(d_min), d_max_(d_max) {
  profile_.validate();
  require(d_min < d_max, "trainer range needs d_min < d_max");
}

EvaluatorResult AnalyticTrainer::evaluate(double delta,
                                          std::uint64_t seed) const {
  check_in_range(delta, d_min_, d_max_);
  double achieved = profile_.j_star;
  switch (profile_.kind) {
    case ProfileKind::kIdealConstant:
      break;
    case ProfileKind::kDecaying:
      achieved = profile_.j_star *
                 (1.0 - profile_.decay * (delta - d_min_) / (d_max_ - d_min_));
      break;
    case ProfileKind::kNoisy:
      if (profile_.noise > 0.0) {
        Rng rng(derive_seed(seed, kNoisePurpose,
                            std::bit_cast<std::uint64_t>(delta)));
        achieved += rng.uniform(-profile_.noise, profile_.noise);
      }
      break;
  }
  achieved = std::max(achieved, 0.0);
  return {delta, achieved, name() + "@" + fmt6(delta), 1.0};
}

std::string AnalyticTrainer::name() const {
  switch (profile_.kind) {
    case ProfileKind::kIdealConstant: return "ideal";
    case ProfileKind::kDecaying: return "decaying";
    case ProfileKind::kNoisy: return "noisy";
  }
  return "analytic";
}

std::unique_ptr<Trainer> make_ideal_trainer(double j_star, double d_min,
                                            double d_max) {
  AnalyticProfile p;
  p.j_star = j_star;
  return std::make_unique<AnalyticTrainer>(p, d_min, d_max);
}

CsvTrainer::CsvTrainer(std::vector<CsvRow> rows, double max_tolerance)
    : rows_(std::move(rows)) {
  require(!rows_.empty(), "CSV landscape has no rows");
  require(max_tolerance > 0.0, "CSV tolerance must be positive");
  for (std::size_t i = 1; i < rows_.size(); ++i) {
    require(rows_[i].delta > rows_[i - 1].delta,
            "CSV deltas must be strictly increasing");
  }
  if (rows_.size() == 1) {
    tolerance_ = 0.0;
    return;
  }
  std::vector<double> spacing;
  for (std::size_t i = 1; i < rows_.size(); ++i) {
    spacing.push_back(rows_[i].delta - rows_[i - 1].delta);
  }
  std::sort(spacing.begin(), spacing.end());
  const std::size_t m = spacing.size();
  const double median = m % 2 == 1 ? spacing[m / 2]
                                   : 0.5 * (spacing[m / 2 - 1] + spacing[m / 2]);
  tolerance_ = std::min(0.5 * median, max_tolerance);
}

EvaluatorResult CsvTrainer::evaluate(double delta, std::uint64_t) const {
  const auto it = std::lower_bound(
      rows_.begin(), rows_.end(), delta,
      [](const CsvRow& r, double d) { return r.delta < d; });
  const CsvRow* best = nullptr;
  double best_dist = 0.0;
  // Equidistant neighbours resolve to the lower row.
  for (auto cand = (it == rows_.begin() ? it : it - 1);
       cand != rows_.end() && cand <= it; ++cand) {
    const double d = std::abs(cand->delta - delta);
    if (best == nullptr || d < best_dist) {
      best = &*cand;
      best_dist = d;
    }
  }
  const double slack = 1e-9 * std::max(1.0, std::abs(delta));
  if (best == nullptr || best_dist > tolerance_ + slack) {
    throw Error(ErrorKind::kMissingData,
                "no CSV row within " + fmt6(tolerance_) + " s of delta=" +
                    fmt6(delta));
  }
  return {delta, best->performance, "csv@" + fmt6(best->delta), 0.0};
}

std::vector<CsvRow> parse_landscape_csv(std::istream& in) {
  std::string line;
  int line_no = 0;
  auto fail = [&](const std::string& what) {
    throw Error(ErrorKind::kParse,
                "landscape CSV line " + std::to_string(line_no) + ": " + what);
  };
  if (!std::getline(in, line)) {
    ++line_no;
    fail("missing header");
  }
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "delta,performance") fail("expected header 'delta,performance'");

  std::vector<CsvRow> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
      fail("expected two comma-separated fields");
    }
    auto number = [&](const std::string& text) {
      try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size() || !std::isfinite(v)) throw std::invalid_argument(text);
        return v;
      } catch (const std::exception&) {
        fail("not a number: '" + text + "'");
      }
      return 0.0;
    };
    const double delta = number(line.substr(0, comma));
    const double perf = number(line.substr(comma + 1));
    if (perf < 0.0) fail("negative performance " + fmt6(perf));
    if (!rows.empty() && delta <= rows.back().delta) {
      fail("delta " + fmt6(delta) + " does not increase");
    }
    rows.push_back({delta, perf});
  }
  if (rows.empty()) fail("no data rows");
  return rows;
}

std::unique_ptr<CsvTrainer> load_csv_landscape(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kParse, "cannot open " + path);
  return std::make_unique<CsvTrainer>(parse_landscape_csv(in));
}

RingTrainer::RingTrainer(ring::RingConfig config, std::size_t search_budget,
                         std::size_t round_steps)
    : config_(std::move(config)),
      search_budget_(search_budget),
      round_steps_(round_steps) {
  config_.validate();
  require(search_budget_ >= 1, "ring search budget must be at least 1");
  require(round_steps_ >= 1, "rounding unit must be at least one step");
}

double RingTrainer::rounded_hold(double delta) const {
  const double unit = static_cast<double>(round_steps_);
  const double steps =
      std::max(1.0, std::round(delta / config_.dt / unit) * unit);
  return steps * config_.dt;
}

EvaluatorResult RingTrainer::evaluate(double delta, std::uint64_t seed) const {
  require(std::isfinite(delta) && delta > 0.0,
          "ring hold duration must be positive");
  std::lock_guard lock(mutex_);
  EvaluatorResult r = ring::train_and_measure(config_, rounded_hold(delta),
                                              search_budget_, seed);
  r.delta = delta;
  return r;
}

}  // namespace ttl
