#include "ttl/verification.hpp"

#include <cmath>
#include <string>

#include "ttl/error.hpp"
#include "ttl/format.hpp"
#include "ttl/oracle.hpp"
#include "ttl/selectors.hpp"
#include "ttl/trainers.hpp"

namespace ttl {
namespace {

struct Instance {
  HoldRange fine;
  HoldRange coarse;
  GapModel model;
  double a_star;
  double scale;  // θ Δ²
};

Instance make_instance(const VerifyOptions& opt) {
  require(opt.fine_cells >= 3 && opt.oracle_cells >= 3,
          "verification grids need at least 3 cells");
  Instance in{HoldRange::with_cells(opt.d_min, opt.d_max, opt.fine_cells),
              HoldRange::with_cells(opt.d_min, opt.d_max, opt.oracle_cells),
              GapModel::symmetric_model(opt.theta, opt.j_star), 0.0, 0.0};
  in.model.validate();
  in.a_star = in.model.full_area(in.fine);
  in.scale = opt.theta * in.fine.width() * in.fine.width();
  return in;
}

struct CellPick {
  double point;
  double gain;
};

// Brute force: the interior cell of [left, right] whose transfer (at J*)
// adds the most area. Ties keep the first cell.
CellPick best_cell(const Landscape& land, const GapModel& model, double left,
                   double right) {
  const HoldRange& r = land.range();
  const double base = aggregate_area(land);
  CellPick best{left, -1.0};
  for (std::size_t i = r.snap(left) + 1; i < r.snap(right); ++i) {
    const double g =
        aggregate_area(apply_transfer(land, model, r.at(i), model.j_star)) -
        base;
    if (g > best.gain) best = {r.at(i), g};
  }
  return best;
}

Landscape with_sources(const HoldRange& range, const GapModel& model,
                       const std::vector<double>& sources) {
  Landscape land(range);
  for (double s : sources) land = apply_transfer(land, model, s, model.j_star);
  return land;
}

// Compares the brute-force pick inside the segment containing `probe` with
// the closed-form rule.
void check_segment(const Instance& in, const std::vector<double>& sources,
                   double probe, const std::string& name,
                   std::vector<BoundReport>& out) {
  const Landscape land = with_sources(in.fine, in.model, sources);
  for (const Segment& seg : segments(land, sources)) {
    if (!(seg.left < probe && probe < seg.right)) continue;
    const auto [point, gain] = theorem1_point_and_gain(seg, in.model, false);
    const CellPick pick = best_cell(land, in.model, seg.left, seg.right);
    const double cell = in.fine.resolution();
    out.push_back(make_report(Claim::kT1, name + " point",
                              std::abs(pick.point - point), cell, in.fine.width()));
    out.push_back(make_report(Claim::kT1, name + " gain",
                              std::abs(pick.gain - gain), cell * in.model.j_star,
                              in.a_star));
    return;
  }
  throw Error(ErrorKind::kNoSegment, "no segment contains " + fmt6(probe));
}

}  // namespace

std::vector<BoundReport> verify_t1(const VerifyOptions& opt) {
  const Instance in = make_instance(opt);
  std::vector<BoundReport> out;
  const double lo = opt.d_min;
  const double w = in.fine.width();
  const double mid = lo + 0.5 * w;

  const OracleResult first = exhaustive_best(in.fine, in.model, 1,
                                             opt.oracle_cells, opt.threads);
  const double coarse = in.coarse.resolution();
  out.push_back(make_report(Claim::kT1, "first pick point",
                            std::abs(first.best_sequence.front() - mid), coarse,
                            w));
  // One pick at the midpoint leaves a triangle of depth θΔ/2 on each side.
  const double first_area = in.a_star - 0.25 * in.scale;
  out.push_back(make_report(Claim::kT1, "first pick area",
                            std::abs(first.best_area - first_area),
                            coarse * opt.j_star, in.a_star));

  check_segment(in, {mid}, lo + 0.25 * w, "positive slope", out);
  check_segment(in, {mid}, lo + 0.75 * w, "negative slope", out);
  check_segment(in, {in.fine.snapped(lo + 0.25 * w), in.fine.snapped(lo + 0.75 * w)},
                mid, "symmetric V", out);
  return out;
}

std::vector<BoundReport> verify_t2(const VerifyOptions& opt) {
  const Instance in = make_instance(opt);
  const auto trainer = make_ideal_trainer(opt.j_star, opt.d_min, opt.d_max);
  std::vector<BoundReport> out;
  for (int i = 0; i <= 4; ++i) {
    const std::size_t k = (std::size_t{1} << i) + 1;
    const double eps = std::ldexp(1.0, -(i + 2));
    const std::string tag = "K=" + std::to_string(k);

    const double closed = in.a_star - eps * in.scale;
    out.push_back(make_report(
        Claim::kT2, tag + " ghost closed form",
        std::abs(ghost_cell_lower_bound(in.fine, in.model, k) - closed), 0.0,
        in.a_star));

    const double steps = static_cast<double>(steps_to_cover(eps));
    out.push_back(make_report(Claim::kT2, tag + " steps",
                              std::abs(steps - static_cast<double>(k)), 0.0,
                              1.0));

    if (k > opt.k_max) continue;
    const SelectionState run = run_gttl(*trainer, in.model, in.fine, k, eps);
    out.push_back(make_report(Claim::kT2, tag + " greedy coverage",
                              (1.0 - eps) * in.a_star, run.area(), in.a_star));
  }
  return out;
}

std::vector<BoundReport> verify_l2(const VerifyOptions& opt) {
  const Instance in = make_instance(opt);
  const auto trainer = make_ideal_trainer(opt.j_star, opt.d_min, opt.d_max);
  const double w = in.fine.width();
  std::vector<BoundReport> out;
  for (double f : {0.25, 0.5, 1.0}) {
    const GapModel model = GapModel::symmetric_model(f * opt.j_star / w, opt.j_star);
    const SelectionState run = run_gttl(*trainer, model, in.fine, opt.k_max, 0.0);
    for (std::size_t k = 1; k <= run.area_history.size(); ++k) {
      out.push_back(make_report(
          Claim::kL2, "theta=" + fmt6(f) + " k=" + std::to_string(k),
          ghost_cell_lower_bound(in.fine, model, k), run.area_history[k - 1],
          in.a_star));
    }
  }
  return out;
}

std::vector<BoundReport> verify_l3(const VerifyOptions& opt) {
  const Instance in = make_instance(opt);
  const auto trainer = make_ideal_trainer(opt.j_star, opt.d_min, opt.d_max);
  const double cell = in.coarse.resolution() * opt.j_star;
  std::vector<BoundReport> out;
  for (std::size_t k = 1; k <= opt.oracle_k_max; ++k) {
    const std::string tag = "K=" + std::to_string(k);
    const double closed = cttl_optimal_area(in.coarse, in.model, k);
    const OracleResult best =
        exhaustive_best(in.coarse, in.model, k, opt.oracle_cells, opt.threads);
    out.push_back(make_report(Claim::kL3, tag + " oracle",
                              std::abs(best.best_area - closed), cell,
                              in.a_star));
    const SelectionState run = run_cttl(*trainer, in.model, in.coarse, k);
    out.push_back(make_report(Claim::kL3, tag + " schedule",
                              std::abs(run.area() - closed), cell, in.a_star));
  }
  return out;
}

std::vector<BoundReport> verify_t4(const VerifyOptions& opt) {
  const Instance in = make_instance(opt);
  const auto trainer = make_ideal_trainer(opt.j_star, opt.d_min, opt.d_max);
  const double cell = in.fine.resolution() * opt.j_star;
  std::vector<BoundReport> out;
  for (std::size_t k = 2; k <= opt.k_max; ++k) {
    const std::string tag = "K=" + std::to_string(k);
    const SelectionState greedy = run_gttl(*trainer, in.model, in.fine, k, 0.0);
    const SelectionState coarse = run_cttl(*trainer, in.model, in.fine, k);
    const double bound = suboptimality_bound(in.fine, in.model, k);
    out.push_back(make_report(Claim::kT4, tag,
                              coarse.area() - greedy.area(), bound + cell,
                              in.a_star));
    if (is_power_of_two_plus_one(k)) {
      const double lhs = cttl_optimal_area(in.fine, in.model, k) -
                         ghost_cell_lower_bound(in.fine, in.model, k);
      out.push_back(make_report(Claim::kT4, tag + " identity",
                                std::abs(lhs - bound), 1e-9 * bound, 0.0));
    }
  }
  const std::size_t oracle_k = std::min<std::size_t>(opt.oracle_k_max, 4);
  for (std::size_t k = 2; k <= oracle_k; ++k) {
    out.push_back(greedy_vs_oracle(in.fine, in.model, k, opt.oracle_cells,
                                   opt.threads));
  }
  return out;
}

std::vector<BoundReport> verify_claims(const std::vector<Claim>& claims,
                                       const VerifyOptions& opt) {
  std::vector<BoundReport> out;
  for (Claim c : claims) {
    std::vector<BoundReport> part;
    switch (c) {
      case Claim::kT1: part = verify_t1(opt); break;
      case Claim::kT2: part = verify_t2(opt); break;
      case Claim::kT4: part = verify_t4(opt); break;
      case Claim::kL2: part = verify_l2(opt); break;
      case Claim::kL3: part = verify_l3(opt); break;
    }
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

}  // namespace ttl
