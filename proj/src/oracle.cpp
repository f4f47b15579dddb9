#include "ttl/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "ttl/error.hpp"
#include "ttl/format.hpp"
#include "ttl/kernels.hpp"
#include "ttl/selectors.hpp"
#include "ttl/trainers.hpp"

namespace ttl {
namespace {

// Integrals of the ideal landscape restricted to the pieces a sorted source
// set cuts the grid into. Between two consecutive sources only those two
// envelopes matter, so any subset's area is a sum of table entries.
struct PieceTables {
  std::size_t n;
  std::vector<double> left;   // [d_min, s]
  std::vector<double> right;  // [s, d_max]
  std::vector<double> mid;    // [s_i, s_j], row-major n x n

  double between(std::size_t i, std::size_t j) const { return mid[i * n + j]; }
};

PieceTables build_tables(const HoldRange& grid, const GapModel& model) {
  const std::size_t n = grid.cell_count();
  const double h = grid.resolution();
  const auto trapezoid = kernels::active().trapezoid;
  PieceTables t{n, std::vector<double>(n), std::vector<double>(n),
                std::vector<double>(n * n, 0.0)};
  const Landscape zero(grid);
  for (std::size_t i = 0; i < n; ++i) {
    const Landscape one = apply_transfer(zero, model, grid.at(i), model.j_star);
    const auto v = one.values();
    t.left[i] = trapezoid(v.subspan(0, i + 1), h);
    t.right[i] = trapezoid(v.subspan(i), h);
    for (std::size_t j = i + 1; j < n; ++j) {
      const Landscape two = apply_transfer(one, model, grid.at(j), model.j_star);
      t.mid[i * n + j] = trapezoid(two.values().subspan(i, j - i + 1), h);
    }
  }
  return t;
}

struct Best {
  std::vector<std::size_t> subset;
  double area = -1.0;

  void offer(const std::vector<std::size_t>& s, double a) {
    if (a > area || (a == area && s < subset)) {
      area = a;
      subset = s;
    }
  }
};

void enumerate(const PieceTables& t, std::size_t k,
               std::vector<std::size_t>& chosen, double partial, Best& best) {
  if (chosen.size() == k) {
    best.offer(chosen, partial + t.right[chosen.back()]);
    return;
  }
  const std::size_t last = chosen.back();
  const std::size_t remaining = k - chosen.size();
  for (std::size_t next = last + 1; next + remaining <= t.n; ++next) {
    chosen.push_back(next);
    enumerate(t, k, chosen, partial + t.between(last, next), best);
    chosen.pop_back();
  }
}

}  // namespace

double binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) {
    r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  }
  return std::round(r);
}

OracleResult exhaustive_best(const HoldRange& range, const GapModel& model,
                             std::size_t k, std::size_t coarse_cells,
                             unsigned threads) {
  model.validate();
  require(k >= 1, "oracle budget must be at least 1");
  require(k <= coarse_cells, "oracle budget exceeds the coarse grid");
  if (coarse_cells > kMaxOracleCells) {
    throw Error(ErrorKind::kGuard,
                "oracle grid of " + std::to_string(coarse_cells) +
                    " cells exceeds the limit of " +
                    std::to_string(kMaxOracleCells));
  }
  const double subsets = binomial(coarse_cells, k);
  if (subsets > kMaxOracleSubsets) {
    throw Error(ErrorKind::kGuard,
                "oracle would enumerate C(" + std::to_string(coarse_cells) +
                    "," + std::to_string(k) + ") = " + fmt6(subsets) +
                    " subsets; the limit is " + fmt6(kMaxOracleSubsets));
  }

  const HoldRange grid =
      HoldRange::with_cells(range.d_min(), range.d_max(), coarse_cells);
  const PieceTables tables = build_tables(grid, model);
  const std::size_t n = tables.n;

  const unsigned workers = std::max(1u, threads);
  std::vector<Best> partial(workers);
  auto work = [&](unsigned w) {
    std::vector<std::size_t> chosen;
    for (std::size_t first = w; first + k <= n; first += workers) {
      chosen.assign(1, first);
      enumerate(tables, k, chosen, tables.left[first], partial[w]);
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }

  Best best;
  for (const Best& b : partial) {
    if (!b.subset.empty()) best.offer(b.subset, b.area);
  }
  OracleResult out;
  for (std::size_t i : best.subset) out.best_sequence.push_back(grid.at(i));
  out.best_area = best.area;
  out.evaluated_count = static_cast<std::size_t>(subsets);
  return out;
}

BoundReport greedy_vs_oracle(const HoldRange& range, const GapModel& model,
                             std::size_t k, std::size_t coarse_cells,
                             unsigned threads) {
  const OracleResult oracle =
      exhaustive_best(range, model, k, coarse_cells, threads);
  const HoldRange grid =
      HoldRange::with_cells(range.d_min(), range.d_max(), coarse_cells);
  const auto trainer =
      make_ideal_trainer(model.j_star, grid.d_min(), grid.d_max());
  const SelectionState greedy = run_gttl(*trainer, model, grid, k, 0.0);
  const double bound = k >= 2 ? suboptimality_bound(range, model, k) : 0.0;
  const double cell = grid.resolution() * model.j_star;
  return make_report(Claim::kT4, "K=" + std::to_string(k) + " oracle",
                     oracle.best_area - greedy.area(), bound + cell,
                     model.full_area(range));
}

}  // namespace ttl
