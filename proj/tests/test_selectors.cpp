#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "support/oracles.hpp"
#include "ttl/selectors.hpp"
#include "ttl/theory.hpp"
#include "ttl/trainers.hpp"

using namespace ttl;

namespace {

HoldRange range40() { return HoldRange(0.0, 40.0, 0.1); }
GapModel model40() { return GapModel::symmetric_model(1.0 / 40.0, 1.0); }

// Area of the ideal landscape for a source set, from the oracle.
double oracle_area(const HoldRange& r, const GapModel& m,
                   const std::vector<double>& sources) {
  const auto x = oracle::grid(r.d_min(), r.d_max(), r.cell_count());
  std::vector<oracle::Transfer> ts;
  for (double s : sources) ts.push_back({s, m.j_star});
  return oracle::trapezoid(x, oracle::envelope(x, ts, m.theta_left,
                                               m.theta_right));
}

// Trainer failing on the n-th call.
class FlakyTrainer final : public Trainer {
 public:
  explicit FlakyTrainer(int fail_at) : fail_at_(fail_at) {}
  EvaluatorResult evaluate(double delta, std::uint64_t) const override {
    if (++calls_ == fail_at_) {
      throw Error(ErrorKind::kTrainingFailed, "flaky");
    }
    return {delta, 1.0, "flaky", 1.0};
  }
  std::string name() const override { return "flaky"; }

 private:
  int fail_at_;
  mutable int calls_ = 0;
};

}  // namespace

TEST(SelectorKind, ParseRoundTrip) {
  for (auto k : {SelectorKind::kGttl, SelectorKind::kCttl, SelectorKind::kRttl,
                 SelectorKind::kExhaustive}) {
    EXPECT_EQ(parse_selector(to_string(k)), k);
  }
  EXPECT_THROW(parse_selector("greedy"), Error);
}

TEST(GreedyPoint, FreshStatePicksMidpoint) {
  SelectionState st(range40(), 3, 0.0);
  EXPECT_EQ(find_greedy_transfer_point(st, model40()), 20.0);
}

TEST(GreedyPoint, CoarserTieBreak) {
  const auto trainer = make_ideal_trainer(1.0, 0.0, 40.0);
  SelectionState st(range40(), 3, 0.0);
  st.record(model40(), trainer->evaluate(20.0, 0));
  const double next = find_greedy_transfer_point(st, model40());
  EXPECT_NEAR(next, 33.33, 0.05);
  const auto cands = greedy_candidates(st.landscape, st.sources, model40());
  ASSERT_EQ(cands.size(), 2u);
  EXPECT_DOUBLE_EQ(cands[0].gain, cands[1].gain);
}

TEST(GreedyPoint, PositiveSlopeTrisection) {
  const Landscape j1 =
      apply_transfer(Landscape(range40()), model40(), 20.0, 1.0);
  const std::vector<double> src{20.0};
  const auto cands = greedy_candidates(j1, src, model40());
  const auto left = std::find_if(cands.begin(), cands.end(), [](auto& c) {
    return c.segment.slope_class == SlopeClass::kPositive;
  });
  ASSERT_NE(left, cands.end());
  EXPECT_NEAR(left->point, 20.0 / 3.0, 1e-12);
}

TEST(Gttl, SingleStep) {
  const auto trainer = make_ideal_trainer(1.0, 0.0, 40.0);
  const SelectionState st = run_gttl(*trainer, model40(), range40(), 1, 0.0);
  ASSERT_EQ(st.sources, std::vector<double>{20.0});
  EXPECT_NEAR(st.area(), 30.0, 1e-9);
}

TEST(Gttl, ThreeSteps) {
  const auto trainer = make_ideal_trainer(1.0, 0.0, 40.0);
  const SelectionState st = run_gttl(*trainer, model40(), range40(), 3, 0.0);
  ASSERT_EQ(st.sources.size(), 3u);
  EXPECT_EQ(st.sources[0], 20.0);
  EXPECT_NEAR(st.sources[1], 33.33, 0.05);
  EXPECT_NEAR(st.sources[2], 6.67, 0.05);
  const double truth = oracle_area(range40(), model40(), st.sources);
  EXPECT_NEAR(st.area(), truth, 1e-9);
  EXPECT_NEAR(st.area(), 40.0 * (1.0 - 1.0 / 12.0), 0.1);
  EXPECT_GE(st.area(), ghost_cell_lower_bound(range40(), model40(), 3));
  EXPECT_NEAR(ghost_cell_lower_bound(range40(), model40(), 3), 35.0, 1e-12);
}

TEST(Gttl, EpsilonOneStopsImmediately) {
  const auto trainer = make_ideal_trainer(1.0, 0.0, 40.0);
  const SelectionState st = run_gttl(*trainer, model40(), range40(), 15, 1.0);
  EXPECT_TRUE(st.sources.empty());
  EXPECT_EQ(st.area(), 0.0);
}

TEST(Gttl, StopsOnceCovered) {
  const auto trainer = make_ideal_trainer(1.0, 0.0, 40.0);
  const SelectionState st =
      run_gttl(*trainer, model40(), range40(), 15, 0.25);
  EXPECT_EQ(st.iteration(), 1u);  // 30 >= 0.75 * 40
  EXPECT_THROW(run_gttl(*trainer, model40(), range40(), 3, -0.1), Error);
  EXPECT_THROW(run_gttl(*trainer, model40(), range40(), 3, 1.5), Error);
}

TEST(Gttl, NoDuplicatesOnCoarseGrid) {
  const HoldRange r = HoldRange::with_cells(0.0, 1.0, 9);
  const auto trainer = make_ideal_trainer(1.0, 0.0, 1.0);
  const SelectionState st =
      run_gttl(*trainer, GapModel::symmetric_model(1.0, 1.0), r, 9, 0.0);
  auto s = st.sources;
  std::sort(s.begin(), s.end());
  EXPECT_EQ(std::adjacent_find(s.begin(), s.end()), s.end());
  EXPECT_NEAR(st.area(), 1.0, 1e-12);
}

TEST(Gttl, AreaHistoryMatchesReplay) {
  const auto trainer = make_ideal_trainer(1.0, 0.0, 40.0);
  const SelectionState st = run_gttl(*trainer, model40(), range40(), 6, 0.0);
  for (std::size_t j = 1; j <= st.iteration(); ++j) {
    const Landscape replay = replay_transfers(
        range40(), model40(),
        std::span<const EvaluatorResult>(st.results.data(), j));
    EXPECT_NEAR(aggregate_area(replay), st.area_history[j - 1], 1e-12);
  }
  EXPECT_EQ(replay_transfers(range40(), model40(), st.results).values().size(),
            st.landscape.values().size());
}

TEST(Gttl, FailureKeepsPartialState) {
  FlakyTrainer flaky(3);
  try {
    run_gttl(flaky, model40(), range40(), 5, 0.0);
    FAIL();
  } catch (const SelectionError& e) {
    EXPECT_EQ(e.partial().iteration(), 2u);
    EXPECT_EQ(e.partial().sources[0], 20.0);
  }
}

TEST(Cttl, Schedules) {
  EXPECT_EQ(cttl_schedule(range40(), 2), (std::vector<double>{30.0, 10.0}));
  EXPECT_EQ(cttl_schedule(range40(), 1), std::vector<double>{20.0});
  const HoldRange r(1.0, 40.0, 0.001);
  const auto s = cttl_schedule(r, 7);
  const std::vector<double> want{37.214, 31.643, 26.071, 20.5,
                                 14.929, 9.357,  3.786};
  ASSERT_EQ(s.size(), want.size());
  for (std::size_t i = 0; i < s.size(); ++i) EXPECT_NEAR(s[i], want[i], 1e-9);
}

TEST(Cttl, ScheduleCollisionRejected) {
  EXPECT_THROW(cttl_schedule(HoldRange::with_cells(0.0, 1.0, 3), 5), Error);
}

TEST(Cttl, Areas) {
  const HoldRange unit = HoldRange::with_cells(0.0, 1.0, 1001);
  const GapModel m = GapModel::symmetric_model(1.0, 1.0);
  const auto unit_trainer = make_ideal_trainer(1.0, 0.0, 1.0);
  EXPECT_NEAR(run_cttl(*unit_trainer, m, unit, 2).area(), 0.875, 1e-12);
  EXPECT_NEAR(run_cttl(*unit_trainer, m, unit, 1).area(), 0.75, 1e-12);

  const auto trainer = make_ideal_trainer(1.0, 0.0, 40.0);
  const SelectionState st = run_cttl(*trainer, model40(), range40(), 10);
  EXPECT_NEAR(st.area(), 39.0, range40().resolution());
  EXPECT_NEAR(st.area(), oracle_area(range40(), model40(), st.sources), 1e-9);
}

TEST(Rttl, DeterministicAndDistinct) {
  const auto trainer = make_ideal_trainer(1.0, 0.0, 40.0);
  const auto a = run_rttl(*trainer, model40(), range40(), 8, 7);
  const auto b = run_rttl(*trainer, model40(), range40(), 8, 7);
  const auto c = run_rttl(*trainer, model40(), range40(), 8, 8);
  EXPECT_EQ(a.sources, b.sources);
  EXPECT_NE(a.sources, c.sources);
  auto s = a.sources;
  std::sort(s.begin(), s.end());
  EXPECT_EQ(std::adjacent_find(s.begin(), s.end()), s.end());
  EXPECT_THROW(run_rttl(*trainer, model40(), HoldRange(0, 1, 0.5), 4, 1),
               Error);
}

TEST(Rttl, FullBudgetCoversEverything) {
  const HoldRange r(0.0, 2.0, 0.1);
  const GapModel m = GapModel::symmetric_model(0.5, 1.0);
  const auto trainer = make_ideal_trainer(1.0, 0.0, 2.0);
  const auto st = run_rttl(*trainer, m, r, r.cell_count(), 3);
  auto s = st.sources;
  std::sort(s.begin(), s.end());
  for (std::size_t i = 0; i < r.cell_count(); ++i) EXPECT_EQ(s[i], r.at(i));
  EXPECT_NEAR(st.area(), m.full_area(r), 1e-12);
}

TEST(Exhaustive, ParallelEqualsSequential) {
  const HoldRange r(0.0, 4.0, 0.1);
  const GapModel m = GapModel::symmetric_model(0.25, 1.0);
  AnalyticProfile p;
  p.kind = ProfileKind::kNoisy;
  p.noise = 0.1;
  const AnalyticTrainer trainer(p, 0.0, 4.0);
  const auto a = run_exhaustive(trainer, m, r, 5, 1);
  const auto b = run_exhaustive(trainer, m, r, 5, 4);
  EXPECT_EQ(a.sources, b.sources);
  EXPECT_EQ(a.area_history, b.area_history);
  EXPECT_EQ(a.iteration(), r.cell_count());
}

TEST(Selection, DominanceChainUnderModel) {
  const HoldRange r = HoldRange::with_cells(0.0, 1.0, 1001);
  const GapModel m = GapModel::symmetric_model(1.0, 1.0);
  const auto trainer = make_ideal_trainer(1.0, 0.0, 1.0);
  const double cell = r.resolution();
  for (std::size_t k = 1; k <= 16; ++k) {
    const double c = run_cttl(*trainer, m, r, k).area();
    const double g = run_gttl(*trainer, m, r, k, 0.0).area();
    EXPECT_GE(c, g - cell) << "K=" << k;
    EXPECT_GE(g, ghost_cell_lower_bound(r, m, k) - 1e-12) << "K=" << k;
  }
}

TEST(Selection, DecayingTrainerKeepsAreaMonotone) {
  AnalyticProfile p;
  p.kind = ProfileKind::kDecaying;
  p.decay = 0.6;
  const AnalyticTrainer trainer(p, 0.0, 40.0);
  const auto st = run_gttl(trainer, model40(), range40(), 12, 0.0);
  for (std::size_t i = 1; i < st.area_history.size(); ++i) {
    EXPECT_GE(st.area_history[i], st.area_history[i - 1]);
  }
}

TEST(Selection, IterationsCsv) {
  const auto trainer = make_ideal_trainer(1.0, 0.0, 40.0);
  const auto st = run_cttl(*trainer, model40(), range40(), 2);
  std::ostringstream out;
  write_iterations_csv(out, st);
  EXPECT_EQ(out.str(),
            "iteration,delta,achieved,area\n1,30,1,27.5\n2,10,1,35\n");
}
