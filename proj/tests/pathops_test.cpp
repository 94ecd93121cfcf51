#include <gtest/gtest.h>

#include <algorithm>

#include "handrv/error.hpp"
#include "handrv/pathops.hpp"
#include "support/gen.hpp"

using namespace handrv;
using handrv::testing::Gen;

namespace {

Trajectory with_kin(std::vector<double> kin) {
  Trajectory t;
  t.id = "k";
  for (std::size_t i = 0; i < kin.size(); ++i) t.track.push_back({double(i), double(i * i)});
  t.kin = std::move(kin);
  return t;
}

Trajectory of_length(std::size_t n) {
  Trajectory t;
  t.id = "e";
  for (std::size_t i = 0; i < n; ++i) t.track.push_back({double(i), 0.0});
  return t;
}

std::vector<FrameRange> ranges_of(const std::vector<Segment>& segs) {
  std::vector<FrameRange> out;
  for (const auto& s : segs) out.push_back({s.start, s.end});
  return out;
}

}  // namespace

TEST(ToRelative, StationaryPath) {
  const std::vector<Point2> track(4, Point2{5, 5});
  EXPECT_EQ(to_relative(track).deltas, std::vector<Point2>(3, Point2{0, 0}));
}

TEST(ToRelative, ForwardDifferences) {
  const std::vector<Point2> track{{0, 0}, {2, 1}, {3, 3}};
  EXPECT_EQ(to_relative(track).deltas, (std::vector<Point2>{{2, 1}, {1, 2}}));
}

TEST(ToRelative, SinglePointIsDegenerate) {
  const std::vector<Point2> track{{1, 1}};
  try {
    to_relative(track);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::degenerate_path);
  }
}

TEST(ToRelative, TranslationInvariant) {
  Gen gen(5);
  for (int i = 0; i < 100; ++i) {
    auto track = gen.track(gen.index(2, 50));
    const Point2 c{double(int(gen.index(0, 400)) - 200), double(int(gen.index(0, 400)) - 200)};
    auto moved = track;
    for (auto& p : moved) p = p + c;
    EXPECT_EQ(to_relative(track), to_relative(moved));
  }
}

TEST(SegmentKinematic, HandTracedExample) {
  const auto t = with_kin({0.5, 0.6, 0.02, 0.7, 0.8, 0.01, 0.9});
  const auto segs = segment_kinematic(t, 0.05, 1);
  EXPECT_EQ(ranges_of(segs), (std::vector<FrameRange>{{0, 2}, {3, 5}, {6, 7}}));
  EXPECT_EQ(segs[0].relpath.size(), 1u);
  EXPECT_TRUE(segs[2].relpath.empty());
}

TEST(SegmentKinematic, NoCutsGivesWholeTrajectory) {
  const auto t = with_kin({1, 2, 3, 4, 5, 6});
  EXPECT_EQ(ranges_of(segment_kinematic(t, 0.5, 5)), (std::vector<FrameRange>{{0, 6}}));
}

TEST(SegmentKinematic, AllBelowThresholdGivesNothing) {
  const auto t = with_kin({0.1, 0.2, 0.0, 0.3});
  EXPECT_TRUE(segment_kinematic(t, 0.5, 1).empty());
}

TEST(SegmentKinematic, ShortRunsDropped) {
  const auto t = with_kin({1, 1, 0, 1, 1, 1, 1, 1, 0, 0, 1});
  EXPECT_EQ(ranges_of(segment_kinematic(t, 0.5, 5)), (std::vector<FrameRange>{{3, 8}}));
}

TEST(SegmentKinematic, ThresholdIsInclusive) {
  const auto t = with_kin({0.5, 0.5, 0.4, 0.5, 0.5});
  EXPECT_EQ(ranges_of(segment_kinematic(t, 0.5, 2)), (std::vector<FrameRange>{{0, 2}, {3, 5}}));
}

TEST(SegmentKinematic, MissingKinematics) {
  try {
    segment_kinematic(of_length(10), 0.1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::missing_kinematics);
  }
}

TEST(SegmentKinematic, SegmentsCarryParentEmbeddings) {
  Gen gen(2);
  auto t = gen.trajectory("p", 30);
  auto& kin = *t.kin;
  std::fill(kin.begin(), kin.end(), 1.0);
  kin[10] = 0.0;
  const auto segs = segment_kinematic(t, 0.5, 5);
  ASSERT_EQ(segs.size(), 2u);
  EXPECT_EQ(segs[1].embeddings, t.embeddings->table);
  EXPECT_EQ(segs[1].relpath.size(), segs[1].length() - 1);
  EXPECT_EQ(segs[1].relpath[0], t.track[12] - t.track[11]);
}

TEST(SegmentKinematic, CoverageProperty) {
  Gen gen(17);
  for (int round = 0; round < 300; ++round) {
    const std::size_t n = gen.index(1, 80);
    std::vector<double> kin;
    for (std::size_t i = 0; i < n; ++i) kin.push_back(gen.coin() || gen.coin() ? gen.real(0.5, 2.0) : gen.real(0, 0.5));
    const double eps = 0.5;
    const std::size_t min_len = gen.index(1, 6);
    const auto ranges = kinematic_ranges(kin, eps, min_len);

    std::vector<int> owner(n, -1);
    for (std::size_t r = 0; r < ranges.size(); ++r) {
      ASSERT_GE(ranges[r].length(), min_len);
      if (r) ASSERT_LE(ranges[r - 1].end, ranges[r].start);
      for (std::size_t f = ranges[r].start; f < ranges[r].end; ++f) {
        ASSERT_GE(kin[f], eps);
        owner[f] = int(r);
      }
      // maximal: neighbours are cuts or the ends
      if (ranges[r].start > 0) ASSERT_LT(kin[ranges[r].start - 1], eps);
      if (ranges[r].end < n) ASSERT_LT(kin[ranges[r].end], eps);
    }
    // every uncovered above-threshold frame lies in a run shorter than min_len
    for (std::size_t f = 0; f < n; ++f) {
      if (owner[f] >= 0 || kin[f] < eps) continue;
      std::size_t a = f, b = f;
      while (a > 0 && kin[a - 1] >= eps) --a;
      while (b < n && kin[b] >= eps) ++b;
      ASSERT_LT(b - a, min_len);
    }
  }
}

TEST(SplitEven, ExactHalves) {
  EXPECT_EQ(even_ranges(10, 2, 5), (std::vector<FrameRange>{{0, 5}, {5, 10}}));
}

TEST(SplitEven, RemainderGoesToEarliest) {
  EXPECT_EQ(even_ranges(10, 3, 3), (std::vector<FrameRange>{{0, 4}, {4, 7}, {7, 10}}));
}

TEST(SplitEven, SinglePartIsIdentity) {
  const auto segs = split_even(of_length(10), 1);
  ASSERT_EQ(segs.size(), 1u);
  EXPECT_EQ(segs[0].start, 0u);
  EXPECT_EQ(segs[0].end, 10u);
  EXPECT_EQ(segs[0].relpath.size(), 9u);
}

TEST(SplitEven, InfeasibleSplit) {
  try {
    split_even(of_length(10), 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::infeasible_split);
  }
  EXPECT_NO_THROW(split_even(of_length(10), 2));
}

TEST(SplitEven, LengthsProperty) {
  Gen gen(23);
  for (int round = 0; round < 500; ++round) {
    const std::size_t min_len = gen.index(1, 8);
    const std::size_t frames = gen.index(min_len, 200);
    const std::size_t n = gen.index(1, frames / min_len);
    const auto r = even_ranges(frames, n, min_len);
    ASSERT_EQ(r.size(), n);
    std::size_t lo = frames, hi = 0, sum = 0, at = 0;
    for (const auto& x : r) {
      ASSERT_EQ(x.start, at);
      at = x.end;
      lo = std::min(lo, x.length());
      hi = std::max(hi, x.length());
      sum += x.length();
    }
    EXPECT_LE(hi - lo, 1u);
    EXPECT_EQ(sum, frames);
    EXPECT_GE(lo, min_len);
  }
}

TEST(DefaultEpsilon, TenthPercentile) {
  std::vector<Trajectory> d{with_kin({1, 2, 3, 4, 5, 6}), with_kin({7, 8, 9, 10, 11})};
  d[1].id = "k2";
  // sorted 1..11, position 0.1 * 10 = 1 -> 2
  EXPECT_DOUBLE_EQ(default_epsilon(d), 2.0);
  d[1].kin = std::vector<double>{7, 8, 9, 10, 12};
  d[0].kin = std::vector<double>{1, 3, 3, 4, 5, 6};
  EXPECT_DOUBLE_EQ(default_epsilon(d), 3.0);
}

TEST(DefaultEpsilon, InterpolatesBetweenRanks) {
  const std::vector<Trajectory> d{with_kin({0.5, 1.5, 2.5, 3.5, 4.5, 5.5})};
  // position 0.1 * 5 = 0.5
  EXPECT_DOUBLE_EQ(default_epsilon(d), 1.0);
}

TEST(DefaultEpsilon, ZeroPercentileFallsBackToSmallestPositive) {
  const std::vector<Trajectory> d{with_kin({0, 0, 0, 0, 3, 0.25, 7, 0, 0, 0, 2})};
  EXPECT_DOUBLE_EQ(default_epsilon(d), 0.25);
}

TEST(DefaultEpsilon, RequiresKinematics) {
  const std::vector<Trajectory> d{of_length(4)};
  EXPECT_THROW(default_epsilon(d), Error);
}
