#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "handrv/error.hpp"
#include "handrv/retrieval.hpp"
#include "support/gen.hpp"

using namespace handrv;
using handrv::testing::Gen;
using handrv::testing::segment_of;

namespace {

std::vector<Segment> random_play(Gen& gen, std::size_t n, std::size_t dim = 4) {
  std::vector<Segment> out;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t len = gen.index(3, 25);
    const std::size_t start = gen.index(0, 10);
    out.push_back(segment_of("p" + std::to_string(i % 13), start + i * 40, gen.path(len),
                             gen.table(start + i * 40 + len + 1, 1, dim)));
  }
  return out;
}

RetrievalParams params_with(std::size_t M, std::size_t K, bool vf = true) {
  RetrievalParams p;
  p.M = M;
  p.K = K;
  p.use_visual_filter = vf;
  return p;
}

}  // namespace

TEST(NormalizeWeights, EqualCostsAreAllOnes) {
  const std::vector<double> c{2.5, 2.5, 2.5};
  EXPECT_EQ(normalize_weights(c), std::vector<double>(3, 1.0));
  EXPECT_EQ(normalize_weights(std::vector<double>{7.0}), std::vector<double>{1.0});
  EXPECT_EQ(normalize_weights(std::vector<double>{0.0, 0.0}), std::vector<double>(2, 1.0));
}

TEST(NormalizeWeights, TwoPointsHitTheEndpoints) {
  const auto w = normalize_weights(std::vector<double>{1.0, 3.0});
  EXPECT_NEAR(w[0], 100.0, 1e-9);
  EXPECT_NEAR(w[1], 0.01, 1e-9);
}

TEST(NormalizeWeights, ThreePointClosedForm) {
  const auto w = normalize_weights(std::vector<double>{1.0, 2.0, 3.0});
  const double want =
      0.01 + 99.99 * (std::exp(-1.0 / 3) - std::exp(-0.5)) / (std::exp(-1.0 / 6) - std::exp(-0.5));
  EXPECT_NEAR(w[1], want, 1e-6);
  EXPECT_NEAR(w[1], 45.84, 0.01);
  EXPECT_NEAR(w[0], 100.0, 1e-9);
  EXPECT_NEAR(w[2], 0.01, 1e-9);
}

TEST(NormalizeWeights, OrderOfInputDoesNotMatter) {
  const auto w = normalize_weights(std::vector<double>{3.0, 1.0, 2.0});
  EXPECT_NEAR(w[0], 0.01, 1e-9);
  EXPECT_NEAR(w[1], 100.0, 1e-9);
}

TEST(NormalizeWeights, InvalidCosts) {
  for (double bad : {-1.0, std::numeric_limits<double>::infinity(), std::nan("")}) {
    try {
      normalize_weights(std::vector<double>{1.0, bad});
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::invalid_cost);
    }
  }
  EXPECT_THROW(normalize_weights(std::vector<double>{}), Error);
}

TEST(NormalizeWeights, BoundsAndMonotonicity) {
  Gen gen(77);
  for (int round = 0; round < 500; ++round) {
    std::vector<double> c(gen.index(1, 40));
    const double scale = std::pow(10.0, gen.real(-6, 6));
    for (auto& x : c) x = gen.coin() ? gen.real(0, scale) : std::floor(gen.real(0, 4));
    const auto w = normalize_weights(c);
    for (std::size_t i = 0; i < c.size(); ++i) {
      ASSERT_GE(w[i], 0.01);
      ASSERT_LE(w[i], 100.0);
      for (std::size_t j = 0; j < c.size(); ++j) {
        if (c[i] <= c[j]) ASSERT_GE(w[i], w[j]);
      }
    }
  }
}

TEST(RankMatches, FewerThanK) {
  Gen gen(1);
  const auto segs = random_play(gen, 3);
  std::vector<ScoredMatch> m;
  for (const auto& s : segs) m.push_back({&s, {1.0, 0, 1}, std::nullopt});
  EXPECT_EQ(rank_matches(m, 10).size(), 3u);
}

TEST(RankMatches, EqualCostOrderedByTrajId) {
  Segment a, b, c;
  a.traj_id = "b";
  b.traj_id = "a";
  c.traj_id = "a";
  c.start = 4;
  const auto r = rank_matches({{&a, {1.0, 0, 1}, {}}, {&c, {1.0, 0, 1}, {}}, {&b, {1.0, 0, 1}, {}}}, 3);
  EXPECT_EQ(r[0].segment, &b);
  EXPECT_EQ(r[1].segment, &c);
  EXPECT_EQ(r[2].segment, &a);
}

TEST(RankMatches, ShuffledInputSameOutput) {
  Gen gen(2);
  const auto segs = random_play(gen, 60);
  std::vector<ScoredMatch> m;
  for (const auto& s : segs) m.push_back({&s, {std::floor(gen.real(0, 5)), 0, 1}, std::nullopt});
  const auto want = rank_matches(m, 20);
  for (int i = 0; i < 20; ++i) {
    std::shuffle(m.begin(), m.end(), gen.engine());
    const auto got = rank_matches(m, 20);
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t k = 0; k < got.size(); ++k) EXPECT_EQ(got[k].segment, want[k].segment);
  }
}

TEST(Retrieve, ExactCopyRanksFirst) {
  Gen gen(3);
  auto play = random_play(gen, 30);
  const auto& target = play[17];
  auto hand = segment_of("hand", 0, target.relpath, gen.table(target.length(), 1, 4));
  const auto m = retrieve(std::vector<Segment>{hand}, play, params_with(30, 5, false));
  ASSERT_EQ(m.matches.size(), 5u);
  EXPECT_EQ(m.matches[0].traj_id, target.traj_id);
  EXPECT_EQ(m.matches[0].seg_start, target.start);
  EXPECT_EQ(m.matches[0].cost_path, 0.0);
  EXPECT_EQ(m.matches[0].weight, 100.0);
  EXPECT_EQ(m.query_id, "hand");
}

TEST(Retrieve, KEqualsCandidateCountKeepsAll) {
  Gen gen(4);
  const auto play = random_play(gen, 12);
  const auto hand = segment_of("hand", 0, gen.path(6), gen.table(7, 1, 4));
  const auto m = retrieve(std::vector<Segment>{hand}, play, params_with(12, 12));
  ASSERT_EQ(m.matches.size(), 12u);
  for (std::size_t i = 1; i < m.matches.size(); ++i) EXPECT_LE(m.matches[i - 1].cost_path, m.matches[i].cost_path);
  EXPECT_NO_THROW(validate(m));
}

TEST(Retrieve, SpansMapToFrames) {
  RelativePath r{{{0, 1}, {1, 0}, {0.5, 0.5}, {0, 1}}};  // frames [10, 15)
  const auto play = std::vector<Segment>{segment_of("p", 10, r)};
  const auto hand = segment_of("h", 0, RelativePath{{{1, 0}, {0.5, 0.5}}});
  const auto m = retrieve(std::vector<Segment>{hand}, play, params_with(1, 1, false));
  ASSERT_EQ(m.matches.size(), 1u);
  // deltas [1, 3) cover frames 11..13
  EXPECT_EQ(m.matches[0].match_start, 11u);
  EXPECT_EQ(m.matches[0].match_end, 14u);
  EXPECT_EQ(m.matches[0].seg_start, 10u);
  EXPECT_EQ(m.matches[0].seg_end, 15u);
  EXPECT_FALSE(m.matches[0].cost_visual.has_value());
}

TEST(Retrieve, EmptyPlaySetWarns) {
  Gen gen(5);
  const auto hand = segment_of("hand", 0, gen.path(6), gen.table(7, 1, 4));
  const auto m = retrieve(std::vector<Segment>{hand}, {}, params_with(10, 5));
  EXPECT_TRUE(m.matches.empty());
  EXPECT_EQ(m.warnings, std::vector<std::string>{std::string(kWarningEmptyPlaySet)});
}

TEST(Retrieve, MissingEmbeddingsUnderFiltering) {
  Gen gen(6);
  auto play = random_play(gen, 5);
  play[2].embeddings.reset();
  const auto hand = segment_of("hand", 0, gen.path(6), gen.table(7, 1, 4));
  try {
    retrieve(std::vector<Segment>{hand}, play, params_with(5, 2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::missing_embeddings);
  }
  EXPECT_NO_THROW(retrieve(std::vector<Segment>{hand}, play, params_with(5, 2, false)));
}

TEST(Retrieve, KAboveMRejectedOnlyWithFilter) {
  Gen gen(7);
  const auto play = random_play(gen, 5);
  const auto hand = segment_of("hand", 0, gen.path(6), gen.table(7, 1, 4));
  EXPECT_THROW(retrieve(std::vector<Segment>{hand}, play, params_with(2, 4)), Error);
  EXPECT_NO_THROW(retrieve(std::vector<Segment>{hand}, play, params_with(2, 4, false)));
}

TEST(Retrieve, FilteredMatchesComeFromTopM) {
  Gen gen(8);
  const auto play = random_play(gen, 80);
  for (int round = 0; round < 10; ++round) {
    const auto hand = segment_of("hand", 0, gen.path(gen.index(4, 12)), gen.table(20, 1, 4));
    const auto p = params_with(15, 10);
    const auto m = retrieve(std::vector<Segment>{hand}, play, p);
    std::set<std::pair<std::string, std::size_t>> allowed;
    for (const auto& s : filter_top_m(hand, play, p.M)) allowed.insert({s.traj_id, s.start});
    for (const auto& x : m.matches) {
      EXPECT_TRUE(allowed.count({x.traj_id, x.seg_start}));
      ASSERT_TRUE(x.cost_visual.has_value());
    }
  }
}

TEST(Retrieve, PerSegmentWeightsAndGrouping) {
  Gen gen(9);
  const auto play = random_play(gen, 40);
  std::vector<Segment> hand{segment_of("hand", 0, gen.path(8), gen.table(30, 1, 4)),
                            segment_of("hand", 9, gen.path(8), gen.table(30, 1, 4))};
  auto p = params_with(20, 6);
  const auto m = retrieve(hand, play, p);
  ASSERT_EQ(m.matches.size(), 12u);
  for (std::size_t g = 0; g < 2; ++g) {
    const auto first = m.matches.begin() + long(g * 6);
    EXPECT_EQ(first->query_start, hand[g].start);
    std::vector<double> costs;
    for (auto it = first; it != first + 6; ++it) costs.push_back(it->cost_path);
    const auto w = normalize_weights(costs);
    for (std::size_t i = 0; i < 6; ++i) EXPECT_EQ((first + long(i))->weight, w[i]);
  }

  p.weight_scope = WeightScope::union_all;
  const auto u = retrieve(hand, play, p);
  std::vector<double> costs;
  for (const auto& x : u.matches) costs.push_back(x.cost_path);
  const auto w = normalize_weights(costs);
  for (std::size_t i = 0; i < u.matches.size(); ++i) EXPECT_EQ(u.matches[i].weight, w[i]);
}

TEST(Retrieve, WeightsMonotoneInCost) {
  Gen gen(10);
  const auto play = random_play(gen, 60);
  const auto hand = segment_of("hand", 0, gen.path(10), gen.table(11, 1, 4));
  const auto m = retrieve(std::vector<Segment>{hand}, play, params_with(60, 25, false));
  for (std::size_t i = 1; i < m.matches.size(); ++i) EXPECT_GE(m.matches[i - 1].weight, m.matches[i].weight);
}

TEST(Retrieve, IndependentOfThreadsAndCandidateOrder) {
  Gen gen(11);
  auto play = random_play(gen, 300);
  const auto hand = segment_of("hand", 0, gen.path(12), gen.table(13, 1, 4));
  const auto p = params_with(120, 25);
  const auto want = to_json_text(retrieve(std::vector<Segment>{hand}, play, p, {1}));
  for (unsigned t : {2u, 3u, 8u}) {
    EXPECT_EQ(to_json_text(retrieve(std::vector<Segment>{hand}, play, p, {t})), want);
  }
  std::shuffle(play.begin(), play.end(), gen.engine());
  EXPECT_EQ(to_json_text(retrieve(std::vector<Segment>{hand}, play, p, {4})), want);
}

TEST(Retrieve, EmbeddingModeUsesFrameSpans) {
  std::vector<float> v;
  for (int f = 0; f < 8; ++f) v.push_back(float(f % 4));
  auto table = std::make_shared<const EmbeddingTable>(1, 1, v);
  RelativePath r{{{0, 0}, {0, 0}, {0, 0}}};
  Segment play = segment_of("p", 4, r, table);  // frames 4..7 carry 0, 1, 2, 3
  auto qt = std::make_shared<const EmbeddingTable>(1, 1, std::vector<float>{1, 2});
  Segment hand = segment_of("h", 0, RelativePath{{{0, 0}}}, qt);
  auto p = params_with(1, 1, false);
  p.distance_mode = DistanceMode::embedding;
  const auto m = retrieve(std::vector<Segment>{hand}, std::vector<Segment>{play}, p);
  ASSERT_EQ(m.matches.size(), 1u);
  EXPECT_EQ(m.matches[0].cost_path, 0.0);
  EXPECT_EQ(m.matches[0].match_start, 5u);
  EXPECT_EQ(m.matches[0].match_end, 7u);
}

TEST(Retrieve, TranslatedQueryGivesIdenticalManifest) {
  Gen gen(12);
  const auto play = random_play(gen, 100);
  Trajectory h = gen.trajectory("hand", 30);
  Trajectory moved = h;
  for (auto& pt : moved.track) pt = pt + Point2{37, -12};
  const auto a = retrieve(split_even(h, 2), play, params_with(50, 10));
  const auto b = retrieve(split_even(moved, 2), play, params_with(50, 10));
  EXPECT_EQ(to_json_text(a), to_json_text(b));
}

TEST(RankByScores, WholeSegmentMatches) {
  Gen gen(13);
  const auto play = random_play(gen, 6);
  const auto hand = segment_of("hand", 0, gen.path(5), gen.table(6, 1, 4));
  const std::vector<std::vector<double>> scores{{5, 1, 4, 2, 3, 0.5}};
  const auto m = rank_by_scores(std::vector<Segment>{hand}, play, scores, params_with(6, 3));
  ASSERT_EQ(m.matches.size(), 3u);
  EXPECT_EQ(m.matches[0].seg_start, play[5].start);
  EXPECT_EQ(m.matches[0].match_start, play[5].start);
  EXPECT_EQ(m.matches[0].match_end, play[5].end);
  EXPECT_EQ(m.matches[1].cost_path, 1.0);
  EXPECT_EQ(m.matches[2].cost_path, 2.0);
  EXPECT_THROW(rank_by_scores(std::vector<Segment>{hand}, play, {{1, 2}}, params_with(6, 3)), Error);
}
