#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "handrv/manifest.hpp"
#include "handrv/trajdata.hpp"
#include "support/gen.hpp"

using namespace handrv;
using handrv::testing::TempDir;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "handrv");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::dispatch(int(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    data_ = new TempDir;
    const auto r = run({"gen-synth", "--per-task", "6", "--seed", "3", "-o", data_->path().string()});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  static void TearDownTestSuite() {
    delete data_;
    data_ = nullptr;
  }
  static std::string play() { return (data_->path() / "play.jsonl").string(); }
  static std::string hand() { return (data_->path() / "hand.jsonl").string(); }

  TempDir out_;
  static TempDir* data_;
};

TempDir* CliTest::data_ = nullptr;

}  // namespace

TEST_F(CliTest, GenSynthWritesDatasetsLabelsAndBlobs) {
  EXPECT_EQ(load_dataset(play()).size(), 36u);
  EXPECT_EQ(load_dataset(hand()).size(), 6u);
  EXPECT_TRUE(std::filesystem::exists(data_->path() / "labels.json"));
  EXPECT_TRUE(std::filesystem::exists(data_->path() / "play-0000.f32"));
  EXPECT_TRUE(std::filesystem::exists(data_->path() / "hand-push.f32"));
}

TEST_F(CliTest, RetrieveWritesValidManifest) {
  const auto r = run({"retrieve", "--play", play(), "--hand", hand(), "--M", "100", "--K", "25", "-o",
                      out_.path().string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto m = read_manifest(out_ / "manifest.json");
  EXPECT_EQ(m.matches.size(), 25u);
  EXPECT_TRUE(m.params.use_visual_filter);
  EXPECT_EQ(m.query_id, "hand-line-reach");
}

TEST_F(CliTest, NoVisualFilterFlag) {
  const auto r = run({"retrieve", "--play", play(), "--hand", hand(), "--no-visual-filter", "--K", "10", "-o",
                      out_.path().string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto m = read_manifest(out_ / "manifest.json");
  EXPECT_FALSE(m.params.use_visual_filter);
  for (const auto& x : m.matches) EXPECT_FALSE(x.cost_visual.has_value());
}

TEST_F(CliTest, FlagsRoundTripIntoParams) {
  const auto r = run({"retrieve", "--play", play(), "--hand", hand(), "--query", "hand-slide", "--M", "40", "--K",
                      "7", "--epsilon", "0.75", "--min-len", "4", "--distance-mode", "embedding", "--split-even", "2",
                      "--weight-scope", "union", "--seed", "99", "--threads", "2", "-o", out_.path().string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto p = read_manifest(out_ / "manifest.json").params;
  EXPECT_EQ(p.M, 40u);
  EXPECT_EQ(p.K, 7u);
  EXPECT_EQ(p.epsilon, 0.75);
  EXPECT_EQ(p.min_len, 4u);
  EXPECT_EQ(p.distance_mode, DistanceMode::embedding);
  EXPECT_EQ(p.split_even, 2u);
  EXPECT_EQ(p.weight_scope, WeightScope::union_all);
  EXPECT_EQ(p.seed, 99u);
  EXPECT_EQ(read_manifest(out_ / "manifest.json").query_id, "hand-slide");
}

TEST_F(CliTest, ThreadsNeverChangeOutputBytes) {
  std::string first;
  for (const char* t : {"1", "3", "8"}) {
    const auto r = run({"retrieve", "--play", play(), "--hand", hand(), "--threads", t, "-o", out_.path().string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto bytes = slurp(out_ / "manifest.json");
    if (first.empty()) first = bytes;
    EXPECT_EQ(bytes, first);
  }
}

TEST_F(CliTest, KAboveMIsUsageError) {
  const auto r = run({"retrieve", "--play", play(), "--hand", hand(), "--K", "50", "--M", "25", "-o",
                      out_.path().string()});
  EXPECT_EQ(r.code, cli::kExitUsage);
  EXPECT_FALSE(std::filesystem::exists(out_ / "manifest.json"));
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run({}).code, cli::kExitUsage);
  EXPECT_EQ(run({"frobnicate"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"retrieve", "--play", play()}).code, cli::kExitUsage);
  EXPECT_EQ(run({"retrieve", "--play", play(), "--hand", hand(), "--no-visual-filter", "--M", "5", "-o", "x"}).code,
            cli::kExitUsage);
  EXPECT_EQ(run({"retrieve", "--play", play(), "--hand", hand(), "--distance-mode", "cosine", "-o", "x"}).code,
            cli::kExitUsage);
  EXPECT_EQ(run({"retrieve", "--play", play(), "--hand", hand(), "--K", "0", "-o", "x"}).code, cli::kExitUsage);
}

TEST_F(CliTest, HelpExitsCleanly) {
  const auto r = run({"retrieve", "--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("--no-visual-filter"), std::string::npos);
  EXPECT_NE(r.out.find("--distance-mode"), std::string::npos);
}

TEST_F(CliTest, ValidationErrorsExitOne) {
  {
    std::ofstream f(out_ / "bad.jsonl");
    f << R"({"id": "a", "source": "play", "fps": 30, "track": [[0,0]]})" << "\n";
  }
  const auto bad = (out_ / "bad.jsonl").string();
  auto r = run({"retrieve", "--play", bad, "--hand", hand(), "-o", out_.path().string()});
  EXPECT_EQ(r.code, cli::kExitInvalid);
  EXPECT_NE(r.err.find("N >= 2 violated"), std::string::npos);
  r = run({"retrieve", "--play", play(), "--hand", hand(), "--query", "nobody", "-o", out_.path().string()});
  EXPECT_EQ(r.code, cli::kExitInvalid);
  r = run({"segment", (out_ / "missing.jsonl").string()});
  EXPECT_EQ(r.code, cli::kExitInvalid);
  r = run({"segment", hand()});
  EXPECT_EQ(r.code, cli::kExitInvalid);
  EXPECT_NE(r.err.find("missing kinematics"), std::string::npos);
}

TEST_F(CliTest, SegmentTable) {
  auto r = run({"segment", play()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("traj_id\tstart\tend\tframes"), std::string::npos);
  EXPECT_NE(r.out.find("play-0000\t"), std::string::npos);
  r = run({"segment", hand(), "--split-even", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("hand-push\t0\t"), std::string::npos);
}

TEST_F(CliTest, ExportSvg) {
  ASSERT_EQ(run({"retrieve", "--play", play(), "--hand", hand(), "-o", out_.path().string()}).code, 0);
  const auto r = run({"export-svg", "--play", play(), "--hand", hand(), "--manifest",
                      (out_ / "manifest.json").string(), "-o", (out_ / "overlay.svg").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto svg = slurp(out_ / "overlay.svg");
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_EQ(std::count(svg.begin(), svg.end(), '\n') > 25, true);
}

TEST_F(CliTest, EvalWritesReport) {
  const auto r = run({"eval", "--seeds", "3", "--K", "10", "--M", "30", "-o", out_.path().string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(std::filesystem::exists(out_ / "bench-report.json"));
  EXPECT_TRUE(std::filesystem::exists(out_ / "bench-report.svg"));
  EXPECT_NE(r.out.find("HAND(-VF)"), std::string::npos);
  EXPECT_EQ(run({"eval", "--seeds", "2", "-o", out_.path().string()}).code, cli::kExitUsage);
}
