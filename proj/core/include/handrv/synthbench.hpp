#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "handrv/manifest.hpp"
#include "handrv/retrieval.hpp"
#include "handrv/trajdata.hpp"

namespace handrv {

inline constexpr std::size_t kSynthEmbeddingDim = 16;

/// Clean positions of one motif instance, relative to where it starts, plus
/// the per-frame speed that stands in for proprioceptive velocity.
struct MotifSample {
  std::vector<Point2> positions;
  std::vector<double> speeds;
};

struct Motif {
  std::string name;
  std::string object;  // motifs on the same object share most of their anchor
  // Direction of travel (radians, image axes: x right, y down) at arc-length
  // fraction u in [0, 1]. The path is the unit-speed integral of it.
  std::function<double(double)> heading;
  double amplitude = 200.0;  // pixels
  double frames = 40.0;      // nominal duration
  std::vector<float> anchor;
};

/// Parametric 2D motion primitives with synthetic embedding anchors.
///
/// The standard library holds line-reach, arc-press, pick-lift-place, slide,
/// push and scoop. Motifs sharing an object differ only in motion, and
/// scoop traces the same path as pick-lift-place on a different object.
class MotifLibrary {
 public:
  static MotifLibrary standard();

  explicit MotifLibrary(std::vector<Motif> motifs);

  const Motif& at(std::string_view name) const;
  bool contains(std::string_view name) const;
  std::vector<std::string> names() const;

  /// Positions are rounded to a 1/1024 px grid.
  MotifSample sample(std::string_view name, double amplitude_scale = 1.0, double time_scale = 1.0) const;

  /// Deltas of the nominal (unscaled) instance.
  RelativePath canonical_deltas(std::string_view name) const;

 private:
  std::vector<Motif> motifs_;
  // Unit-length curve per motif, sampled at kCurveSteps + 1 arc-length points.
  std::vector<std::vector<Point2>> curves_;
};

struct PlayConfig {
  std::size_t tasks = 6;
  std::size_t per_task = 40;
  std::size_t motifs_per_traj = 3;
  double sigma_p = 2.0;   // track noise, pixels
  double sigma_e = 0.05;  // embedding noise per component
  double jitter = 0.15;   // relative amplitude/duration variation
  std::size_t pause_min = 6;
  std::size_t pause_max = 10;
  std::size_t stride = 1;
  // Motifs used by the generator; empty means the whole library. The first
  // `tasks` of them are the dominant motifs.
  std::vector<std::string> motifs;
};

struct HandConfig {
  Point2 offset{0.0, 0.0};
  double sigma_p = 2.0;
  double sigma_e = 0.05;  // hand embeddings use 2 * sigma_e
  double time_scale = 1.0;
  double amplitude_scale = 1.0;
  std::size_t stride = 1;
};

struct LabeledSegment {
  std::string traj_id;
  std::size_t start = 0;
  std::size_t end = 0;
  std::string motif;

  friend bool operator==(const LabeledSegment&, const LabeledSegment&) = default;
};

class SegmentLabels {
 public:
  SegmentLabels() = default;
  explicit SegmentLabels(std::vector<LabeledSegment> labels);

  const std::vector<LabeledSegment>& all() const noexcept { return labels_; }
  /// Throws Error(validation) for a segment without a label.
  const std::string& motif_of(const std::string& traj_id, std::size_t start, std::size_t end) const;

  std::string to_json_text() const;
  static SegmentLabels from_json_text(std::string_view text);

 private:
  std::vector<LabeledSegment> labels_;
  std::map<std::tuple<std::string, std::size_t, std::size_t>, std::size_t> index_;
};

struct LabeledDataset {
  std::vector<Trajectory> dataset;  // embeddings resolved in memory
  SegmentLabels labels;
};

LabeledDataset gen_play(const MotifLibrary& lib, const PlayConfig& cfg, std::uint64_t seed);

/// Trajectory id is "hand-<motif>", independent of seed and offset.
Trajectory gen_hand(const MotifLibrary& lib, std::string_view motif, std::uint64_t seed, const HandConfig& cfg = {});

/// Fraction of manifest matches whose segment carries `query_motif`.
double precision_at_k(const RetrievalManifest& manifest, const SegmentLabels& labels, std::string_view query_motif);

struct BenchConfig {
  std::string name = "default";
  PlayConfig play;
  HandConfig hand;
  std::vector<std::string> query_motifs;  // empty: every play motif
  std::size_t K = 25;
  std::size_t M = 100;
  std::size_t min_len = kDefaultMinLen;
};

/// 6 motifs x 40 trajectories, 3 motifs each, sigma_p = 2 px, K = 25, M = 100.
BenchConfig default_bench();
/// Same data, queries restricted to the pair with identical path shape.
BenchConfig confusable_bench();

enum class BenchMode { hand, hand_no_vf, embedding_sdtw, visual_rank };

std::string_view to_string(BenchMode m);
inline constexpr BenchMode kAllModes[] = {BenchMode::hand, BenchMode::hand_no_vf, BenchMode::embedding_sdtw,
                                          BenchMode::visual_rank};

struct ModeResult {
  std::string name;
  double precision_mean = 0.0;
  double precision_std = 0.0;
  std::vector<double> precision_per_seed;
  double wallclock_s = 0.0;
};

struct BenchReport {
  BenchConfig cfg;
  std::vector<std::uint64_t> seeds;
  std::vector<ModeResult> modes;

  const ModeResult& mode(std::string_view name) const;
};

/// Runs every mode over all seeds. Requires at least 3 seeds.
BenchReport compare_modes(const BenchConfig& cfg, std::span<const std::uint64_t> seeds,
                          std::span<const BenchMode> modes = kAllModes, const ExecutionOptions& exec = {});

/// Retrieval for one mode on already generated data.
RetrievalManifest run_mode(BenchMode mode, std::span<const Segment> hand_segments,
                           std::span<const Segment> play_segments, const RetrievalParams& params,
                           const ExecutionOptions& exec = {});

std::string report_to_json_text(const BenchReport& report);
/// Throws Error(schema) with the offending field path.
void validate_report_json(std::string_view text);
std::string report_to_svg(const BenchReport& report);

}  // namespace handrv
