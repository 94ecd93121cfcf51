#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace handrv {

/// Local distance used by S-DTW: relative 2D path deltas (HAND) or per-frame
/// embedding vectors (STRAP-style baseline).
enum class DistanceMode { path, embedding };

/// Set over which the retained costs are normalised into weights.
enum class WeightScope { per_segment, union_all };

std::string_view to_string(DistanceMode m);
DistanceMode distance_mode_from_string(std::string_view s);
std::string_view to_string(WeightScope s);
WeightScope weight_scope_from_string(std::string_view s);

inline constexpr double kMinWeight = 0.01;
inline constexpr double kMaxWeight = 100.0;
inline constexpr std::string_view kWeightNormalization = "sum-exp-minmax";

struct RetrievalParams {
  std::size_t M = 100;
  std::size_t K = 25;
  // Kinematic threshold used to segment the play data; absent when the
  // segments were supplied from elsewhere.
  std::optional<double> epsilon;
  bool use_visual_filter = true;
  DistanceMode distance_mode = DistanceMode::path;
  std::size_t min_len = 5;
  std::size_t split_even = 1;
  WeightScope weight_scope = WeightScope::per_segment;
  std::uint64_t seed = 0;

  /// Throws Error(invalid_argument) on M/K/min_len/epsilon violations.
  void validate() const;

  friend bool operator==(const RetrievalParams&, const RetrievalParams&) = default;
};

/// One retained match. Spans are frame indices of the play trajectory:
/// seg_start <= match_start <= match_end <= seg_end, all end bounds exclusive.
struct ManifestMatch {
  std::size_t query_start = 0;
  std::size_t query_end = 0;
  std::string traj_id;
  std::size_t seg_start = 0;
  std::size_t seg_end = 0;
  std::size_t match_start = 0;
  std::size_t match_end = 0;
  double cost_path = 0.0;
  std::optional<double> cost_visual;
  double weight = 1.0;

  friend bool operator==(const ManifestMatch&, const ManifestMatch&) = default;
};

struct RetrievalManifest {
  std::string query_id;
  RetrievalParams params;
  std::vector<std::string> warnings;
  // Grouped by query segment in query order; each group ranked by
  // (cost_path, traj_id, seg_start).
  std::vector<ManifestMatch> matches;

  friend bool operator==(const RetrievalManifest&, const RetrievalManifest&) = default;
};

inline constexpr std::string_view kWarningEmptyPlaySet = "empty_play_set";

void validate(const RetrievalManifest& m);

std::string to_json_text(const RetrievalManifest& m);
RetrievalManifest manifest_from_json_text(std::string_view text);

/// Refuses manifests that violate their invariants.
void write_manifest(const RetrievalManifest& m, const std::filesystem::path& path);
RetrievalManifest read_manifest(const std::filesystem::path& path);

}  // namespace handrv
