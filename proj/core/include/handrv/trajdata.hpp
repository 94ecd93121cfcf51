#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace handrv {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }

enum class Source { play, hand };

std::string_view to_string(Source s);
Source source_from_string(std::string_view s);

/// ceil(frames / stride): number of stored rows for a strided table.
std::size_t embedding_rows(std::size_t frames, std::size_t stride);

/// Strided per-frame embedding vectors. Row r holds the vector for frame
/// r * stride. Values are kept as 32-bit reals, exactly as stored on disk.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  EmbeddingTable(std::size_t stride, std::size_t dim, std::vector<float> values);

  std::size_t stride() const noexcept { return stride_; }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t rows() const noexcept { return dim_ == 0 ? 0 : values_.size() / dim_; }
  std::size_t frame_of_row(std::size_t r) const noexcept { return r * stride_; }

  std::span<const float> row(std::size_t r) const;
  const std::vector<float>& values() const noexcept { return values_; }

  friend bool operator==(const EmbeddingTable&, const EmbeddingTable&) = default;

 private:
  std::size_t stride_ = 1;
  std::size_t dim_ = 0;
  std::vector<float> values_;
};

/// Reference to an embedding blob. `table` stays null until the blob is
/// resolved (load_dataset never reads blobs).
struct EmbeddingRef {
  std::string file;
  std::size_t stride = 1;
  std::size_t dim = 0;
  std::shared_ptr<const EmbeddingTable> table;
};

struct Trajectory {
  std::string id;
  Source source = Source::play;
  double fps = 30.0;
  std::vector<Point2> track;
  std::optional<std::vector<double>> kin;
  std::optional<std::vector<std::vector<double>>> actions;
  std::optional<EmbeddingRef> embeddings;
  // Directory that relative blob paths resolve against.
  std::filesystem::path base_dir;

  std::size_t frames() const noexcept { return track.size(); }
};

/// Field-by-field equality of the persisted content (ids, reals bit-equal,
/// embedding reference metadata). Ignores base_dir and resolved tables.
bool same_content(const Trajectory& a, const Trajectory& b);

void validate(const Trajectory& traj);
void validate(const EmbeddingTable& table, std::size_t frames);
/// Validates each trajectory and rejects duplicate ids.
void validate(std::span<const Trajectory> dataset);

std::vector<Trajectory> parse_dataset(std::istream& in, const std::filesystem::path& base_dir);
std::vector<Trajectory> load_dataset(const std::filesystem::path& path);

/// Writes dataset.jsonl plus one blob per trajectory carrying embeddings,
/// placed next to the jsonl under each reference's file name.
void write_dataset(const std::filesystem::path& path, std::span<const Trajectory> dataset);
std::string to_jsonl_line(const Trajectory& traj);

EmbeddingTable read_embedding_blob(const std::filesystem::path& path, std::size_t frames,
                                   std::size_t stride, std::size_t dim);
void write_embedding_blob(const std::filesystem::path& path, const EmbeddingTable& table);

/// Returns the resolved table if present, otherwise reads the blob.
EmbeddingTable load_embeddings(const Trajectory& traj);

/// Copies of the trajectories with every embedding reference resolved.
std::vector<Trajectory> resolve_embeddings(std::vector<Trajectory> dataset);

}  // namespace handrv
