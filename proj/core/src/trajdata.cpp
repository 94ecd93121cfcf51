#include "handrv/trajdata.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

#include "handrv/error.hpp"
#include "json.hpp"

namespace handrv {

namespace {

using ordered_json = nlohmann::ordered_json;
using json = nlohmann::json;

std::uint32_t to_little_endian(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    return ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) | (v >> 24);
  }
  return v;
}

[[noreturn]] void invalid(const std::string& id, const std::string& what) {
  throw Error(Errc::validation, "trajectory '" + id + "': " + what);
}

double number_at(const json& j, const char* field, std::size_t line) {
  if (!j.is_number()) throw ParseError(line, std::string("field '") + field + "' must be a number");
  return j.get<double>();
}

std::size_t positive_int_at(const json& obj, const char* field, std::size_t line) {
  if (!obj.contains(field) || !obj[field].is_number_integer()) {
    throw ParseError(line, std::string("embeddings.") + field + " must be an integer");
  }
  const auto v = obj[field].get<std::int64_t>();
  if (v < 1) throw ParseError(line, std::string("embeddings.") + field + " must be >= 1");
  return static_cast<std::size_t>(v);
}

Trajectory parse_line(const json& j, std::size_t line, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw ParseError(line, "expected a JSON object");
  Trajectory t;
  t.base_dir = base_dir;

  if (!j.contains("id") || !j["id"].is_string()) throw ParseError(line, "field 'id' must be a string");
  t.id = j["id"].get<std::string>();

  if (!j.contains("source") || !j["source"].is_string()) {
    throw ParseError(line, "field 'source' must be \"play\" or \"hand\"");
  }
  try {
    t.source = source_from_string(j["source"].get<std::string>());
  } catch (const Error& e) {
    throw ParseError(line, e.what());
  }

  if (!j.contains("fps")) throw ParseError(line, "missing field 'fps'");
  t.fps = number_at(j["fps"], "fps", line);

  if (!j.contains("track") || !j["track"].is_array()) throw ParseError(line, "field 'track' must be an array");
  t.track.reserve(j["track"].size());
  for (const auto& p : j["track"]) {
    if (!p.is_array() || p.size() != 2) throw ParseError(line, "track entries must be [x, y] pairs");
    t.track.push_back({number_at(p[0], "track", line), number_at(p[1], "track", line)});
  }

  if (j.contains("kin") && !j["kin"].is_null()) {
    if (!j["kin"].is_array()) throw ParseError(line, "field 'kin' must be an array");
    std::vector<double> kin;
    kin.reserve(j["kin"].size());
    for (const auto& v : j["kin"]) kin.push_back(number_at(v, "kin", line));
    t.kin = std::move(kin);
  }

  if (j.contains("actions") && !j["actions"].is_null()) {
    if (!j["actions"].is_array()) throw ParseError(line, "field 'actions' must be an array");
    std::vector<std::vector<double>> actions;
    actions.reserve(j["actions"].size());
    for (const auto& a : j["actions"]) {
      if (!a.is_array()) throw ParseError(line, "actions entries must be arrays");
      std::vector<double> row;
      row.reserve(a.size());
      for (const auto& v : a) row.push_back(number_at(v, "actions", line));
      actions.push_back(std::move(row));
    }
    t.actions = std::move(actions);
  }

  if (j.contains("embeddings") && !j["embeddings"].is_null()) {
    const auto& e = j["embeddings"];
    if (!e.is_object()) throw ParseError(line, "field 'embeddings' must be an object");
    if (!e.contains("file") || !e["file"].is_string()) throw ParseError(line, "embeddings.file must be a string");
    EmbeddingRef ref;
    ref.file = e["file"].get<std::string>();
    ref.stride = positive_int_at(e, "stride", line);
    ref.dim = positive_int_at(e, "dim", line);
    if (e.value("dtype", std::string{}) != "f32") throw ParseError(line, "embeddings.dtype must be \"f32\"");
    if (e.value("layout", std::string{}) != "row-major") {
      throw ParseError(line, "embeddings.layout must be \"row-major\"");
    }
    t.embeddings = std::move(ref);
  }
  return t;
}

}  // namespace

std::string_view to_string(Source s) { return s == Source::play ? "play" : "hand"; }

Source source_from_string(std::string_view s) {
  if (s == "play") return Source::play;
  if (s == "hand") return Source::hand;
  throw Error(Errc::validation, "unknown source '" + std::string(s) + "'");
}

std::size_t embedding_rows(std::size_t frames, std::size_t stride) {
  if (stride == 0) throw Error(Errc::validation, "stride must be >= 1");
  return (frames + stride - 1) / stride;
}

EmbeddingTable::EmbeddingTable(std::size_t stride, std::size_t dim, std::vector<float> values)
    : stride_(stride), dim_(dim), values_(std::move(values)) {
  if (stride_ == 0) throw Error(Errc::validation, "embedding stride must be >= 1");
  if (dim_ == 0) throw Error(Errc::validation, "embedding dim must be >= 1");
  if (values_.size() % dim_ != 0) {
    throw Error(Errc::size_mismatch, "embedding value count " + std::to_string(values_.size()) +
                                         " is not a multiple of dim " + std::to_string(dim_));
  }
}

std::span<const float> EmbeddingTable::row(std::size_t r) const {
  if (r >= rows()) throw Error(Errc::invalid_argument, "embedding row " + std::to_string(r) + " out of range");
  return std::span<const float>(values_).subspan(r * dim_, dim_);
}

bool same_content(const Trajectory& a, const Trajectory& b) {
  if (a.id != b.id || a.source != b.source || a.track != b.track || a.kin != b.kin ||
      a.actions != b.actions) {
    return false;
  }
  if (std::bit_cast<std::uint64_t>(a.fps) != std::bit_cast<std::uint64_t>(b.fps)) return false;
  if (a.embeddings.has_value() != b.embeddings.has_value()) return false;
  if (a.embeddings) {
    const auto& x = *a.embeddings;
    const auto& y = *b.embeddings;
    if (x.file != y.file || x.stride != y.stride || x.dim != y.dim) return false;
  }
  return true;
}

void validate(const Trajectory& t) {
  if (t.id.empty()) invalid(t.id, "id must be non-empty");
  if (!(t.fps > 0.0) || !std::isfinite(t.fps)) invalid(t.id, "fps > 0 violated");
  const std::size_t n = t.track.size();
  if (n < 2) invalid(t.id, "N >= 2 violated (track length " + std::to_string(n) + ")");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(t.track[i].x) || !std::isfinite(t.track[i].y)) {
      invalid(t.id, "non-finite track coordinate at frame " + std::to_string(i));
    }
  }
  if (t.kin) {
    if (t.kin->size() != n) {
      invalid(t.id, "|kin| = N violated (" + std::to_string(t.kin->size()) + " vs " + std::to_string(n) + ")");
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double k = (*t.kin)[i];
      if (!std::isfinite(k) || k < 0.0) invalid(t.id, "kin must be finite and >= 0 at frame " + std::to_string(i));
    }
  }
  if (t.actions) {
    if (t.actions->size() != n) {
      invalid(t.id, "|actions| = N violated (" + std::to_string(t.actions->size()) + " vs " +
                        std::to_string(n) + ")");
    }
    const std::size_t dim = t.actions->front().size();
    for (std::size_t i = 0; i < n; ++i) {
      const auto& a = (*t.actions)[i];
      if (a.size() != dim) invalid(t.id, "action dimension changes at frame " + std::to_string(i));
      for (double v : a) {
        if (!std::isfinite(v)) invalid(t.id, "non-finite action at frame " + std::to_string(i));
      }
    }
  }
  if (t.embeddings) {
    const auto& ref = *t.embeddings;
    if (ref.file.empty()) invalid(t.id, "embeddings.file must be non-empty");
    if (ref.stride < 1) invalid(t.id, "embeddings.stride >= 1 violated");
    if (ref.dim < 1) invalid(t.id, "embeddings.dim >= 1 violated");
    if (ref.table) {
      if (ref.table->stride() != ref.stride || ref.table->dim() != ref.dim) {
        invalid(t.id, "resolved embedding table disagrees with its reference");
      }
      validate(*ref.table, n);
    }
  }
}

void validate(const EmbeddingTable& table, std::size_t frames) {
  const std::size_t want = embedding_rows(frames, table.stride());
  if (table.rows() != want) {
    throw Error(Errc::size_mismatch, "embedding rows " + std::to_string(table.rows()) + " != ceil(N/stride) = " +
                                         std::to_string(want));
  }
  const auto& v = table.values();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) {
      throw Error(Errc::validation, "non-finite embedding entry at row " + std::to_string(i / table.dim()));
    }
  }
}

void validate(std::span<const Trajectory> dataset) {
  std::set<std::string_view> ids;
  for (const auto& t : dataset) {
    validate(t);
    if (!ids.insert(t.id).second) throw Error(Errc::validation, "duplicate trajectory id '" + t.id + "'");
  }
}

std::vector<Trajectory> parse_dataset(std::istream& in, const std::filesystem::path& base_dir) {
  std::vector<Trajectory> out;
  std::set<std::string> ids;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(lineno, e.what());
    }
    Trajectory t = parse_line(j, lineno, base_dir);
    try {
      validate(t);
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(lineno) + ": " + e.what());
    }
    if (!ids.insert(t.id).second) {
      throw Error(Errc::validation, "line " + std::to_string(lineno) + ": duplicate trajectory id '" + t.id + "'");
    }
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<Trajectory> load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io, "cannot open dataset " + path.string());
  return parse_dataset(in, path.parent_path());
}

std::string to_jsonl_line(const Trajectory& t) {
  ordered_json j;
  j["id"] = t.id;
  j["source"] = std::string(to_string(t.source));
  j["fps"] = t.fps;
  auto track = ordered_json::array();
  for (const auto& p : t.track) track.push_back({p.x, p.y});
  j["track"] = std::move(track);
  if (t.kin) j["kin"] = *t.kin;
  if (t.actions) j["actions"] = *t.actions;
  if (t.embeddings) {
    ordered_json e;
    e["file"] = t.embeddings->file;
    e["stride"] = t.embeddings->stride;
    e["dim"] = t.embeddings->dim;
    e["dtype"] = "f32";
    e["layout"] = "row-major";
    j["embeddings"] = std::move(e);
  }
  return j.dump();
}

void write_dataset(const std::filesystem::path& path, std::span<const Trajectory> dataset) {
  validate(dataset);
  const auto dir = path.parent_path();
  if (!dir.empty()) std::filesystem::create_directories(dir);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io, "cannot write dataset " + path.string());
  for (const auto& t : dataset) {
    out << to_jsonl_line(t) << '\n';
    if (t.embeddings) {
      const EmbeddingTable table = load_embeddings(t);
      write_embedding_blob(dir / t.embeddings->file, table);
    }
  }
  if (!out) throw Error(Errc::io, "failed writing " + path.string());
}

EmbeddingTable read_embedding_blob(const std::filesystem::path& path, std::size_t frames, std::size_t stride,
                                   std::size_t dim) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot open embedding blob " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const std::size_t rows = embedding_rows(frames, stride);
  const std::size_t expected = rows * dim * sizeof(float);
  if (bytes.size() != expected) {
    throw Error(Errc::size_mismatch, path.filename().string() + ": blob has " + std::to_string(bytes.size()) +
                                         " bytes, expected " + std::to_string(expected) + " (" +
                                         std::to_string(rows) + " rows x " + std::to_string(dim) + " x 4)");
  }
  std::vector<float> values(rows * dim);
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint32_t raw;
    std::memcpy(&raw, bytes.data() + i * 4, 4);
    values[i] = std::bit_cast<float>(to_little_endian(raw));
  }
  EmbeddingTable table(stride, dim, std::move(values));
  validate(table, frames);
  return table;
}

void write_embedding_blob(const std::filesystem::path& path, const EmbeddingTable& table) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io, "cannot write embedding blob " + path.string());
  std::string bytes(table.values().size() * 4, '\0');
  for (std::size_t i = 0; i < table.values().size(); ++i) {
    const std::uint32_t raw = to_little_endian(std::bit_cast<std::uint32_t>(table.values()[i]));
    std::memcpy(bytes.data() + i * 4, &raw, 4);
  }
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(Errc::io, "failed writing " + path.string());
}

EmbeddingTable load_embeddings(const Trajectory& traj) {
  if (!traj.embeddings) throw Error(Errc::missing_embeddings, "trajectory '" + traj.id + "' has no embeddings");
  const auto& ref = *traj.embeddings;
  if (ref.table) {
    validate(*ref.table, traj.frames());
    return *ref.table;
  }
  return read_embedding_blob(traj.base_dir / ref.file, traj.frames(), ref.stride, ref.dim);
}

std::vector<Trajectory> resolve_embeddings(std::vector<Trajectory> dataset) {
  for (auto& t : dataset) {
    if (t.embeddings && !t.embeddings->table) {
      t.embeddings->table = std::make_shared<const EmbeddingTable>(load_embeddings(t));
    }
  }
  return dataset;
}

}  // namespace handrv
