#include "handrv/manifest.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <tuple>

#include "handrv/error.hpp"
#include "json.hpp"

namespace handrv {

namespace {

using ordered_json = nlohmann::ordered_json;
using json = nlohmann::json;

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
  throw Error(Errc::schema, path + ": " + what);
}

const json& require(const json& obj, const std::string& path, const char* field) {
  if (!obj.is_object()) schema_error(path, "expected object");
  auto it = obj.find(field);
  if (it == obj.end()) schema_error(path + "." + field, "missing field");
  return *it;
}

std::size_t get_index(const json& obj, const std::string& path, const char* field) {
  const auto& v = require(obj, path, field);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    schema_error(path + "." + field, "expected non-negative integer");
  }
  return v.get<std::size_t>();
}

double get_real(const json& obj, const std::string& path, const char* field) {
  const auto& v = require(obj, path, field);
  if (!v.is_number()) schema_error(path + "." + field, "expected number");
  return v.get<double>();
}

std::string get_string(const json& obj, const std::string& path, const char* field) {
  const auto& v = require(obj, path, field);
  if (!v.is_string()) schema_error(path + "." + field, "expected string");
  return v.get<std::string>();
}

bool get_bool(const json& obj, const std::string& path, const char* field) {
  const auto& v = require(obj, path, field);
  if (!v.is_boolean()) schema_error(path + "." + field, "expected boolean");
  return v.get<bool>();
}

[[noreturn]] void manifest_invalid(const std::string& what) {
  throw Error(Errc::validation, "manifest: " + what);
}

}  // namespace

std::string_view to_string(DistanceMode m) { return m == DistanceMode::path ? "path" : "embedding"; }

DistanceMode distance_mode_from_string(std::string_view s) {
  if (s == "path") return DistanceMode::path;
  if (s == "embedding") return DistanceMode::embedding;
  throw Error(Errc::invalid_argument, "unknown distance mode '" + std::string(s) + "'");
}

std::string_view to_string(WeightScope s) { return s == WeightScope::per_segment ? "per_segment" : "union"; }

WeightScope weight_scope_from_string(std::string_view s) {
  if (s == "per_segment") return WeightScope::per_segment;
  if (s == "union") return WeightScope::union_all;
  throw Error(Errc::invalid_argument, "unknown weight scope '" + std::string(s) + "'");
}

void RetrievalParams::validate() const {
  if (M < 1) throw Error(Errc::invalid_argument, "M >= 1 violated");
  if (K < 1) throw Error(Errc::invalid_argument, "K >= 1 violated");
  if (use_visual_filter && K > M) {
    throw Error(Errc::invalid_argument,
                "K <= M violated with visual filtering (K=" + std::to_string(K) + ", M=" + std::to_string(M) + ")");
  }
  if (min_len < 1) throw Error(Errc::invalid_argument, "min_len >= 1 violated");
  if (split_even < 1) throw Error(Errc::invalid_argument, "split_even >= 1 violated");
  if (epsilon && !(*epsilon > 0.0 && std::isfinite(*epsilon))) {
    throw Error(Errc::invalid_argument, "epsilon > 0 violated");
  }
}

void validate(const RetrievalManifest& m) {
  try {
    m.params.validate();
  } catch (const Error& e) {
    manifest_invalid(std::string("params: ") + e.what());
  }
  for (std::size_t i = 0; i < m.matches.size(); ++i) {
    const auto& x = m.matches[i];
    const std::string where = "matches[" + std::to_string(i) + "]";
    if (x.query_start >= x.query_end) manifest_invalid(where + ": empty query segment");
    if (!(x.seg_start <= x.match_start && x.match_start <= x.match_end && x.match_end <= x.seg_end)) {
      manifest_invalid(where + ": seg_start <= match_start <= match_end <= seg_end violated");
    }
    if (x.seg_start >= x.seg_end) manifest_invalid(where + ": empty segment");
    if (!std::isfinite(x.cost_path) || x.cost_path < 0.0) manifest_invalid(where + ": cost_path must be finite and >= 0");
    if (x.cost_visual && (!std::isfinite(*x.cost_visual) || *x.cost_visual < 0.0)) {
      manifest_invalid(where + ": cost_visual must be finite and >= 0");
    }
    if (!(x.weight >= kMinWeight && x.weight <= kMaxWeight)) {
      manifest_invalid(where + ": weight " + std::to_string(x.weight) + " outside [0.01, 100]");
    }
  }

  // Group by query segment and check ranking inside each group.
  std::size_t group_begin = 0;
  while (group_begin < m.matches.size()) {
    std::size_t group_end = group_begin + 1;
    const auto& head = m.matches[group_begin];
    while (group_end < m.matches.size() && m.matches[group_end].query_start == head.query_start &&
           m.matches[group_end].query_end == head.query_end) {
      ++group_end;
    }
    const std::size_t size = group_end - group_begin;
    if (size > m.params.K) {
      manifest_invalid("query segment [" + std::to_string(head.query_start) + "," + std::to_string(head.query_end) +
                       ") has more than K matches");
    }
    for (std::size_t i = group_begin + 1; i < group_end; ++i) {
      const auto& a = m.matches[i - 1];
      const auto& b = m.matches[i];
      if (std::tie(a.cost_path, a.traj_id, a.seg_start) > std::tie(b.cost_path, b.traj_id, b.seg_start)) {
        manifest_invalid("matches[" + std::to_string(i) + "] out of (cost_path, traj_id, seg_start) order");
      }
    }
    group_begin = group_end;
  }
}

std::string to_json_text(const RetrievalManifest& m) {
  ordered_json params;
  params["M"] = m.params.M;
  params["K"] = m.params.K;
  params["epsilon"] = m.params.epsilon ? ordered_json(*m.params.epsilon) : ordered_json(nullptr);
  params["use_visual_filter"] = m.params.use_visual_filter;
  params["distance_mode"] = std::string(to_string(m.params.distance_mode));
  params["min_len"] = m.params.min_len;
  params["split_even"] = m.params.split_even;
  params["weight_scope"] = std::string(to_string(m.params.weight_scope));
  params["weight_normalization"] = std::string(kWeightNormalization);
  params["seed"] = m.params.seed;

  auto matches = ordered_json::array();
  for (const auto& x : m.matches) {
    ordered_json j;
    j["query_start"] = x.query_start;
    j["query_end"] = x.query_end;
    j["traj_id"] = x.traj_id;
    j["seg_start"] = x.seg_start;
    j["seg_end"] = x.seg_end;
    j["match_start"] = x.match_start;
    j["match_end"] = x.match_end;
    j["cost_path"] = x.cost_path;
    if (x.cost_visual) j["cost_visual"] = *x.cost_visual;
    j["weight"] = x.weight;
    matches.push_back(std::move(j));
  }

  ordered_json doc;
  doc["query_id"] = m.query_id;
  doc["params"] = std::move(params);
  doc["warnings"] = m.warnings;
  doc["matches"] = std::move(matches);
  return doc.dump(2) + "\n";
}

RetrievalManifest manifest_from_json_text(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(Errc::schema, std::string("$: ") + e.what());
  }
  RetrievalManifest m;
  m.query_id = get_string(doc, "$", "query_id");

  const auto& p = require(doc, "$", "params");
  const std::string pp = "$.params";
  m.params.M = get_index(p, pp, "M");
  m.params.K = get_index(p, pp, "K");
  const auto& eps = require(p, pp, "epsilon");
  if (eps.is_null()) {
    m.params.epsilon.reset();
  } else if (eps.is_number()) {
    m.params.epsilon = eps.get<double>();
  } else {
    schema_error(pp + ".epsilon", "expected number or null");
  }
  m.params.use_visual_filter = get_bool(p, pp, "use_visual_filter");
  try {
    m.params.distance_mode = distance_mode_from_string(get_string(p, pp, "distance_mode"));
    m.params.weight_scope = weight_scope_from_string(get_string(p, pp, "weight_scope"));
  } catch (const Error& e) {
    if (e.code() == Errc::schema) throw;
    schema_error(pp, e.what());
  }
  m.params.min_len = get_index(p, pp, "min_len");
  m.params.split_even = get_index(p, pp, "split_even");
  if (get_string(p, pp, "weight_normalization") != kWeightNormalization) {
    schema_error(pp + ".weight_normalization", "unsupported normalization");
  }
  const auto& seed = require(p, pp, "seed");
  if (!seed.is_number_integer()) schema_error(pp + ".seed", "expected integer");
  m.params.seed = seed.get<std::uint64_t>();

  const auto& warnings = require(doc, "$", "warnings");
  if (!warnings.is_array()) schema_error("$.warnings", "expected array");
  for (std::size_t i = 0; i < warnings.size(); ++i) {
    if (!warnings[i].is_string()) schema_error("$.warnings[" + std::to_string(i) + "]", "expected string");
    m.warnings.push_back(warnings[i].get<std::string>());
  }

  const auto& matches = require(doc, "$", "matches");
  if (!matches.is_array()) schema_error("$.matches", "expected array");
  for (std::size_t i = 0; i < matches.size(); ++i) {
    const std::string mp = "$.matches[" + std::to_string(i) + "]";
    const auto& j = matches[i];
    ManifestMatch x;
    x.query_start = get_index(j, mp, "query_start");
    x.query_end = get_index(j, mp, "query_end");
    x.traj_id = get_string(j, mp, "traj_id");
    x.seg_start = get_index(j, mp, "seg_start");
    x.seg_end = get_index(j, mp, "seg_end");
    x.match_start = get_index(j, mp, "match_start");
    x.match_end = get_index(j, mp, "match_end");
    x.cost_path = get_real(j, mp, "cost_path");
    if (j.contains("cost_visual") && !j["cost_visual"].is_null()) x.cost_visual = get_real(j, mp, "cost_visual");
    x.weight = get_real(j, mp, "weight");
    m.matches.push_back(std::move(x));
  }
  validate(m);
  return m;
}

void write_manifest(const RetrievalManifest& m, const std::filesystem::path& path) {
  validate(m);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io, "cannot write manifest " + path.string());
  out << to_json_text(m);
  if (!out) throw Error(Errc::io, "failed writing " + path.string());
}

RetrievalManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot open manifest " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return manifest_from_json_text(buf.str());
}

}  // namespace handrv
