#include "handrv/synthbench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>

#include "handrv/error.hpp"
#include "handrv/pathops.hpp"
#include "json.hpp"

namespace handrv {

namespace {

using ordered_json = nlohmann::ordered_json;
using json = nlohmann::json;

constexpr std::size_t kCurveSteps = 4096;
// Fraction of peak speed kept at the start and end of a motif; keeps every
// motion frame strictly above the pause threshold.
constexpr double kSpeedFloor = 0.3;
constexpr Point2 kImageCentre{320.0, 240.0};

constexpr double deg(double d) { return d * std::numbers::pi / 180.0; }

// Coordinates live on a 1/1024 px grid: sums and differences with integer
// offsets are then exact, and every value is float-representable below 16384.
constexpr double kGrid = 1024.0;
double quantize(double v) { return std::nearbyint(v * kGrid) / kGrid; }
Point2 quantize(Point2 p) { return {quantize(p.x), quantize(p.y)}; }

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Normalised progress along the path after fraction tau of the motif's
// duration, for speed profile floor + (1 - floor) * sin^2(pi tau).
double progress(double tau) {
  const double a = kSpeedFloor;
  const double integral = a * tau + (1.0 - a) * (tau / 2.0 - std::sin(2.0 * std::numbers::pi * tau) / (4.0 * std::numbers::pi));
  return integral / (a + (1.0 - a) / 2.0);
}

std::vector<Point2> integrate_heading(const std::function<double(double)>& heading) {
  std::vector<Point2> curve(kCurveSteps + 1);
  const double du = 1.0 / static_cast<double>(kCurveSteps);
  for (std::size_t k = 0; k < kCurveSteps; ++k) {
    const double h = heading((static_cast<double>(k) + 0.5) * du);
    curve[k + 1] = {curve[k].x + std::cos(h) * du, curve[k].y + std::sin(h) * du};
  }
  return curve;
}

Point2 curve_at(const std::vector<Point2>& curve, double u) {
  u = std::clamp(u, 0.0, 1.0);
  const double pos = u * static_cast<double>(kCurveSteps);
  const auto k = std::min(static_cast<std::size_t>(pos), kCurveSteps - 1);
  const double f = pos - static_cast<double>(k);
  return {curve[k].x + f * (curve[k + 1].x - curve[k].x), curve[k].y + f * (curve[k + 1].y - curve[k].y)};
}

std::vector<float> noisy_anchor(const std::vector<float>& anchor, double sigma, std::mt19937_64& rng) {
  std::vector<float> out(anchor);
  if (sigma > 0.0) {
    std::normal_distribution<double> noise(0.0, sigma);
    for (auto& v : out) v = static_cast<float>(v + noise(rng));
  }
  return out;
}

std::shared_ptr<const EmbeddingTable> make_table(const std::vector<std::size_t>& frame_motif,
                                                 const std::vector<const Motif*>& motifs, std::size_t stride,
                                                 double sigma, std::mt19937_64& rng) {
  const std::size_t rows = embedding_rows(frame_motif.size(), stride);
  std::vector<float> values;
  values.reserve(rows * kSynthEmbeddingDim);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto row = noisy_anchor(motifs[frame_motif[r * stride]]->anchor, sigma, rng);
    values.insert(values.end(), row.begin(), row.end());
  }
  return std::make_shared<const EmbeddingTable>(stride, kSynthEmbeddingDim, std::move(values));
}

std::string play_id(std::size_t n) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "play-%04zu", n);
  return buf;
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double stddev(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
  throw Error(Errc::schema, path + ": " + what);
}

const json& field(const json& obj, const std::string& path, const char* name) {
  if (!obj.is_object()) schema_error(path, "expected object");
  auto it = obj.find(name);
  if (it == obj.end()) schema_error(path + "." + name, "missing field");
  return *it;
}

void require_number_array(const json& v, const std::string& path) {
  if (!v.is_array()) schema_error(path, "expected array");
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) schema_error(path + "[" + std::to_string(i) + "]", "expected number");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// MotifLibrary

MotifLibrary MotifLibrary::standard() {
  std::mt19937_64 rng(0x4a4e44ULL);
  std::normal_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> small(0.0, 0.01);
  auto object_anchor = [&] {
    std::vector<float> a(kSynthEmbeddingDim);
    for (auto& v : a) v = static_cast<float>(unit(rng));
    return a;
  };
  const std::vector<float> bowl = object_anchor();
  const std::vector<float> button = object_anchor();
  const std::vector<float> cube = object_anchor();
  auto anchor_for = [&](const std::vector<float>& object) {
    std::vector<float> a(object);
    for (auto& v : a) v = static_cast<float>(v + small(rng));
    return a;
  };

  auto straight = [](double degrees) { return [h = deg(degrees)](double) { return h; }; };
  // Up-right, over, down-right: one smooth arch.
  auto arch = [](double u) { return deg(300.0 + 120.0 * u); };
  // Sweep from heading right to heading down, then press straight down.
  auto arc_then_press = [](double u) { return u < 0.7 ? deg(90.0 * u / 0.7) : deg(90.0); };

  std::vector<Motif> motifs;
  motifs.push_back({"line-reach", "bowl", straight(120.0), 300.0, 40.0, anchor_for(bowl)});
  motifs.push_back({"arc-press", "button", arc_then_press, 300.0, 44.0, anchor_for(button)});
  motifs.push_back({"pick-lift-place", "cube", arch, 320.0, 48.0, anchor_for(cube)});
  motifs.push_back({"slide", "cube", straight(180.0), 280.0, 38.0, anchor_for(cube)});
  motifs.push_back({"push", "button", straight(240.0), 260.0, 36.0, anchor_for(button)});
  motifs.push_back({"scoop", "bowl", arch, 320.0, 48.0, anchor_for(bowl)});
  return MotifLibrary(std::move(motifs));
}

MotifLibrary::MotifLibrary(std::vector<Motif> motifs) : motifs_(std::move(motifs)) {
  for (std::size_t i = 0; i < motifs_.size(); ++i) {
    const auto& m = motifs_[i];
    if (m.name.empty() || !m.heading) throw Error(Errc::invalid_argument, "motif needs a name and a heading");
    for (std::size_t j = 0; j < i; ++j) {
      if (motifs_[j].name == m.name) throw Error(Errc::invalid_argument, "duplicate motif name '" + m.name + "'");
    }
    if (m.anchor.size() != kSynthEmbeddingDim) {
      throw Error(Errc::invalid_argument, "motif '" + m.name + "' anchor must have dim 16");
    }
    if (!(m.amplitude > 0.0) || m.frames < static_cast<double>(kDefaultMinLen + 1)) {
      throw Error(Errc::invalid_argument, "motif '" + m.name + "' needs amplitude > 0 and at least min_len + 1 frames");
    }
    curves_.push_back(integrate_heading(m.heading));
  }
}

const Motif& MotifLibrary::at(std::string_view name) const {
  for (const auto& m : motifs_) {
    if (m.name == name) return m;
  }
  throw Error(Errc::unknown_motif, "no motif named '" + std::string(name) + "'");
}

bool MotifLibrary::contains(std::string_view name) const {
  return std::any_of(motifs_.begin(), motifs_.end(), [&](const Motif& m) { return m.name == name; });
}

std::vector<std::string> MotifLibrary::names() const {
  std::vector<std::string> out;
  for (const auto& m : motifs_) out.push_back(m.name);
  return out;
}

MotifSample MotifLibrary::sample(std::string_view name, double amplitude_scale, double time_scale) const {
  const Motif& m = at(name);
  const auto idx = static_cast<std::size_t>(&m - motifs_.data());
  if (!(amplitude_scale > 0.0) || !(time_scale > 0.0)) {
    throw Error(Errc::invalid_argument, "motif scales must be > 0");
  }
  const auto frames = std::max<std::size_t>(
      kDefaultMinLen + 1, static_cast<std::size_t>(std::lround(m.frames * time_scale)));
  const double amplitude = m.amplitude * amplitude_scale;

  MotifSample s;
  s.positions.reserve(frames);
  s.speeds.reserve(frames);
  Point2 prev{0.0, 0.0};
  for (std::size_t k = 0; k < frames; ++k) {
    const double tau = static_cast<double>(k + 1) / static_cast<double>(frames);
    const Point2 unit = curve_at(curves_[idx], progress(tau));
    const Point2 p = quantize(Point2{unit.x * amplitude, unit.y * amplitude});
    s.positions.push_back(p);
    s.speeds.push_back(std::hypot(p.x - prev.x, p.y - prev.y));
    prev = p;
  }
  return s;
}

RelativePath MotifLibrary::canonical_deltas(std::string_view name) const {
  return to_relative(sample(name).positions);
}

// ---------------------------------------------------------------------------
// Labels

SegmentLabels::SegmentLabels(std::vector<LabeledSegment> labels) : labels_(std::move(labels)) {
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    const auto& l = labels_[i];
    if (!index_.emplace(std::make_tuple(l.traj_id, l.start, l.end), i).second) {
      throw Error(Errc::validation, "segment " + l.traj_id + "[" + std::to_string(l.start) + "," +
                                        std::to_string(l.end) + ") labelled twice");
    }
  }
}

const std::string& SegmentLabels::motif_of(const std::string& traj_id, std::size_t start, std::size_t end) const {
  auto it = index_.find(std::make_tuple(traj_id, start, end));
  if (it == index_.end()) {
    throw Error(Errc::validation, "unlabelled segment " + traj_id + "[" + std::to_string(start) + "," +
                                      std::to_string(end) + ")");
  }
  return labels_[it->second].motif;
}

std::string SegmentLabels::to_json_text() const {
  auto arr = ordered_json::array();
  for (const auto& l : labels_) {
    ordered_json j;
    j["traj_id"] = l.traj_id;
    j["start"] = l.start;
    j["end"] = l.end;
    j["motif"] = l.motif;
    arr.push_back(std::move(j));
  }
  ordered_json doc;
  doc["segments"] = std::move(arr);
  return doc.dump(2) + "\n";
}

SegmentLabels SegmentLabels::from_json_text(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(Errc::schema, std::string("$: ") + e.what());
  }
  const auto& segs = field(doc, "$", "segments");
  if (!segs.is_array()) schema_error("$.segments", "expected array");
  std::vector<LabeledSegment> out;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const std::string p = "$.segments[" + std::to_string(i) + "]";
    const auto& s = segs[i];
    const auto& id = field(s, p, "traj_id");
    const auto& start = field(s, p, "start");
    const auto& end = field(s, p, "end");
    const auto& motif = field(s, p, "motif");
    if (!id.is_string() || !motif.is_string()) schema_error(p, "traj_id and motif must be strings");
    if (!start.is_number_unsigned() || !end.is_number_unsigned()) schema_error(p, "start/end must be indices");
    out.push_back({id.get<std::string>(), start.get<std::size_t>(), end.get<std::size_t>(), motif.get<std::string>()});
  }
  return SegmentLabels(std::move(out));
}

// ---------------------------------------------------------------------------
// Generators

LabeledDataset gen_play(const MotifLibrary& lib, const PlayConfig& cfg, std::uint64_t seed) {
  const std::vector<std::string> names = cfg.motifs.empty() ? lib.names() : cfg.motifs;
  if (cfg.tasks < 1 || cfg.per_task < 1 || cfg.motifs_per_traj < 1 || cfg.stride < 1) {
    throw Error(Errc::invalid_argument, "play config counts must be positive");
  }
  if (cfg.tasks > names.size()) throw Error(Errc::invalid_argument, "more tasks than motifs");
  if (cfg.sigma_p < 0.0 || cfg.sigma_e < 0.0 || cfg.jitter < 0.0 || cfg.jitter >= 1.0) {
    throw Error(Errc::invalid_argument, "noise levels must be >= 0 and jitter in [0, 1)");
  }
  if (cfg.pause_min < 1 || cfg.pause_max < cfg.pause_min) throw Error(Errc::invalid_argument, "bad pause range");
  std::vector<const Motif*> motifs;
  for (const auto& n : names) motifs.push_back(&lib.at(n));

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, names.size() - 1);
  std::uniform_int_distribution<std::size_t> slot(0, cfg.motifs_per_traj - 1);
  std::uniform_int_distribution<std::size_t> pause(cfg.pause_min, cfg.pause_max);
  std::uniform_real_distribution<double> scale(1.0 - cfg.jitter, 1.0 + cfg.jitter);
  std::normal_distribution<double> track_noise(0.0, cfg.sigma_p > 0.0 ? cfg.sigma_p : 1.0);

  LabeledDataset out;
  std::vector<LabeledSegment> labels;
  for (std::size_t task = 0; task < cfg.tasks; ++task) {
    for (std::size_t rep = 0; rep < cfg.per_task; ++rep) {
      Trajectory t;
      t.id = play_id(task * cfg.per_task + rep);
      t.source = Source::play;
      t.fps = 30.0;

      std::vector<std::size_t> chosen(cfg.motifs_per_traj);
      for (auto& c : chosen) c = pick(rng);
      chosen[slot(rng)] = task;

      std::vector<Point2> clean;
      std::vector<double> kin;
      std::vector<std::size_t> frame_motif;
      Point2 here = kImageCentre;
      auto hold = [&](std::size_t frames, std::size_t motif) {
        for (std::size_t f = 0; f < frames; ++f) {
          clean.push_back(here);
          kin.push_back(0.0);
          frame_motif.push_back(motif);
        }
      };

      hold(pause(rng), chosen.front());
      for (std::size_t c : chosen) {
        const double amp = scale(rng);
        const double dur = scale(rng);
        const MotifSample s = lib.sample(names[c], amp, dur);
        const Point2 origin = here;
        const std::size_t start = clean.size();
        for (std::size_t k = 0; k < s.positions.size(); ++k) {
          here = quantize(origin + s.positions[k]);
          clean.push_back(here);
          kin.push_back(s.speeds[k]);
          frame_motif.push_back(c);
        }
        labels.push_back({t.id, start, clean.size(), names[c]});
        hold(pause(rng), c);
      }

      t.track.reserve(clean.size());
      for (const auto& p : clean) {
        if (cfg.sigma_p > 0.0) {
          const double nx = track_noise(rng);
          const double ny = track_noise(rng);
          t.track.push_back(quantize(Point2{p.x + nx, p.y + ny}));
        } else {
          t.track.push_back(p);
        }
      }
      std::vector<std::vector<double>> actions;
      actions.reserve(clean.size());
      for (std::size_t f = 0; f < clean.size(); ++f) {
        const Point2 d = f + 1 < clean.size() ? clean[f + 1] - clean[f] : Point2{};
        actions.push_back({d.x, d.y});
      }
      t.kin = std::move(kin);
      t.actions = std::move(actions);
      EmbeddingRef ref;
      ref.file = t.id + ".f32";
      ref.stride = cfg.stride;
      ref.dim = kSynthEmbeddingDim;
      ref.table = make_table(frame_motif, motifs, cfg.stride, cfg.sigma_e, rng);
      t.embeddings = std::move(ref);
      out.dataset.push_back(std::move(t));
    }
  }
  out.labels = SegmentLabels(std::move(labels));
  return out;
}

Trajectory gen_hand(const MotifLibrary& lib, std::string_view motif, std::uint64_t seed, const HandConfig& cfg) {
  const Motif& m = lib.at(motif);
  if (cfg.sigma_p < 0.0 || cfg.sigma_e < 0.0 || cfg.stride < 1) {
    throw Error(Errc::invalid_argument, "hand config noise must be >= 0 and stride >= 1");
  }
  std::mt19937_64 rng(seed);
  const MotifSample s = lib.sample(motif, cfg.amplitude_scale, cfg.time_scale);
  std::normal_distribution<double> noise(0.0, cfg.sigma_p > 0.0 ? cfg.sigma_p : 1.0);

  Trajectory t;
  t.id = "hand-" + m.name;
  t.source = Source::hand;
  t.fps = 30.0;
  const Point2 base = kImageCentre + cfg.offset;
  t.track.reserve(s.positions.size());
  for (const auto& p : s.positions) {
    Point2 q = p;
    if (cfg.sigma_p > 0.0) {
      const double nx = noise(rng);
      const double ny = noise(rng);
      q = quantize(Point2{p.x + nx, p.y + ny});
    }
    t.track.push_back(base + q);
  }
  const std::vector<std::size_t> frame_motif(s.positions.size(), 0);
  EmbeddingRef ref;
  ref.file = t.id + ".f32";
  ref.stride = cfg.stride;
  ref.dim = kSynthEmbeddingDim;
  ref.table = make_table(frame_motif, {&m}, cfg.stride, 2.0 * cfg.sigma_e, rng);
  t.embeddings = std::move(ref);
  return t;
}

double precision_at_k(const RetrievalManifest& manifest, const SegmentLabels& labels, std::string_view query_motif) {
  if (manifest.matches.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& m : manifest.matches) {
    if (labels.motif_of(m.traj_id, m.seg_start, m.seg_end) == query_motif) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(manifest.matches.size());
}

// ---------------------------------------------------------------------------
// Benchmark

BenchConfig default_bench() {
  BenchConfig cfg;
  cfg.name = "default";
  cfg.hand.time_scale = 0.8;
  cfg.hand.amplitude_scale = 0.9;
  cfg.hand.offset = {37.0, -12.0};
  return cfg;
}

BenchConfig confusable_bench() {
  BenchConfig cfg = default_bench();
  cfg.name = "confusable";
  cfg.query_motifs = {"pick-lift-place", "scoop"};
  return cfg;
}

std::string_view to_string(BenchMode m) {
  switch (m) {
    case BenchMode::hand: return "HAND";
    case BenchMode::hand_no_vf: return "HAND(-VF)";
    case BenchMode::embedding_sdtw: return "embedding-sdtw";
    case BenchMode::visual_rank: return "visual-rank";
  }
  return "unknown";
}

const ModeResult& BenchReport::mode(std::string_view name) const {
  for (const auto& m : modes) {
    if (m.name == name) return m;
  }
  throw Error(Errc::invalid_argument, "report has no mode '" + std::string(name) + "'");
}

RetrievalManifest run_mode(BenchMode mode, std::span<const Segment> hand_segments,
                           std::span<const Segment> play_segments, const RetrievalParams& base,
                           const ExecutionOptions& exec) {
  RetrievalParams params = base;
  switch (mode) {
    case BenchMode::hand:
      params.use_visual_filter = true;
      params.distance_mode = DistanceMode::path;
      return retrieve(hand_segments, play_segments, params, exec);
    case BenchMode::hand_no_vf:
      params.use_visual_filter = false;
      params.distance_mode = DistanceMode::path;
      return retrieve(hand_segments, play_segments, params, exec);
    case BenchMode::embedding_sdtw:
      params.use_visual_filter = false;
      params.distance_mode = DistanceMode::embedding;
      return retrieve(hand_segments, play_segments, params, exec);
    case BenchMode::visual_rank:
      params.use_visual_filter = true;
      return retrieve_visual_only(hand_segments, play_segments, params, exec);
  }
  throw Error(Errc::invalid_argument, "unknown benchmark mode");
}

BenchReport compare_modes(const BenchConfig& cfg, std::span<const std::uint64_t> seeds,
                          std::span<const BenchMode> modes, const ExecutionOptions& exec) {
  if (seeds.size() < 3) throw Error(Errc::invalid_argument, "compare_modes needs at least 3 seeds");
  const MotifLibrary lib = MotifLibrary::standard();
  const std::vector<std::string> queries =
      !cfg.query_motifs.empty() ? cfg.query_motifs : (cfg.play.motifs.empty() ? lib.names() : cfg.play.motifs);

  BenchReport report;
  report.cfg = cfg;
  report.seeds.assign(seeds.begin(), seeds.end());
  for (BenchMode m : modes) report.modes.push_back({std::string(to_string(m)), 0.0, 0.0, {}, 0.0});

  for (std::uint64_t seed : seeds) {
    const LabeledDataset data = gen_play(lib, cfg.play, seed);
    const double epsilon = default_epsilon(data.dataset);
    std::vector<Segment> play;
    for (const auto& t : data.dataset) {
      auto segs = segment_kinematic(t, epsilon, cfg.min_len);
      play.insert(play.end(), std::make_move_iterator(segs.begin()), std::make_move_iterator(segs.end()));
    }

    RetrievalParams params;
    params.M = cfg.M;
    params.K = cfg.K;
    params.epsilon = epsilon;
    params.min_len = cfg.min_len;
    params.seed = seed;

    std::vector<double> sums(modes.size(), 0.0);
    for (std::size_t qi = 0; qi < queries.size(); ++qi) {
      const Trajectory hand = gen_hand(lib, queries[qi], splitmix64(seed ^ (0x100 + qi)), cfg.hand);
      const std::vector<Segment> hand_segs = split_even(hand, 1, cfg.min_len);
      for (std::size_t mi = 0; mi < modes.size(); ++mi) {
        const auto t0 = std::chrono::steady_clock::now();
        const RetrievalManifest manifest = run_mode(modes[mi], hand_segs, play, params, exec);
        const auto t1 = std::chrono::steady_clock::now();
        report.modes[mi].wallclock_s += std::chrono::duration<double>(t1 - t0).count();
        sums[mi] += precision_at_k(manifest, data.labels, queries[qi]);
      }
    }
    for (std::size_t mi = 0; mi < modes.size(); ++mi) {
      report.modes[mi].precision_per_seed.push_back(sums[mi] / static_cast<double>(queries.size()));
    }
  }
  for (auto& m : report.modes) {
    m.precision_mean = mean(m.precision_per_seed);
    m.precision_std = stddev(m.precision_per_seed);
  }
  return report;
}

std::string report_to_json_text(const BenchReport& r) {
  ordered_json cfg;
  cfg["name"] = r.cfg.name;
  cfg["tasks"] = r.cfg.play.tasks;
  cfg["per_task"] = r.cfg.play.per_task;
  cfg["motifs_per_traj"] = r.cfg.play.motifs_per_traj;
  cfg["sigma_p"] = r.cfg.play.sigma_p;
  cfg["sigma_e"] = r.cfg.play.sigma_e;
  cfg["jitter"] = r.cfg.play.jitter;
  cfg["stride"] = r.cfg.play.stride;
  cfg["motifs"] = r.cfg.play.motifs;
  cfg["query_motifs"] = r.cfg.query_motifs;
  cfg["K"] = r.cfg.K;
  cfg["M"] = r.cfg.M;
  cfg["min_len"] = r.cfg.min_len;
  ordered_json hand;
  hand["offset"] = {r.cfg.hand.offset.x, r.cfg.hand.offset.y};
  hand["sigma_p"] = r.cfg.hand.sigma_p;
  hand["sigma_e"] = r.cfg.hand.sigma_e;
  hand["time_scale"] = r.cfg.hand.time_scale;
  hand["amplitude_scale"] = r.cfg.hand.amplitude_scale;
  cfg["hand"] = std::move(hand);

  auto modes = ordered_json::array();
  for (const auto& m : r.modes) {
    ordered_json j;
    j["name"] = m.name;
    j["precision_mean"] = m.precision_mean;
    j["precision_std"] = m.precision_std;
    j["precision_per_seed"] = m.precision_per_seed;
    j["wallclock_s"] = m.wallclock_s;
    modes.push_back(std::move(j));
  }
  ordered_json doc;
  doc["cfg"] = std::move(cfg);
  doc["seeds"] = r.seeds;
  doc["modes"] = std::move(modes);
  return doc.dump(2) + "\n";
}

void validate_report_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(Errc::schema, std::string("$: ") + e.what());
  }
  if (!field(doc, "$", "cfg").is_object()) schema_error("$.cfg", "expected object");
  const auto& seeds = field(doc, "$", "seeds");
  if (!seeds.is_array()) schema_error("$.seeds", "expected array");
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (!seeds[i].is_number_integer()) schema_error("$.seeds[" + std::to_string(i) + "]", "expected integer");
  }
  const auto& modes = field(doc, "$", "modes");
  if (!modes.is_array()) schema_error("$.modes", "expected array");
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const std::string p = "$.modes[" + std::to_string(i) + "]";
    const auto& m = modes[i];
    if (!field(m, p, "name").is_string()) schema_error(p + ".name", "expected string");
    for (const char* key : {"precision_mean", "wallclock_s"}) {
      if (!field(m, p, key).is_number()) schema_error(p + "." + key, "expected number");
    }
    const double pm = m["precision_mean"].get<double>();
    if (pm < 0.0 || pm > 1.0) schema_error(p + ".precision_mean", "outside [0, 1]");
    const auto& per_seed = field(m, p, "precision_per_seed");
    require_number_array(per_seed, p + ".precision_per_seed");
    if (per_seed.size() != seeds.size()) schema_error(p + ".precision_per_seed", "one value per seed expected");
  }
}

std::string report_to_svg(const BenchReport& r) {
  constexpr double width = 640.0;
  constexpr double height = 360.0;
  constexpr double left = 60.0;
  constexpr double bottom = 300.0;
  constexpr double top = 40.0;
  const double slot = (width - left - 20.0) / static_cast<double>(std::max<std::size_t>(1, r.modes.size()));
  static constexpr const char* colours[] = {"#e67e22", "#f5b041", "#2e86c1", "#7f8c8d"};

  std::ostringstream svg;
  svg.setf(std::ios::fixed);
  svg.precision(2);
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  svg << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "  <text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"16\">precision@"
      << r.cfg.K << " (" << r.cfg.name << ", " << r.seeds.size() << " seeds)</text>\n";
  for (int tick = 0; tick <= 4; ++tick) {
    const double v = tick / 4.0;
    const double y = bottom - v * (bottom - top);
    svg << "  <line x1=\"" << left << "\" y1=\"" << y << "\" x2=\"" << width - 20 << "\" y2=\"" << y
        << "\" stroke=\"#ddd\"/>\n";
    svg << "  <text x=\"" << left - 8 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
           "font-size=\"11\">"
        << v << "</text>\n";
  }
  for (std::size_t i = 0; i < r.modes.size(); ++i) {
    const auto& m = r.modes[i];
    const double x = left + slot * static_cast<double>(i) + slot * 0.2;
    const double w = slot * 0.6;
    const double h = m.precision_mean * (bottom - top);
    svg << "  <rect x=\"" << x << "\" y=\"" << bottom - h << "\" width=\"" << w << "\" height=\"" << h
        << "\" fill=\"" << colours[i % 4] << "\"/>\n";
    const double err = m.precision_std * (bottom - top);
    svg << "  <line x1=\"" << x + w / 2 << "\" y1=\"" << bottom - h - err << "\" x2=\"" << x + w / 2 << "\" y2=\""
        << bottom - h + err << "\" stroke=\"black\"/>\n";
    svg << "  <text x=\"" << x + w / 2 << "\" y=\"" << bottom + 18
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << m.name << "</text>\n";
    svg << "  <text x=\"" << x + w / 2 << "\" y=\"" << bottom - h - err - 6
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << m.precision_mean
        << "</text>\n";
  }
  svg << "  <line x1=\"" << left << "\" y1=\"" << bottom << "\" x2=\"" << width - 20 << "\" y2=\"" << bottom
      << "\" stroke=\"black\"/>\n";
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace handrv
