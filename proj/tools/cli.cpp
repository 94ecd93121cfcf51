#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "handrv/error.hpp"
#include "handrv/manifest.hpp"
#include "handrv/pathops.hpp"
#include "handrv/retrieval.hpp"
#include "handrv/svg.hpp"
#include "handrv/synthbench.hpp"
#include "handrv/trajdata.hpp"

namespace handrv::cli {

namespace fs = std::filesystem;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(Errc::io, "cannot write " + path.string());
  f << text;
  if (!f) throw Error(Errc::io, "failed writing " + path.string());
}

const Trajectory& pick_query(const std::vector<Trajectory>& hand, const std::string& id) {
  if (hand.empty()) throw Error(Errc::validation, "hand file holds no trajectories");
  if (id.empty()) return hand.front();
  for (const auto& t : hand) {
    if (t.id == id) return t;
  }
  throw Error(Errc::validation, "no hand trajectory with id '" + id + "'");
}

std::vector<Segment> play_segments(const std::vector<Trajectory>& play, double epsilon, std::size_t min_len) {
  std::vector<Segment> out;
  for (const auto& t : play) {
    auto segs = segment_kinematic(t, epsilon, min_len);
    out.insert(out.end(), std::make_move_iterator(segs.begin()), std::make_move_iterator(segs.end()));
  }
  return out;
}

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

void print_report(std::ostream& out, const BenchReport& r) {
  out << r.cfg.name << " (" << r.seeds.size() << " seeds, K=" << r.cfg.K << ", M=" << r.cfg.M << ")\n";
  for (const auto& m : r.modes) {
    out << "  " << m.name << std::string(m.name.size() < 16 ? 16 - m.name.size() : 1, ' ')
        << "precision " << fmt("%.3f", m.precision_mean) << " +- " << fmt("%.3f", m.precision_std) << "  "
        << fmt("%.2f", m.wallclock_s) << " s\n";
  }
}

std::vector<std::uint64_t> seed_range(std::uint64_t first, std::size_t count) {
  std::vector<std::uint64_t> seeds;
  for (std::size_t i = 0; i < count; ++i) seeds.push_back(first + i);
  return seeds;
}

}  // namespace

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Retrieve play sub-trajectories that move like a hand demonstration.", "handrv"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "handrv 0.1.0");
  std::function<void()> run;

  // gen-synth
  auto* gen = app.add_subcommand("gen-synth", "Write a labelled synthetic play/hand dataset");
  PlayConfig play_cfg;
  HandConfig hand_cfg;
  std::uint64_t gen_seed = 0;
  std::vector<std::string> gen_queries;
  std::vector<double> gen_offset{0.0, 0.0};
  fs::path gen_out;
  gen->add_option("--seed", gen_seed, "Random seed")->capture_default_str();
  gen->add_option("--tasks", play_cfg.tasks, "Dominant motifs")->capture_default_str()->check(CLI::PositiveNumber);
  gen->add_option("--per-task", play_cfg.per_task, "Trajectories per dominant motif")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  gen->add_option("--motifs-per-traj", play_cfg.motifs_per_traj, "Motifs per play trajectory")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  gen->add_option("--sigma-p", play_cfg.sigma_p, "Track noise in pixels")->capture_default_str();
  gen->add_option("--sigma-e", play_cfg.sigma_e, "Embedding noise")->capture_default_str();
  gen->add_option("--stride", play_cfg.stride, "Embedding stride")->capture_default_str()->check(CLI::PositiveNumber);
  gen->add_option("--query", gen_queries, "Motifs to write hand demos for (default: all)");
  gen->add_option("--offset", gen_offset, "Hand viewpoint offset in pixels")->expected(2)->capture_default_str();
  gen->add_option("-o,--out", gen_out, "Output directory")->required();
  gen->callback([&] {
    run = [&] {
      const MotifLibrary lib = MotifLibrary::standard();
      const LabeledDataset data = gen_play(lib, play_cfg, gen_seed);
      write_dataset(gen_out / "play.jsonl", data.dataset);
      write_text(gen_out / "labels.json", data.labels.to_json_text());
      hand_cfg.offset = {gen_offset[0], gen_offset[1]};
      hand_cfg.sigma_p = play_cfg.sigma_p;
      hand_cfg.sigma_e = play_cfg.sigma_e;
      hand_cfg.stride = play_cfg.stride;
      const auto queries = gen_queries.empty() ? lib.names() : gen_queries;
      std::vector<Trajectory> hand;
      for (std::size_t i = 0; i < queries.size(); ++i) {
        hand.push_back(gen_hand(lib, queries[i], gen_seed * 1000003ULL + i + 1, hand_cfg));
      }
      write_dataset(gen_out / "hand.jsonl", hand);
      out << "wrote " << data.dataset.size() << " play and " << hand.size() << " hand trajectories to "
          << gen_out.string() << "\n";
    };
  });

  // segment
  auto* seg = app.add_subcommand("segment", "Print the segment table of a dataset");
  fs::path seg_in;
  std::optional<double> seg_eps;
  std::size_t seg_min_len = kDefaultMinLen;
  std::size_t seg_split = 0;
  seg->add_option("input", seg_in, "dataset.jsonl")->required();
  auto* seg_eps_opt = seg->add_option("--epsilon", seg_eps, "Kinematic threshold (default: 10th percentile)");
  seg->add_option("--min-len", seg_min_len, "Shortest kept segment")->capture_default_str()->check(CLI::PositiveNumber);
  seg->add_option("--split-even", seg_split, "Split each trajectory into N even parts instead")
      ->check(CLI::PositiveNumber)
      ->excludes(seg_eps_opt);
  seg->callback([&] {
    run = [&] {
      const auto data = load_dataset(seg_in);
      std::vector<Segment> segs;
      if (seg_split > 0) {
        for (const auto& t : data) {
          auto s = split_even(t, seg_split, seg_min_len);
          segs.insert(segs.end(), s.begin(), s.end());
        }
      } else {
        const double eps = seg_eps ? *seg_eps : default_epsilon(data);
        out << "# epsilon " << fmt("%.6g", eps) << "\n";
        segs = play_segments(data, eps, seg_min_len);
      }
      out << "traj_id\tstart\tend\tframes\n";
      for (const auto& s : segs) out << s.traj_id << '\t' << s.start << '\t' << s.end << '\t' << s.length() << '\n';
    };
  });

  // retrieve
  auto* ret = app.add_subcommand("retrieve", "Retrieve matches for one hand demo and write manifest.json");
  fs::path ret_play, ret_hand, ret_out;
  std::string ret_query;
  RetrievalParams params;
  std::string ret_mode = "path";
  std::string ret_scope = "per_segment";
  unsigned ret_threads = 0;
  std::optional<double> ret_eps;
  ret->add_option("--play", ret_play, "Play dataset.jsonl")->required();
  ret->add_option("--hand", ret_hand, "Hand dataset.jsonl")->required();
  ret->add_option("--query", ret_query, "Hand trajectory id (default: first)");
  auto* m_opt = ret->add_option("--M", params.M, "Visual filter size")->capture_default_str()->check(CLI::PositiveNumber);
  ret->add_option("--K", params.K, "Matches kept per hand segment")->capture_default_str()->check(CLI::PositiveNumber);
  ret->add_option("--epsilon", ret_eps, "Kinematic threshold (default: 10th percentile of play kin)")
      ->check(CLI::PositiveNumber);
  ret->add_option("--min-len", params.min_len, "Shortest kept segment")->capture_default_str()->check(CLI::PositiveNumber);
  ret->add_flag("--no-visual-filter", "Skip the visual filter")->excludes(m_opt);
  ret->add_option("--distance-mode", ret_mode, "Local distance for matching")
      ->capture_default_str()
      ->check(CLI::IsMember({"path", "embedding"}));
  ret->add_option("--split-even", params.split_even, "Even parts the hand demo is split into")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  ret->add_option("--weight-scope", ret_scope, "Set the weights are normalised over")
      ->capture_default_str()
      ->check(CLI::IsMember({"per_segment", "union"}));
  ret->add_option("--seed", params.seed, "Recorded in the manifest")->capture_default_str();
  ret->add_option("--threads", ret_threads, "Worker threads (0: all cores)")->capture_default_str();
  ret->add_option("-o,--out", ret_out, "Output directory")->required();
  ret->callback([&] {
    params.use_visual_filter = ret->count("--no-visual-filter") == 0;
    params.distance_mode = distance_mode_from_string(ret_mode);
    params.weight_scope = weight_scope_from_string(ret_scope);
    if (params.use_visual_filter && params.K > params.M) {
      throw UsageError("--K must not exceed --M (K=" + std::to_string(params.K) + ", M=" + std::to_string(params.M) +
                       ")");
    }
    run = [&] {
      auto play = resolve_embeddings(load_dataset(ret_play));
      auto hand = resolve_embeddings(load_dataset(ret_hand));
      validate(play);
      validate(hand);
      const Trajectory& query = pick_query(hand, ret_query);
      params.epsilon = ret_eps ? *ret_eps : default_epsilon(play);
      const auto segs = play_segments(play, *params.epsilon, params.min_len);
      const auto hand_segs = split_even(query, params.split_even, params.min_len);
      const RetrievalManifest manifest = retrieve(hand_segs, segs, params, ExecutionOptions{ret_threads});
      write_manifest(manifest, ret_out / "manifest.json");
      for (const auto& w : manifest.warnings) err << "warning: " << w << "\n";
      out << manifest.matches.size() << " matches from " << segs.size() << " play segments -> "
          << (ret_out / "manifest.json").string() << "\n";
    };
  });

  // eval and bench share the benchmark flags
  struct BenchFlags {
    std::string config = "default";
    std::uint64_t seed = 0;
    std::size_t seeds = 5;
    std::size_t K = 25;
    std::size_t M = 100;
    unsigned threads = 0;
    fs::path out;
  };
  BenchFlags eval_flags, bench_flags;
  auto add_bench_flags = [](CLI::App* sub, BenchFlags& f) {
    sub->add_option("--seed", f.seed, "First seed")->capture_default_str();
    sub->add_option("--seeds", f.seeds, "Number of consecutive seeds")->capture_default_str()->check(CLI::Range(3, 1000));
    sub->add_option("--K", f.K, "Matches kept")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--M", f.M, "Visual filter size")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--threads", f.threads, "Worker threads (0: all cores)")->capture_default_str();
  };
  auto bench_config = [](const std::string& name, const BenchFlags& f) {
    BenchConfig cfg = name == "confusable" ? confusable_bench() : default_bench();
    cfg.K = f.K;
    cfg.M = f.M;
    if (cfg.K > cfg.M) throw UsageError("--K must not exceed --M");
    return cfg;
  };

  auto* eval = app.add_subcommand("eval", "Evaluate every retrieval mode and write bench-report.json");
  add_bench_flags(eval, eval_flags);
  eval->add_option("--config", eval_flags.config, "Benchmark configuration")
      ->capture_default_str()
      ->check(CLI::IsMember({"default", "confusable"}));
  eval->add_option("-o,--out", eval_flags.out, "Output directory")->required();
  eval->callback([&] {
    const BenchConfig cfg = bench_config(eval_flags.config, eval_flags);
    run = [&, cfg] {
      const auto seeds = seed_range(eval_flags.seed, eval_flags.seeds);
      const BenchReport report = compare_modes(cfg, seeds, kAllModes, ExecutionOptions{eval_flags.threads});
      const std::string json = report_to_json_text(report);
      validate_report_json(json);
      write_text(eval_flags.out / "bench-report.json", json);
      write_text(eval_flags.out / "bench-report.svg", report_to_svg(report));
      print_report(out, report);
    };
  });

  auto* bench = app.add_subcommand("bench", "Compare retrieval modes on the default and confusable benchmarks");
  add_bench_flags(bench, bench_flags);
  bench->add_option("-o,--out", bench_flags.out, "Also write <config>-report.json/.svg here");
  bench->callback([&] {
    bench_config("default", bench_flags);
    run = [&] {
      const auto seeds = seed_range(bench_flags.seed, bench_flags.seeds);
      for (const char* name : {"default", "confusable"}) {
        const BenchReport report =
            compare_modes(bench_config(name, bench_flags), seeds, kAllModes, ExecutionOptions{bench_flags.threads});
        print_report(out, report);
        if (!bench_flags.out.empty()) {
          write_text(bench_flags.out / (std::string(name) + "-report.json"), report_to_json_text(report));
          write_text(bench_flags.out / (std::string(name) + "-report.svg"), report_to_svg(report));
        }
      }
    };
  });

  // export-svg
  auto* svg = app.add_subcommand("export-svg", "Draw the query path with its matched spans");
  fs::path svg_play, svg_hand, svg_manifest, svg_out;
  svg->add_option("--play", svg_play, "Play dataset.jsonl")->required();
  svg->add_option("--hand", svg_hand, "Hand dataset.jsonl")->required();
  svg->add_option("--manifest", svg_manifest, "manifest.json")->required();
  svg->add_option("-o,--out", svg_out, "Output .svg file")->required();
  svg->callback([&] {
    run = [&] {
      const auto play = load_dataset(svg_play);
      const auto hand = load_dataset(svg_hand);
      const RetrievalManifest manifest = read_manifest(svg_manifest);
      write_text(svg_out, overlay_svg(pick_query(hand, manifest.query_id), manifest, play));
      out << "wrote " << svg_out.string() << "\n";
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (run) run();
    return kExitOk;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const fs::filesystem_error& e) {
    err << "error [io]: " << e.what() << "\n";
    return kExitInvalid;
  }
}

}  // namespace handrv::cli
