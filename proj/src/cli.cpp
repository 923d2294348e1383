#include "hbst/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hbst/bench.hpp"
#include "hbst/descriptor_file.hpp"
#include "hbst/eval.hpp"
#include "hbst/io.hpp"
#include "hbst/oracle.hpp"
#include "hbst/synthetic.hpp"
#include "hbst/tree.hpp"

namespace hbst::cli {

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(text);
  while (std::getline(in, part, sep)) parts.push_back(part);
  if (!text.empty() && text.back() == sep) parts.emplace_back();
  return parts;
}

template <typename T>
T parse_number(const std::string& text, const std::string& what) {
  T value{};
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || text.empty()) {
    throw UsageError("cannot parse " + what + " from '" + text + "'");
  }
  return value;
}

// "10,25,50" or "0-8" or a mix: "0-4,8,16".
std::vector<std::size_t> parse_list(const std::string& text, const std::string& what) {
  std::vector<std::size_t> values;
  for (const auto& item : split(text, ',')) {
    const auto dash = item.find('-');
    if (dash == std::string::npos) {
      values.push_back(parse_number<std::size_t>(item, what));
      continue;
    }
    const auto lo = parse_number<std::size_t>(item.substr(0, dash), what);
    const auto hi = parse_number<std::size_t>(item.substr(dash + 1), what);
    if (hi < lo) throw UsageError("empty range '" + item + "' in " + what);
    for (std::size_t v = lo; v <= hi; ++v) values.push_back(v);
  }
  if (values.empty()) throw UsageError(what + " must not be empty");
  return values;
}

LoopPair parse_loop(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 3) throw UsageError("--loop expects QUERY:REFERENCE:OVERLAP, got '" + text + "'");
  return LoopPair{parse_number<std::uint32_t>(parts[0], "loop query"),
                  parse_number<std::uint32_t>(parts[1], "loop reference"),
                  parse_number<double>(parts[2], "loop overlap")};
}

std::vector<LoopPair> parse_loop_block(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 4) {
    throw UsageError("--loop-block expects QUERY0:REFERENCE0:COUNT:OVERLAP, got '" + text + "'");
  }
  const auto q0 = parse_number<std::uint32_t>(parts[0], "loop block query");
  const auto r0 = parse_number<std::uint32_t>(parts[1], "loop block reference");
  const auto count = parse_number<std::uint32_t>(parts[2], "loop block count");
  const auto overlap = parse_number<double>(parts[3], "loop block overlap");
  std::vector<LoopPair> pairs;
  for (std::uint32_t j = 0; j < count; ++j) pairs.push_back(LoopPair{q0 + j, r0 + j, overlap});
  return pairs;
}

// Writes to `path`, or to `fallback` when the path is empty or "-".
void emit(const std::string& path, std::ostream& fallback,
          const std::function<void(std::ostream&)>& write) {
  if (path.empty() || path == "-") {
    write(fallback);
    return;
  }
  std::ofstream file(path);
  if (!file) throw FormatError("cannot open " + path + " for writing");
  write(file);
  if (!file) throw FormatError("write to " + path + " failed");
}

struct TreeOptions {
  std::uint32_t tau = 25;
  double delta_max = 0.1;
  std::size_t n_max = 10;
  std::optional<std::size_t> max_depth;

  void attach(CLI::App& app) {
    app.add_option("--tau", tau, "Hamming matching threshold (inclusive)")->capture_default_str();
    app.add_option("--delta-max", delta_max, "Maximum |0.5 - mean| of a split bit")->capture_default_str();
    app.add_option("--nmax", n_max, "Maximum leaf size")->capture_default_str();
    app.add_option("--max-depth", max_depth, "Depth limit (default: descriptor width)");
  }
  TreeConfig config() const { return TreeConfig{tau, delta_max, n_max, max_depth}; }
};

DescriptorSet load_set(const std::string& path) { return read_descriptor_file(path); }

// ---------------------------------------------------------------------------

struct GenCommand {
  SyntheticSpec spec;
  std::vector<std::string> loops;
  std::vector<std::string> loop_blocks;
  std::string out_path;
  std::string truth_path;

  void attach(CLI::App& app) {
    app.add_option("--images", spec.num_images, "Number of images")->required();
    app.add_option("--per-image", spec.descriptors_per_image, "Descriptors per image")->capture_default_str();
    app.add_option("--dim", spec.dim_bits, "Descriptor width in bits")->capture_default_str();
    app.add_option("--loop", loops, "Planted overlap QUERY:REFERENCE:FRACTION (repeatable)");
    app.add_option("--loop-block", loop_blocks,
                   "Planted overlaps Q0+j:R0+j for j < COUNT, as Q0:R0:COUNT:FRACTION (repeatable)");
    app.add_option("--noise", spec.noise_bits, "Maximum bit flips per planted copy")->capture_default_str();
    app.add_option("--seed", spec.seed, "Random seed")->capture_default_str();
    app.add_option("--truth-min-overlap", spec.truth_min_overlap,
                   "Planted pairs above this overlap are written as truth")->capture_default_str();
    app.add_option("--out", out_path, "Descriptor file to write")->required();
    app.add_option("--truth", truth_path, "Ground-truth CSV to write");
  }

  int run(std::ostream& out) {
    for (const auto& text : loops) spec.loop_pairs.push_back(parse_loop(text));
    for (const auto& text : loop_blocks) {
      for (const auto& pair : parse_loop_block(text)) spec.loop_pairs.push_back(pair);
    }
    const auto sequence = generate_sequence(spec);
    write_descriptor_file(out_path, sequence.descriptors);
    if (!truth_path.empty()) {
      GroundTruth truth;
      truth.pairs.insert(sequence.truth.begin(), sequence.truth.end());
      emit(truth_path, out, [&](std::ostream& os) { write_ground_truth_csv(os, truth); });
    }
    out << "wrote " << sequence.descriptors.entries.size() << " descriptors of "
        << spec.num_images << " images, " << sequence.truth.size() << " truth pairs\n";
    return kExitOk;
  }
};

struct MatchCommand {
  std::string db_path;
  std::string query_path;
  std::string out_path;
  TreeOptions tree;

  void attach(CLI::App& app) {
    app.add_option("--db", db_path, "Reference descriptor file")->required();
    app.add_option("--query", query_path, "Query descriptor file")->required();
    app.add_option("--out", out_path, "Match CSV (default: stdout)");
    tree.attach(app);
  }

  int run(std::ostream& out) {
    auto db = load_set(db_path);
    const auto queries = load_set(query_path);
    if (db.dim_bits != queries.dim_bits) {
      throw FormatError("descriptor width mismatch: db has " + std::to_string(db.dim_bits) +
                        " bits, query has " + std::to_string(queries.dim_bits));
    }
    const auto config = tree.config();
    config.validate(db.dim_bits);
    const Tree index = Tree::build_balanced(std::move(db.entries), config);
    std::vector<MatchRecord> matches;
    for (const auto& q : queries.entries) {
      if (auto found = index.search_nearest(q, config.tau); found.best) {
        matches.push_back(std::move(*found.best));
      }
    }
    emit(out_path, out, [&](std::ostream& os) { write_match_csv(os, matches); });
    return kExitOk;
  }
};

struct ProtocolCommand {
  std::string input_path;
  std::string poses_path;
  std::string truth_path;
  std::string pr_path;
  std::string timing_path;
  std::string scores_path;
  std::string truth_out_path;
  bool eval = false;
  bool compute_truth = false;
  bool brute_force = false;
  GroundTruthParams gt_params;
  TreeOptions tree;
  std::ostream* log = &std::cerr;

  void attach(CLI::App& app) {
    app.add_option("--input", input_path, "Descriptor file, images in sequence order")->required();
    app.add_option("--poses", poses_path, "Pose file for the distance/angle criterion");
    app.add_flag("--eval", eval, "Score the run against a ground truth");
    app.add_option("--truth", truth_path, "Ground-truth CSV");
    app.add_flag("--compute-truth", compute_truth,
                 "Derive the ground truth from the input (and --poses) instead of --truth");
    app.add_option("--truth-out", truth_out_path, "Write the computed ground truth here");
    app.add_flag("--brute-force", brute_force, "Use exhaustive matching instead of the tree");
    app.add_option("--pr-out", pr_path, "PR CSV (default: stdout when --eval)");
    app.add_option("--timing-out", timing_path, "Per-image timing CSV");
    app.add_option("--scores-out", scores_path, "Raw per-pair scores CSV");
    app.add_option("--min-match-fraction", gt_params.min_match_fraction)->capture_default_str();
    app.add_option("--max-distance", gt_params.max_distance_m)->capture_default_str();
    app.add_option("--max-angle", gt_params.max_angle_deg)->capture_default_str();
    tree.attach(app);
  }

  int run(std::ostream& out) {
    if (eval && truth_path.empty() && !compute_truth) {
      throw UsageError("--eval needs a ground truth: pass --truth FILE or --compute-truth");
    }
    if (!truth_path.empty() && compute_truth) {
      throw UsageError("--truth and --compute-truth are mutually exclusive");
    }
    const auto set = load_set(input_path);
    const auto images = group_by_image(set.entries);
    const auto config = tree.config();
    config.validate(set.dim_bits);
    const RetrievalConfig retrieval{config.tau, 0.0};

    const auto results = brute_force ? run_protocol_brute_force(images, retrieval)
                                     : run_protocol(images, config, retrieval);
    if (!timing_path.empty()) {
      emit(timing_path, out, [&](std::ostream& os) { write_timing_csv(os, results); });
    }
    if (!scores_path.empty()) {
      emit(scores_path, out, [&](std::ostream& os) { write_scores_csv(os, results); });
    }
    if (!eval) return kExitOk;

    GroundTruth truth;
    if (compute_truth) {
      gt_params.tau = config.tau;
      std::optional<std::vector<PoseRecord>> poses;
      if (!poses_path.empty()) {
        std::ifstream in(poses_path);
        if (!in) throw FormatError("cannot open " + poses_path);
        poses = read_poses(in);
      }
      truth = poses ? build_ground_truth(images, std::span<const PoseRecord>(*poses), gt_params)
                    : build_ground_truth(images, std::nullopt, gt_params);
      if (!truth_out_path.empty()) {
        emit(truth_out_path, out, [&](std::ostream& os) { write_ground_truth_csv(os, truth); });
      }
    } else {
      std::ifstream in(truth_path);
      if (!in) throw FormatError("cannot open " + truth_path);
      truth = read_ground_truth_csv(in);
    }
    const auto curve = pr_curve(results, truth);
    emit(pr_path, out, [&](std::ostream& os) { write_pr_csv(os, curve); });
    if (const auto best = max_f1(curve)) {
      *log << "max_f1=" << format_double(best->f1) << " precision=" << format_double(best->precision)
                << " recall=" << format_double(best->recall)
                << " threshold=" << format_double(best->threshold) << '\n';
    }
    return kExitOk;
  }
};

struct CompletenessCommand {
  std::string input_path;
  std::string queries_path;
  std::string taus_text = "10,25,50,75";
  std::string depths_text = "0-16";
  std::string bits_path;
  std::string depth_path;
  std::size_t noise = 25;
  std::uint64_t seed = 1;
  double delta_max = 0.1;

  void attach(CLI::App& app) {
    app.add_option("--input", input_path, "Reference descriptor file")->required();
    app.add_option("--queries", queries_path,
                   "Query descriptor file (default: noisy copies of the references)");
    app.add_option("--noise", noise, "Maximum flips for synthesized queries")->capture_default_str();
    app.add_option("--seed", seed, "Seed for synthesized queries")->capture_default_str();
    app.add_option("--taus", taus_text, "Thresholds, e.g. 10,25,50,75")->capture_default_str();
    app.add_option("--depths", depths_text, "Depths, e.g. 0-16 or 0,1,2,4")->capture_default_str();
    app.add_option("--delta-max", delta_max)->capture_default_str();
    app.add_option("--bits-out", bits_path, "bit,tau,completeness CSV");
    app.add_option("--depth-out", depth_path, "depth,tau,measured,predicted CSV (default: stdout)");
  }

  int run(std::ostream& out) {
    std::vector<std::uint32_t> taus;
    for (const auto t : parse_list(taus_text, "--taus")) taus.push_back(static_cast<std::uint32_t>(t));
    const auto depths = parse_list(depths_text, "--depths");
    auto refs = load_set(input_path);
    for (const auto t : taus) {
      if (t > refs.dim_bits) {
        throw UsageError("tau " + std::to_string(t) + " exceeds descriptor width " +
                         std::to_string(refs.dim_bits));
      }
    }
    CompletenessCorpus corpus;
    if (queries_path.empty()) {
      if (noise > refs.dim_bits) throw UsageError("--noise exceeds descriptor width");
      corpus = noisy_query_corpus(std::move(refs.entries), noise, seed);
    } else {
      auto queries = load_set(queries_path);
      if (queries.dim_bits != refs.dim_bits) throw FormatError("query and reference widths differ");
      corpus.references = std::move(refs.entries);
      corpus.queries = std::move(queries.entries);
    }
    const auto bitwise = bitwise_completeness(corpus, taus);
    const auto reports = depth_completeness(corpus, bitwise, depths, delta_max);
    if (!bits_path.empty()) {
      emit(bits_path, out, [&](std::ostream& os) { write_bitwise_csv(os, bitwise); });
    }
    emit(depth_path, out, [&](std::ostream& os) { write_depth_csv(os, reports); });
    return kExitOk;
  }
};

struct TreeBuildCommand {
  std::string input_path;
  std::string out_path;
  bool incremental = false;
  TreeOptions tree;

  void attach(CLI::App& app) {
    app.add_option("--input", input_path, "Descriptor file")->required();
    app.add_option("--out", out_path, "Tree file to write")->required();
    app.add_flag("--incremental", incremental, "Insert one by one instead of the balanced build");
    tree.attach(app);
  }

  int run(std::ostream& out) {
    auto set = load_set(input_path);
    const auto config = tree.config();
    config.validate(set.dim_bits);
    Tree index;
    if (incremental) {
      for (auto& entry : set.entries) index.insert(std::move(entry), config);
    } else {
      index = Tree::build_balanced(std::move(set.entries), config);
    }
    write_tree_file(out_path, index);
    const auto stats = index.depth_stats();
    out << "entries=" << index.size() << " leaves=" << stats.leaf_count
        << " mean_depth=" << format_double(stats.mean_depth) << " max_depth=" << stats.max_depth << '\n';
    return kExitOk;
  }
};

struct TreeInfoCommand {
  std::string tree_path;

  void attach(CLI::App& app) { app.add_option("--tree", tree_path, "Tree file")->required(); }

  int run(std::ostream& out) {
    const Tree index = read_tree_file(tree_path);
    const auto stats = index.depth_stats();
    out << "dim_bits=" << index.dim_bits() << '\n'
        << "entries=" << index.size() << '\n'
        << "leaves=" << stats.leaf_count << '\n'
        << "mean_depth=" << format_double(stats.mean_depth) << '\n'
        << "stddev_depth=" << format_double(stats.stddev_depth) << '\n'
        << "max_depth=" << stats.max_depth << '\n';
    out << "leaf_size,count\n";
    for (const auto& [size, count] : stats.leaf_size_histogram) out << size << ',' << count << '\n';
    return kExitOk;
  }
};

struct BenchCommand {
  BenchmarkConfig config;

  void attach(CLI::App& app) {
    app.add_option("--stored", config.stored, "Stored descriptors")->capture_default_str();
    app.add_option("--queries", config.queries, "Queries")->capture_default_str();
    app.add_option("--dim", config.dim_bits, "Descriptor width")->capture_default_str();
    app.add_option("--noise", config.max_noise, "Maximum flips per query")->capture_default_str();
    app.add_option("--nmax", config.tree.n_max, "Maximum leaf size")->capture_default_str();
    app.add_option("--delta-max", config.tree.delta_max)->capture_default_str();
    app.add_option("--tau", config.tree.tau)->capture_default_str();
    app.add_option("--seed", config.seed)->capture_default_str();
  }

  int run(std::ostream& out) {
    const auto r = run_benchmark(config);
    out << "insert_seconds=" << format_double(r.insert_seconds) << '\n'
        << "tree_seconds=" << format_double(r.tree_seconds) << '\n'
        << "brute_force_seconds=" << format_double(r.brute_force_seconds) << '\n'
        << "speedup=" << format_double(r.speedup) << '\n'
        << "mean_depth_traversed=" << format_double(r.mean_depth_traversed) << '\n'
        << "mean_leaf_scanned=" << format_double(r.mean_leaf_scanned) << '\n'
        << "mean_tree_work=" << format_double(r.mean_tree_work) << '\n'
        << "brute_force_work=" << format_double(r.brute_force_work) << '\n'
        << "agreement=" << format_double(r.agreement) << '\n'
        << "mean_leaf_depth=" << format_double(r.depth.mean_depth) << '\n';
    return kExitOk;
  }
};

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hamming-distance binary search tree for descriptor matching and image retrieval"};
  app.name("hbst");
  app.require_subcommand(1);

  GenCommand gen;
  MatchCommand match;
  ProtocolCommand protocol;
  protocol.log = &err;
  CompletenessCommand completeness;
  TreeBuildCommand tree_build;
  TreeInfoCommand tree_info;
  BenchCommand bench;

  std::function<int()> action;
  auto bind = [&](CLI::App* sub, auto& command) {
    command.attach(*sub);
    sub->callback([&action, &command, &out] { action = [&command, &out] { return command.run(out); }; });
  };
  bind(app.add_subcommand("gen", "Generate a synthetic descriptor sequence with planted overlaps"), gen);
  bind(app.add_subcommand("match", "Match a query file against a reference file"), match);
  bind(app.add_subcommand("protocol", "Sequential query-then-insert retrieval run"), protocol);
  bind(app.add_subcommand("completeness", "Bitwise and depth completeness experiments"), completeness);
  auto* tree = app.add_subcommand("tree", "Build or inspect tree files");
  tree->require_subcommand(1);
  bind(tree->add_subcommand("build", "Build a tree file from a descriptor file"), tree_build);
  bind(tree->add_subcommand("info", "Print depth statistics of a tree file"), tree_info);
  bind(app.add_subcommand("bench", "Tree versus brute-force timing"), bench);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    return action ? action() : kExitUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
}

}  // namespace hbst::cli
