// Command-line front end: build coding trees, evaluate structural entropy,
// pool graphs and features through the derived hierarchy, generate synthetic
// inputs, benchmark scaling, and compare against the exhaustive optimum.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "sep/bench.hpp"
#include "sep/brute_force.hpp"
#include "sep/entropy.hpp"
#include "sep/generators.hpp"
#include "sep/graph_io.hpp"
#include "sep/parallel.hpp"
#include "sep/pooling.hpp"
#include "sep/tree_builder.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw sep::IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw sep::IoError("write to " + path.string() + " failed");
}

void emit(const ordered_json& j, bool quiet) {
  if (!quiet) std::cout << j.dump(2) << "\n";
}

std::vector<std::size_t> level_sizes(const sep::CodingTree& tree) {
  auto depths = tree.depths();
  std::vector<std::size_t> sizes(tree.height() + 1, 0);
  for (std::size_t v = 0; v < tree.arena_size(); ++v)
    if (tree.alive(static_cast<int>(v))) ++sizes[depths[v]];
  std::reverse(sizes.begin(), sizes.end());  // leaves first
  return sizes;
}

std::string assignment_text(const sep::ClusterAssignment& s, const std::string& format) {
  if (format == "mm") return sep::format_assignment_matrix_market(s);
  if (format == "json") {
    ordered_json j;
    j["level"] = s.level;
    j["rows"] = s.rows;
    j["cols"] = s.cols;
    j["cluster_of"] = s.cluster_of;
    return j.dump(2) + "\n";
  }
  return sep::format_assignment_csv(s);
}

std::string assignment_extension(const std::string& format) {
  if (format == "mm") return ".mm";
  if (format == "json") return ".json";
  return ".csv";
}

struct TreeOutputs {
  double total_entropy = 0.0;
  std::vector<std::size_t> sizes;
};

TreeOutputs build_and_write(const sep::Graph& g, int k, const fs::path& tree_out,
                            const std::string& assign_prefix, const std::string& format) {
  sep::CodingTree tree = sep::build_coding_tree(g, k);
  if (!tree_out.empty()) write_text(tree_out, tree.to_json().dump(2) + "\n");
  if (!assign_prefix.empty()) {
    auto assignments = sep::assignments_from_tree(tree);
    for (const auto& s : assignments) {
      fs::path p = assign_prefix + ".s" + std::to_string(s.level) + assignment_extension(format);
      write_text(p, assignment_text(s, format));
    }
  }
  return {sep::total_entropy(g, tree), level_sizes(tree)};
}

int run_tree(const std::string& input, const std::string& input_dir, int height,
             const std::string& out, const std::string& out_dir,
             const std::string& assignments, const std::string& format, bool quiet) {
  if (input.empty() == input_dir.empty())
    throw sep::DomainError("give exactly one of --input or --input-dir");

  if (!input.empty()) {
    sep::Graph g = sep::load_edge_list(input);
    auto r = build_and_write(g, height, out.empty() ? fs::path() : fs::path(out),
                             assignments, format);
    ordered_json j;
    j["input"] = input;
    j["height"] = height;
    j["total_entropy"] = r.total_entropy;
    j["level_sizes"] = r.sizes;
    emit(j, quiet);
    return 0;
  }

  // Batch mode: one independent build per worker.
  if (out_dir.empty()) throw sep::DomainError("--input-dir requires --out-dir");
  fs::create_directories(out_dir);
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(input_dir))
    if (entry.is_regular_file() && entry.path().extension() == ".edges")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  std::vector<ordered_json> summaries(files.size());
  std::vector<std::string> errors(files.size());
  const int cap = sep::batch_thread_cap();
#pragma omp parallel for num_threads(cap) schedule(dynamic)
  for (long i = 0; i < static_cast<long>(files.size()); ++i) {
    try {
      sep::Graph g = sep::load_edge_list(files[i]);
      std::string stem = files[i].stem().string();
      fs::path tree_out = fs::path(out_dir) / (stem + ".tree.json");
      std::string prefix = assignments.empty()
                               ? std::string()
                               : (fs::path(out_dir) / stem).string();
      auto r = build_and_write(g, height, tree_out, prefix, format);
      ordered_json j;
      j["input"] = files[i].string();
      j["height"] = height;
      j["total_entropy"] = r.total_entropy;
      j["level_sizes"] = r.sizes;
      summaries[i] = std::move(j);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  bool failed = false;
  ordered_json all = ordered_json::array();
  for (std::size_t i = 0; i < files.size(); ++i) {
    if (!errors[i].empty()) {
      failed = true;
      std::cerr << "sep tree: " << files[i].string() << ": " << errors[i] << "\n";
    } else {
      all.push_back(std::move(summaries[i]));
    }
  }
  emit(all, quiet);
  return failed ? 1 : 0;
}

int run_entropy(const std::string& input, const std::string& tree_path, int height,
                const std::string& out, bool quiet) {
  sep::Graph g = sep::load_edge_list(input);
  sep::CodingTree tree;
  if (!tree_path.empty()) {
    std::ifstream in(tree_path);
    if (!in) throw sep::IoError("cannot open " + tree_path);
    nlohmann::json j = nlohmann::json::parse(in);
    tree = sep::CodingTree::from_json(g, j);
  } else if (height == 1) {
    tree = sep::CodingTree::star(g);
  } else if (height > 1) {
    tree = sep::build_coding_tree(g, height);
  } else {
    throw sep::DomainError("give --tree FILE or --height K (K=1 is the star tree)");
  }
  sep::EntropyReport report = sep::structural_entropy(g, tree);
  std::string text = report.to_json().dump(2) + "\n";
  if (!out.empty())
    write_text(out, text);
  else if (!quiet)
    std::cout << text;
  return 0;
}

int run_pool(const std::string& input, const std::string& features_path, int height,
             const std::string& agg, const std::string& out_prefix, bool quiet) {
  sep::Graph g = sep::load_edge_list(input);
  sep::CodingTree tree = sep::build_coding_tree(g, height);
  auto assignments = sep::assignments_from_tree(tree);
  sep::Aggregation aggregation =
      agg == "mean" ? sep::Aggregation::Mean : sep::Aggregation::Sum;

  sep::PoolingLevel level;
  level.adjacency = sep::CsrMatrix::from_graph(g);
  bool with_features = !features_path.empty();
  if (with_features) {
    level.features = sep::load_features_csv(features_path);
    if (level.features.rows() != g.node_count())
      throw sep::ShapeError("features have " + std::to_string(level.features.rows()) +
                            " rows but the graph has " + std::to_string(g.node_count()) +
                            " nodes");
  } else {
    level.features = sep::FeatureMatrix(g.node_count(), 0);
  }

  ordered_json summary = ordered_json::array();
  for (const auto& s : assignments) {
    level = sep::pool(level, s, aggregation);
    std::string stem = out_prefix + ".level" + std::to_string(s.level);
    write_text(stem + ".edges", sep::format_pooled_edge_list(level.adjacency));
    if (with_features) write_text(stem + ".features.csv", sep::format_features_csv(level.features));
    ordered_json j;
    j["level"] = s.level;
    j["clusters"] = s.rows;
    j["adjacency_sum"] = level.adjacency.sum();
    summary.push_back(std::move(j));
  }
  emit(summary, quiet);
  return 0;
}

int run_reconstruct(const std::string& input, const std::string& features_path, int height,
                    const std::string& agg, const std::string& out, bool quiet) {
  sep::Graph g = sep::load_edge_list(input);
  sep::FeatureMatrix x = sep::load_features_csv(features_path);
  sep::Aggregation aggregation =
      agg == "sum" ? sep::Aggregation::Sum : sep::Aggregation::Mean;
  double mse = sep::reconstruct_metric(g, x, height, aggregation);
  if (!out.empty()) {
    // reconstructed coordinates for external plotting
    sep::CodingTree tree = sep::build_coding_tree(g, height);
    auto assignments = sep::assignments_from_tree(tree);
    std::span<const sep::ClusterAssignment> non_root(assignments.data(),
                                                     assignments.size() - 1);
    sep::FeatureMatrix rt = sep::round_trip_features(x, non_root, aggregation);
    write_text(out, sep::format_features_csv(rt));
  }
  ordered_json j;
  j["input"] = input;
  j["height"] = height;
  j["aggregation"] = agg;
  j["mse"] = mse;
  emit(j, quiet);
  return 0;
}

int run_synth(const std::string& kind, std::size_t n, std::size_t rows, std::size_t cols,
              double p, std::uint64_t seed, const std::string& out_prefix, bool quiet) {
  sep::Graph g;
  sep::FeatureMatrix f;
  bool with_features = true;
  if (kind == "ring") {
    std::tie(g, f) = sep::make_ring(n);
  } else if (kind == "grid") {
    std::tie(g, f) = sep::make_grid(cols, rows);
  } else if (kind == "er") {
    g = sep::random_graph(n, p, seed);
    with_features = false;
  } else {
    throw sep::DomainError("unknown kind '" + kind + "' (ring, grid, er)");
  }
  sep::save_edge_list(g, out_prefix + ".edges");
  if (with_features) sep::save_features_csv(f, out_prefix + ".features.csv");
  ordered_json j;
  j["kind"] = kind;
  j["nodes"] = g.node_count();
  j["edges"] = g.edge_count();
  j["total_volume"] = g.total_volume();
  emit(j, quiet);
  return 0;
}

int run_bench(const std::string& sizes_arg, double degree, int height, std::uint64_t seed,
              int reps, const std::string& format, bool quiet) {
  std::vector<std::size_t> sizes;
  std::size_t pos = 0;
  while (pos <= sizes_arg.size()) {
    std::size_t comma = sizes_arg.find(',', pos);
    std::string tok = sizes_arg.substr(pos, (comma == std::string::npos ? sizes_arg.size() : comma) - pos);
    if (!tok.empty()) sizes.push_back(std::stoull(tok));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (sizes.empty()) throw sep::DomainError("no ladder sizes given");

  sep::BenchResult r = sep::run_scaling_ladder(sizes, degree, height, seed, reps);
  if (format == "csv") {
    if (!quiet) {
      std::cout << "n,m,seconds\n";
      for (const auto& row : r.rows)
        std::cout << row.n << ',' << row.m << ',' << sep::format_double(row.seconds) << "\n";
      std::cout << "# loglog_slope=" << sep::format_double(r.loglog_slope) << "\n";
    }
    return 0;
  }
  ordered_json j;
  j["rows"] = ordered_json::array();
  for (const auto& row : r.rows) {
    ordered_json rj;
    rj["n"] = row.n;
    rj["m"] = row.m;
    rj["seconds"] = row.seconds;
    j["rows"].push_back(std::move(rj));
  }
  j["loglog_slope"] = r.loglog_slope;
  emit(j, quiet);
  return 0;
}

int run_oracle(const std::string& input, int enumerate_n, int height, bool quiet) {
  if (!input.empty()) {
    sep::Graph g = sep::load_edge_list(input);
    auto opt = sep::brute_force_optimal(g, height);
    double greedy = height == 1
                        ? sep::total_entropy(g, sep::CodingTree::star(g))
                        : sep::total_entropy(g, sep::build_coding_tree(g, height));
    ordered_json j;
    j["input"] = input;
    j["height"] = height;
    j["optimal"] = opt.entropy;
    j["greedy"] = greedy;
    j["gap"] = greedy - opt.entropy;
    emit(j, quiet);
    return 0;
  }
  if (enumerate_n <= 0)
    throw sep::DomainError("give --input FILE or --enumerate N");
  std::size_t count = 0, optimal_count = 0;
  double max_gap = 0.0, min_gap = 0.0;
  for (const sep::Graph& g : sep::enumerate_connected_graphs(enumerate_n)) {
    if (g.edge_count() == 0) continue;
    auto opt = sep::brute_force_optimal(g, height);
    double greedy = height == 1
                        ? sep::total_entropy(g, sep::CodingTree::star(g))
                        : sep::total_entropy(g, sep::build_coding_tree(g, height));
    double gap = greedy - opt.entropy;
    max_gap = count == 0 ? gap : std::max(max_gap, gap);
    min_gap = count == 0 ? gap : std::min(min_gap, gap);
    if (gap < 1e-9) ++optimal_count;
    ++count;
  }
  ordered_json j;
  j["enumerate"] = enumerate_n;
  j["height"] = height;
  j["count"] = count;
  j["min_gap"] = min_gap;
  j["max_gap"] = max_gap;
  j["optimal_fraction"] = count ? static_cast<double>(optimal_count) / count : 0.0;
  emit(j, quiet);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fixed-height coding trees by structural entropy minimization, "
               "with the derived hierarchical pooling operators"};
  app.require_subcommand(1);

  std::string input, input_dir, out, out_dir, tree_path, features, assignments;
  std::string agg = "sum", rec_agg = "mean", format = "csv", bench_format = "json";
  std::string kind = "ring", sizes = "1000,2000,4000,8000";
  int height = 0, bench_height = 3, enumerate_n = 0, reps = 3;
  std::size_t n = 0, grid_rows = 0, grid_cols = 0;
  double p = 0.1, degree = 8.0;
  std::uint64_t seed = 0;
  bool quiet = false;

  auto* tree_cmd = app.add_subcommand("tree", "build a coding tree and its assignments");
  tree_cmd->add_option("--input", input, "edge list file");
  tree_cmd->add_option("--input-dir", input_dir, "directory of .edges files (batch mode)");
  tree_cmd->add_option("--height", height, "tree height k (> 1)")->required();
  tree_cmd->add_option("--out", out, "tree JSON output path");
  tree_cmd->add_option("--out-dir", out_dir, "output directory for batch mode");
  tree_cmd->add_option("--assignments", assignments, "prefix for per-level assignment files");
  tree_cmd->add_option("--format", format, "assignment format: csv, mm, json")
      ->check(CLI::IsMember({"csv", "mm", "json"}));
  tree_cmd->add_flag("--quiet", quiet, "suppress the stdout summary");

  auto* entropy_cmd = app.add_subcommand("entropy", "structural entropy of a graph under a tree");
  entropy_cmd->add_option("--input", input, "edge list file")->required();
  entropy_cmd->add_option("--tree", tree_path, "tree JSON (entropy of this tree)");
  entropy_cmd->add_option("--height", height, "build height (1 = star tree)");
  entropy_cmd->add_option("--out", out, "report output path (default stdout)");
  entropy_cmd->add_flag("--quiet", quiet, "suppress stdout output");

  auto* pool_cmd = app.add_subcommand("pool", "coarsen adjacency and features level by level");
  pool_cmd->add_option("--input", input, "edge list file")->required();
  pool_cmd->add_option("--features", features, "feature CSV (optional)");
  pool_cmd->add_option("--height", height, "tree height k (> 1)")->required();
  pool_cmd->add_option("--agg", agg, "feature aggregation: sum, mean")
      ->check(CLI::IsMember({"sum", "mean"}));
  pool_cmd->add_option("--out", out, "output prefix")->required();
  pool_cmd->add_flag("--quiet", quiet, "suppress the stdout summary");

  auto* rec_cmd = app.add_subcommand("reconstruct", "feature round-trip error through the hierarchy");
  rec_cmd->add_option("--input", input, "edge list file")->required();
  rec_cmd->add_option("--features", features, "feature CSV")->required();
  rec_cmd->add_option("--height", height, "tree height k (> 1)")->required();
  rec_cmd->add_option("--agg", rec_agg, "feature aggregation: sum, mean (default mean)")
      ->check(CLI::IsMember({"sum", "mean"}));
  rec_cmd->add_option("--out", out, "CSV of round-tripped features");
  rec_cmd->add_flag("--quiet", quiet, "suppress the stdout summary");

  auto* synth_cmd = app.add_subcommand("synth", "generate ring, grid, or G(n,p) inputs");
  synth_cmd->add_option("--kind", kind, "ring, grid, er")->required()
      ->check(CLI::IsMember({"ring", "grid", "er"}));
  synth_cmd->add_option("--n", n, "node count (ring, er)");
  synth_cmd->add_option("--rows", grid_rows, "grid rows");
  synth_cmd->add_option("--cols", grid_cols, "grid cols");
  synth_cmd->add_option("--p", p, "edge probability (er)");
  synth_cmd->add_option("--seed", seed, "random seed (er)");
  synth_cmd->add_option("--out", out, "output prefix")->required();
  synth_cmd->add_flag("--quiet", quiet, "suppress the stdout summary");

  auto* bench_cmd = app.add_subcommand("bench", "build-time scaling ladder on G(n, d/n)");
  bench_cmd->add_option("--sizes", sizes, "comma-separated node counts");
  bench_cmd->add_option("--degree", degree, "average degree");
  bench_cmd->add_option("--height", bench_height, "tree height k (default 3)");
  bench_cmd->add_option("--seed", seed, "random seed");
  bench_cmd->add_option("--reps", reps, "repetitions per size (median)");
  bench_cmd->add_option("--format", bench_format, "output format: json, csv (default json)")
      ->check(CLI::IsMember({"json", "csv"}));
  bench_cmd->add_flag("--quiet", quiet, "suppress stdout output");

  auto* oracle_cmd = app.add_subcommand("oracle", "greedy vs exhaustive optimum (tiny graphs)");
  oracle_cmd->add_option("--input", input, "edge list file (<= 8 nodes)");
  oracle_cmd->add_option("--enumerate", enumerate_n, "all connected graphs on N nodes");
  oracle_cmd->add_option("--height", height, "tree height (1..3)")->required();
  oracle_cmd->add_flag("--quiet", quiet, "suppress the stdout summary");

  CLI11_PARSE(app, argc, argv);

  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    if (tree_cmd->parsed())
      return run_tree(input, input_dir, height, out, out_dir, assignments, format, quiet);
    if (entropy_cmd->parsed()) return run_entropy(input, tree_path, height, out, quiet);
    if (pool_cmd->parsed()) return run_pool(input, features, height, agg, out, quiet);
    if (rec_cmd->parsed()) return run_reconstruct(input, features, height, rec_agg, out, quiet);
    if (synth_cmd->parsed()) return run_synth(kind, n, grid_rows, grid_cols, p, seed, out, quiet);
    if (bench_cmd->parsed()) return run_bench(sizes, degree, bench_height, seed, reps, bench_format, quiet);
    if (oracle_cmd->parsed()) return run_oracle(input, enumerate_n, height, quiet);
  } catch (const std::exception& e) {
    std::cerr << "sep " << cmd << ": " << e.what() << "\n";
    return 1;
  }
  return 0;
}
