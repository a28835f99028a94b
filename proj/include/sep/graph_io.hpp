#pragma once

#include <filesystem>
#include <string>

#include "sep/graph.hpp"

namespace sep {

// Edge-list text format, one edge per line:
//   u v [w]
// ids are nonnegative integers, w a nonnegative real (default 1.0).
// Blank lines and lines starting with '#' are ignored. Node count is
// max id + 1. Self-loops are dropped, duplicate pairs sum their weights.

/// Parses an edge list. With weighted=false a third column is ignored
/// and every edge gets weight 1. Parse failures report the line number.
Graph load_edge_list(const std::filesystem::path& path, bool weighted = true);

Graph parse_edge_list(const std::string& text, bool weighted = true);

/// Writes the canonical edge list (sorted "u v w" lines, shortest
/// round-trip weight formatting). Reading it back reproduces the graph.
void save_edge_list(const Graph& g, const std::filesystem::path& path);

std::string format_edge_list(const Graph& g);

// Feature CSV: one row per node, comma-separated reals, optional single
// header line (detected by any non-numeric field).

FeatureMatrix load_features_csv(const std::filesystem::path& path);
FeatureMatrix parse_features_csv(const std::string& text);
void save_features_csv(const FeatureMatrix& m, const std::filesystem::path& path);
std::string format_features_csv(const FeatureMatrix& m);

/// Shortest decimal string that round-trips to the same double.
std::string format_double(double x);

}  // namespace sep
