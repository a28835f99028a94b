#pragma once

#include <cstdint>
#include <utility>

#include "sep/graph.hpp"

namespace sep {

/// Cycle graph C_n (n >= 3); features are the node coordinates on the
/// unit circle, (cos(2*pi*i/n), sin(2*pi*i/n)).
std::pair<Graph, FeatureMatrix> make_ring(std::size_t n);

/// width x height 4-neighbor lattice (both >= 2); node id = row*width+col,
/// features are the integer coordinates (col, row) as reals.
std::pair<Graph, FeatureMatrix> make_grid(std::size_t width, std::size_t height);

/// Erdos-Renyi G(n, p) with unit weights, deterministic for a fixed seed
/// (skip sampling; independent of platform RNG distributions). 0 < p <= 1.
Graph random_graph(std::size_t n, double p, std::uint64_t seed);

}  // namespace sep
