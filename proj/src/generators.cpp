#include "sep/generators.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace sep {

std::pair<Graph, FeatureMatrix> make_ring(std::size_t n) {
  if (n < 3) throw DomainError("ring needs n >= 3");
  std::vector<Edge> edges;
  edges.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    edges.push_back({static_cast<NodeId>(i), static_cast<NodeId>((i + 1) % n), 1.0});
  FeatureMatrix f(n, 2);
  for (std::size_t i = 0; i < n; ++i) {
    double angle = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
    f.at(i, 0) = std::cos(angle);
    f.at(i, 1) = std::sin(angle);
  }
  return {Graph::from_edges(n, std::move(edges)), std::move(f)};
}

std::pair<Graph, FeatureMatrix> make_grid(std::size_t width, std::size_t height) {
  if (width < 2 || height < 2) throw DomainError("grid needs width >= 2 and height >= 2");
  std::size_t n = width * height;
  std::vector<Edge> edges;
  edges.reserve(2 * n);
  auto id = [width](std::size_t row, std::size_t col) {
    return static_cast<NodeId>(row * width + col);
  };
  for (std::size_t row = 0; row < height; ++row) {
    for (std::size_t col = 0; col < width; ++col) {
      if (col + 1 < width) edges.push_back({id(row, col), id(row, col + 1), 1.0});
      if (row + 1 < height) edges.push_back({id(row, col), id(row + 1, col), 1.0});
    }
  }
  FeatureMatrix f(n, 2);
  for (std::size_t row = 0; row < height; ++row) {
    for (std::size_t col = 0; col < width; ++col) {
      f.at(id(row, col), 0) = static_cast<double>(col);
      f.at(id(row, col), 1) = static_cast<double>(row);
    }
  }
  return {Graph::from_edges(n, std::move(edges)), std::move(f)};
}

namespace {

// Canonical (0,1) double from the raw generator; avoids the
// implementation-defined std:: distributions for reproducible output.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

Graph random_graph(std::size_t n, double p, std::uint64_t seed) {
  if (!(p > 0.0) || p > 1.0) throw DomainError("edge probability must be in (0, 1]");
  std::vector<Edge> edges;
  if (p >= 1.0) {
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t v = u + 1; v < n; ++v)
        edges.push_back({static_cast<NodeId>(u), static_cast<NodeId>(v), 1.0});
    return Graph::from_edges(n, std::move(edges));
  }

  // Geometric skipping over the ordered pair list with a forward cursor:
  // O(n + m) overall, deterministic for a fixed seed.
  std::mt19937_64 rng(seed);
  const double log1mp = std::log1p(-p);
  std::uint64_t a = 0;
  std::uint64_t b = 0;  // cursor sits one before the next candidate pair
  bool done = n < 2;
  while (!done) {
    double u = uniform01(rng);
    auto skip = static_cast<std::uint64_t>(std::floor(std::log1p(-u) / log1mp));
    std::uint64_t step = skip + 1;
    while (step > 0) {
      std::uint64_t remaining = (n - 1) - b;
      if (step <= remaining) {
        b += step;
        step = 0;
      } else {
        step -= remaining;
        ++a;
        b = a;
        if (a >= n - 1) {
          done = true;
          break;
        }
      }
    }
    if (!done)
      edges.push_back({static_cast<NodeId>(a), static_cast<NodeId>(b), 1.0});
  }
  return Graph::from_edges(n, std::move(edges));
}

}  // namespace sep
