#include "sep/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "sep/generators.hpp"
#include "sep/tree_builder.hpp"

namespace sep {

BenchResult run_scaling_ladder(const std::vector<std::size_t>& sizes, double avg_degree,
                               int k, std::uint64_t seed, int reps) {
  if (reps < 1) throw DomainError("bench needs at least one repetition");
  BenchResult result;
  for (std::size_t n : sizes) {
    if (n < 2) throw DomainError("bench sizes must be >= 2");
    double p = std::min(1.0, avg_degree / static_cast<double>(n - 1));
    Graph g = random_graph(n, p, seed + n);
    if (g.edge_count() == 0) throw DomainError("bench drew an edgeless graph; raise the degree");

    std::vector<double> times;
    times.reserve(reps);
    for (int r = 0; r < reps; ++r) {
      auto t0 = std::chrono::steady_clock::now();
      CodingTree tree = build_coding_tree(g, k);
      auto t1 = std::chrono::steady_clock::now();
      (void)tree;
      times.push_back(std::chrono::duration<double>(t1 - t0).count());
    }
    std::sort(times.begin(), times.end());
    result.rows.push_back({n, g.edge_count(), times[times.size() / 2]});
  }

  // slope = cov(log m, log t) / var(log m)
  if (result.rows.size() >= 2) {
    double mx = 0.0, my = 0.0;
    for (const auto& r : result.rows) {
      mx += std::log(static_cast<double>(r.m));
      my += std::log(std::max(r.seconds, 1e-9));
    }
    mx /= static_cast<double>(result.rows.size());
    my /= static_cast<double>(result.rows.size());
    double cov = 0.0, var = 0.0;
    for (const auto& r : result.rows) {
      double dx = std::log(static_cast<double>(r.m)) - mx;
      double dy = std::log(std::max(r.seconds, 1e-9)) - my;
      cov += dx * dy;
      var += dx * dx;
    }
    result.loglog_slope = var > 0.0 ? cov / var : 0.0;
  }
  return result;
}

}  // namespace sep
