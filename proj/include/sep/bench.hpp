#pragma once

#include <cstdint>
#include <vector>

#include "sep/graph.hpp"

namespace sep {

struct BenchRow {
  std::size_t n = 0;
  std::size_t m = 0;
  double seconds = 0.0;  // median build time over the repetitions
};

struct BenchResult {
  std::vector<BenchRow> rows;
  double loglog_slope = 0.0;  // least-squares slope of log t vs log m
};

/// Times build_coding_tree on G(n, d/(n-1)) graphs for each requested n.
/// Graph generation is excluded from the timing and deterministic in the
/// seed, so two runs see the identical ladder.
BenchResult run_scaling_ladder(const std::vector<std::size_t>& sizes, double avg_degree,
                               int k, std::uint64_t seed, int reps);

}  // namespace sep
