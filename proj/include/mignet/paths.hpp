#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "mignet/graph.hpp"
#include "mignet/parallel.hpp"
#include "mignet/rng.hpp"

namespace mignet {

enum class Direction { Out, In };

/// Reusable breadth-first search state; `dist` is -1 for unreached nodes and
/// is reset lazily through `visited`.
struct Bfs {
  std::vector<std::int32_t> dist;
  std::vector<NodeId> visited;  // in BFS order

  explicit Bfs(std::size_t n) : dist(n, -1) { visited.reserve(n); }

  void run(const SocialGraph& g, NodeId source, Direction dir) {
    for (NodeId v : visited) dist[v] = -1;
    visited.clear();
    dist[source] = 0;
    visited.push_back(source);
    for (std::size_t head = 0; head < visited.size(); ++head) {
      NodeId u = visited[head];
      auto nbrs = dir == Direction::Out ? g.out_neighbors(u) : g.in_neighbors(u);
      for (NodeId v : nbrs) {
        if (dist[v] < 0) {
          dist[v] = dist[u] + 1;
          visited.push_back(v);
        }
      }
    }
  }
};

struct PathLengthOptions {
  bool force_exact = false;
  std::size_t exact_threshold = 5000;  // all sources when n <= threshold
  std::size_t sources = 512;           // sampled sources otherwise
  std::uint64_t seed = 42;
};

struct PathLengthResult {
  std::optional<double> value;   // mean over reachable ordered pairs
  double reachable_share = 0.0;  // reachable ordered pairs / n(n-1)
  double std_error = 0.0;        // 0 for exact runs
  std::size_t sources = 0;
  bool exact = true;
};

/// Mean directed shortest-path length over ordered pairs (s, t), s != t,
/// with t reachable from s. Exact BFS from every node for small graphs;
/// otherwise a seeded uniform sample of sources gives a ratio estimate and
/// its delta-method standard error.
inline PathLengthResult avg_shortest_path(const SocialGraph& g, const PathLengthOptions& opt = {}) {
  const std::size_t n = g.num_nodes();
  PathLengthResult r;
  if (n < 2) return r;
  std::vector<NodeId> sources;
  r.exact = opt.force_exact || n <= opt.exact_threshold || opt.sources >= n;
  if (r.exact) {
    sources.resize(n);
    for (std::size_t i = 0; i < n; ++i) sources[i] = static_cast<NodeId>(i);
  } else {
    Rng rng(opt.seed);
    sources = rng.sample_without_replacement(static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(opt.sources));
  }
  const std::size_t k = sources.size();
  std::vector<double> dist_sum(k, 0.0), reach(k, 0.0);
  const std::size_t block = 32;
  const std::size_t n_blocks = (k + block - 1) / block;
  parallel_for(
      n_blocks,
      [&](std::size_t b) {
        Bfs bfs(n);
        for (std::size_t i = b * block; i < std::min(k, (b + 1) * block); ++i) {
          bfs.run(g, sources[i], Direction::Out);
          double s = 0.0;
          for (NodeId v : bfs.visited) s += bfs.dist[v];
          dist_sum[i] = s;
          reach[i] = static_cast<double>(bfs.visited.size() - 1);
        }
      },
      1);
  double total_d = 0.0, total_r = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    total_d += dist_sum[i];
    total_r += reach[i];
  }
  r.sources = k;
  r.reachable_share = total_r / (static_cast<double>(k) * static_cast<double>(n - 1));
  if (total_r == 0.0) return r;
  const double ratio = total_d / total_r;
  r.value = ratio;
  if (!r.exact && k > 1) {
    const double mean_r = total_r / static_cast<double>(k);
    double ss = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      double resid = dist_sum[i] - ratio * reach[i];
      ss += resid * resid;
    }
    const double var = ss / static_cast<double>(k - 1);
    const double fpc = 1.0 - static_cast<double>(k) / static_cast<double>(n);
    r.std_error = std::sqrt(std::max(0.0, fpc) * var / static_cast<double>(k)) / mean_r;
  }
  return r;
}

}  // namespace mignet
