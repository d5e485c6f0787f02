#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mignet/error.hpp"
#include "mignet/graph.hpp"
#include "mignet/parallel.hpp"
#include "mignet/paths.hpp"
#include "mignet/rng.hpp"
#include "mignet/stats.hpp"

namespace mignet {

enum class Measure { DegreeAll, DegreeIn, DegreeOut, Closeness, Betweenness, PageRank, Eigenvector };

inline constexpr std::array<Measure, 7> kAllMeasures = {Measure::DegreeAll, Measure::DegreeIn,
                                                        Measure::DegreeOut, Measure::Closeness,
                                                        Measure::Betweenness, Measure::PageRank,
                                                        Measure::Eigenvector};

inline const char* to_string(Measure m) {
  switch (m) {
    case Measure::DegreeAll: return "degree_all";
    case Measure::DegreeIn: return "degree_in";
    case Measure::DegreeOut: return "degree_out";
    case Measure::Closeness: return "closeness";
    case Measure::Betweenness: return "betweenness";
    case Measure::PageRank: return "pagerank";
    case Measure::Eigenvector: return "eigenvector";
  }
  return "?";
}

inline std::optional<Measure> parse_measure(std::string_view s) {
  for (Measure m : kAllMeasures)
    if (s == to_string(m)) return m;
  return std::nullopt;
}

struct CentralityOptions {
  Direction closeness_direction = Direction::In;  // In: distances from others to the node
  std::size_t betweenness_exact_threshold = 10000;
  std::size_t betweenness_samples = 2048;
  std::uint64_t betweenness_seed = 7;
  double pagerank_damping = 0.85;
  double pagerank_tolerance = 1e-10;  // L1 change between iterates
  std::size_t pagerank_max_iter = 10000;
  double eigenvector_tolerance = 1e-10;  // L2 change between normalized iterates
  std::size_t eigenvector_max_iter = 1000;
};

// ---- degree ----

inline std::vector<double> degree_centrality(const SocialGraph& g, Measure which) {
  std::vector<double> out(g.num_nodes());
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    switch (which) {
      case Measure::DegreeIn: out[u] = static_cast<double>(g.in_degree(u)); break;
      case Measure::DegreeOut: out[u] = static_cast<double>(g.out_degree(u)); break;
      default: out[u] = static_cast<double>(g.in_degree(u) + g.out_degree(u)); break;
    }
  }
  return out;
}

// ---- closeness ----

/// Wasserman-Faust closeness: (r / (n-1)) * (r / sum of distances), r being
/// the number of nodes at finite distance. With Direction::In distances run
/// from every other node to the target (in-edge BFS).
inline std::vector<double> closeness_centrality(const SocialGraph& g, Direction dir = Direction::In) {
  const std::size_t n = g.num_nodes();
  std::vector<double> out(n, 0.0);
  if (n < 2) return out;
  const std::size_t block = 32;
  parallel_for(
      (n + block - 1) / block,
      [&](std::size_t b) {
        Bfs bfs(n);
        for (std::size_t v = b * block; v < std::min(n, (b + 1) * block); ++v) {
          bfs.run(g, static_cast<NodeId>(v), dir);
          double total = 0.0;
          for (NodeId u : bfs.visited) total += bfs.dist[u];
          const double r = static_cast<double>(bfs.visited.size() - 1);
          out[v] = r > 0 ? (r / static_cast<double>(n - 1)) * (r / total) : 0.0;
        }
      },
      1);
  return out;
}

// ---- betweenness ----

namespace detail {

struct BrandesScratch {
  std::vector<std::int32_t> dist;
  std::vector<double> sigma;
  std::vector<double> delta;
  std::vector<NodeId> order;

  explicit BrandesScratch(std::size_t n) : dist(n, -1), sigma(n, 0.0), delta(n, 0.0) { order.reserve(n); }
};

/// Adds the dependency contributions of one source to `acc`.
inline void brandes_source(const SocialGraph& g, NodeId s, BrandesScratch& st, std::vector<double>& acc) {
  for (NodeId v : st.order) {
    st.dist[v] = -1;
    st.sigma[v] = 0.0;
    st.delta[v] = 0.0;
  }
  st.order.clear();
  st.dist[s] = 0;
  st.sigma[s] = 1.0;
  st.order.push_back(s);
  for (std::size_t head = 0; head < st.order.size(); ++head) {
    NodeId u = st.order[head];
    for (NodeId v : g.out_neighbors(u)) {
      if (st.dist[v] < 0) {
        st.dist[v] = st.dist[u] + 1;
        st.order.push_back(v);
      }
      if (st.dist[v] == st.dist[u] + 1) st.sigma[v] += st.sigma[u];
    }
  }
  for (std::size_t k = st.order.size(); k-- > 1;) {
    NodeId w = st.order[k];
    const double coeff = (1.0 + st.delta[w]) / st.sigma[w];
    for (NodeId v : g.in_neighbors(w))
      if (st.dist[v] >= 0 && st.dist[v] == st.dist[w] - 1) st.delta[v] += st.sigma[v] * coeff;
    acc[w] += st.delta[w];
  }
}

}  // namespace detail

struct BetweennessResult {
  std::vector<double> scores;
  bool exact = true;
  std::size_t sources = 0;
};

/// Brandes betweenness over directed shortest paths, unnormalized (each
/// ordered pair (s, t) contributes). Above the exact threshold a seeded sample
/// of sources is used and scores are scaled by n / sources.
inline BetweennessResult betweenness_centrality(const SocialGraph& g, const CentralityOptions& opt = {}) {
  const std::size_t n = g.num_nodes();
  BetweennessResult r;
  std::vector<NodeId> sources;
  r.exact = n <= opt.betweenness_exact_threshold || opt.betweenness_samples >= n;
  if (r.exact) {
    sources.resize(n);
    std::iota(sources.begin(), sources.end(), 0);
  } else {
    Rng rng(opt.betweenness_seed);
    sources = rng.sample_without_replacement(static_cast<std::uint32_t>(n),
                                             static_cast<std::uint32_t>(opt.betweenness_samples));
  }
  r.sources = sources.size();
  r.scores = blocked_reduce<detail::BrandesScratch>(
      sources.size(), n, 64, [&] { return detail::BrandesScratch(n); },
      [&](std::size_t i, std::vector<double>& acc, detail::BrandesScratch& st) {
        detail::brandes_source(g, sources[i], st, acc);
      });
  if (!r.exact && !sources.empty()) {
    const double scale = static_cast<double>(n) / static_cast<double>(sources.size());
    for (double& x : r.scores) x *= scale;
  }
  return r;
}

// ---- pagerank ----

/// PageRank with uniform teleport; the mass of dangling nodes is spread
/// uniformly. Iterates until the L1 change drops below the tolerance.
inline std::vector<double> pagerank(const SocialGraph& g, const CentralityOptions& opt = {}) {
  const std::size_t n = g.num_nodes();
  if (n == 0) return {};
  const double d = opt.pagerank_damping;
  const double inv_n = 1.0 / static_cast<double>(n);
  std::vector<double> x(n, inv_n), next(n), share(n);
  for (std::size_t it = 0; it < opt.pagerank_max_iter; ++it) {
    double dangling = 0.0;
    for (NodeId u = 0; u < n; ++u) {
      const auto deg = g.out_degree(u);
      if (deg == 0) {
        dangling += x[u];
        share[u] = 0.0;
      } else {
        share[u] = x[u] / static_cast<double>(deg);
      }
    }
    const double base = (1.0 - d) * inv_n + d * dangling * inv_n;
    double change = 0.0;
    double total = 0.0;
    for (NodeId v = 0; v < n; ++v) {
      double s = 0.0;
      for (NodeId u : g.in_neighbors(v)) s += share[u];
      next[v] = base + d * s;
      total += next[v];
    }
    for (NodeId v = 0; v < n; ++v) {
      next[v] /= total;  // guards against drift
      change += std::abs(next[v] - x[v]);
    }
    x.swap(next);
    if (change < opt.pagerank_tolerance) return x;
  }
  throw NumericError("pagerank did not converge within " + std::to_string(opt.pagerank_max_iter) + " iterations");
}

// ---- eigenvector ----

/// Principal eigenvector of the symmetrized adjacency A + A^T, L2-normalized
/// and non-negative. Power iteration runs on (A + A^T + I), which has the same
/// eigenvectors and no oscillation on bipartite graphs.
inline std::vector<double> eigenvector_centrality(const SocialGraph& g, const CentralityOptions& opt = {}) {
  const std::size_t n = g.num_nodes();
  if (n == 0) return {};
  std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n))), next(n);
  for (std::size_t it = 0; it < opt.eigenvector_max_iter; ++it) {
    double norm = 0.0;
    for (NodeId v = 0; v < n; ++v) {
      double s = x[v];
      for (NodeId u : g.in_neighbors(v)) s += x[u];
      for (NodeId u : g.out_neighbors(v)) s += x[u];
      next[v] = s;
      norm += s * s;
    }
    norm = std::sqrt(norm);
    if (!(norm > 0.0)) throw NumericError("eigenvector iteration collapsed to zero");
    double change = 0.0;
    for (NodeId v = 0; v < n; ++v) {
      next[v] /= norm;
      const double diff = next[v] - x[v];
      change += diff * diff;
    }
    x.swap(next);
    if (std::sqrt(change) < opt.eigenvector_tolerance) return x;
  }
  throw NumericError("eigenvector centrality did not converge within the iteration cap of " +
                     std::to_string(opt.eigenvector_max_iter));
}

// ---- dispatch ----

inline std::vector<double> centrality(const SocialGraph& g, Measure m, const CentralityOptions& opt = {}) {
  switch (m) {
    case Measure::DegreeAll:
    case Measure::DegreeIn:
    case Measure::DegreeOut: return degree_centrality(g, m);
    case Measure::Closeness: return closeness_centrality(g, opt.closeness_direction);
    case Measure::Betweenness: return betweenness_centrality(g, opt).scores;
    case Measure::PageRank: return pagerank(g, opt);
    case Measure::Eigenvector: return eigenvector_centrality(g, opt);
  }
  return {};
}

/// Symmetric Pearson matrix with unit diagonal; entries involving a constant
/// vector are nullopt.
inline std::vector<std::vector<std::optional<double>>> centrality_correlations(
    std::span<const std::vector<double>> vectors) {
  const std::size_t k = vectors.size();
  for (const auto& v : vectors)
    if (v.size() != vectors.front().size()) throw ValidationError("centrality vectors differ in length");
  std::vector<std::vector<std::optional<double>>> out(k, std::vector<std::optional<double>>(k));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i; j < k; ++j) {
      auto r = pearson(vectors[i], vectors[j]);
      if (i == j && r) r = 1.0;
      out[i][j] = out[j][i] = r;
    }
  }
  return out;
}

struct TopK {
  std::vector<NodeId> nodes;  // descending score, ties by node id
  std::size_t migrants = 0;
  std::size_t natives = 0;
};

inline TopK top_k(std::span<const double> scores, std::size_t k, const SocialGraph& g) {
  if (k < 1) throw ValidationError("top_k needs k >= 1");
  if (scores.size() != g.num_nodes()) throw ValidationError("score vector does not match graph");
  std::vector<NodeId> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  k = std::min(k, idx.size());
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(), [&](NodeId a, NodeId b) {
    return scores[a] != scores[b] ? scores[a] > scores[b] : a < b;
  });
  TopK t;
  t.nodes.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k));
  for (NodeId u : t.nodes) {
    if (g.attributes(u).status == Status::Migrant) ++t.migrants;
    if (g.attributes(u).status == Status::Native) ++t.natives;
  }
  return t;
}

}  // namespace mignet
