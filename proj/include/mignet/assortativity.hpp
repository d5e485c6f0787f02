#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mignet/error.hpp"
#include "mignet/graph.hpp"
#include "mignet/parallel.hpp"
#include "mignet/stats.hpp"

namespace mignet {

enum class Attribute { Residence, Nationality, Status };

inline const char* to_string(Attribute a) {
  switch (a) {
    case Attribute::Residence: return "residence";
    case Attribute::Nationality: return "nationality";
    case Attribute::Status: return "status";
  }
  return "?";
}

/// Node categories as dense indices plus their names (sorted).
struct Categories {
  std::vector<std::uint32_t> of_node;
  std::vector<std::string> names;
};

inline Categories categories(const SocialGraph& g, Attribute attr) {
  std::vector<std::string> raw(g.num_nodes());
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    const auto& a = g.attributes(u);
    switch (attr) {
      case Attribute::Residence:
        if (!a.residence) throw ValidationError("node '" + g.user_id(u) + "' has no residence");
        raw[u] = a.residence->str();
        break;
      case Attribute::Nationality:
        if (!a.nationality) throw ValidationError("node '" + g.user_id(u) + "' has no nationality");
        raw[u] = a.nationality->str();
        break;
      case Attribute::Status:
        if (a.status == Status::Unknown) throw ValidationError("node '" + g.user_id(u) + "' has unknown status");
        raw[u] = to_string(a.status);
        break;
    }
  }
  Categories c;
  c.names = raw;
  std::sort(c.names.begin(), c.names.end());
  c.names.erase(std::unique(c.names.begin(), c.names.end()), c.names.end());
  c.of_node.resize(raw.size());
  for (std::size_t u = 0; u < raw.size(); ++u)
    c.of_node[u] = static_cast<std::uint32_t>(std::lower_bound(c.names.begin(), c.names.end(), raw[u]) -
                                              c.names.begin());
  return c;
}

/// Categories from an explicit per-node label vector (any dense indices).
inline Categories categories_from(std::span<const std::uint32_t> labels) {
  Categories c;
  std::uint32_t k = 0;
  for (auto l : labels) k = std::max(k, l + 1);
  c.of_node.assign(labels.begin(), labels.end());
  for (std::uint32_t i = 0; i < k; ++i) c.names.push_back(std::to_string(i));
  return c;
}

/// Edge fractions e[g][h] between source category g and target category h,
/// with row marginals a and column marginals b.
struct MixingMatrix {
  std::vector<std::string> categories;
  std::vector<std::vector<double>> e;
  std::vector<double> a;
  std::vector<double> b;

  double trace() const {
    double t = 0.0;
    for (std::size_t g = 0; g < e.size(); ++g) t += e[g][g];
    return t;
  }
  double chance() const {
    double s = 0.0;
    for (std::size_t g = 0; g < a.size(); ++g) s += a[g] * b[g];
    return s;
  }
};

inline MixingMatrix mixing_matrix(const SocialGraph& g, const Categories& cats) {
  if (g.num_edges() == 0) throw ValidationError("mixing matrix of a graph without edges");
  const std::size_t k = cats.names.size();
  MixingMatrix m;
  m.categories = cats.names;
  std::vector<std::vector<std::size_t>> counts(k, std::vector<std::size_t>(k, 0));
  for (NodeId u = 0; u < g.num_nodes(); ++u)
    for (NodeId v : g.out_neighbors(u)) ++counts[cats.of_node[u]][cats.of_node[v]];
  const double total = static_cast<double>(g.num_edges());
  m.e.assign(k, std::vector<double>(k, 0.0));
  m.a.assign(k, 0.0);
  m.b.assign(k, 0.0);
  for (std::size_t x = 0; x < k; ++x) {
    for (std::size_t y = 0; y < k; ++y) {
      m.e[x][y] = static_cast<double>(counts[x][y]) / total;
      m.a[x] += m.e[x][y];
      m.b[y] += m.e[x][y];
    }
  }
  return m;
}

/// (trace - chance) / (1 - chance); nullopt when chance agreement is 1.
inline std::optional<double> assortativity_coefficient(double trace, double chance) {
  if (!(1.0 - chance > 1e-15)) return std::nullopt;
  return (trace - chance) / (1.0 - chance);
}

/// Newman's categorical assortativity of the directed graph.
inline std::optional<double> categorical_assortativity(const SocialGraph& g, const Categories& cats) {
  auto m = mixing_matrix(g, cats);
  return assortativity_coefficient(m.trace(), m.chance());
}

inline std::optional<double> categorical_assortativity(const SocialGraph& g, Attribute attr) {
  return categorical_assortativity(g, categories(g, attr));
}

enum class DegreeMode {
  OutIn,  // source out-degree vs. target in-degree over directed edges
  Total,  // total degree at both ends of every edge of the symmetrized graph
};

/// Pearson correlation of endpoint degrees; nullopt for constant degrees.
inline std::optional<double> degree_assortativity(const SocialGraph& g, DegreeMode mode = DegreeMode::OutIn) {
  if (g.num_edges() < 2) throw ValidationError("degree assortativity needs at least two edges");
  std::vector<double> x, y;
  x.reserve(2 * g.num_edges());
  y.reserve(2 * g.num_edges());
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    for (NodeId v : g.out_neighbors(u)) {
      if (mode == DegreeMode::OutIn) {
        x.push_back(static_cast<double>(g.out_degree(u)));
        y.push_back(static_cast<double>(g.in_degree(v)));
      } else {
        const double ku = static_cast<double>(g.in_degree(u) + g.out_degree(u));
        const double kv = static_cast<double>(g.in_degree(v) + g.out_degree(v));
        x.push_back(ku);
        y.push_back(kv);
        x.push_back(kv);
        y.push_back(ku);
      }
    }
  }
  return pearson(x, y);
}

// ---------------------------------------------------------------------------
// Random walks on the symmetrized graph
// ---------------------------------------------------------------------------

/// Undirected view with folded directed edges: weight(u, v) = [u->v] + [v->u],
/// so a mutual pair has weight 2 and strength(u) = in + out degree.
class SymmetrizedGraph {
 public:
  explicit SymmetrizedGraph(const SocialGraph& g) : offsets_(g.num_nodes() + 1, 0), strength_(g.num_nodes(), 0.0) {
    const std::size_t n = g.num_nodes();
    for (NodeId u = 0; u < n; ++u) {
      auto out = g.out_neighbors(u);
      auto in = g.in_neighbors(u);
      std::size_t i = 0, j = 0;
      while (i < out.size() || j < in.size()) {
        NodeId v;
        double w = 0.0;
        if (j == in.size() || (i < out.size() && out[i] < in[j])) {
          v = out[i++];
          w = 1.0;
        } else if (i == out.size() || in[j] < out[i]) {
          v = in[j++];
          w = 1.0;
        } else {
          v = out[i];
          ++i;
          ++j;
          w = 2.0;
        }
        nbrs_.push_back(v);
        weights_.push_back(w);
        strength_[u] += w;
      }
      offsets_[u + 1] = nbrs_.size();
    }
    for (double s : strength_) total_strength_ += s;
  }

  std::size_t num_nodes() const { return strength_.size(); }
  std::span<const NodeId> neighbors(NodeId u) const {
    return {nbrs_.data() + offsets_[u], offsets_[u + 1] - offsets_[u]};
  }
  std::span<const double> weights(NodeId u) const {
    return {weights_.data() + offsets_[u], offsets_[u + 1] - offsets_[u]};
  }
  double strength(NodeId u) const { return strength_[u]; }
  double total_strength() const { return total_strength_; }  // 2m

 private:
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> nbrs_;
  std::vector<double> weights_;
  std::vector<double> strength_;
  double total_strength_ = 0.0;
};

struct WalkOptions {
  double tolerance = 1e-12;  // L1 change between iterates
  std::size_t max_iter = 1000000;
};

/// Stationary weights of the random walk with restart at `source`:
/// the solution of w = alpha * w P + (1 - alpha) * e_source, P = D^{-1} A.
/// A node without neighbors keeps its own mass.
inline std::vector<double> personalized_walk_weights(const SymmetrizedGraph& g, NodeId source, double alpha,
                                                     const WalkOptions& opt = {}) {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw ValidationError("restart parameter alpha must lie in [0, 1)");
  const std::size_t n = g.num_nodes();
  if (source >= n) throw ValidationError("walk source out of range");
  std::vector<double> w(n, 0.0), next(n, 0.0);
  w[source] = 1.0;
  if (alpha == 0.0) return w;
  for (std::size_t it = 0; it < opt.max_iter; ++it) {
    std::fill(next.begin(), next.end(), 0.0);
    for (NodeId i = 0; i < n; ++i) {
      if (w[i] == 0.0) continue;
      const double s = g.strength(i);
      if (s == 0.0) {
        next[i] += alpha * w[i];
        continue;
      }
      const double push = alpha * w[i] / s;
      auto nb = g.neighbors(i);
      auto wt = g.weights(i);
      for (std::size_t k = 0; k < nb.size(); ++k) next[nb[k]] += push * wt[k];
    }
    next[source] += 1.0 - alpha;
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) change += std::abs(next[i] - w[i]);
    w.swap(next);
    if (change < opt.tolerance) return w;
  }
  throw NumericError("personalized walk did not converge within " + std::to_string(opt.max_iter) + " iterations");
}

/// Local mixing matrix e(l) = sum_i (w(i) / k_i) sum_j A_ij [c_i = g][c_j = h]
/// for arbitrary node weights w.
inline std::vector<std::vector<double>> local_mixing(const SymmetrizedGraph& g, const Categories& cats,
                                                     std::span<const double> w) {
  const std::size_t k = cats.names.size();
  std::vector<std::vector<double>> e(k, std::vector<double>(k, 0.0));
  for (NodeId i = 0; i < g.num_nodes(); ++i) {
    const double s = g.strength(i);
    if (w[i] == 0.0 || s == 0.0) continue;
    auto nb = g.neighbors(i);
    auto wt = g.weights(i);
    for (std::size_t t = 0; t < nb.size(); ++t) e[cats.of_node[i]][cats.of_node[nb[t]]] += w[i] * wt[t] / s;
  }
  return e;
}

/// Share of each node's (weighted) neighborhood that carries its own category.
inline std::vector<double> same_category_share(const SymmetrizedGraph& g, const Categories& cats) {
  std::vector<double> s(g.num_nodes(), 0.0);
  for (NodeId i = 0; i < g.num_nodes(); ++i) {
    const double k = g.strength(i);
    if (k == 0.0) continue;
    auto nb = g.neighbors(i);
    auto wt = g.weights(i);
    double same = 0.0;
    for (std::size_t t = 0; t < nb.size(); ++t)
      if (cats.of_node[nb[t]] == cats.of_node[i]) same += wt[t];
    s[i] = same / k;
  }
  return s;
}

inline std::vector<double> default_alpha_grid() {
  std::vector<double> grid;
  for (int i = 0; i < 10; ++i) grid.push_back(i / 10.0);
  return grid;
}

struct LocalAssortativityResult {
  std::vector<double> scores;  // multiscale score per node
  std::vector<double> alpha_grid;
  std::vector<std::vector<double>> per_alpha;  // [alpha index][node]
  double global = 0.0;
  double chance = 0.0;  // sum_g a_g b_g from the global directed mixing matrix
};

namespace detail {

/// Solves y = alpha P y + (1 - alpha) s by fixed-point iteration, so that
/// y_l = sum_i w_l(i) s_i for the restart walk of every node l at once.
inline std::vector<double> restart_walk_average(const SymmetrizedGraph& g, std::span<const double> s, double alpha,
                                                const WalkOptions& opt) {
  const std::size_t n = g.num_nodes();
  std::vector<double> y(s.begin(), s.end()), next(n);
  if (alpha == 0.0) return y;
  for (std::size_t it = 0; it < opt.max_iter; ++it) {
    double change = 0.0;
    for (NodeId i = 0; i < n; ++i) {
      const double k = g.strength(i);
      double py = y[i];
      if (k > 0.0) {
        auto nb = g.neighbors(i);
        auto wt = g.weights(i);
        double acc = 0.0;
        for (std::size_t t = 0; t < nb.size(); ++t) acc += wt[t] * y[nb[t]];
        py = acc / k;
      }
      next[i] = alpha * py + (1.0 - alpha) * s[i];
      change = std::max(change, std::abs(next[i] - y[i]));
    }
    y.swap(next);
    if (change < opt.tolerance) return y;
  }
  throw NumericError("local assortativity iteration did not converge");
}

inline void check_alpha_grid(std::span<const double> grid) {
  if (grid.empty()) throw ValidationError("alpha grid is empty");
  for (double a : grid)
    if (!(a >= 0.0 && a < 1.0)) throw ValidationError("alpha grid values must lie in [0, 1)");
}

}  // namespace detail

/// Multiscale local assortativity. For node l and restart parameter alpha the
/// local trace is sum_g e_gg(l) under the node's restart-walk weights; the
/// score normalizes it with the GLOBAL chance agreement of the directed
/// mixing matrix. The multiscale score is the plain mean over the grid.
///
/// All nodes are solved together: the local trace equals
/// (1 - alpha) [(I - alpha P)^{-1} s]_l, with s the same-category share.
inline LocalAssortativityResult local_assortativity(const SocialGraph& g, const Categories& cats,
                                                    std::span<const double> alpha_grid,
                                                    const WalkOptions& opt = {}) {
  detail::check_alpha_grid(alpha_grid);
  auto global = mixing_matrix(g, cats);
  const double chance = global.chance();
  auto r = assortativity_coefficient(global.trace(), chance);
  if (!r) throw NumericError("local assortativity undefined: a single category carries all edges");
  SymmetrizedGraph sym(g);
  auto share = same_category_share(sym, cats);

  LocalAssortativityResult out;
  out.alpha_grid.assign(alpha_grid.begin(), alpha_grid.end());
  out.global = *r;
  out.chance = chance;
  out.scores.assign(g.num_nodes(), 0.0);
  out.per_alpha.resize(alpha_grid.size());
  for (std::size_t a = 0; a < alpha_grid.size(); ++a) {
    auto trace = detail::restart_walk_average(sym, share, alpha_grid[a], opt);
    auto& row = out.per_alpha[a];
    row.resize(trace.size());
    for (std::size_t l = 0; l < trace.size(); ++l) {
      row[l] = (trace[l] - chance) / (1.0 - chance);
      out.scores[l] += row[l];
    }
  }
  for (double& s : out.scores) s /= static_cast<double>(alpha_grid.size());
  return out;
}

inline LocalAssortativityResult local_assortativity(const SocialGraph& g, Attribute attr,
                                                    std::span<const double> alpha_grid,
                                                    const WalkOptions& opt = {}) {
  return local_assortativity(g, categories(g, attr), alpha_grid, opt);
}

/// Same quantity computed node by node from explicit walk vectors and local
/// mixing matrices. O(n) walks; meant for small graphs and cross-checks.
inline LocalAssortativityResult local_assortativity_per_node(const SocialGraph& g, const Categories& cats,
                                                             std::span<const double> alpha_grid,
                                                             const WalkOptions& opt = {}) {
  detail::check_alpha_grid(alpha_grid);
  auto global = mixing_matrix(g, cats);
  const double chance = global.chance();
  auto r = assortativity_coefficient(global.trace(), chance);
  if (!r) throw NumericError("local assortativity undefined: a single category carries all edges");
  SymmetrizedGraph sym(g);
  LocalAssortativityResult out;
  out.alpha_grid.assign(alpha_grid.begin(), alpha_grid.end());
  out.global = *r;
  out.chance = chance;
  const std::size_t n = g.num_nodes();
  out.scores.assign(n, 0.0);
  out.per_alpha.assign(alpha_grid.size(), std::vector<double>(n, 0.0));
  parallel_for(n, [&](std::size_t l) {
    for (std::size_t a = 0; a < alpha_grid.size(); ++a) {
      auto w = personalized_walk_weights(sym, static_cast<NodeId>(l), alpha_grid[a], opt);
      auto e = local_mixing(sym, cats, w);
      double trace = 0.0;
      for (std::size_t c = 0; c < e.size(); ++c) trace += e[c][c];
      out.per_alpha[a][l] = (trace - chance) / (1.0 - chance);
    }
  });
  for (std::size_t a = 0; a < alpha_grid.size(); ++a)
    for (std::size_t l = 0; l < n; ++l) out.scores[l] += out.per_alpha[a][l];
  for (double& s : out.scores) s /= static_cast<double>(alpha_grid.size());
  return out;
}

struct StackedHistograms {
  std::vector<double> edges;
  std::vector<std::size_t> migrants;
  std::vector<std::size_t> natives;
};

/// Migrant and native counts over one shared bin grid spanning all scores.
inline StackedHistograms assortativity_histograms(std::span<const double> scores, std::span<const Status> status,
                                                  std::size_t bins) {
  if (scores.size() != status.size()) throw ValidationError("scores and statuses differ in length");
  auto grid = histogram(scores, bins);
  StackedHistograms out;
  out.edges = grid.edges;
  std::vector<double> mig, nat;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (status[i] == Status::Migrant) mig.push_back(scores[i]);
    if (status[i] == Status::Native) nat.push_back(scores[i]);
  }
  auto range = std::make_pair(grid.edges.front(), grid.edges.back());
  out.migrants = histogram(mig, bins, false, range).counts;
  out.natives = histogram(nat, bins, false, range).counts;
  return out;
}

}  // namespace mignet
