#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mignet/corpus.hpp"
#include "mignet/error.hpp"
#include "mignet/labeling.hpp"

namespace mignet {

using NodeId = std::uint32_t;

/// Per-node attributes carried by the social graph.
struct NodeAttributes {
  Status status = Status::Unknown;
  OptCountry nationality;
  OptCountry residence;
};

/// Immutable directed graph in compressed sparse row form. Node ids are
/// contiguous; neighbor lists are sorted, duplicate-free and loop-free; the
/// in-adjacency is the exact transpose of the out-adjacency.
class SocialGraph {
 public:
  SocialGraph() = default;

  /// Builds from (src, dst) index pairs over n nodes. Self-loops and
  /// duplicates are dropped. `ids` defaults to "0", "1", ...
  static SocialGraph from_edges(std::size_t n, std::vector<std::pair<NodeId, NodeId>> edges,
                                std::vector<std::string> ids = {}, std::vector<NodeAttributes> attrs = {}) {
    for (const auto& [u, v] : edges)
      if (u >= n || v >= n) throw ValidationError("edge endpoint out of range");
    std::erase_if(edges, [](const auto& e) { return e.first == e.second; });
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    SocialGraph g;
    g.n_ = n;
    if (ids.empty()) {
      ids.resize(n);
      for (std::size_t i = 0; i < n; ++i) ids[i] = std::to_string(i);
    }
    if (ids.size() != n) throw ValidationError("id list does not match node count");
    if (attrs.empty()) attrs.resize(n);
    if (attrs.size() != n) throw ValidationError("attribute list does not match node count");
    g.ids_ = std::move(ids);
    g.attrs_ = std::move(attrs);

    g.out_offsets_.assign(n + 1, 0);
    g.in_offsets_.assign(n + 1, 0);
    for (const auto& [u, v] : edges) {
      ++g.out_offsets_[u + 1];
      ++g.in_offsets_[v + 1];
    }
    std::partial_sum(g.out_offsets_.begin(), g.out_offsets_.end(), g.out_offsets_.begin());
    std::partial_sum(g.in_offsets_.begin(), g.in_offsets_.end(), g.in_offsets_.begin());
    g.out_targets_.resize(edges.size());
    g.in_sources_.resize(edges.size());
    std::vector<std::size_t> out_pos(g.out_offsets_.begin(), g.out_offsets_.end() - 1);
    std::vector<std::size_t> in_pos(g.in_offsets_.begin(), g.in_offsets_.end() - 1);
    // Edges are sorted by (src, dst), so both lists come out sorted.
    for (const auto& [u, v] : edges) {
      g.out_targets_[out_pos[u]++] = v;
      g.in_sources_[in_pos[v]++] = u;
    }
    g.build_id_index();
    return g;
  }

  std::size_t num_nodes() const { return n_; }
  std::size_t num_edges() const { return out_targets_.size(); }

  std::span<const NodeId> out_neighbors(NodeId u) const {
    return {out_targets_.data() + out_offsets_[u], out_offsets_[u + 1] - out_offsets_[u]};
  }
  std::span<const NodeId> in_neighbors(NodeId u) const {
    return {in_sources_.data() + in_offsets_[u], in_offsets_[u + 1] - in_offsets_[u]};
  }
  std::size_t out_degree(NodeId u) const { return out_offsets_[u + 1] - out_offsets_[u]; }
  std::size_t in_degree(NodeId u) const { return in_offsets_[u + 1] - in_offsets_[u]; }

  bool has_edge(NodeId u, NodeId v) const {
    auto nb = out_neighbors(u);
    return std::binary_search(nb.begin(), nb.end(), v);
  }

  const std::string& user_id(NodeId u) const { return ids_[u]; }
  const std::vector<std::string>& user_ids() const { return ids_; }
  const NodeAttributes& attributes(NodeId u) const { return attrs_[u]; }

  std::optional<NodeId> index_of(std::string_view user_id) const {
    auto it = std::lower_bound(id_order_.begin(), id_order_.end(), user_id,
                               [&](NodeId a, std::string_view key) { return ids_[a] < key; });
    if (it == id_order_.end() || ids_[*it] != user_id) return std::nullopt;
    return *it;
  }

  /// All edges as (src, dst), sorted.
  std::vector<std::pair<NodeId, NodeId>> edges() const {
    std::vector<std::pair<NodeId, NodeId>> out;
    out.reserve(num_edges());
    for (NodeId u = 0; u < n_; ++u)
      for (NodeId v : out_neighbors(u)) out.emplace_back(u, v);
    return out;
  }

  /// Subgraph induced by `keep` (ascending node ids); nodes are renumbered in
  /// that order.
  SocialGraph induced(std::span<const NodeId> keep) const {
    std::vector<NodeId> remap(n_, static_cast<NodeId>(-1));
    for (std::size_t i = 0; i < keep.size(); ++i) remap[keep[i]] = static_cast<NodeId>(i);
    std::vector<std::pair<NodeId, NodeId>> sub;
    std::vector<std::string> ids;
    std::vector<NodeAttributes> attrs;
    for (NodeId u : keep) {
      ids.push_back(ids_[u]);
      attrs.push_back(attrs_[u]);
      for (NodeId v : out_neighbors(u))
        if (remap[v] != static_cast<NodeId>(-1)) sub.emplace_back(remap[u], remap[v]);
    }
    return from_edges(keep.size(), std::move(sub), std::move(ids), std::move(attrs));
  }

 private:
  void build_id_index() {
    id_order_.resize(n_);
    std::iota(id_order_.begin(), id_order_.end(), 0);
    std::sort(id_order_.begin(), id_order_.end(), [&](NodeId a, NodeId b) { return ids_[a] < ids_[b]; });
  }

  std::size_t n_ = 0;
  std::vector<std::size_t> out_offsets_{0};
  std::vector<NodeId> out_targets_;
  std::vector<std::size_t> in_offsets_{0};
  std::vector<NodeId> in_sources_;
  std::vector<std::string> ids_;
  std::vector<NodeAttributes> attrs_;
  std::vector<NodeId> id_order_;
};

struct GraphBuild {
  SocialGraph graph;
  std::size_t dropped_edges = 0;  // an endpoint was missing or filtered out
};

/// Statuses admitted as graph nodes.
struct StatusFilter {
  bool migrants = true;
  bool natives = true;
  bool admits(Status s) const {
    return (s == Status::Migrant && migrants) || (s == Status::Native && natives);
  }
};

/// Follow graph over users whose status passes `keep`. Node ids follow
/// user_id order.
inline GraphBuild build_graph(const EdgeList& edges, std::span<const UserLabel> labels, StatusFilter keep = {}) {
  std::vector<const UserLabel*> kept;
  for (const auto& l : labels)
    if (keep.admits(l.status)) kept.push_back(&l);
  std::sort(kept.begin(), kept.end(), [](const UserLabel* a, const UserLabel* b) { return a->user_id < b->user_id; });
  kept.erase(std::unique(kept.begin(), kept.end(),
                         [](const UserLabel* a, const UserLabel* b) { return a->user_id == b->user_id; }),
             kept.end());
  if (kept.empty()) throw ValidationError("graph has no nodes: no labeled users pass the status filter");

  std::vector<std::string> ids;
  std::vector<NodeAttributes> attrs;
  for (const auto* l : kept) {
    ids.push_back(l->user_id);
    attrs.push_back({l->status, l->nationality, l->residence});
  }
  auto lookup = [&](const std::string& id) -> std::optional<NodeId> {
    auto it = std::lower_bound(ids.begin(), ids.end(), id);
    if (it == ids.end() || *it != id) return std::nullopt;
    return static_cast<NodeId>(it - ids.begin());
  };
  GraphBuild out;
  std::vector<std::pair<NodeId, NodeId>> pairs;
  for (const auto& e : edges) {
    auto u = lookup(e.src);
    auto v = lookup(e.dst);
    if (!u || !v) {
      ++out.dropped_edges;
      continue;
    }
    pairs.emplace_back(*u, *v);
  }
  const std::size_t n = ids.size();
  out.graph = SocialGraph::from_edges(n, std::move(pairs), std::move(ids), std::move(attrs));
  return out;
}

/// Weakly connected component label per node, numbered in order of each
/// component's smallest node id.
inline std::vector<std::uint32_t> weak_components(const SocialGraph& g) {
  constexpr auto unset = static_cast<std::uint32_t>(-1);
  std::vector<std::uint32_t> comp(g.num_nodes(), unset);
  std::vector<NodeId> stack;
  std::uint32_t next = 0;
  for (NodeId s = 0; s < g.num_nodes(); ++s) {
    if (comp[s] != unset) continue;
    comp[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      NodeId u = stack.back();
      stack.pop_back();
      for (auto nbrs : {g.out_neighbors(u), g.in_neighbors(u)})
        for (NodeId v : nbrs)
          if (comp[v] == unset) {
            comp[v] = next;
            stack.push_back(v);
          }
    }
    ++next;
  }
  return comp;
}

/// Induced subgraph on the largest weakly connected component. Among equally
/// large components the one holding the smallest node id wins.
inline SocialGraph giant_component(const SocialGraph& g) {
  if (g.num_nodes() == 0) throw ValidationError("giant_component of an empty graph");
  auto comp = weak_components(g);
  std::vector<std::size_t> sizes;
  for (auto c : comp) {
    if (c >= sizes.size()) sizes.resize(c + 1, 0);
    ++sizes[c];
  }
  // max_element returns the first maximum, i.e. the lowest-numbered component.
  auto best = static_cast<std::uint32_t>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
  if (sizes[best] == g.num_nodes()) return g;
  std::vector<NodeId> keep;
  for (NodeId u = 0; u < g.num_nodes(); ++u)
    if (comp[u] == best) keep.push_back(u);
  return g.induced(keep);
}

/// Fraction of directed edges whose reverse edge also exists; nullopt with
/// no edges.
inline std::optional<double> reciprocity(const SocialGraph& g) {
  if (g.num_edges() == 0) return std::nullopt;
  std::size_t mutual = 0;
  for (NodeId u = 0; u < g.num_nodes(); ++u)
    for (NodeId v : g.out_neighbors(u))
      if (g.has_edge(v, u)) ++mutual;
  return static_cast<double>(mutual) / static_cast<double>(g.num_edges());
}

inline double average_degree(std::size_t n_nodes, std::size_t n_edges) {
  if (n_nodes == 0) throw ValidationError("average degree of an empty graph");
  return static_cast<double>(n_edges) / static_cast<double>(n_nodes);
}

struct DegreeSequences {
  std::vector<std::size_t> in;
  std::vector<std::size_t> out;
  std::vector<std::size_t> total;
};

inline DegreeSequences degree_sequences(const SocialGraph& g) {
  DegreeSequences d;
  const std::size_t n = g.num_nodes();
  d.in.resize(n);
  d.out.resize(n);
  d.total.resize(n);
  for (NodeId u = 0; u < n; ++u) {
    d.in[u] = g.in_degree(u);
    d.out[u] = g.out_degree(u);
    d.total[u] = d.in[u] + d.out[u];
  }
  return d;
}

}  // namespace mignet
