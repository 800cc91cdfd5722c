#pragma once

#include <optional>
#include <span>
#include <vector>

namespace ssfp {

/// Vertices are numbered 1..V. Edge ids are 0-based positions in the edge list.
using Vertex = int;
using EdgeId = int;

/// Arc ids are derived from edge ids: 2e is (u -> v), 2e + 1 is (v -> u).
using ArcId = int;

struct Edge {
  Vertex u = 0;
  Vertex v = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
};

struct Arc {
  Vertex tail = 0;
  Vertex head = 0;
};

/// Undirected simple graph. Every edge is stored once with u < v; the arc set
/// is both orientations of every edge and is never materialised separately.
///
/// Optional vertex labels give each internal vertex an external name (e.g. the
/// room number of a deck plan). Labels must be unique positive integers and
/// default to the identity.
class Graph {
 public:
  Graph() = default;
  Graph(int num_vertices, std::vector<Edge> edges, std::vector<int> labels = {});

  int num_vertices() const noexcept { return num_vertices_; }
  int num_edges() const noexcept { return static_cast<int>(edges_.size()); }
  int num_arcs() const noexcept { return 2 * num_edges(); }

  const Edge& edge(EdgeId e) const { return edges_.at(static_cast<size_t>(e)); }
  std::span<const Edge> edges() const noexcept { return edges_; }

  Arc arc(ArcId a) const {
    const Edge& e = edge(a / 2);
    return (a % 2 == 0) ? Arc{e.u, e.v} : Arc{e.v, e.u};
  }
  static EdgeId edge_of(ArcId a) noexcept { return a / 2; }
  static ArcId reverse(ArcId a) noexcept { return a ^ 1; }

  /// Edge ids incident to v, ascending.
  std::span<const EdgeId> incident(Vertex v) const;
  /// Arc ids entering / leaving v, ascending.
  std::span<const ArcId> in_arcs(Vertex v) const;
  std::span<const ArcId> out_arcs(Vertex v) const;

  std::optional<EdgeId> find_edge(Vertex a, Vertex b) const;

  bool has_vertex(Vertex v) const noexcept { return v >= 1 && v <= num_vertices_; }

  int label(Vertex v) const { return labels_.at(static_cast<size_t>(v - 1)); }
  std::span<const int> labels() const noexcept { return labels_; }
  bool has_custom_labels() const noexcept;
  /// Internal vertex carrying `label`, if any.
  std::optional<Vertex> vertex_with_label(int label) const;

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.num_vertices_ == b.num_vertices_ && a.edges_ == b.edges_ && a.labels_ == b.labels_;
  }

 private:
  int num_vertices_ = 0;
  std::vector<Edge> edges_;
  std::vector<int> labels_;
  // CSR-style adjacency, indexed by vertex - 1.
  std::vector<int> incident_offsets_;
  std::vector<EdgeId> incident_;
  std::vector<ArcId> in_arcs_;
  std::vector<ArcId> out_arcs_;
};

}  // namespace ssfp
