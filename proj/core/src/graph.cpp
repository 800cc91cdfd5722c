#include "ssfp/graph.hpp"

#include <algorithm>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>

#include "ssfp/error.hpp"

namespace ssfp {

Graph::Graph(int num_vertices, std::vector<Edge> edges, std::vector<int> labels)
    : num_vertices_(num_vertices), edges_(std::move(edges)), labels_(std::move(labels)) {
  if (num_vertices_ < 0) throw ValidationError("negative vertex count", "graph.num_vertices");
  std::set<std::pair<int, int>> seen;
  for (size_t i = 0; i < edges_.size(); ++i) {
    const Edge& e = edges_[i];
    const std::string where = "graph.edges[" + std::to_string(i) + "]";
    if (e.u == e.v) throw ValidationError("self-loop", where);
    if (e.u > e.v) throw ValidationError("edge endpoints must satisfy u < v", where);
    if (e.u < 1 || e.v > num_vertices_) throw ValidationError("vertex out of range", where);
    if (!seen.emplace(e.u, e.v).second) throw ValidationError("duplicate edge", where);
  }

  if (labels_.empty()) {
    labels_.resize(static_cast<size_t>(num_vertices_));
    for (int v = 1; v <= num_vertices_; ++v) labels_[static_cast<size_t>(v - 1)] = v;
  } else {
    if (static_cast<int>(labels_.size()) != num_vertices_)
      throw ValidationError("label count differs from vertex count", "graph.labels");
    std::set<int> unique(labels_.begin(), labels_.end());
    if (unique.size() != labels_.size()) throw ValidationError("duplicate label", "graph.labels");
    if (*unique.begin() < 1) throw ValidationError("labels must be positive", "graph.labels");
  }

  std::vector<int> degree(static_cast<size_t>(num_vertices_), 0);
  for (const Edge& e : edges_) {
    ++degree[static_cast<size_t>(e.u - 1)];
    ++degree[static_cast<size_t>(e.v - 1)];
  }
  incident_offsets_.assign(static_cast<size_t>(num_vertices_) + 1, 0);
  for (int v = 0; v < num_vertices_; ++v)
    incident_offsets_[static_cast<size_t>(v) + 1] = incident_offsets_[static_cast<size_t>(v)] + degree[static_cast<size_t>(v)];

  incident_.resize(2 * edges_.size());
  in_arcs_.resize(2 * edges_.size());
  out_arcs_.resize(2 * edges_.size());
  std::vector<int> fill(incident_offsets_.begin(), incident_offsets_.end() - 1);
  for (EdgeId id = 0; id < num_edges(); ++id) {
    const Edge& e = edges_[static_cast<size_t>(id)];
    // Edge ids are visited ascending, so every adjacency list comes out sorted.
    for (Vertex w : {e.u, e.v}) {
      const auto slot = static_cast<size_t>(fill[static_cast<size_t>(w - 1)]++);
      incident_[slot] = id;
      const ArcId forward = 2 * id;
      const bool tail_is_w = (w == e.u);
      out_arcs_[slot] = tail_is_w ? forward : forward + 1;
      in_arcs_[slot] = tail_is_w ? forward + 1 : forward;
    }
  }
}

std::span<const EdgeId> Graph::incident(Vertex v) const {
  const auto b = static_cast<size_t>(incident_offsets_.at(static_cast<size_t>(v - 1)));
  const auto e = static_cast<size_t>(incident_offsets_.at(static_cast<size_t>(v)));
  return std::span<const EdgeId>(incident_).subspan(b, e - b);
}

std::span<const ArcId> Graph::in_arcs(Vertex v) const {
  const auto b = static_cast<size_t>(incident_offsets_.at(static_cast<size_t>(v - 1)));
  const auto e = static_cast<size_t>(incident_offsets_.at(static_cast<size_t>(v)));
  return std::span<const ArcId>(in_arcs_).subspan(b, e - b);
}

std::span<const ArcId> Graph::out_arcs(Vertex v) const {
  const auto b = static_cast<size_t>(incident_offsets_.at(static_cast<size_t>(v - 1)));
  const auto e = static_cast<size_t>(incident_offsets_.at(static_cast<size_t>(v)));
  return std::span<const ArcId>(out_arcs_).subspan(b, e - b);
}

std::optional<EdgeId> Graph::find_edge(Vertex a, Vertex b) const {
  if (!has_vertex(a) || !has_vertex(b) || a == b) return std::nullopt;
  const Vertex lo = std::min(a, b);
  const Vertex hi = std::max(a, b);
  for (EdgeId id : incident(lo)) {
    if (edges_[static_cast<size_t>(id)].v == hi) return id;
  }
  return std::nullopt;
}

bool Graph::has_custom_labels() const noexcept {
  for (size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] != static_cast<int>(i) + 1) return true;
  }
  return false;
}

std::optional<Vertex> Graph::vertex_with_label(int label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) return std::nullopt;
  return static_cast<Vertex>(it - labels_.begin()) + 1;
}

}  // namespace ssfp
