#pragma once

#include "crowder/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace crowder {

/// Dense vertex index. Indices follow record-id order, so comparing indices
/// compares ids.
using Vertex = std::uint32_t;

struct Edge {
    Vertex u = 0;  ///< u < v
    Vertex v = 0;

    auto operator<=>(const Edge&) const = default;
};

/// Undirected simple graph over the records named by a candidate-pair list.
class PairGraph {
public:
    PairGraph() = default;
    explicit PairGraph(const std::vector<CandidatePair>& pairs);

    std::size_t vertex_count() const { return ids_.size(); }
    std::size_t edge_count() const { return edges_.size(); }

    const RecordId& id(Vertex v) const { return ids_[v]; }
    std::optional<Vertex> find(const RecordId& id) const;

    /// Sorted neighbor list.
    const std::vector<Vertex>& neighbors(Vertex v) const { return adjacency_[v]; }
    std::size_t degree(Vertex v) const { return adjacency_[v].size(); }
    bool has_edge(Vertex a, Vertex b) const;

    /// Sorted edge list.
    const std::vector<Edge>& edges() const { return edges_; }

    IdPair pair_of(const Edge& e) const { return IdPair{ids_[e.u], ids_[e.v]}; }

    /// Every graph edge with both endpoints among the given records.
    std::vector<IdPair> pairs_within(std::span<const RecordId> records) const;
    std::vector<IdPair> pairs_within(std::span<const Vertex> vertices) const;

private:
    std::vector<RecordId> ids_;
    std::vector<std::vector<Vertex>> adjacency_;
    std::vector<Edge> edges_;
};

enum class ComponentKind { Small, Large };

struct Component {
    std::vector<Vertex> vertices;  ///< ascending
    std::vector<Edge> edges;       ///< ascending
    ComponentKind kind = ComponentKind::Small;

    std::size_t size() const { return vertices.size(); }
};

/// Maximal connected vertex sets with their induced edges, ordered by
/// smallest vertex id.
std::vector<Component> connected_components(const PairGraph& g);

struct Classified {
    std::vector<Component> small;  ///< at most k vertices
    std::vector<Component> large;  ///< more than k vertices
};

/// Throws ConfigError when k < 2.
Classified classify(std::vector<Component> components, std::size_t k);

void write_edges_jsonl(std::ostream& out, const PairGraph& g);

}  // namespace crowder
