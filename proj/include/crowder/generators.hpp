#pragma once

#include "crowder/graph.hpp"
#include "crowder/hit.hpp"

#include <cstdint>
#include <vector>

namespace crowder {

/// Chunks pairs (likelihood desc, ids asc) into ceil(|pairs| / k) HITs.
std::vector<PairHit> pair_based(const std::vector<CandidatePair>& pairs, std::size_t k);

/// One element of the vertex/edge sequence built by the clique-cover
/// approximation.
struct CoverElement {
    bool is_edge = false;
    Vertex vertex = 0;  ///< when !is_edge
    Edge edge{};        ///< when is_edge
};

enum class VertexOrder {
    Random,  ///< uniform choice of the next vertex under the seed
    ById,    ///< ascending id, for reproducible traces
};

struct ApproxResult {
    std::vector<ClusterHit> hits;  ///< one per sequence block that holds an edge
    std::uint64_t nominal_count = 0;  ///< ceil(|sequence| / (k-1)), edge-free blocks included
    std::vector<CoverElement> sequence;
};

/// k-clique edge-cover approximation. Phase 1 removes vertices one at a time,
/// appending each vertex and then its remaining incident edges. Phase 2 cuts
/// the sequence into blocks of k-1 elements; the edges of a block touch at
/// most k vertices and become one HIT.
ApproxResult approx_cover(const std::vector<CandidatePair>& pairs, std::size_t k, std::uint64_t seed,
                          VertexOrder order = VertexOrder::Random);

/// Merges randomly ordered remaining pairs into the current HIT; a pair that
/// would push it past k records closes the HIT. Covered pairs are dropped
/// after each HIT.
std::vector<ClusterHit> random_gen(const std::vector<CandidatePair>& pairs, std::size_t k, std::uint64_t seed);

/// Traversal baselines: from the smallest-id vertex that still has uncovered
/// edges, take vertices in BFS (resp. DFS) order over uncovered edges until
/// the HIT holds k records, then remove the edges it covers.
std::vector<ClusterHit> bfs_gen(const std::vector<CandidatePair>& pairs, std::size_t k);
std::vector<ClusterHit> dfs_gen(const std::vector<CandidatePair>& pairs, std::size_t k);

}  // namespace crowder
