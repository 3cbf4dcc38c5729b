#pragma once

#include "crowder/graph.hpp"
#include "crowder/hit.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace crowder {

/// A small connected piece cut from a large component, with the edges it was
/// the first to cover. Pieces of one component may share vertices.
struct Piece {
    std::vector<Vertex> vertices;  ///< ascending
    std::vector<Edge> covered_edges;
};

/// Top tier. Repeatedly seeds a piece with the max-degree vertex of the
/// remaining (uncovered) edges and grows it by max indegree, then min
/// outdegree, then smallest id, until it holds k vertices or has no
/// connected candidates; its edges are then removed. Stops when every edge of
/// the component is covered.
///
/// Throws ConfigError if k < 2 and std::invalid_argument if the component has
/// at most k vertices.
std::vector<Piece> partition_lcc(const Component& lcc, std::size_t k);

/// c_j = number of items holding exactly j vertices, j = 1..k.
struct PackingInstance {
    std::size_t k = 0;
    std::vector<std::uint64_t> counts;  ///< counts[j-1] = c_j

    static PackingInstance from_sizes(std::span<const std::size_t> sizes, std::size_t k);

    std::uint64_t item_count() const;
    std::uint64_t volume() const;  ///< sum of j * c_j
};

/// How many items of each size share one HIT.
struct Pattern {
    std::vector<std::uint32_t> a;  ///< a[j-1] = number of size-j items

    std::uint64_t load() const;
    bool operator==(const Pattern&) const = default;
};

/// Every nonzero pattern with load <= k and a_j <= c_j (so sizes that do not
/// occur are absent). Ordered by a_k descending, then a_{k-1}, down to a_1.
std::vector<Pattern> enumerate_patterns(const PackingInstance& instance);

struct PackingOptions {
    std::uint64_t node_limit = 5'000'000;
};

struct PackingSolution {
    std::vector<Pattern> patterns;            ///< enumerate_patterns(instance)
    std::vector<std::uint64_t> multiplicity;  ///< x_i per pattern
    std::vector<std::size_t> bins;            ///< pattern index of each HIT, in emission order
    std::uint64_t objective = 0;              ///< sum of x_i == bins.size()
    std::uint64_t lower_bound = 0;
    bool proven_optimal = false;              ///< false only if node_limit was hit
    std::uint64_t nodes = 0;
};

/// Minimum number of size-k bins for the instance. Branch-and-bound over
/// patterns, seeded with first-fit-decreasing and pruned by the
/// Martello-Toth bound.
PackingSolution solve_packing(const PackingInstance& instance, const PackingOptions& options = {});

/// Concrete item -> HIT assignment for a solution: each HIT takes, for each
/// size in its pattern, the earliest unassigned items of that size.
std::vector<std::vector<std::size_t>> assign_items(const PackingSolution& solution,
                                                    std::span<const std::size_t> item_sizes);

struct TwoTieredResult {
    std::vector<ClusterHit> hits;
    std::vector<std::vector<Vertex>> items;  ///< SCCs then LCC pieces, as packed
    PackingSolution packing;
};

TwoTieredResult two_tiered_detailed(const std::vector<CandidatePair>& pairs, std::size_t k,
                                    const PackingOptions& options = {});

/// Cluster-based HITs: every HIT has <= k records and every pair lies inside
/// at least one HIT. Ids are 1..n.
std::vector<ClusterHit> two_tiered(const std::vector<CandidatePair>& pairs, std::size_t k);

}  // namespace crowder
