#pragma once

#include <cstdint>
#include <vector>

namespace crowder {

/// Entity sizes of one cluster HIT, in the order a worker identifies them.
struct EntityPartition {
    std::vector<std::uint32_t> sizes;

    std::uint64_t records() const;
    std::size_t entities() const { return sizes.size(); }
    void validate() const;  ///< every size >= 1
};

/// Sum over entities of (n - 1 - records already identified).
std::uint64_t comparisons_seq(const EntityPartition& p);

/// Closed form: (n - 1) * m - sum_{i<m} (m - i) * |e_i|.
std::uint64_t comparisons_closed(const EntityPartition& p);

struct OrderingExtremes {
    std::uint64_t min = 0;
    std::uint64_t max = 0;
    std::vector<std::uint32_t> min_order;
    std::vector<std::uint32_t> max_order;
    std::uint64_t ascending = 0;   ///< value with sizes sorted small to large
    std::uint64_t descending = 0;  ///< value with sizes sorted large to small
};

/// Exact min/max of comparisons_seq over every identification order. Throws
/// ConfigError above max_entities (m! orders); use the sorted-order values
/// instead.
OrderingExtremes extreme_orderings(std::vector<std::uint32_t> sizes, std::size_t max_entities = 10);

}  // namespace crowder
