#include "crowder/comparison_model.hpp"

#include "crowder/errors.hpp"

#include <algorithm>
#include <functional>

namespace crowder {

std::uint64_t EntityPartition::records() const
{
    std::uint64_t n = 0;
    for (auto s : sizes)
        n += s;
    return n;
}

void EntityPartition::validate() const
{
    for (auto s : sizes)
        if (s == 0)
            throw ValidationError("entity sizes must be at least 1");
}

std::uint64_t comparisons_seq(const EntityPartition& p)
{
    p.validate();
    const std::uint64_t n = p.records();
    std::uint64_t total = 0, identified = 0;
    for (auto s : p.sizes) {
        total += n - 1 - identified;
        identified += s;
    }
    return total;
}

std::uint64_t comparisons_closed(const EntityPartition& p)
{
    p.validate();
    const std::uint64_t n = p.records();
    const std::uint64_t m = p.entities();
    if (m == 0)
        return 0;
    std::uint64_t weighted = 0;
    for (std::uint64_t i = 1; i < m; ++i)
        weighted += (m - i) * p.sizes[i - 1];
    return (n - 1) * m - weighted;
}

OrderingExtremes extreme_orderings(std::vector<std::uint32_t> sizes, std::size_t max_entities)
{
    if (sizes.size() > max_entities)
        throw ConfigError("extreme_orderings: " + std::to_string(sizes.size()) +
                          " entities is too many to enumerate; use the size-sorted orders instead");
    EntityPartition probe{sizes};
    probe.validate();

    OrderingExtremes out;
    std::sort(sizes.begin(), sizes.end());
    out.ascending = comparisons_seq({sizes});
    out.descending = comparisons_seq({std::vector<std::uint32_t>(sizes.rbegin(), sizes.rend())});

    bool first = true;
    do {
        const auto c = comparisons_seq({sizes});
        if (first || c < out.min) {
            out.min = c;
            out.min_order = sizes;
        }
        if (first || c > out.max) {
            out.max = c;
            out.max_order = sizes;
        }
        first = false;
    } while (std::next_permutation(sizes.begin(), sizes.end()));
    return out;
}

}  // namespace crowder
