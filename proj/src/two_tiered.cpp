#include "crowder/two_tiered.hpp"

#include "crowder/errors.hpp"

#include <algorithm>

namespace crowder {

TwoTieredResult two_tiered_detailed(const std::vector<CandidatePair>& pairs, std::size_t k,
                                    const PackingOptions& options)
{
    if (k < 2)
        throw ConfigError("cluster size k must be at least 2");
    TwoTieredResult result;
    const PairGraph g(pairs);
    if (g.edge_count() == 0)
        return result;

    auto classified = classify(connected_components(g), k);
    for (auto& scc : classified.small)
        result.items.push_back(std::move(scc.vertices));
    for (const auto& lcc : classified.large)
        for (auto& piece : partition_lcc(lcc, k))
            result.items.push_back(std::move(piece.vertices));

    std::vector<std::size_t> sizes;
    for (const auto& item : result.items)
        sizes.push_back(item.size());
    result.packing = solve_packing(PackingInstance::from_sizes(sizes, k), options);

    HitId next = 1;
    for (const auto& bin : assign_items(result.packing, sizes)) {
        std::vector<Vertex> vs;
        for (auto i : bin)
            vs.insert(vs.end(), result.items[i].begin(), result.items[i].end());
        std::sort(vs.begin(), vs.end());
        vs.erase(std::unique(vs.begin(), vs.end()), vs.end());

        ClusterHit hit;
        hit.id = next++;
        for (auto v : vs)
            hit.records.push_back(g.id(v));
        hit.covered_pairs = g.pairs_within(std::span<const Vertex>(vs));
        result.hits.push_back(std::move(hit));
    }
    return result;
}

std::vector<ClusterHit> two_tiered(const std::vector<CandidatePair>& pairs, std::size_t k)
{
    return two_tiered_detailed(pairs, k).hits;
}

}  // namespace crowder
