#include "crowder/generators.hpp"

#include "crowder/errors.hpp"
#include "crowder/rng.hpp"
#include "crowder/similarity.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>
#include <unordered_map>

namespace crowder {

namespace {

void require_cluster_k(std::size_t k)
{
    if (k < 2)
        throw ConfigError("cluster size k must be at least 2");
}

ClusterHit make_hit(const PairGraph& g, std::vector<Vertex> vs, HitId id)
{
    std::sort(vs.begin(), vs.end());
    vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
    ClusterHit hit;
    hit.id = id;
    for (auto v : vs)
        hit.records.push_back(g.id(v));
    hit.covered_pairs = g.pairs_within(std::span<const Vertex>(vs));
    return hit;
}

/// Mutable copy of the adjacency for algorithms that delete covered edges.
class RemainingGraph {
public:
    explicit RemainingGraph(const PairGraph& g) : adj_(g.vertex_count()), edges_(g.edge_count())
    {
        for (Vertex v = 0; v < g.vertex_count(); ++v)
            adj_[v] = g.neighbors(v);
    }

    const std::vector<Vertex>& neighbors(Vertex v) const { return adj_[v]; }
    std::size_t edge_count() const { return edges_; }

    /// Removes every remaining edge inside vs.
    void remove_within(std::vector<Vertex> vs)
    {
        std::sort(vs.begin(), vs.end());
        std::size_t endpoints = 0;
        for (auto v : vs) {
            auto& a = adj_[v];
            const auto before = a.size();
            a.erase(std::remove_if(a.begin(), a.end(),
                                   [&](Vertex w) { return std::binary_search(vs.begin(), vs.end(), w); }),
                    a.end());
            endpoints += before - a.size();
        }
        // each removed edge was counted at both endpoints
        edges_ -= endpoints / 2;
    }

private:
    std::vector<std::vector<Vertex>> adj_;
    std::size_t edges_;
};

template <typename Traverse>
std::vector<ClusterHit> traversal_gen(const std::vector<CandidatePair>& pairs, std::size_t k, Traverse traverse)
{
    require_cluster_k(k);
    const PairGraph g(pairs);
    RemainingGraph rem(g);
    std::vector<ClusterHit> hits;
    Vertex start = 0;
    while (rem.edge_count() > 0) {
        while (rem.neighbors(start).empty())
            ++start;
        std::vector<Vertex> members = traverse(rem, start, k);
        rem.remove_within(members);
        hits.push_back(make_hit(g, std::move(members), static_cast<HitId>(hits.size() + 1)));
    }
    return hits;
}

}  // namespace

std::vector<PairHit> pair_based(const std::vector<CandidatePair>& pairs, std::size_t k)
{
    if (k < 1)
        throw ConfigError("pair HIT size k must be at least 1");
    std::vector<CandidatePair> sorted = pairs;
    sort_candidates(sorted);
    std::vector<PairHit> hits;
    for (std::size_t i = 0; i < sorted.size(); i += k) {
        PairHit h;
        h.id = static_cast<HitId>(hits.size() + 1);
        h.pairs.assign(sorted.begin() + static_cast<std::ptrdiff_t>(i),
                       sorted.begin() + static_cast<std::ptrdiff_t>(std::min(sorted.size(), i + k)));
        hits.push_back(std::move(h));
    }
    return hits;
}

ApproxResult approx_cover(const std::vector<CandidatePair>& pairs, std::size_t k, std::uint64_t seed,
                          VertexOrder order)
{
    require_cluster_k(k);
    const PairGraph g(pairs);
    const std::size_t n = g.vertex_count();

    std::vector<Vertex> vertex_order(n);
    for (Vertex v = 0; v < n; ++v)
        vertex_order[v] = v;
    if (order == VertexOrder::Random) {
        Rng rng(seed);
        for (std::size_t i = n; i > 1; --i)
            std::swap(vertex_order[i - 1], vertex_order[rng.below(i)]);
    }

    ApproxResult result;
    std::vector<char> removed(n, 0);
    for (Vertex v : vertex_order) {
        result.sequence.push_back({false, v, {}});
        for (Vertex w : g.neighbors(v))
            if (!removed[w])
                result.sequence.push_back({true, 0, {std::min(v, w), std::max(v, w)}});
        removed[v] = 1;
    }

    const std::size_t block = k - 1;
    result.nominal_count = (result.sequence.size() + block - 1) / block;
    for (std::size_t start = 0; start < result.sequence.size(); start += block) {
        std::vector<Vertex> vs;
        const std::size_t end = std::min(result.sequence.size(), start + block);
        for (std::size_t i = start; i < end; ++i)
            if (result.sequence[i].is_edge) {
                vs.push_back(result.sequence[i].edge.u);
                vs.push_back(result.sequence[i].edge.v);
            }
        if (vs.empty())
            continue;
        std::sort(vs.begin(), vs.end());
        vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
        if (vs.size() > k)
            throw std::logic_error("approx_cover: sequence block touches " + std::to_string(vs.size()) +
                                   " vertices, more than k");
        result.hits.push_back(make_hit(g, std::move(vs), static_cast<HitId>(result.hits.size() + 1)));
    }
    return result;
}

std::vector<ClusterHit> random_gen(const std::vector<CandidatePair>& pairs, std::size_t k, std::uint64_t seed)
{
    require_cluster_k(k);
    const PairGraph g(pairs);
    const auto& edges = g.edges();

    // a single random permutation stands in for repeated uniform draws
    std::vector<std::size_t> order(edges.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = i;
    Rng rng(seed);
    for (std::size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1], order[rng.below(i)]);

    std::unordered_map<std::uint64_t, std::size_t> edge_index;
    for (std::size_t i = 0; i < edges.size(); ++i)
        edge_index.emplace((std::uint64_t{edges[i].u} << 32) | edges[i].v, i);

    std::vector<char> covered(edges.size(), 0);
    std::vector<char> in_hit(g.vertex_count(), 0);
    std::vector<ClusterHit> hits;
    std::size_t head = 0;

    while (true) {
        while (head < order.size() && covered[order[head]])
            ++head;
        if (head == order.size())
            break;

        std::vector<Vertex> members;
        for (std::size_t pos = head; pos < order.size() && members.size() < k; ++pos) {
            const Edge& e = edges[order[pos]];
            if (covered[order[pos]] || (in_hit[e.u] && in_hit[e.v]))
                continue;
            const std::size_t grow = !in_hit[e.u] + !in_hit[e.v];
            if (members.size() + grow > k)
                break;
            for (Vertex v : {e.u, e.v})
                if (!in_hit[v]) {
                    in_hit[v] = 1;
                    members.push_back(v);
                }
        }

        std::sort(members.begin(), members.end());
        for (std::size_t i = 0; i < members.size(); ++i)
            for (std::size_t j = i + 1; j < members.size(); ++j) {
                auto it = edge_index.find((std::uint64_t{members[i]} << 32) | members[j]);
                if (it != edge_index.end())
                    covered[it->second] = 1;
            }
        for (auto v : members)
            in_hit[v] = 0;
        hits.push_back(make_hit(g, std::move(members), static_cast<HitId>(hits.size() + 1)));
    }
    return hits;
}

std::vector<ClusterHit> bfs_gen(const std::vector<CandidatePair>& pairs, std::size_t k)
{
    return traversal_gen(pairs, k, [](const RemainingGraph& rem, Vertex start, std::size_t cap) {
        std::vector<Vertex> members{start};
        std::vector<Vertex> visited{start};
        std::deque<Vertex> queue{start};
        while (!queue.empty() && members.size() < cap) {
            const Vertex v = queue.front();
            queue.pop_front();
            for (Vertex w : rem.neighbors(v)) {
                if (std::find(visited.begin(), visited.end(), w) != visited.end())
                    continue;
                visited.push_back(w);
                members.push_back(w);
                queue.push_back(w);
                if (members.size() == cap)
                    break;
            }
        }
        return members;
    });
}

std::vector<ClusterHit> dfs_gen(const std::vector<CandidatePair>& pairs, std::size_t k)
{
    return traversal_gen(pairs, k, [](const RemainingGraph& rem, Vertex start, std::size_t cap) {
        std::vector<Vertex> members{start};
        std::vector<std::pair<Vertex, std::size_t>> stack{{start, 0}};
        auto seen = [&](Vertex w) { return std::find(members.begin(), members.end(), w) != members.end(); };
        while (!stack.empty() && members.size() < cap) {
            auto& [v, next] = stack.back();
            const auto& nbrs = rem.neighbors(v);
            while (next < nbrs.size() && seen(nbrs[next]))
                ++next;
            if (next == nbrs.size()) {
                stack.pop_back();
                continue;
            }
            const Vertex w = nbrs[next++];
            members.push_back(w);
            stack.push_back({w, 0});
        }
        return members;
    });
}

}  // namespace crowder
