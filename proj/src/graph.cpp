#include "crowder/graph.hpp"

#include "crowder/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <ostream>

namespace crowder {

PairGraph::PairGraph(const std::vector<CandidatePair>& pairs)
{
    for (const auto& p : pairs) {
        ids_.push_back(p.a);
        ids_.push_back(p.b);
    }
    std::sort(ids_.begin(), ids_.end());
    ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());

    adjacency_.resize(ids_.size());
    for (const auto& p : pairs) {
        if (p.a == p.b)
            throw SchemaError("candidate pair (" + p.a + ", " + p.b + ") is a self pair");
        Vertex a = *find(p.a), b = *find(p.b);
        if (b < a)
            std::swap(a, b);
        edges_.push_back({a, b});
    }
    std::sort(edges_.begin(), edges_.end());
    edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
    for (const auto& e : edges_) {
        adjacency_[e.u].push_back(e.v);
        adjacency_[e.v].push_back(e.u);
    }
    for (auto& adj : adjacency_)
        std::sort(adj.begin(), adj.end());
}

std::optional<Vertex> PairGraph::find(const RecordId& id) const
{
    auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
    if (it == ids_.end() || *it != id)
        return std::nullopt;
    return static_cast<Vertex>(it - ids_.begin());
}

bool PairGraph::has_edge(Vertex a, Vertex b) const
{
    const auto& adj = adjacency_[a];
    return std::binary_search(adj.begin(), adj.end(), b);
}

std::vector<IdPair> PairGraph::pairs_within(std::span<const Vertex> vertices) const
{
    std::vector<Vertex> vs(vertices.begin(), vertices.end());
    std::sort(vs.begin(), vs.end());
    std::vector<IdPair> out;
    for (std::size_t i = 0; i < vs.size(); ++i)
        for (std::size_t j = i + 1; j < vs.size(); ++j)
            if (has_edge(vs[i], vs[j]))
                out.emplace_back(ids_[vs[i]], ids_[vs[j]]);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<IdPair> PairGraph::pairs_within(std::span<const RecordId> records) const
{
    std::vector<Vertex> vs;
    for (const auto& r : records)
        if (auto v = find(r))
            vs.push_back(*v);
    return pairs_within(std::span<const Vertex>(vs));
}

std::vector<Component> connected_components(const PairGraph& g)
{
    const std::size_t n = g.vertex_count();
    std::vector<std::int64_t> label(n, -1);
    std::vector<Component> comps;

    std::vector<Vertex> stack;
    for (Vertex s = 0; s < n; ++s) {
        if (label[s] >= 0)
            continue;
        const auto c = static_cast<std::int64_t>(comps.size());
        comps.emplace_back();
        label[s] = c;
        stack.push_back(s);
        while (!stack.empty()) {
            Vertex v = stack.back();
            stack.pop_back();
            comps.back().vertices.push_back(v);
            for (Vertex w : g.neighbors(v))
                if (label[w] < 0) {
                    label[w] = c;
                    stack.push_back(w);
                }
        }
        std::sort(comps.back().vertices.begin(), comps.back().vertices.end());
    }
    // edges() is sorted, so per-component edge lists come out sorted too
    for (const auto& e : g.edges())
        comps[static_cast<std::size_t>(label[e.u])].edges.push_back(e);
    return comps;
}

Classified classify(std::vector<Component> components, std::size_t k)
{
    if (k < 2)
        throw ConfigError("cluster size k must be at least 2 (a HIT must hold one pair)");
    Classified out;
    for (auto& c : components) {
        if (c.size() <= k) {
            c.kind = ComponentKind::Small;
            out.small.push_back(std::move(c));
        } else {
            c.kind = ComponentKind::Large;
            out.large.push_back(std::move(c));
        }
    }
    return out;
}

void write_edges_jsonl(std::ostream& out, const PairGraph& g)
{
    for (const auto& e : g.edges())
        out << nlohmann::json{{"a", g.id(e.u)}, {"b", g.id(e.v)}}.dump() << '\n';
}

}  // namespace crowder
