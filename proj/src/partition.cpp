#include "crowder/two_tiered.hpp"

#include "crowder/errors.hpp"

#include <algorithm>
#include <stdexcept>

namespace crowder {

namespace {

void erase_sorted(std::vector<std::uint32_t>& v, std::uint32_t x)
{
    auto it = std::lower_bound(v.begin(), v.end(), x);
    if (it != v.end() && *it == x)
        v.erase(it);
}

}  // namespace

std::vector<Piece> partition_lcc(const Component& lcc, std::size_t k)
{
    if (k < 2)
        throw ConfigError("cluster size k must be at least 2");
    if (lcc.size() <= k)
        throw std::invalid_argument("partition_lcc: component has " + std::to_string(lcc.size()) +
                                    " vertices, not more than k=" + std::to_string(k));

    // local indices keep the ascending id order of lcc.vertices
    const std::size_t m = lcc.vertices.size();
    auto local = [&](Vertex v) {
        return static_cast<std::uint32_t>(std::lower_bound(lcc.vertices.begin(), lcc.vertices.end(), v) -
                                          lcc.vertices.begin());
    };
    std::vector<std::vector<std::uint32_t>> adj(m);
    for (const auto& e : lcc.edges) {
        adj[local(e.u)].push_back(local(e.v));
        adj[local(e.v)].push_back(local(e.u));
    }
    for (auto& a : adj)
        std::sort(a.begin(), a.end());
    std::size_t remaining = lcc.edges.size();

    std::vector<char> in_scc(m, 0), in_conn(m, 0);
    std::vector<std::uint32_t> indegree(m, 0);
    std::vector<Piece> pieces;

    while (remaining > 0) {
        std::uint32_t seed = 0;
        for (std::uint32_t v = 1; v < m; ++v)
            if (adj[v].size() > adj[seed].size())
                seed = v;

        std::vector<std::uint32_t> scc{seed}, conn, touched{seed};
        in_scc[seed] = 1;
        for (auto w : adj[seed]) {
            in_conn[w] = 1;
            indegree[w] = 1;
            conn.push_back(w);
            touched.push_back(w);
        }

        while (scc.size() < k && !conn.empty()) {
            std::size_t best = 0;
            for (std::size_t i = 1; i < conn.size(); ++i) {
                const auto c = conn[i], b = conn[best];
                const auto out_c = adj[c].size() - indegree[c], out_b = adj[b].size() - indegree[b];
                if (indegree[c] != indegree[b] ? indegree[c] > indegree[b]
                                               : out_c != out_b ? out_c < out_b : c < b)
                    best = i;
            }
            const auto r = conn[best];
            conn.erase(conn.begin() + static_cast<std::ptrdiff_t>(best));
            in_conn[r] = 0;
            in_scc[r] = 1;
            scc.push_back(r);
            for (auto w : adj[r]) {
                if (in_scc[w])
                    continue;
                if (!in_conn[w]) {
                    in_conn[w] = 1;
                    indegree[w] = 0;
                    conn.push_back(w);
                    touched.push_back(w);
                }
                ++indegree[w];
            }
        }

        std::sort(scc.begin(), scc.end());
        Piece piece;
        for (std::size_t i = 0; i < scc.size(); ++i) {
            piece.vertices.push_back(lcc.vertices[scc[i]]);
            for (std::size_t j = i + 1; j < scc.size(); ++j) {
                if (!std::binary_search(adj[scc[i]].begin(), adj[scc[i]].end(), scc[j]))
                    continue;
                piece.covered_edges.push_back({lcc.vertices[scc[i]], lcc.vertices[scc[j]]});
                erase_sorted(adj[scc[i]], scc[j]);
                erase_sorted(adj[scc[j]], scc[i]);
                --remaining;
            }
        }
        pieces.push_back(std::move(piece));

        for (auto v : touched) {
            in_scc[v] = 0;
            in_conn[v] = 0;
            indegree[v] = 0;
        }
    }
    return pieces;
}

}  // namespace crowder
