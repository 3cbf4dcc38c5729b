#include "crowder/errors.hpp"
#include "crowder/generators.hpp"
#include "crowder/two_tiered.hpp"

#include "../support/oracles.hpp"
#include "fixtures.hpp"

#include <doctest.h>

#include <set>

using namespace crowder;

namespace {

template <class H>
std::vector<Hit> as_hits(const std::vector<H>& hs)
{
    return std::vector<Hit>(hs.begin(), hs.end());
}

using Names = std::set<std::string>;

}  // namespace

TEST_CASE("pair-based HITs")
{
    const auto pairs = table1_pairs();
    auto hits = pair_based(pairs, 2);
    CHECK(hits.size() == 5);
    CHECK(oracle::check_cover(pairs, as_hits(hits), 2).empty());
    CHECK(pair_based({}, 3).empty());
    CHECK(pair_based(pairs, 3).size() == 4);
    CHECK(pair_based(pairs, 3).back().pairs.size() == 1);
    CHECK_THROWS_AS(pair_based(pairs, 0), ConfigError);

    std::vector<CandidatePair> many;
    for (int i = 0; i < 8315; ++i)
        many.push_back({"a" + std::to_string(i), "b" + std::to_string(i), 0.5});
    CHECK(pair_based(many, 20).size() == 416);
}

TEST_CASE("approximation on the product table")
{
    const auto pairs = table1_pairs();
    for (auto order : {VertexOrder::ById, VertexOrder::Random}) {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            auto r = approx_cover(pairs, 4, seed, order);
            CHECK(r.sequence.size() == 19);
            CHECK(r.nominal_count == 7);
            CHECK(oracle::check_cover(pairs, as_hits(r.hits), 4).empty());
        }
    }
}

TEST_CASE("approximation of a single edge")
{
    auto r = approx_cover(pairs_of({{"a", "b"}}), 2, 1, VertexOrder::ById);
    CHECK(r.sequence.size() == 3);
    CHECK(r.nominal_count == 3);
    REQUIRE(r.hits.size() == 1);
    CHECK(r.hits[0].records == std::vector<std::string>{"a", "b"});

    auto empty = approx_cover({}, 4, 1);
    CHECK(empty.hits.empty());
    CHECK(empty.nominal_count == 0);
}

TEST_CASE("approximation sequence holds every vertex and edge once")
{
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const std::size_t k = 2 + seed % 8;
        const auto pairs = oracle::random_graph(50, 60, seed);
        auto r = approx_cover(pairs, k, seed);
        PairGraph g(pairs);
        std::set<Vertex> vs;
        std::set<Edge> es;
        std::set<Vertex> removed;
        for (const auto& el : r.sequence) {
            if (el.is_edge) {
                CHECK(es.insert(el.edge).second);
                // an edge follows the removal of one of its endpoints
                CHECK((removed.count(el.edge.u) || removed.count(el.edge.v)));
            } else {
                CHECK(vs.insert(el.vertex).second);
                removed.insert(el.vertex);
            }
        }
        CHECK(vs.size() == g.vertex_count());
        CHECK(es.size() == g.edge_count());
        CHECK(r.nominal_count == (r.sequence.size() + k - 2) / (k - 1));
        for (std::size_t b = 0; b < r.sequence.size(); b += k - 1) {
            std::set<Vertex> touched;
            for (std::size_t i = b; i < std::min(b + k - 1, r.sequence.size()); ++i)
                if (r.sequence[i].is_edge) {
                    touched.insert(r.sequence[i].edge.u);
                    touched.insert(r.sequence[i].edge.v);
                }
            CHECK(touched.size() <= k);
        }
        CHECK(oracle::check_cover(pairs, as_hits(r.hits), k).empty());
    }
}

TEST_CASE("traversal baselines on a path")
{
    const auto path = pairs_of({{"v1", "v2"}, {"v2", "v3"}, {"v3", "v4"}, {"v4", "v5"}});
    for (auto hits : {bfs_gen(path, 3), dfs_gen(path, 3)}) {
        REQUIRE(hits.size() == 2);
        CHECK(hits[0].records == std::vector<std::string>{"v1", "v2", "v3"});
        CHECK(hits[1].records == std::vector<std::string>{"v3", "v4", "v5"});
    }
}

TEST_CASE("bfs and dfs differ on a branching graph")
{
    // a has children b and c; b has child d
    const auto g = pairs_of({{"a", "b"}, {"a", "c"}, {"b", "d"}});
    auto bfs = bfs_gen(g, 3);
    auto dfs = dfs_gen(g, 3);
    CHECK(Names(bfs[0].records.begin(), bfs[0].records.end()) == Names{"a", "b", "c"});
    CHECK(Names(dfs[0].records.begin(), dfs[0].records.end()) == Names{"a", "b", "d"});
}

TEST_CASE("complete graph fits in one HIT")
{
    std::vector<CandidatePair> k4;
    for (char a = 'a'; a <= 'd'; ++a)
        for (char b = a + 1; b <= 'd'; ++b)
            k4.push_back({std::string(1, a), std::string(1, b), 1.0});
    CHECK(bfs_gen(k4, 4).size() == 1);
    CHECK(dfs_gen(k4, 4).size() == 1);
    CHECK(random_gen(k4, 4, 3).size() == 1);
    CHECK(two_tiered(k4, 4).size() == 1);
}

TEST_CASE("random baseline")
{
    std::vector<CandidatePair> disjoint;
    for (int i = 0; i < 10; ++i)
        disjoint.push_back({"a" + std::to_string(i), "b" + std::to_string(i), 0.5});
    for (std::uint64_t seed = 0; seed < 20; ++seed)
        CHECK(random_gen(disjoint, 4, seed).size() == 5);

    const auto pairs = oracle::random_graph(80, 120, 77);
    auto a = random_gen(pairs, 6, 9), b = random_gen(pairs, 6, 9);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(a[i].records == b[i].records);
}

TEST_CASE("every generator covers random graphs within k")
{
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const std::size_t k = 2 + seed % 10;
        const auto pairs = oracle::random_graph(60, 30 + seed * 3, 900 + seed);
        CHECK(oracle::check_cover(pairs, as_hits(random_gen(pairs, k, seed)), k) == "");
        CHECK(oracle::check_cover(pairs, as_hits(bfs_gen(pairs, k)), k) == "");
        CHECK(oracle::check_cover(pairs, as_hits(dfs_gen(pairs, k)), k) == "");
        CHECK(oracle::check_cover(pairs, as_hits(approx_cover(pairs, k, seed).hits), k) == "");
        CHECK(oracle::check_cover(pairs, as_hits(pair_based(pairs, k)), k) == "");
    }
}

TEST_CASE("traversal baselines never beat two-tiered on the product table")
{
    const auto pairs = table1_pairs();
    const auto tt = two_tiered(pairs, 10).size();
    CHECK(tt == 1);
    CHECK(bfs_gen(pairs, 10).size() >= tt);
    CHECK(dfs_gen(pairs, 10).size() >= tt);
    CHECK(bfs_gen(pairs, 10).size() <= 2);
}
