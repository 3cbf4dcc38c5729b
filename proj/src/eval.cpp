#include "crowder/eval.hpp"

#include "crowder/comparison_model.hpp"
#include "crowder/csv.hpp"
#include "crowder/errors.hpp"
#include "crowder/generators.hpp"
#include "crowder/two_tiered.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <numeric>
#include <ostream>

namespace crowder {

std::vector<PRPoint> precision_recall(const std::vector<IdPair>& ranked, const GroundTruth& truth,
                                      const std::vector<std::size_t>& cutoffs)
{
    if (truth.empty())
        throw ValidationError("precision_recall: ground truth is empty, recall is undefined");
    std::vector<std::size_t> tp(ranked.size() + 1, 0);
    for (std::size_t i = 0; i < ranked.size(); ++i)
        tp[i + 1] = tp[i] + (truth.contains(ranked[i]) ? 1 : 0);

    std::vector<std::size_t> ns = cutoffs;
    if (ns.empty()) {
        ns.resize(ranked.size());
        std::iota(ns.begin(), ns.end(), std::size_t{1});
    }
    std::vector<PRPoint> out;
    for (auto n : ns) {
        if (n == 0 || n > ranked.size())
            continue;
        out.push_back({n, tp[n], static_cast<double>(tp[n]) / static_cast<double>(n),
                       static_cast<double>(tp[n]) / static_cast<double>(truth.size())});
    }
    return out;
}

void write_pr_curve(std::ostream& out, const std::vector<PRPoint>& points)
{
    out << "n,precision,recall\n";
    char buf[96];
    for (const auto& p : points) {
        std::snprintf(buf, sizeof buf, "%zu,%.6f,%.6f\n", p.n, p.precision, p.recall);
        out << buf;
    }
}

GeneratorKind parse_generator(const std::string& name)
{
    for (auto g : all_generators())
        if (to_string(g) == name)
            return g;
    throw ConfigError("unknown generator '" + name + "' (two-tiered, approx, random, bfs, dfs, pair)");
}

std::string to_string(GeneratorKind g)
{
    switch (g) {
    case GeneratorKind::TwoTiered: return "two-tiered";
    case GeneratorKind::Approx: return "approx";
    case GeneratorKind::Random: return "random";
    case GeneratorKind::Bfs: return "bfs";
    case GeneratorKind::Dfs: return "dfs";
    case GeneratorKind::Pair: return "pair";
    }
    return "?";
}

const std::vector<GeneratorKind>& all_generators()
{
    static const std::vector<GeneratorKind> all{GeneratorKind::TwoTiered, GeneratorKind::Approx,
                                                GeneratorKind::Random,    GeneratorKind::Bfs,
                                                GeneratorKind::Dfs,       GeneratorKind::Pair};
    return all;
}

bool is_seeded(GeneratorKind g)
{
    return g == GeneratorKind::Approx || g == GeneratorKind::Random;
}

GeneratedHits run_generator(GeneratorKind g, const std::vector<CandidatePair>& pairs, std::size_t k,
                            std::uint64_t seed)
{
    GeneratedHits out;
    switch (g) {
    case GeneratorKind::TwoTiered: out.hits = to_hits(two_tiered(pairs, k)); break;
    case GeneratorKind::Approx: {
        auto r = approx_cover(pairs, k, seed);
        out.hits = to_hits(std::move(r.hits));
        out.nominal_count = r.nominal_count;
        return out;
    }
    case GeneratorKind::Random: out.hits = to_hits(random_gen(pairs, k, seed)); break;
    case GeneratorKind::Bfs: out.hits = to_hits(bfs_gen(pairs, k)); break;
    case GeneratorKind::Dfs: out.hits = to_hits(dfs_gen(pairs, k)); break;
    case GeneratorKind::Pair: out.hits = to_hits(pair_based(pairs, k)); break;
    }
    out.nominal_count = out.hits.size();
    return out;
}

std::uint64_t comparison_estimate(const Hit& hit, const GroundTruth& truth)
{
    if (const auto* ph = std::get_if<PairHit>(&hit))
        return ph->pairs.size();
    const auto& recs = std::get<ClusterHit>(hit).records;
    std::vector<std::size_t> parent(recs.size());
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
        while (parent[x] != x)
            x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t i = 0; i < recs.size(); ++i)
        for (std::size_t j = i + 1; j < recs.size(); ++j)
            if (truth.contains(recs[i], recs[j]))
                parent[find(j)] = find(i);

    EntityPartition p;
    std::map<std::size_t, std::size_t> slot;
    for (std::size_t i = 0; i < recs.size(); ++i) {
        auto [it, fresh] = slot.try_emplace(find(i), p.sizes.size());
        if (fresh)
            p.sizes.push_back(0);
        ++p.sizes[it->second];
    }
    return comparisons_seq(p);
}

namespace {

std::uint64_t covered_pairs(const std::vector<Hit>& hits)
{
    std::uint64_t n = 0;
    for (const auto& h : hits) {
        if (const auto* ph = std::get_if<PairHit>(&h))
            n += ph->pairs.size();
        else
            n += std::get<ClusterHit>(h).covered_pairs.size();
    }
    return n;
}

}  // namespace

std::vector<BenchRow> bench_generators(const std::vector<CandidatePair>& pairs, const GroundTruth& truth,
                                       const BenchConfig& config)
{
    std::vector<BenchRow> rows;
    for (double theta : config.thresholds) {
        std::vector<CandidatePair> kept;
        for (const auto& p : pairs)
            if (p.likelihood >= theta)
                kept.push_back(p);
        for (auto k : config.cluster_sizes) {
            for (auto g : config.generators) {
                std::vector<std::optional<std::uint64_t>> seeds;
                if (is_seeded(g))
                    seeds.assign(config.seeds.begin(), config.seeds.end());
                else
                    seeds.push_back(std::nullopt);
                for (const auto& seed : seeds) {
                    BenchRow row;
                    row.generator = to_string(g);
                    row.threshold = theta;
                    row.k = k;
                    row.seed = seed;
                    try {
                        auto gen = run_generator(g, kept, k, seed.value_or(0));
                        row.hits = gen.nominal_count;
                        row.emitted = gen.hits.size();
                        row.covered_pairs = covered_pairs(gen.hits);
                        for (const auto& h : gen.hits)
                            row.comparisons += comparison_estimate(h, truth);
                    } catch (const std::exception& e) {
                        row.error = e.what();
                    }
                    rows.push_back(std::move(row));
                }
            }
        }
    }
    return rows;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows)
{
    out << "generator,threshold,k,hits,comparisons,seed,emitted,covered_pairs,error\n";
    char theta[32];
    for (const auto& r : rows) {
        std::snprintf(theta, sizeof theta, "%g", r.threshold);
        csv::write_row(out, {r.generator, theta, std::to_string(r.k), std::to_string(r.hits),
                             std::to_string(r.comparisons), r.seed ? std::to_string(*r.seed) : "",
                             std::to_string(r.emitted), std::to_string(r.covered_pairs), r.error});
    }
}

}  // namespace crowder
