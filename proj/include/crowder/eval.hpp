#pragma once

#include "crowder/hit.hpp"
#include "crowder/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace crowder {

struct PRPoint {
    std::size_t n = 0;
    std::size_t true_positives = 0;
    double precision = 0.0;
    double recall = 0.0;
};

/// Precision and recall of the top-n prefix of a ranked list for each
/// cutoff. Cutoffs of 0 or beyond the list are omitted; an empty cutoff list
/// means every n from 1 to the list length. Throws ValidationError when the
/// truth is empty.
std::vector<PRPoint> precision_recall(const std::vector<IdPair>& ranked, const GroundTruth& truth,
                                      const std::vector<std::size_t>& cutoffs = {});

void write_pr_curve(std::ostream& out, const std::vector<PRPoint>& points);

enum class GeneratorKind { TwoTiered, Approx, Random, Bfs, Dfs, Pair };

GeneratorKind parse_generator(const std::string& name);
std::string to_string(GeneratorKind g);
const std::vector<GeneratorKind>& all_generators();
bool is_seeded(GeneratorKind g);

struct GeneratedHits {
    std::vector<Hit> hits;
    /// hits.size(), except for the approximation where edge-free blocks count.
    std::uint64_t nominal_count = 0;
};

GeneratedHits run_generator(GeneratorKind g, const std::vector<CandidatePair>& pairs, std::size_t k,
                            std::uint64_t seed);

/// Comparisons a worker needs for a cluster HIT whose entities follow the
/// ground truth, identified in order of first appearance among its records.
/// A pair HIT costs one comparison per pair.
std::uint64_t comparison_estimate(const Hit& hit, const GroundTruth& truth);

struct BenchRow {
    std::string generator;
    double threshold = 0.0;
    std::size_t k = 0;
    std::uint64_t hits = 0;     ///< nominal count
    std::uint64_t emitted = 0;  ///< HITs actually produced
    std::uint64_t covered_pairs = 0;
    std::uint64_t comparisons = 0;
    std::optional<std::uint64_t> seed;  ///< set for seeded generators
    std::string error;                  ///< nonempty if the run failed
};

struct BenchConfig {
    std::vector<GeneratorKind> generators = all_generators();
    std::vector<double> thresholds;
    std::vector<std::size_t> cluster_sizes;
    std::vector<std::uint64_t> seeds{1};
};

/// pairs are filtered to likelihood >= each threshold. A failing run yields a
/// row with the error text instead of aborting the sweep.
std::vector<BenchRow> bench_generators(const std::vector<CandidatePair>& pairs, const GroundTruth& truth,
                                       const BenchConfig& config);

/// generator,threshold,k,hits,comparisons,seed,emitted,covered_pairs,error
void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows);

}  // namespace crowder
