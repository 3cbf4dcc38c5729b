#pragma once

#include "crowder/types.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace crowder {

/// |a ∩ b| / |a ∪ b| over sorted token sets; 0 when both are empty.
double jaccard(const TokenSet& a, const TokenSet& b);

struct PruneConfig {
    double threshold = 0.0;  ///< inclusive: pairs with likelihood >= threshold survive
    JoinMode mode = JoinMode::Self;
    std::vector<std::string> attributes;  ///< attributes feeding the token sets; empty = all
    unsigned threads = 0;                 ///< 0 = hardware concurrency

    void validate() const;
};

/// All-pairs Jaccard with threshold pruning. Output sorted by likelihood
/// descending, then (a, b) ascending; identical for any thread count.
std::vector<CandidatePair> generate_candidates(const std::vector<Record>& records, const PruneConfig& cfg);

void sort_candidates(std::vector<CandidatePair>& pairs);

struct PruneRow {
    double threshold = 0.0;
    std::uint64_t pairs = 0;
    std::uint64_t matches = 0;
    double recall = 0.0;
};

/// Survivor counts for each threshold, computed from pairs generated at the
/// lowest threshold of interest.
std::vector<PruneRow> prune_report(const std::vector<CandidatePair>& pairs, const GroundTruth& truth,
                                   const std::vector<double>& thresholds);

void write_prune_report(std::ostream& out, const std::vector<PruneRow>& rows);

void write_pairs_jsonl(std::ostream& out, const std::vector<CandidatePair>& pairs);
std::vector<CandidatePair> read_pairs_jsonl(std::istream& in);

}  // namespace crowder
