#pragma once

#include "crowder/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <variant>
#include <vector>

namespace crowder {

using HitId = std::uint32_t;

/// Up to k pairs verified independently.
struct PairHit {
    HitId id = 0;
    std::vector<CandidatePair> pairs;
};

/// Up to k records labeled jointly; covered_pairs are the candidate pairs with
/// both endpoints among the records.
struct ClusterHit {
    HitId id = 0;
    std::vector<RecordId> records;
    std::vector<IdPair> covered_pairs;
};

using Hit = std::variant<PairHit, ClusterHit>;

HitId hit_id(const Hit& h);
bool is_cluster(const Hit& h);

/// Renumbers ids 1..n in list order.
std::vector<Hit> to_hits(std::vector<PairHit> hits);
std::vector<Hit> to_hits(std::vector<ClusterHit> hits);

void write_hits_jsonl(std::ostream& out, const std::vector<Hit>& hits);
std::vector<Hit> read_hits_jsonl(std::istream& in);

}  // namespace crowder
