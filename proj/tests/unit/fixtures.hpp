#pragma once

#include "crowder/dataset.hpp"
#include "crowder/similarity.hpp"

#include <string>
#include <vector>

inline std::string data_path(const std::string& name)
{
    return std::string(CROWDER_TEST_DATA) + "/" + name;
}

inline std::vector<crowder::Record> table1_records()
{
    return crowder::load_records(data_path("table1.csv"), crowder::JoinMode::Self);
}

inline crowder::GroundTruth table1_truth()
{
    return crowder::load_truth(data_path("table1_truth.csv"));
}

/// Candidate pairs of the product table at 0.3, similarity on the name.
inline std::vector<crowder::CandidatePair> table1_pairs()
{
    crowder::PruneConfig cfg;
    cfg.threshold = 0.3;
    cfg.attributes = {"name"};
    return crowder::generate_candidates(table1_records(), cfg);
}

inline std::vector<crowder::CandidatePair> pairs_of(std::initializer_list<std::pair<const char*, const char*>> edges)
{
    std::vector<crowder::CandidatePair> out;
    for (const auto& [a, b] : edges) {
        crowder::IdPair p{a, b};
        out.push_back({p.a, p.b, 0.5});
    }
    return out;
}
