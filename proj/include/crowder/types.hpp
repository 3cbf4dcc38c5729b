#pragma once

#include <compare>
#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace crowder {

using RecordId = std::string;

/// Sorted, duplicate-free list of lowercase alphanumeric tokens.
using TokenSet = std::vector<std::string>;

enum class Source { A, B, Single };

struct Record {
    RecordId id;
    Source source = Source::Single;
    std::vector<std::pair<std::string, std::string>> attributes;
    TokenSet tokens;

    /// Value of the named attribute, or nullptr.
    const std::string* attribute(const std::string& name) const;
};

/// Unordered record pair stored canonically (a < b).
struct IdPair {
    RecordId a;
    RecordId b;

    IdPair() = default;
    IdPair(RecordId x, RecordId y);

    auto operator<=>(const IdPair&) const = default;
    bool operator==(const IdPair&) const = default;
};

struct CandidatePair {
    RecordId a;
    RecordId b;
    double likelihood = 0.0;

    IdPair ids() const { return IdPair{a, b}; }
    bool operator==(const CandidatePair&) const = default;
};

struct GroundTruth {
    std::set<IdPair> matches;

    bool contains(const IdPair& p) const { return matches.count(p) != 0; }
    bool contains(const RecordId& x, const RecordId& y) const { return contains(IdPair{x, y}); }
    std::size_t size() const { return matches.size(); }
    bool empty() const { return matches.empty(); }
};

enum class JoinMode { Self, Cross };

JoinMode parse_join_mode(const std::string& s);
std::string to_string(JoinMode m);

}  // namespace crowder
