#pragma once

#include "crowder/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace crowder {

struct DatasetStats {
    std::uint64_t record_count = 0;
    std::uint64_t total_pairs = 0;
    std::uint64_t match_count = 0;
};

/// Lowercases ASCII letters and turns every other non-alphanumeric byte into
/// a space. Idempotent.
std::string normalize_text(std::string_view text);

/// Whitespace-split of normalize_text(text) as a sorted set.
TokenSet tokenize(std::string_view text);

/// Builds a Record whose tokens cover every attribute value. Attribute values
/// are kept verbatim for display; only the token set is normalized.
Record normalize_record(RecordId id, Source source,
                        std::vector<std::pair<std::string, std::string>> attributes);

/// Token set over a subset of attributes (all of them when names is empty).
TokenSet tokens_of(const Record& r, const std::vector<std::string>& names);

/// Reads a records CSV. Required column `id`; in cross mode also `source` with
/// exactly two distinct values (the first one seen becomes Source::A).
std::vector<Record> load_records(const std::string& path, JoinMode mode);
std::vector<Record> parse_records(std::istream& in, JoinMode mode);

/// Reads `id_a,id_b` rows. Self pairs are rejected.
GroundTruth load_truth(const std::string& path);

/// Throws SchemaError if a truth id is missing from the records.
void validate_truth(const GroundTruth& truth, const std::vector<Record>& records);

DatasetStats compute_stats(const std::vector<Record>& records, JoinMode mode,
                           const GroundTruth* truth = nullptr);

void write_records(std::ostream& out, const std::vector<Record>& records, bool with_source);
void write_truth(std::ostream& out, const GroundTruth& truth);

struct DupDataset {
    std::vector<Record> records;
    GroundTruth truth;
    std::size_t unchanged_duplicates = 0;  ///< copies of records with < 2 name tokens
};

/// Emits each base record followed by x ~ U{0..max_dups} copies whose name has
/// two distinct token positions swapped. Ground truth holds every pair inside
/// each (base + copies) group.
DupDataset synthesize_dup_dataset(const std::vector<Record>& base, unsigned max_dups,
                                  std::uint64_t seed,
                                  const std::string& name_attribute = "name");

}  // namespace crowder
