#pragma once

#include "crowder/hit.hpp"
#include "crowder/types.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <unordered_set>
#include <variant>
#include <vector>

namespace crowder {

enum class WorkerKind { Diligent, Spammer, Adversarial };

struct WorkerModel {
    std::string id;
    double sensitivity = 1.0;  ///< P(answer match | true match)
    double specificity = 1.0;  ///< P(answer non-match | true non-match)
    WorkerKind kind = WorkerKind::Diligent;

    void validate() const;
};

/// Comma-separated groups `kind:count[:sensitivity:specificity]`, e.g.
/// "diligent:8:0.9:0.95,spammer:2". Kinds: perfect, diligent, spammer
/// (0.5/0.5), adversarial (0/0). Workers are named w1, w2, ... in order.
std::vector<WorkerModel> parse_worker_pool(const std::string& spec);

/// One answer per pair, in HIT order.
using PairAnswers = std::vector<bool>;
/// Record -> entity label (>= 1). Equal labels mean same entity.
using ClusterLabels = std::map<RecordId, std::uint32_t>;
using Answers = std::variant<PairAnswers, ClusterLabels>;

struct Assignment {
    HitId hit_id = 0;
    std::string worker_id;
    Answers answers;
    std::optional<std::string> reason;
    std::uint64_t timestamp = 0;

    bool operator==(const Assignment&) const = default;
};

/// Ground truth plus the set of records it speaks for.
class TruthOracle {
public:
    TruthOracle(const GroundTruth& truth, std::unordered_set<RecordId> records);
    TruthOracle(const GroundTruth& truth, const std::vector<Record>& records);

    bool is_match(const RecordId& a, const RecordId& b) const { return truth_->contains(a, b); }
    void require(const RecordId& id) const;  ///< throws ValidationError for unknown records

private:
    const GroundTruth* truth_;
    std::unordered_set<RecordId> records_;
};

/// One worker's answer to one HIT. Pair HITs: each pair judged independently.
/// Cluster HITs: each covered pair judged, then labels are the connected
/// components of judged-match pairs (numbered by first appearance).
Assignment simulate_assignment(const Hit& hit, const TruthOracle& oracle, const WorkerModel& worker,
                               std::uint64_t seed);

struct PlannedAssignment {
    HitId hit_id = 0;
    std::size_t worker = 0;  ///< index into the pool
};

/// r distinct workers per HIT, round-robin over the pool.
std::vector<PlannedAssignment> replicate(const std::vector<Hit>& hits, std::size_t r, std::size_t pool_size);

struct LabeledPair {
    IdPair pair;
    bool match = false;
};

using QualificationTest = std::array<LabeledPair, 3>;

/// Workers that answer all three test pairs correctly.
std::vector<WorkerModel> qualification_filter(const std::vector<WorkerModel>& pool, const QualificationTest& test,
                                              std::uint64_t seed);

/// Runs the replication plan. Seeds are derived per (hit, worker), so the
/// result does not depend on evaluation order. Timestamps are plan positions.
std::vector<Assignment> simulate_campaign(const std::vector<Hit>& hits, const TruthOracle& oracle,
                                          const std::vector<WorkerModel>& pool, std::size_t r,
                                          std::uint64_t seed);

std::string assignment_to_json(const Assignment& a);
Assignment assignment_from_json(const std::string& line);
void write_assignments_jsonl(std::ostream& out, const std::vector<Assignment>& assignments);
/// Skips lines whose "event" field is present and not "assignment", so a
/// service log can be read directly.
std::vector<Assignment> read_assignments_jsonl(std::istream& in);

}  // namespace crowder
