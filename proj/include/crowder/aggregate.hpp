#pragma once

#include "crowder/crowd_sim.hpp"
#include "crowder/hit.hpp"
#include "crowder/types.hpp"

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace crowder {

struct PairJudgment {
    IdPair pair;
    std::string worker_id;
    bool match = false;

    bool operator==(const PairJudgment&) const = default;
};

/// Pair HIT: answers copied pair by pair. Cluster HIT: a covered pair is a
/// match iff both records carry the same label. Throws ValidationError for a
/// wrong answer count, an unlabeled record, or an answer kind that does not
/// fit the HIT.
std::vector<PairJudgment> extract_judgments(const Assignment& assignment, const Hit& hit);

/// All judgments of a campaign; each assignment is matched to its HIT by id.
std::vector<PairJudgment> extract_all(const std::vector<Assignment>& assignments, const std::vector<Hit>& hits);

struct AggregatedVerdict {
    IdPair pair;
    double posterior = 0.0;
    bool decision = false;  ///< posterior > 0.5

    bool operator==(const AggregatedVerdict&) const = default;
};

/// Posterior descending, then pair ascending.
void rank_verdicts(std::vector<AggregatedVerdict>& verdicts);

/// Fraction of match votes per pair; ties are non-matches.
std::vector<AggregatedVerdict> majority_vote(const std::vector<PairJudgment>& judgments);

struct WorkerConfusion {
    double sensitivity = 0.0;  ///< P(says match | match)
    double specificity = 0.0;  ///< P(says non-match | non-match)
    std::size_t judgments = 0;
};

struct EmConfig {
    std::size_t max_iters = 100;
    double tolerance = 1e-6;
};

struct EmResult {
    std::vector<AggregatedVerdict> verdicts;  ///< ranked
    std::map<std::string, WorkerConfusion> workers;
    double prior = 0.0;  ///< P(match)
    /// Smoothed objective (data log-likelihood plus the log of the add-one
    /// priors) after each iteration; EM never decreases it.
    std::vector<double> objective;
    /// Data log-likelihood alone after each iteration.
    std::vector<double> log_likelihood;
    std::size_t iterations = 0;
    bool converged = false;
};

/// Two-class Dawid-Skene EM with add-one smoothing, initialized from the
/// majority-vote fractions. Throws ValidationError when there are no
/// judgments.
EmResult dawid_skene(const std::vector<PairJudgment>& judgments, const EmConfig& config = {});

void write_verdicts_csv(std::ostream& out, const std::vector<AggregatedVerdict>& verdicts);
std::vector<AggregatedVerdict> read_verdicts_csv(std::istream& in);

}  // namespace crowder
