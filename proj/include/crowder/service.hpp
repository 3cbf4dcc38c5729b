#pragma once

#include "crowder/crowd_sim.hpp"
#include "crowder/errors.hpp"
#include "crowder/hit.hpp"
#include "crowder/types.hpp"

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace crowder {

/// (hit, worker) already holds a different answer, or the HIT is closed.
class ConflictError : public Error {
public:
    using Error::Error;
};

/// Worker has not passed the qualification test.
class ForbiddenError : public Error {
public:
    using Error::Error;
};

class NotFoundError : public Error {
public:
    using Error::Error;
};

struct CampaignConfig {
    std::size_t replicas = 3;
    std::optional<QualificationTest> qualification;  ///< gate disabled when empty
    bool sync_writes = true;                         ///< fsync after each append
};

struct CampaignState {
    /// Workers per HIT, in submission order.
    std::map<HitId, std::vector<std::string>> workers;
    std::map<std::pair<HitId, std::string>, Assignment> submissions;
    /// Worker -> passed. The first recorded attempt is final.
    std::map<std::string, bool> roster;

    bool operator==(const CampaignState&) const = default;
};

struct HitProgress {
    HitId id = 0;
    std::size_t completed = 0;
    bool closed = false;
};

struct Progress {
    std::size_t open = 0;
    std::size_t closed = 0;
    std::size_t assignments = 0;
    std::size_t replicas = 0;
    std::vector<HitProgress> hits;
};

enum class SubmitOutcome { Accepted, Duplicate };

/// HIT queue backed by an append-only JSON Lines log. The state is a fold
/// over the log, so a restart reconstructs it exactly. All mutations hold one
/// mutex and are logged before they take effect.
class Campaign {
public:
    /// Replays log_path if it exists; a torn final line (no newline, or not
    /// valid JSON) is cut off.
    Campaign(std::vector<Hit> hits, CampaignConfig config, std::filesystem::path log_path);
    ~Campaign();

    Campaign(const Campaign&) = delete;
    Campaign& operator=(const Campaign&) = delete;

    /// Open HIT the worker has not answered, fewest completions first, then
    /// lowest id. Throws ForbiddenError when the worker is not qualified.
    std::optional<Hit> next_hit(const std::string& worker_id) const;
    const Hit& hit(HitId id) const;  ///< throws NotFoundError
    std::size_t completed(HitId id) const;

    /// Throws ValidationError (naming unanswered items), ConflictError,
    /// ForbiddenError or NotFoundError. Resubmitting identical answers is a
    /// no-op reported as Duplicate.
    SubmitOutcome submit(HitId id, const std::string& worker_id, Answers answers,
                         std::optional<std::string> reason = std::nullopt);

    bool qualification_enabled() const { return config_.qualification.has_value(); }
    const std::optional<QualificationTest>& qualification_test() const { return config_.qualification; }
    /// Grades a 3-answer attempt. A worker's first attempt is final; later
    /// attempts return it without logging.
    bool qualify(const std::string& worker_id, const std::vector<bool>& answers);

    Progress progress() const;
    CampaignState state() const;
    const std::vector<Hit>& hits() const { return hits_; }

    /// Pure replay of a log file, without truncating it.
    static CampaignState replay(const std::filesystem::path& log_path);

private:
    void require_qualified(const std::string& worker_id) const;
    void append(const std::string& line);

    std::vector<Hit> hits_;
    std::map<HitId, std::size_t> index_;
    CampaignConfig config_;
    std::filesystem::path log_path_;
    int fd_ = -1;
    mutable std::mutex mu_;
    CampaignState state_;
};

/// Validates answers against the HIT; throws ValidationError naming what is
/// missing or unknown.
void validate_answers(const Hit& hit, const Answers& answers);

struct ServeOptions {
    std::string host = "127.0.0.1";
    int port = 8080;  ///< 0 picks a free port
    std::string ui_dir;
};

/// JSON API over a Campaign:
///   GET  /api/hits/next?worker_id=W
///   GET  /api/hits/{id}
///   POST /api/hits/{id}/assignments
///   GET  /api/qualification
///   POST /api/qualification
///   GET  /api/progress
/// HIT payloads carry full record attributes. ui_dir, if set, is served at /.
class HitServer {
public:
    HitServer(Campaign& campaign, std::vector<Record> records);
    ~HitServer();

    /// Binds, then calls on_bound(port) before serving. Blocks until stop().
    bool run(const ServeOptions& options, const std::function<void(int)>& on_bound = {});
    void stop();

    /// JSON for one HIT, as served to the UI.
    std::string hit_payload(const Hit& hit) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace crowder
