#include "crowder/service.hpp"

#include <httplib.h>
#include <json.hpp>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <fcntl.h>
#include <fstream>
#include <sstream>
#include <unistd.h>
#include <unordered_map>

namespace crowder {

using nlohmann::json;

namespace {

std::string pair_text(const IdPair& p)
{
    return "(" + p.a + ", " + p.b + ")";
}

void apply_event(CampaignState& state, const json& event)
{
    const auto kind = event.at("event").get<std::string>();
    if (kind == "assignment") {
        Assignment a = assignment_from_json(event.dump());
        auto key = std::make_pair(a.hit_id, a.worker_id);
        if (state.submissions.count(key))
            throw SchemaError("log holds two assignments for HIT " + std::to_string(a.hit_id) + " by " +
                              a.worker_id);
        state.workers[a.hit_id].push_back(a.worker_id);
        state.submissions.emplace(std::move(key), std::move(a));
    } else if (kind == "qualification") {
        state.roster.try_emplace(event.at("worker_id").get<std::string>(), event.at("passed").get<bool>());
    } else {
        throw SchemaError("log event of unknown kind '" + kind + "'");
    }
}

/// Folds the complete lines of a log. Returns the byte length of the valid
/// prefix; anything after it is a torn write.
std::size_t fold_log(const std::string& text, CampaignState& state)
{
    std::size_t pos = 0, good = 0, lineno = 0;
    while (pos < text.size()) {
        const auto nl = text.find('\n', pos);
        if (nl == std::string::npos)
            break;
        ++lineno;
        const std::string line = text.substr(pos, nl - pos);
        pos = nl + 1;
        if (line.empty()) {
            good = pos;
            continue;
        }
        json event;
        try {
            event = json::parse(line);
        } catch (const json::exception&) {
            if (text.find_first_not_of("\n", pos) == std::string::npos)
                break;
            throw SchemaError("log line " + std::to_string(lineno) + " is not valid JSON");
        }
        try {
            apply_event(state, event);
        } catch (const json::exception& e) {
            throw SchemaError("log line " + std::to_string(lineno) + ": " + e.what());
        }
        good = pos;
    }
    return good;
}

std::string read_all(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::uint64_t now_ms()
{
    using namespace std::chrono;
    return static_cast<std::uint64_t>(duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count());
}

}  // namespace

void validate_answers(const Hit& hit, const Answers& answers)
{
    const std::string where = "HIT " + std::to_string(hit_id(hit));
    if (const auto* ph = std::get_if<PairHit>(&hit)) {
        const auto* a = std::get_if<PairAnswers>(&answers);
        if (!a)
            throw ValidationError(where + " is pair-based; answers must be one boolean per pair");
        if (a->size() > ph->pairs.size())
            throw ValidationError(where + " has " + std::to_string(ph->pairs.size()) + " pairs, got " +
                                  std::to_string(a->size()) + " answers");
        if (a->size() < ph->pairs.size()) {
            std::string missing;
            for (std::size_t i = a->size(); i < ph->pairs.size(); ++i)
                missing += (missing.empty() ? "" : ", ") + pair_text(ph->pairs[i].ids());
            throw ValidationError(where + ": unanswered pairs " + missing);
        }
        return;
    }
    const auto& ch = std::get<ClusterHit>(hit);
    const auto* labels = std::get_if<ClusterLabels>(&answers);
    if (!labels)
        throw ValidationError(where + " is cluster-based; answers must map each record to a label");
    std::string missing;
    for (const auto& r : ch.records)
        if (!labels->count(r))
            missing += (missing.empty() ? "" : ", ") + r;
    if (!missing.empty())
        throw ValidationError(where + ": unlabeled records " + missing);
    for (const auto& [r, label] : *labels) {
        if (std::find(ch.records.begin(), ch.records.end(), r) == ch.records.end())
            throw ValidationError(where + ": record '" + r + "' is not part of this HIT");
        if (label < 1)
            throw ValidationError(where + ": label of '" + r + "' must be a positive integer");
    }
}

Campaign::Campaign(std::vector<Hit> hits, CampaignConfig config, std::filesystem::path log_path)
    : hits_(std::move(hits)), config_(std::move(config)), log_path_(std::move(log_path))
{
    if (config_.replicas < 1)
        throw ConfigError("replication factor must be at least 1");
    for (std::size_t i = 0; i < hits_.size(); ++i)
        if (!index_.emplace(hit_id(hits_[i]), i).second)
            throw ConfigError("duplicate HIT id " + std::to_string(hit_id(hits_[i])));

    if (std::filesystem::exists(log_path_)) {
        const std::string text = read_all(log_path_);
        const auto good = fold_log(text, state_);
        if (good < text.size())
            std::filesystem::resize_file(log_path_, good);
        for (const auto& [key, a] : state_.submissions)
            if (!index_.count(key.first))
                throw SchemaError("log names HIT " + std::to_string(key.first) + " which is not in the campaign");
    }
    fd_ = ::open(log_path_.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
    if (fd_ < 0)
        throw Error("cannot open log " + log_path_.string() + ": " + std::strerror(errno));
}

Campaign::~Campaign()
{
    if (fd_ >= 0)
        ::close(fd_);
}

void Campaign::append(const std::string& line)
{
    const std::string data = line + "\n";
    std::size_t done = 0;
    while (done < data.size()) {
        const auto n = ::write(fd_, data.data() + done, data.size() - done);
        if (n < 0) {
            if (errno == EINTR)
                continue;
            throw Error("log write failed: " + std::string(std::strerror(errno)));
        }
        done += static_cast<std::size_t>(n);
    }
    if (config_.sync_writes && ::fdatasync(fd_) != 0)
        throw Error("log sync failed: " + std::string(std::strerror(errno)));
}

const Hit& Campaign::hit(HitId id) const
{
    auto it = index_.find(id);
    if (it == index_.end())
        throw NotFoundError("no HIT with id " + std::to_string(id));
    return hits_[it->second];
}

std::size_t Campaign::completed(HitId id) const
{
    std::lock_guard lock(mu_);
    auto it = state_.workers.find(id);
    return it == state_.workers.end() ? 0 : it->second.size();
}

void Campaign::require_qualified(const std::string& worker_id) const
{
    if (worker_id.empty())
        throw ValidationError("worker_id is required");
    if (!config_.qualification)
        return;
    auto it = state_.roster.find(worker_id);
    if (it == state_.roster.end())
        throw ForbiddenError("worker " + worker_id + " has not taken the qualification test");
    if (!it->second)
        throw ForbiddenError("worker " + worker_id + " did not pass the qualification test");
}

std::optional<Hit> Campaign::next_hit(const std::string& worker_id) const
{
    std::lock_guard lock(mu_);
    require_qualified(worker_id);
    const Hit* best = nullptr;
    std::size_t best_count = 0;
    for (const auto& h : hits_) {
        const auto id = hit_id(h);
        auto it = state_.workers.find(id);
        const std::size_t count = it == state_.workers.end() ? 0 : it->second.size();
        if (count >= config_.replicas)
            continue;
        if (it != state_.workers.end() && std::find(it->second.begin(), it->second.end(), worker_id) != it->second.end())
            continue;
        if (!best || count < best_count || (count == best_count && id < hit_id(*best))) {
            best = &h;
            best_count = count;
        }
    }
    if (!best)
        return std::nullopt;
    return *best;
}

SubmitOutcome Campaign::submit(HitId id, const std::string& worker_id, Answers answers,
                               std::optional<std::string> reason)
{
    const Hit& h = hit(id);
    validate_answers(h, answers);

    std::lock_guard lock(mu_);
    require_qualified(worker_id);
    auto key = std::make_pair(id, worker_id);
    if (auto it = state_.submissions.find(key); it != state_.submissions.end()) {
        if (it->second.answers == answers && it->second.reason == reason)
            return SubmitOutcome::Duplicate;
        throw ConflictError("worker " + worker_id + " already submitted different answers for HIT " +
                            std::to_string(id));
    }
    auto wit = state_.workers.find(id);
    if (wit != state_.workers.end() && wit->second.size() >= config_.replicas)
        throw ConflictError("HIT " + std::to_string(id) + " already has " + std::to_string(config_.replicas) +
                            " assignments");

    Assignment a{id, worker_id, std::move(answers), std::move(reason), now_ms()};
    json event = json::parse(assignment_to_json(a));
    event["event"] = "assignment";
    append(event.dump());
    apply_event(state_, event);
    return SubmitOutcome::Accepted;
}

bool Campaign::qualify(const std::string& worker_id, const std::vector<bool>& answers)
{
    if (!config_.qualification)
        throw ValidationError("qualification is not enabled for this campaign");
    if (worker_id.empty())
        throw ValidationError("worker_id is required");
    const auto& test = *config_.qualification;
    if (answers.size() != test.size())
        throw ValidationError("qualification needs exactly " + std::to_string(test.size()) + " answers, got " +
                              std::to_string(answers.size()));

    std::lock_guard lock(mu_);
    if (auto it = state_.roster.find(worker_id); it != state_.roster.end())
        return it->second;
    bool passed = true;
    for (std::size_t i = 0; i < test.size(); ++i)
        if (answers[i] != test[i].match)
            passed = false;
    json event{{"event", "qualification"}, {"worker_id", worker_id}, {"answers", answers}, {"passed", passed}};
    append(event.dump());
    apply_event(state_, event);
    return passed;
}

Progress Campaign::progress() const
{
    std::lock_guard lock(mu_);
    Progress p;
    p.replicas = config_.replicas;
    for (const auto& h : hits_) {
        const auto id = hit_id(h);
        auto it = state_.workers.find(id);
        HitProgress hp{id, it == state_.workers.end() ? 0 : it->second.size(), false};
        hp.closed = hp.completed >= config_.replicas;
        (hp.closed ? p.closed : p.open) += 1;
        p.assignments += hp.completed;
        p.hits.push_back(hp);
    }
    return p;
}

CampaignState Campaign::state() const
{
    std::lock_guard lock(mu_);
    return state_;
}

CampaignState Campaign::replay(const std::filesystem::path& log_path)
{
    CampaignState state;
    if (std::filesystem::exists(log_path))
        fold_log(read_all(log_path), state);
    return state;
}

// HTTP layer

struct HitServer::Impl {
    Campaign& campaign;
    std::unordered_map<RecordId, Record> records;
    std::vector<std::string> attribute_names;
    httplib::Server server;

    Impl(Campaign& c, std::vector<Record> recs) : campaign(c)
    {
        for (auto& r : recs) {
            for (const auto& [name, value] : r.attributes)
                if (std::find(attribute_names.begin(), attribute_names.end(), name) == attribute_names.end())
                    attribute_names.push_back(name);
            RecordId id = r.id;
            records.emplace(std::move(id), std::move(r));
        }
    }

    json record_json(const RecordId& id) const
    {
        auto it = records.find(id);
        if (it == records.end())
            throw NotFoundError("record '" + id + "' is not in the dataset");
        json attrs = json::object();
        for (const auto& [name, value] : it->second.attributes)
            attrs[name] = value;
        return {{"id", id}, {"attributes", attrs}};
    }

    json payload(const Hit& h) const
    {
        json out{{"id", hit_id(h)},
                 {"completed", campaign.completed(hit_id(h))},
                 {"attribute_names", attribute_names}};
        if (const auto* ph = std::get_if<PairHit>(&h)) {
            out["kind"] = "pair";
            json pairs = json::array();
            for (const auto& p : ph->pairs)
                pairs.push_back({{"a", record_json(p.a)}, {"b", record_json(p.b)}, {"likelihood", p.likelihood}});
            out["pairs"] = pairs;
        } else {
            const auto& ch = std::get<ClusterHit>(h);
            out["kind"] = "cluster";
            json recs = json::array();
            for (const auto& r : ch.records)
                recs.push_back(record_json(r));
            out["records"] = recs;
        }
        return out;
    }
};

namespace {

void send_json(httplib::Response& res, int status, const json& body)
{
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

template <class F>
httplib::Server::Handler guarded(F f)
{
    return [f](const httplib::Request& req, httplib::Response& res) {
        try {
            f(req, res);
        } catch (const ValidationError& e) {
            send_json(res, 400, {{"error", e.what()}});
        } catch (const SchemaError& e) {
            send_json(res, 400, {{"error", e.what()}});
        } catch (const json::exception& e) {
            send_json(res, 400, {{"error", std::string("malformed request: ") + e.what()}});
        } catch (const ForbiddenError& e) {
            send_json(res, 403, {{"error", e.what()}});
        } catch (const NotFoundError& e) {
            send_json(res, 404, {{"error", e.what()}});
        } catch (const ConflictError& e) {
            send_json(res, 409, {{"error", e.what()}});
        } catch (const std::exception& e) {
            send_json(res, 500, {{"error", e.what()}});
        }
    };
}

HitId parse_hit_id(const std::string& s)
{
    try {
        const auto v = std::stoull(s);
        if (v > 0xffffffffULL)
            throw NotFoundError("no HIT with id " + s);
        return static_cast<HitId>(v);
    } catch (const std::logic_error&) {
        throw NotFoundError("no HIT with id " + s);
    }
}

Answers answers_from_request(const Hit& hit, const json& body)
{
    const auto& ans = body.at("answers");
    if (ans.is_array()) {
        PairAnswers out;
        std::string unanswered;
        const auto* ph = std::get_if<PairHit>(&hit);
        for (std::size_t i = 0; i < ans.size(); ++i) {
            if (ans[i].is_null()) {
                unanswered += (unanswered.empty() ? "" : ", ") +
                              (ph && i < ph->pairs.size() ? pair_text(ph->pairs[i].ids()) : std::to_string(i + 1));
                out.push_back(false);
            } else {
                out.push_back(ans[i].get<bool>());
            }
        }
        if (!unanswered.empty())
            throw ValidationError("HIT " + std::to_string(hit_id(hit)) + ": unanswered pairs " + unanswered);
        return out;
    }
    if (ans.is_object()) {
        ClusterLabels out;
        std::string unlabeled;
        for (auto it = ans.begin(); it != ans.end(); ++it) {
            if (it.value().is_null()) {
                unlabeled += (unlabeled.empty() ? "" : ", ") + it.key();
                continue;
            }
            const auto v = it.value().get<std::int64_t>();
            if (v < 1)
                throw ValidationError("label of '" + it.key() + "' must be a positive integer");
            out[it.key()] = static_cast<std::uint32_t>(v);
        }
        if (!unlabeled.empty())
            throw ValidationError("HIT " + std::to_string(hit_id(hit)) + ": unlabeled records " + unlabeled);
        return out;
    }
    throw ValidationError("answers must be an array or an object");
}

}  // namespace

HitServer::HitServer(Campaign& campaign, std::vector<Record> records)
    : impl_(std::make_unique<Impl>(campaign, std::move(records)))
{
    auto& s = impl_->server;
    Impl* im = impl_.get();

    for (const auto& h : campaign.hits())
        im->payload(h);
    if (const auto& test = campaign.qualification_test())
        for (const auto& item : *test) {
            im->record_json(item.pair.a);
            im->record_json(item.pair.b);
        }

    s.Get("/api/hits/next", guarded([im](const httplib::Request& req, httplib::Response& res) {
        const auto worker = req.get_param_value("worker_id");
        auto h = im->campaign.next_hit(worker);
        send_json(res, 200, {{"hit", h ? im->payload(*h) : json(nullptr)}});
    }));

    s.Get(R"(/api/hits/(\d+))", guarded([im](const httplib::Request& req, httplib::Response& res) {
        send_json(res, 200, im->payload(im->campaign.hit(parse_hit_id(req.matches[1]))));
    }));

    s.Post(R"(/api/hits/(\d+)/assignments)", guarded([im](const httplib::Request& req, httplib::Response& res) {
        const auto id = parse_hit_id(req.matches[1]);
        const Hit& h = im->campaign.hit(id);
        const auto body = json::parse(req.body);
        const auto worker = body.at("worker_id").get<std::string>();
        std::optional<std::string> reason;
        if (body.contains("reason") && !body.at("reason").is_null() && !body.at("reason").get<std::string>().empty())
            reason = body.at("reason").get<std::string>();
        const auto outcome = im->campaign.submit(id, worker, answers_from_request(h, body), std::move(reason));
        send_json(res, 200, {{"status", outcome == SubmitOutcome::Accepted ? "accepted" : "duplicate"}});
    }));

    s.Get("/api/qualification", guarded([im](const httplib::Request&, httplib::Response& res) {
        json pairs = json::array();
        if (const auto& test = im->campaign.qualification_test())
            for (const auto& item : *test)
                pairs.push_back({{"a", im->record_json(item.pair.a)}, {"b", im->record_json(item.pair.b)}});
        send_json(res, 200,
                  {{"enabled", im->campaign.qualification_enabled()},
                   {"pairs", pairs},
                   {"attribute_names", im->attribute_names}});
    }));

    s.Post("/api/qualification", guarded([im](const httplib::Request& req, httplib::Response& res) {
        const auto body = json::parse(req.body);
        std::vector<bool> answers;
        for (const auto& a : body.at("answers")) {
            if (a.is_null())
                throw ValidationError("every qualification pair needs an answer");
            answers.push_back(a.get<bool>());
        }
        const bool passed = im->campaign.qualify(body.at("worker_id").get<std::string>(), answers);
        send_json(res, 200, {{"passed", passed}});
    }));

    s.Get("/api/progress", guarded([im](const httplib::Request&, httplib::Response& res) {
        const auto p = im->campaign.progress();
        json hits = json::array();
        for (const auto& h : p.hits)
            hits.push_back({{"id", h.id}, {"completed", h.completed}, {"closed", h.closed}});
        send_json(res, 200,
                  {{"open", p.open},
                   {"closed", p.closed},
                   {"assignments", p.assignments},
                   {"replicas", p.replicas},
                   {"hits", hits}});
    }));
}

HitServer::~HitServer() = default;

bool HitServer::run(const ServeOptions& options, const std::function<void(int)>& on_bound)
{
    auto& s = impl_->server;
    if (!options.ui_dir.empty() && !s.set_mount_point("/", options.ui_dir))
        throw ConfigError("UI directory '" + options.ui_dir + "' does not exist");
    int port = options.port;
    if (port == 0) {
        port = s.bind_to_any_port(options.host);
        if (port < 0)
            return false;
    } else if (!s.bind_to_port(options.host, port)) {
        return false;
    }
    if (on_bound)
        on_bound(port);
    return s.listen_after_bind();
}

void HitServer::stop()
{
    impl_->server.stop();
}

std::string HitServer::hit_payload(const Hit& hit) const
{
    return impl_->payload(hit).dump();
}

}  // namespace crowder
