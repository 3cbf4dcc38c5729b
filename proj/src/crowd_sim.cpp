#include "crowder/crowd_sim.hpp"

#include "crowder/errors.hpp"
#include "crowder/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace crowder {

using nlohmann::json;

void WorkerModel::validate() const
{
    if (!(sensitivity >= 0.0 && sensitivity <= 1.0) || !(specificity >= 0.0 && specificity <= 1.0))
        throw ConfigError("worker " + id + ": probabilities must lie in [0,1]");
}

std::vector<WorkerModel> parse_worker_pool(const std::string& spec)
{
    std::vector<WorkerModel> pool;
    std::stringstream groups(spec);
    std::string group;
    while (std::getline(groups, group, ',')) {
        if (group.empty())
            continue;
        std::vector<std::string> f;
        std::stringstream parts(group);
        std::string part;
        while (std::getline(parts, part, ':'))
            f.push_back(part);
        if (f.size() != 2 && f.size() != 4)
            throw ConfigError("worker group '" + group + "' must be kind:count[:sensitivity:specificity]");

        WorkerModel proto;
        const std::string& kind = f[0];
        if (kind == "perfect") {
            proto.kind = WorkerKind::Diligent;
        } else if (kind == "diligent") {
            proto.kind = WorkerKind::Diligent;
            proto.sensitivity = 0.9;
            proto.specificity = 0.95;
        } else if (kind == "spammer") {
            proto.kind = WorkerKind::Spammer;
            proto.sensitivity = proto.specificity = 0.5;
        } else if (kind == "adversarial") {
            proto.kind = WorkerKind::Adversarial;
            proto.sensitivity = proto.specificity = 0.0;
        } else {
            throw ConfigError("unknown worker kind '" + kind + "'");
        }
        std::size_t count = 0;
        try {
            count = std::stoul(f[1]);
            if (f.size() == 4) {
                proto.sensitivity = std::stod(f[2]);
                proto.specificity = std::stod(f[3]);
            }
        } catch (const std::logic_error&) {
            throw ConfigError("worker group '" + group + "' has a malformed number");
        }
        for (std::size_t i = 0; i < count; ++i) {
            WorkerModel w = proto;
            w.id = "w" + std::to_string(pool.size() + 1);
            w.validate();
            pool.push_back(std::move(w));
        }
    }
    return pool;
}

TruthOracle::TruthOracle(const GroundTruth& truth, std::unordered_set<RecordId> records)
    : truth_(&truth), records_(std::move(records))
{
}

TruthOracle::TruthOracle(const GroundTruth& truth, const std::vector<Record>& records) : truth_(&truth)
{
    for (const auto& r : records)
        records_.insert(r.id);
}

void TruthOracle::require(const RecordId& id) const
{
    if (!records_.count(id))
        throw ValidationError("record '" + id + "' is not covered by the ground truth");
}

namespace {

bool judge(Rng& rng, bool truly_match, const WorkerModel& w)
{
    return truly_match ? rng.bernoulli(w.sensitivity) : !rng.bernoulli(w.specificity);
}

struct DisjointSets {
    std::vector<std::size_t> parent;
    explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t x)
    {
        while (parent[x] != x)
            x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b)
    {
        a = find(a);
        b = find(b);
        if (a != b)
            parent[std::max(a, b)] = std::min(a, b);
    }
};

}  // namespace

Assignment simulate_assignment(const Hit& hit, const TruthOracle& oracle, const WorkerModel& worker,
                               std::uint64_t seed)
{
    Assignment out;
    out.hit_id = hit_id(hit);
    out.worker_id = worker.id;
    Rng rng(derive_seed(derive_seed(seed, std::uint64_t{out.hit_id}), worker.id));

    if (const auto* ph = std::get_if<PairHit>(&hit)) {
        PairAnswers answers;
        for (const auto& p : ph->pairs) {
            oracle.require(p.a);
            oracle.require(p.b);
            answers.push_back(judge(rng, oracle.is_match(p.a, p.b), worker));
        }
        out.answers = std::move(answers);
        return out;
    }

    const auto& ch = std::get<ClusterHit>(hit);
    for (const auto& r : ch.records)
        oracle.require(r);
    auto index_of = [&](const RecordId& id) {
        auto it = std::find(ch.records.begin(), ch.records.end(), id);
        if (it == ch.records.end())
            throw ValidationError("covered pair names record '" + id + "' outside HIT " + std::to_string(ch.id));
        return static_cast<std::size_t>(it - ch.records.begin());
    };
    DisjointSets sets(ch.records.size());
    for (const auto& p : ch.covered_pairs)
        if (judge(rng, oracle.is_match(p.a, p.b), worker))
            sets.unite(index_of(p.a), index_of(p.b));

    ClusterLabels labels;
    std::map<std::size_t, std::uint32_t> label_of_root;
    for (std::size_t i = 0; i < ch.records.size(); ++i) {
        const auto root = sets.find(i);
        auto [it, inserted] = label_of_root.try_emplace(root, static_cast<std::uint32_t>(label_of_root.size() + 1));
        labels[ch.records[i]] = it->second;
    }
    out.answers = std::move(labels);
    return out;
}

std::vector<PlannedAssignment> replicate(const std::vector<Hit>& hits, std::size_t r, std::size_t pool_size)
{
    if (r < 1)
        throw ConfigError("replication factor must be at least 1");
    if (pool_size < r)
        throw ConfigError("worker pool of " + std::to_string(pool_size) + " cannot supply " + std::to_string(r) +
                          " distinct workers per HIT");
    std::vector<PlannedAssignment> plan;
    plan.reserve(hits.size() * r);
    for (std::size_t i = 0; i < hits.size(); ++i)
        for (std::size_t t = 0; t < r; ++t)
            plan.push_back({hit_id(hits[i]), (i * r + t) % pool_size});
    return plan;
}

std::vector<WorkerModel> qualification_filter(const std::vector<WorkerModel>& pool, const QualificationTest& test,
                                              std::uint64_t seed)
{
    std::vector<WorkerModel> passing;
    for (const auto& w : pool) {
        Rng rng(derive_seed(seed, "qualification:" + w.id));
        bool all_correct = true;
        for (const auto& item : test)
            if (judge(rng, item.match, w) != item.match)
                all_correct = false;
        if (all_correct)
            passing.push_back(w);
    }
    return passing;
}

std::vector<Assignment> simulate_campaign(const std::vector<Hit>& hits, const TruthOracle& oracle,
                                          const std::vector<WorkerModel>& pool, std::size_t r, std::uint64_t seed)
{
    const auto plan = replicate(hits, r, pool.size());
    std::vector<Assignment> out;
    out.reserve(plan.size());
    for (std::size_t i = 0; i < plan.size(); ++i) {
        const Hit& hit = hits[i / r];
        Assignment a = simulate_assignment(hit, oracle, pool[plan[i].worker], seed);
        a.timestamp = i;
        out.push_back(std::move(a));
    }
    return out;
}

std::string assignment_to_json(const Assignment& a)
{
    json j{{"hit_id", a.hit_id}, {"worker_id", a.worker_id}};
    if (const auto* pa = std::get_if<PairAnswers>(&a.answers)) {
        json arr = json::array();
        for (bool b : *pa)
            arr.push_back(b);
        j["answers"] = arr;
    } else {
        json obj = json::object();
        for (const auto& [rec, label] : std::get<ClusterLabels>(a.answers))
            obj[rec] = label;
        j["answers"] = obj;
    }
    if (a.reason)
        j["reason"] = *a.reason;
    j["timestamp"] = a.timestamp;
    return j.dump();
}

namespace {

Assignment assignment_from(const json& j)
{
    Assignment a;
    a.hit_id = j.at("hit_id").get<HitId>();
    a.worker_id = j.at("worker_id").get<std::string>();
    const auto& ans = j.at("answers");
    if (ans.is_array()) {
        PairAnswers pa;
        for (const auto& b : ans)
            pa.push_back(b.get<bool>());
        a.answers = std::move(pa);
    } else if (ans.is_object()) {
        ClusterLabels cl;
        for (auto it = ans.begin(); it != ans.end(); ++it)
            cl[it.key()] = it.value().get<std::uint32_t>();
        a.answers = std::move(cl);
    } else {
        throw SchemaError("answers must be an array (pair HIT) or object (cluster HIT)");
    }
    if (j.contains("reason") && !j.at("reason").is_null())
        a.reason = j.at("reason").get<std::string>();
    if (j.contains("timestamp"))
        a.timestamp = j.at("timestamp").get<std::uint64_t>();
    return a;
}

}  // namespace

Assignment assignment_from_json(const std::string& line)
{
    try {
        return assignment_from(json::parse(line));
    } catch (const json::exception& e) {
        throw SchemaError(std::string("assignment: ") + e.what());
    }
}

void write_assignments_jsonl(std::ostream& out, const std::vector<Assignment>& assignments)
{
    for (const auto& a : assignments)
        out << assignment_to_json(a) << '\n';
}

std::vector<Assignment> read_assignments_jsonl(std::istream& in)
{
    std::vector<Assignment> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        try {
            const auto j = json::parse(line);
            if (j.contains("event") && j.at("event") != "assignment")
                continue;
            out.push_back(assignment_from(j));
        } catch (const json::exception& e) {
            throw SchemaError("assignments line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace crowder
