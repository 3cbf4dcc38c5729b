#include "crowder/hit.hpp"

#include "crowder/errors.hpp"

#include <json.hpp>

#include <istream>
#include <ostream>

namespace crowder {

using nlohmann::json;

HitId hit_id(const Hit& h)
{
    return std::visit([](const auto& x) { return x.id; }, h);
}

bool is_cluster(const Hit& h)
{
    return std::holds_alternative<ClusterHit>(h);
}

std::vector<Hit> to_hits(std::vector<PairHit> hits)
{
    std::vector<Hit> out;
    out.reserve(hits.size());
    HitId next = 1;
    for (auto& h : hits) {
        h.id = next++;
        out.emplace_back(std::move(h));
    }
    return out;
}

std::vector<Hit> to_hits(std::vector<ClusterHit> hits)
{
    std::vector<Hit> out;
    out.reserve(hits.size());
    HitId next = 1;
    for (auto& h : hits) {
        h.id = next++;
        out.emplace_back(std::move(h));
    }
    return out;
}

namespace {

json pair_array(const RecordId& a, const RecordId& b)
{
    return json::array({a, b});
}

json to_json(const Hit& h)
{
    if (const auto* p = std::get_if<PairHit>(&h)) {
        json pairs = json::array(), likelihoods = json::array();
        for (const auto& cp : p->pairs) {
            pairs.push_back(pair_array(cp.a, cp.b));
            likelihoods.push_back(cp.likelihood);
        }
        return {{"id", p->id}, {"kind", "pair"}, {"pairs", pairs}, {"likelihoods", likelihoods}};
    }
    const auto& c = std::get<ClusterHit>(h);
    json covered = json::array();
    for (const auto& ip : c.covered_pairs)
        covered.push_back(pair_array(ip.a, ip.b));
    return {{"id", c.id}, {"kind", "cluster"}, {"records", c.records}, {"covered_pairs", covered}};
}

Hit from_json(const json& j)
{
    const auto kind = j.at("kind").get<std::string>();
    const auto id = j.at("id").get<HitId>();
    if (kind == "pair") {
        PairHit h;
        h.id = id;
        const auto& pairs = j.at("pairs");
        const json* lk = j.contains("likelihoods") ? &j.at("likelihoods") : nullptr;
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            IdPair ids(pairs[i].at(0).get<std::string>(), pairs[i].at(1).get<std::string>());
            h.pairs.push_back({ids.a, ids.b, lk ? lk->at(i).get<double>() : 0.0});
        }
        if (h.pairs.empty())
            throw SchemaError("pair HIT " + std::to_string(id) + " has no pairs");
        return h;
    }
    if (kind == "cluster") {
        ClusterHit h;
        h.id = id;
        h.records = j.at("records").get<std::vector<std::string>>();
        for (const auto& p : j.at("covered_pairs"))
            h.covered_pairs.emplace_back(p.at(0).get<std::string>(), p.at(1).get<std::string>());
        return h;
    }
    throw SchemaError("unknown HIT kind '" + kind + "'");
}

}  // namespace

void write_hits_jsonl(std::ostream& out, const std::vector<Hit>& hits)
{
    for (const auto& h : hits)
        out << to_json(h).dump() << '\n';
}

std::vector<Hit> read_hits_jsonl(std::istream& in)
{
    std::vector<Hit> hits;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        try {
            hits.push_back(from_json(json::parse(line)));
        } catch (const json::exception& e) {
            throw SchemaError("hits line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return hits;
}

}  // namespace crowder
