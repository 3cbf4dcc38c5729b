#include "crowder/similarity.hpp"

#include "crowder/dataset.hpp"
#include "crowder/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>
#include <thread>
#include <unordered_map>

namespace crowder {

namespace {

using TokenIds = std::vector<std::uint32_t>;

template <typename Seq>
std::size_t intersection_size(const Seq& a, const Seq& b)
{
    std::size_t n = 0;
    auto i = a.begin(), j = b.begin();
    while (i != a.end() && j != b.end()) {
        if (*i < *j)
            ++i;
        else if (*j < *i)
            ++j;
        else {
            ++n;
            ++i;
            ++j;
        }
    }
    return n;
}

double jaccard_ids(const TokenIds& a, const TokenIds& b)
{
    const std::size_t inter = intersection_size(a, b);
    const std::size_t uni = a.size() + b.size() - inter;
    return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

// J(a,b) <= min/max, so a pair can be skipped without computing the
// intersection when that ratio is already below the threshold.
bool length_filter_rejects(std::size_t x, std::size_t y, double threshold)
{
    const auto lo = std::min(x, y), hi = std::max(x, y);
    if (hi == 0)
        return threshold > 0.0;
    return static_cast<double>(lo) / static_cast<double>(hi) < threshold;
}

}  // namespace

double jaccard(const TokenSet& a, const TokenSet& b)
{
    const std::size_t inter = intersection_size(a, b);
    const std::size_t uni = a.size() + b.size() - inter;
    return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

void PruneConfig::validate() const
{
    if (!(threshold >= 0.0 && threshold <= 1.0))
        throw ConfigError("likelihood threshold must lie in [0,1]");
}

void sort_candidates(std::vector<CandidatePair>& pairs)
{
    std::sort(pairs.begin(), pairs.end(), [](const CandidatePair& x, const CandidatePair& y) {
        if (x.likelihood != y.likelihood)
            return x.likelihood > y.likelihood;
        if (x.a != y.a)
            return x.a < y.a;
        return x.b < y.b;
    });
}

std::vector<CandidatePair> generate_candidates(const std::vector<Record>& records, const PruneConfig& cfg)
{
    cfg.validate();
    const std::size_t n = records.size();

    std::unordered_map<std::string, std::uint32_t> dictionary;
    std::vector<TokenIds> tokens(n);
    for (std::size_t i = 0; i < n; ++i) {
        const TokenSet ts = cfg.attributes.empty() ? records[i].tokens : tokens_of(records[i], cfg.attributes);
        for (const auto& t : ts)
            tokens[i].push_back(dictionary.emplace(t, static_cast<std::uint32_t>(dictionary.size())).first->second);
        std::sort(tokens[i].begin(), tokens[i].end());
    }

    if (cfg.mode == JoinMode::Cross) {
        bool has_a = false, has_b = false;
        for (const auto& r : records)
            (r.source == Source::A ? has_a : has_b) = true;
        if (n > 0 && !(has_a && has_b))
            throw ConfigError("cross mode needs records from both sources");
    }

    unsigned threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, n / 64)));

    std::vector<std::vector<CandidatePair>> partial(threads);
    auto work = [&](unsigned t) {
        auto& out = partial[t];
        // strided rows balance the triangular loop
        for (std::size_t i = t; i < n; i += threads) {
            for (std::size_t j = i + 1; j < n; ++j) {
                if (cfg.mode == JoinMode::Cross && records[i].source == records[j].source)
                    continue;
                if (length_filter_rejects(tokens[i].size(), tokens[j].size(), cfg.threshold))
                    continue;
                const double sim = jaccard_ids(tokens[i], tokens[j]);
                if (sim >= cfg.threshold) {
                    const IdPair ids(records[i].id, records[j].id);
                    out.push_back({ids.a, ids.b, sim});
                }
            }
        }
    };

    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back(work, t);
        for (auto& th : pool)
            th.join();
    }

    std::vector<CandidatePair> result;
    std::size_t total = 0;
    for (const auto& p : partial)
        total += p.size();
    result.reserve(total);
    for (auto& p : partial)
        result.insert(result.end(), std::make_move_iterator(p.begin()), std::make_move_iterator(p.end()));
    sort_candidates(result);
    return result;
}

std::vector<PruneRow> prune_report(const std::vector<CandidatePair>& pairs, const GroundTruth& truth,
                                   const std::vector<double>& thresholds)
{
    if (truth.empty())
        throw ValidationError("recall is undefined for an empty ground truth");
    std::vector<PruneRow> rows;
    for (double t : thresholds) {
        PruneRow row;
        row.threshold = t;
        for (const auto& p : pairs) {
            if (p.likelihood < t)
                continue;
            ++row.pairs;
            if (truth.contains(p.a, p.b))
                ++row.matches;
        }
        row.recall = static_cast<double>(row.matches) / static_cast<double>(truth.size());
        rows.push_back(row);
    }
    return rows;
}

void write_prune_report(std::ostream& out, const std::vector<PruneRow>& rows)
{
    out << "threshold,total_pairs,matches,recall\n";
    char buf[128];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%g,%llu,%llu,%.4f\n", r.threshold, static_cast<unsigned long long>(r.pairs),
                      static_cast<unsigned long long>(r.matches), r.recall);
        out << buf;
    }
}

void write_pairs_jsonl(std::ostream& out, const std::vector<CandidatePair>& pairs)
{
    for (const auto& p : pairs)
        out << nlohmann::json{{"a", p.a}, {"b", p.b}, {"likelihood", p.likelihood}}.dump() << '\n';
}

std::vector<CandidatePair> read_pairs_jsonl(std::istream& in)
{
    std::vector<CandidatePair> pairs;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        try {
            auto j = nlohmann::json::parse(line);
            IdPair ids(j.at("a").get<std::string>(), j.at("b").get<std::string>());
            if (ids.a == ids.b)
                throw SchemaError("self pair");
            const double l = j.at("likelihood").get<double>();
            if (!(l >= 0.0 && l <= 1.0))
                throw SchemaError("likelihood outside [0,1]");
            pairs.push_back({ids.a, ids.b, l});
        } catch (const nlohmann::json::exception& e) {
            throw SchemaError("pairs line " + std::to_string(lineno) + ": " + e.what());
        } catch (const SchemaError& e) {
            throw SchemaError("pairs line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return pairs;
}

}  // namespace crowder
