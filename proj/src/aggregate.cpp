#include "crowder/aggregate.hpp"

#include "crowder/csv.hpp"
#include "crowder/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <unordered_map>

namespace crowder {

std::vector<PairJudgment> extract_judgments(const Assignment& assignment, const Hit& hit)
{
    const std::string where = "assignment for HIT " + std::to_string(hit_id(hit)) + " by " + assignment.worker_id;
    std::vector<PairJudgment> out;

    if (const auto* ph = std::get_if<PairHit>(&hit)) {
        const auto* answers = std::get_if<PairAnswers>(&assignment.answers);
        if (!answers)
            throw ValidationError(where + ": pair HIT needs one boolean per pair");
        if (answers->size() != ph->pairs.size())
            throw ValidationError(where + ": " + std::to_string(answers->size()) + " answers for " +
                                  std::to_string(ph->pairs.size()) + " pairs");
        for (std::size_t i = 0; i < ph->pairs.size(); ++i)
            out.push_back({ph->pairs[i].ids(), assignment.worker_id, (*answers)[i]});
        return out;
    }

    const auto& ch = std::get<ClusterHit>(hit);
    const auto* labels = std::get_if<ClusterLabels>(&assignment.answers);
    if (!labels)
        throw ValidationError(where + ": cluster HIT needs a label per record");
    for (const auto& r : ch.records)
        if (!labels->count(r))
            throw ValidationError(where + ": record '" + r + "' is unlabeled");
    for (const auto& p : ch.covered_pairs)
        out.push_back({p, assignment.worker_id, labels->at(p.a) == labels->at(p.b)});
    return out;
}

std::vector<PairJudgment> extract_all(const std::vector<Assignment>& assignments, const std::vector<Hit>& hits)
{
    std::unordered_map<HitId, const Hit*> by_id;
    for (const auto& h : hits)
        by_id[hit_id(h)] = &h;
    std::vector<PairJudgment> out;
    for (const auto& a : assignments) {
        auto it = by_id.find(a.hit_id);
        if (it == by_id.end())
            throw ValidationError("assignment names unknown HIT " + std::to_string(a.hit_id));
        auto js = extract_judgments(a, *it->second);
        out.insert(out.end(), js.begin(), js.end());
    }
    return out;
}

void rank_verdicts(std::vector<AggregatedVerdict>& verdicts)
{
    std::sort(verdicts.begin(), verdicts.end(), [](const AggregatedVerdict& x, const AggregatedVerdict& y) {
        if (x.posterior != y.posterior)
            return x.posterior > y.posterior;
        return x.pair < y.pair;
    });
}

namespace {

struct Indexed {
    std::vector<IdPair> pairs;
    std::vector<std::string> workers;
    struct Obs {
        std::size_t item, worker;
        bool match;
    };
    std::vector<Obs> obs;
};

Indexed index(const std::vector<PairJudgment>& judgments)
{
    Indexed ix;
    std::map<IdPair, std::size_t> pair_ix;
    std::map<std::string, std::size_t> worker_ix;
    for (const auto& j : judgments) {
        pair_ix.try_emplace(j.pair, 0);
        worker_ix.try_emplace(j.worker_id, 0);
    }
    for (auto& [p, i] : pair_ix) {
        i = ix.pairs.size();
        ix.pairs.push_back(p);
    }
    for (auto& [w, i] : worker_ix) {
        i = ix.workers.size();
        ix.workers.push_back(w);
    }
    for (const auto& j : judgments)
        ix.obs.push_back({pair_ix.at(j.pair), worker_ix.at(j.worker_id), j.match});
    return ix;
}

std::vector<double> vote_fractions(const Indexed& ix)
{
    std::vector<double> yes(ix.pairs.size(), 0.0), total(ix.pairs.size(), 0.0);
    for (const auto& o : ix.obs) {
        total[o.item] += 1.0;
        if (o.match)
            yes[o.item] += 1.0;
    }
    for (std::size_t i = 0; i < yes.size(); ++i)
        yes[i] /= total[i];
    return yes;
}

std::vector<AggregatedVerdict> verdicts_from(const Indexed& ix, const std::vector<double>& posterior)
{
    std::vector<AggregatedVerdict> out;
    out.reserve(ix.pairs.size());
    for (std::size_t i = 0; i < ix.pairs.size(); ++i)
        out.push_back({ix.pairs[i], posterior[i], posterior[i] > 0.5});
    rank_verdicts(out);
    return out;
}

}  // namespace

std::vector<AggregatedVerdict> majority_vote(const std::vector<PairJudgment>& judgments)
{
    const auto ix = index(judgments);
    return verdicts_from(ix, vote_fractions(ix));
}

EmResult dawid_skene(const std::vector<PairJudgment>& judgments, const EmConfig& config)
{
    if (judgments.empty())
        throw ValidationError("dawid_skene: no judgments");
    const auto ix = index(judgments);
    const std::size_t n = ix.pairs.size(), w = ix.workers.size();

    std::vector<double> t = vote_fractions(ix);
    std::vector<double> sens(w), spec(w);
    std::vector<double> sens_prev(w, -1.0), spec_prev(w, -1.0);
    double prior = 0.0, prior_last = -1.0;

    EmResult res;
    std::vector<double> log_m(n), log_n(n);
    for (std::size_t iter = 0; iter < config.max_iters; ++iter) {
        // M-step
        double tsum = 0.0;
        for (double x : t)
            tsum += x;
        prior = (tsum + 1.0) / (static_cast<double>(n) + 2.0);
        std::vector<double> mm(w, 0.0), mt(w, 0.0), nn(w, 0.0), nt(w, 0.0);
        for (const auto& o : ix.obs) {
            const double p = t[o.item];
            mt[o.worker] += p;
            nt[o.worker] += 1.0 - p;
            if (o.match)
                mm[o.worker] += p;
            else
                nn[o.worker] += 1.0 - p;
        }
        for (std::size_t j = 0; j < w; ++j) {
            sens[j] = (mm[j] + 1.0) / (mt[j] + 2.0);
            spec[j] = (nn[j] + 1.0) / (nt[j] + 2.0);
        }

        // E-step
        std::fill(log_m.begin(), log_m.end(), std::log(prior));
        std::fill(log_n.begin(), log_n.end(), std::log1p(-prior));
        for (const auto& o : ix.obs) {
            log_m[o.item] += std::log(o.match ? sens[o.worker] : 1.0 - sens[o.worker]);
            log_n[o.item] += std::log(o.match ? 1.0 - spec[o.worker] : spec[o.worker]);
        }
        double ll = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double hi = std::max(log_m[i], log_n[i]);
            const double lse = hi + std::log(std::exp(log_m[i] - hi) + std::exp(log_n[i] - hi));
            t[i] = std::exp(log_m[i] - lse);
            ll += lse;
        }
        double penalty = std::log(prior) + std::log1p(-prior);
        for (std::size_t j = 0; j < w; ++j)
            penalty += std::log(sens[j]) + std::log1p(-sens[j]) + std::log(spec[j]) + std::log1p(-spec[j]);
        res.log_likelihood.push_back(ll);
        res.objective.push_back(ll + penalty);
        res.iterations = iter + 1;

        double delta = std::abs(prior - prior_last);
        for (std::size_t j = 0; j < w; ++j)
            delta = std::max({delta, std::abs(sens[j] - sens_prev[j]), std::abs(spec[j] - spec_prev[j])});
        prior_last = prior;
        sens_prev = sens;
        spec_prev = spec;
        if (delta < config.tolerance) {
            res.converged = true;
            break;
        }
    }

    res.prior = prior;
    std::vector<std::size_t> counts(w, 0);
    for (const auto& o : ix.obs)
        ++counts[o.worker];
    for (std::size_t j = 0; j < w; ++j)
        res.workers[ix.workers[j]] = {sens[j], spec[j], counts[j]};
    res.verdicts = verdicts_from(ix, t);
    return res;
}

void write_verdicts_csv(std::ostream& out, const std::vector<AggregatedVerdict>& verdicts)
{
    out << "a,b,posterior,decision\n";
    char buf[32];
    for (const auto& v : verdicts) {
        std::snprintf(buf, sizeof buf, "%.9f", v.posterior);
        csv::write_row(out, {v.pair.a, v.pair.b, buf, v.decision ? "1" : "0"});
    }
}

std::vector<AggregatedVerdict> read_verdicts_csv(std::istream& in)
{
    const auto rows = csv::parse(in);
    if (rows.empty() || rows[0] != csv::Row{"a", "b", "posterior", "decision"})
        throw SchemaError("verdicts: expected header a,b,posterior,decision");
    std::vector<AggregatedVerdict> out;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (r.size() != 4)
            throw SchemaError("verdicts row " + std::to_string(i + 1) + ": expected 4 fields");
        try {
            out.push_back({IdPair{r[0], r[1]}, std::stod(r[2]), r[3] == "1"});
        } catch (const std::logic_error&) {
            throw SchemaError("verdicts row " + std::to_string(i + 1) + ": bad posterior '" + r[2] + "'");
        }
    }
    return out;
}

}  // namespace crowder
