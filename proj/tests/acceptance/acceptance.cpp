// Acceptance suite. Prints one PASS/FAIL line per criterion; exits nonzero if
// any selected criterion fails. Run one with --criterion <name>.

#include "crowder/aggregate.hpp"
#include "crowder/comparison_model.hpp"
#include "crowder/crowd_sim.hpp"
#include "crowder/dataset.hpp"
#include "crowder/generators.hpp"
#include "crowder/graph.hpp"
#include "crowder/service.hpp"
#include "crowder/similarity.hpp"
#include "crowder/two_tiered.hpp"

#include "../support/oracles.hpp"

#include <httplib.h>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <thread>
#include <unistd.h>
#include <vector>

using namespace crowder;
using nlohmann::json;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

// Tolerances and sizes, pinned.
constexpr double kJaccardTol = 1e-9;
constexpr double kTable2MaxDeviation = 0.01;
constexpr double kTable2Seconds = 120.0;
constexpr int kPackingInstances = 200;
constexpr std::size_t kPackingMaxItems = 12;
constexpr std::uint32_t kPackingMaxK = 8;
constexpr double kPackingSeconds = 30.0;
constexpr int kFuzzGraphs = 500;
constexpr std::size_t kFuzzVertices = 200;
constexpr std::size_t kFuzzEdges = 200;  // average degree 2
constexpr std::size_t kFuzzK = 10;
constexpr double kFuzzWinShare = 0.95;
constexpr double kRestaurantGap = 1.2;
constexpr double kGeneratorSeconds = 120.0;
constexpr int kPartitions = 1000;
constexpr std::size_t kOrderingMaxEntities = 7;
constexpr std::size_t kAggregationPairs = 200;
constexpr std::size_t kSubmitters = 50;
constexpr double kCrashSeconds = 60.0;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string data(const std::string& name)
{
    return std::string(CROWDER_TEST_DATA) + "/" + name;
}

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

std::vector<CandidatePair> table1_pairs()
{
    PruneConfig cfg;
    cfg.threshold = 0.3;
    cfg.attributes = {"name"};
    return generate_candidates(load_records(data("table1.csv"), JoinMode::Self), cfg);
}

template <class H>
std::vector<Hit> as_hits(const std::vector<H>& hs)
{
    return std::vector<Hit>(hs.begin(), hs.end());
}

// ---------------------------------------------------------------------------

Outcome jaccard_golden()
{
    const auto recs = load_records(data("table1.csv"), JoinMode::Self);
    auto name = [&](const std::string& id) {
        for (const auto& r : recs)
            if (r.id == id)
                return tokens_of(r, {"name"});
        throw std::runtime_error("missing " + id);
    };
    const double j12 = jaccard(name("r1"), name("r2"));
    const double j13 = jaccard(name("r1"), name("r3"));
    const bool ok = std::abs(j12 - 4.0 / 7.0) <= kJaccardTol && std::abs(j12 - 0.5714) < 1e-4 && j13 == 0.25;
    return {ok, "J(r1,r2)=" + fmt("%.10f", j12) + " J(r1,r3)=" + fmt("%.10f", j13)};
}

struct Table2Row {
    double threshold;
    std::uint64_t pairs;
    std::uint64_t matches;
};

std::string check_table2(const std::string& label, const std::string& records, const std::string& truth_path,
                         JoinMode mode, const std::vector<Table2Row>& expected, bool& ok)
{
    if (!fs::exists(records) || !fs::exists(truth_path)) {
        ok = false;
        return label + ": dataset not found at " + records;
    }
    const auto t0 = Clock::now();
    const auto recs = load_records(records, mode);
    const auto truth = load_truth(truth_path);
    double lowest = 1.0;
    std::vector<double> ths;
    for (const auto& e : expected) {
        lowest = std::min(lowest, e.threshold);
        ths.push_back(e.threshold);
    }
    const auto pairs = generate_candidates(recs, PruneConfig{lowest, mode, {}, 0});
    const auto rows = prune_report(pairs, truth, ths);
    const double secs = seconds_since(t0);

    std::string out = label + " (" + std::to_string(recs.size()) + " records, " + fmt("%.1fs", secs) + "):";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& e = expected[i];
        const double dp = std::abs(double(rows[i].pairs) - double(e.pairs)) / double(e.pairs);
        const double dm = std::abs(double(rows[i].matches) - double(e.matches)) / double(e.matches);
        if (dp > kTable2MaxDeviation || dm > kTable2MaxDeviation)
            ok = false;
        out += " " + fmt("%.1f", e.threshold) + "->" + std::to_string(rows[i].pairs) + "/" +
               std::to_string(rows[i].matches) + " (want " + std::to_string(e.pairs) + "/" +
               std::to_string(e.matches) + ")";
    }
    if (secs > kTable2Seconds)
        ok = false;
    return out;
}

Outcome table2()
{
    bool ok = true;
    const std::string root = CROWDER_DATASETS;
    auto restaurant = check_table2("restaurant", root + "/restaurant/restaurant.csv",
                                   root + "/restaurant/restaurant_truth.csv", JoinMode::Self,
                                   {{0.5, 161, 83}, {0.4, 755, 99}, {0.3, 4788, 105}, {0.2, 23944, 106},
                                    {0.1, 83117, 106}, {0.0, 367653, 106}},
                                   ok);
    auto product = check_table2("product", root + "/product/product.csv", root + "/product/product_truth.csv",
                                JoinMode::Cross,
                                {{0.5, 637, 335}, {0.4, 1427, 571}, {0.3, 3154, 805}, {0.2, 8315, 1011},
                                 {0.1, 37641, 1090}, {0.0, 1180452, 1097}},
                                ok);
    return {ok, restaurant + "; " + product};
}

Outcome worked_examples()
{
    std::vector<std::string> failures;
    auto expect = [&](bool cond, const std::string& what) {
        if (!cond)
            failures.push_back(what);
    };
    const auto pairs = table1_pairs();
    expect(pairs.size() == 10, "10 candidate pairs (got " + std::to_string(pairs.size()) + ")");
    expect(pair_based(pairs, 2).size() == 5, "5 pair HITs at k=2");

    using Names = std::set<std::string>;
    const auto tt = two_tiered(pairs, 4);
    std::set<Names> sets;
    for (const auto& h : tt)
        sets.insert(Names(h.records.begin(), h.records.end()));
    expect(tt.size() == 3, "3 cluster HITs at k=4 (got " + std::to_string(tt.size()) + ")");
    expect(sets == std::set<Names>{{"r1", "r2", "r3", "r7"}, {"r3", "r4", "r5", "r6"}, {"r4", "r7", "r8", "r9"}},
           "HITs equal H1-H3");
    expect(oracle::check_cover(pairs, as_hits(tt), 4).empty(), "HITs cover all 10 pairs");

    expect(approx_cover(pairs, 4, 1).nominal_count == 7, "approximation nominal count 7");

    PairGraph g(pairs);
    const auto cls = classify(connected_components(g), 4);
    std::vector<Names> pieces;
    if (cls.large.size() == 1)
        for (const auto& p : partition_lcc(cls.large[0], 4)) {
            Names s;
            for (auto v : p.vertices)
                s.insert(g.id(v));
            pieces.push_back(s);
        }
    expect(pieces == std::vector<Names>{{"r3", "r4", "r5", "r6"}, {"r1", "r2", "r3", "r7"}, {"r4", "r7"}},
           "partition pieces {r3,r4,r5,r6} {r1,r2,r3,r7} {r4,r7}");

    const auto sol = solve_packing(PackingInstance{4, {0, 2, 0, 2}});
    expect(sol.objective == 3, "packing c=(0,2,0,2) objective 3");

    std::string detail = failures.empty() ? "all 7 checks exact" : "failed:";
    for (const auto& f : failures)
        detail += " [" + f + "]";
    return {failures.empty(), detail};
}

Outcome packing_oracle()
{
    const auto t0 = Clock::now();
    Rng rng(0xb1);
    int agree = 0;
    std::string first_bad;
    for (int t = 0; t < kPackingInstances; ++t) {
        const std::uint32_t k = 2 + static_cast<std::uint32_t>(rng.below(kPackingMaxK - 1));
        const auto n = 1 + rng.below(kPackingMaxItems);
        std::vector<std::size_t> sizes;
        std::vector<std::uint32_t> s32;
        for (std::uint64_t i = 0; i < n; ++i) {
            sizes.push_back(1 + rng.below(k));
            s32.push_back(static_cast<std::uint32_t>(sizes.back()));
        }
        const auto got = solve_packing(PackingInstance::from_sizes(sizes, k)).objective;
        const auto want = oracle::min_bins(s32, k);
        if (got == want)
            ++agree;
        else if (first_bad.empty())
            first_bad = " first mismatch at instance " + std::to_string(t);
    }
    const double secs = seconds_since(t0);
    return {agree == kPackingInstances && secs < kPackingSeconds,
            std::to_string(agree) + "/" + std::to_string(kPackingInstances) + " optimal, " + fmt("%.2fs", secs) +
                first_bad};
}

Outcome generator_contracts()
{
    const auto t0 = Clock::now();
    const std::vector<std::string> baselines{"random", "bfs", "dfs", "approx"};
    std::map<std::string, int> not_worse;
    std::map<std::string, std::vector<long>> margin;
    std::string violation;
    for (int t = 0; t < kFuzzGraphs; ++t) {
        const auto pairs = oracle::random_graph(kFuzzVertices, kFuzzEdges, 0xf00d + t);
        std::map<std::string, std::vector<Hit>> out;
        out["two-tiered"] = as_hits(two_tiered(pairs, kFuzzK));
        out["random"] = as_hits(random_gen(pairs, kFuzzK, t));
        out["bfs"] = as_hits(bfs_gen(pairs, kFuzzK));
        out["dfs"] = as_hits(dfs_gen(pairs, kFuzzK));
        out["approx"] = as_hits(approx_cover(pairs, kFuzzK, t).hits);
        out["pair"] = as_hits(pair_based(pairs, kFuzzK));
        for (const auto& [name, hits] : out)
            if (auto v = oracle::check_cover(pairs, hits, kFuzzK); !v.empty() && violation.empty())
                violation = name + " on graph " + std::to_string(t) + ": " + v;
        const long tt = static_cast<long>(out["two-tiered"].size());
        for (const auto& b : baselines) {
            const long other = static_cast<long>(out[b].size());
            if (tt <= other)
                ++not_worse[b];
            margin[b].push_back(other - tt);
        }
    }

    bool ok = violation.empty();
    std::string detail = violation.empty() ? "coverage and size bound hold for all 6 generators;" : violation + ";";
    for (const auto& b : baselines) {
        auto m = margin[b];
        std::nth_element(m.begin(), m.begin() + m.size() / 2, m.end());
        const long median = m[m.size() / 2];
        const double share = double(not_worse[b]) / kFuzzGraphs;
        if (share < kFuzzWinShare || median <= 0)
            ok = false;
        detail += " vs " + b + ": <= in " + fmt("%.1f%%", 100 * share) + ", median margin " + std::to_string(median) + ";";
    }

    const std::string root = CROWDER_DATASETS;
    const std::string rpath = root + "/restaurant/restaurant.csv";
    if (!fs::exists(rpath)) {
        ok = false;
        detail += " restaurant dataset missing";
    } else {
        const auto recs = load_records(rpath, JoinMode::Self);
        const auto pairs = generate_candidates(recs, PruneConfig{0.1, JoinMode::Self, {}, 0});
        const auto tt = two_tiered(pairs, kFuzzK).size();
        std::map<std::string, std::size_t> counts{{"random", random_gen(pairs, kFuzzK, 1).size()},
                                                  {"bfs", bfs_gen(pairs, kFuzzK).size()},
                                                  {"dfs", dfs_gen(pairs, kFuzzK).size()}};
        std::size_t best = ~std::size_t{0};
        for (const auto& [n, c] : counts)
            best = std::min(best, c);
        const double gap = double(best) / double(tt);
        if (gap < kRestaurantGap)
            ok = false;
        detail += " restaurant t=0.1 k=10 (" + std::to_string(pairs.size()) + " pairs): two-tiered " +
                  std::to_string(tt) + ", random " + std::to_string(counts["random"]) + ", bfs " +
                  std::to_string(counts["bfs"]) + ", dfs " + std::to_string(counts["dfs"]) + ", gap " +
                  fmt("%.2fx", gap) + ";";
    }
    const double secs = seconds_since(t0);
    if (secs > kGeneratorSeconds)
        ok = false;
    return {ok, detail + " " + fmt("%.1fs", secs)};
}

Outcome comparison_model()
{
    Rng rng(0xc0);
    int eq = 0;
    for (int t = 0; t < kPartitions; ++t) {
        EntityPartition p;
        const auto m = 1 + rng.below(15);
        for (std::uint64_t i = 0; i < m; ++i)
            p.sizes.push_back(1 + static_cast<std::uint32_t>(rng.below(8)));
        if (comparisons_seq(p) == comparisons_closed(p) && comparisons_seq(p) == oracle::comparisons_direct(p.sizes))
            ++eq;
    }
    bool extremes = comparisons_seq({{3, 1}}) == 3 && comparisons_closed({{3, 1}}) == 3;
    for (std::uint32_t n = 1; n <= 20; ++n)
        extremes = extremes && comparisons_seq({std::vector<std::uint32_t>(n, 1)}) == n * (n - 1) / 2 &&
                   comparisons_seq({{n}}) == n - 1;

    int sorted_min = 0, desc_min = 0, asc_min = 0;
    const int cases = 500;
    for (int t = 0; t < cases; ++t) {
        std::vector<std::uint32_t> sizes;
        const auto m = 1 + rng.below(kOrderingMaxEntities);
        for (std::uint64_t i = 0; i < m; ++i)
            sizes.push_back(1 + static_cast<std::uint32_t>(rng.below(6)));
        const auto brute = oracle::all_orders(sizes);
        const auto e = extreme_orderings(sizes);
        desc_min += e.descending == brute.min;
        asc_min += e.ascending == brute.min;
        sorted_min += (e.descending == brute.min || e.ascending == brute.min) && e.min == brute.min;
    }
    const bool ok = eq == kPartitions && extremes && sorted_min == cases;
    return {ok, "eq1==eq2 on " + std::to_string(eq) + "/" + std::to_string(kPartitions) +
                    ", example=3 and extremes " + (extremes ? "ok" : "WRONG") + ", sorted-order minimum in " +
                    std::to_string(sorted_min) + "/" + std::to_string(cases) + " (largest-first " +
                    std::to_string(desc_min) + ", smallest-first " + std::to_string(asc_min) + ")"};
}

Outcome aggregation()
{
    // 200 pairs in pair HITs of 10, ground truth ~40% matches
    std::vector<Record> recs;
    GroundTruth truth;
    std::vector<Hit> hits;
    Rng rng(0xa9);
    for (std::size_t i = 0; i < kAggregationPairs; ++i) {
        const auto a = "a" + std::to_string(1000 + i), b = "b" + std::to_string(1000 + i);
        recs.push_back(normalize_record(a, Source::Single, {{"name", a}}));
        recs.push_back(normalize_record(b, Source::Single, {{"name", b}}));
        if (rng.bernoulli(0.4))
            truth.matches.insert(IdPair{a, b});
        if (i % 10 == 0)
            hits.push_back(PairHit{static_cast<HitId>(hits.size() + 1), {}});
        std::get<PairHit>(hits.back()).pairs.push_back({a, b, 0.5});
    }
    TruthOracle oracle(truth, recs);
    auto accuracy = [&](const std::vector<AggregatedVerdict>& vs) {
        std::size_t ok = 0;
        for (const auto& v : vs)
            ok += v.decision == truth.contains(v.pair);
        return double(ok) / double(vs.size());
    };

    const auto perfect = extract_all(simulate_campaign(hits, oracle, parse_worker_pool("perfect:3"), 3, 5), hits);
    const double em_perfect = accuracy(dawid_skene(perfect).verdicts);
    const double mv_perfect = accuracy(majority_vote(perfect));

    const auto mixed =
        extract_all(simulate_campaign(hits, oracle, parse_worker_pool("diligent:3:0.9:0.9,adversarial:1"), 4, 5), hits);
    const auto em = dawid_skene(mixed);
    const double em_acc = accuracy(em.verdicts);
    const double mv_acc = accuracy(majority_vote(mixed));

    bool objective_monotone = true, data_ll_monotone = true;
    for (std::size_t i = 1; i < em.objective.size(); ++i) {
        objective_monotone = objective_monotone && em.objective[i] >= em.objective[i - 1] - 1e-9;
        data_ll_monotone = data_ll_monotone && em.log_likelihood[i] >= em.log_likelihood[i - 1] - 1e-9;
    }
    const auto& adv = em.workers.at("w4");
    const double adv_off = 1.0 - (adv.sensitivity + adv.specificity) / 2.0;

    const bool ok = em_perfect == 1.0 && mv_perfect == 1.0 && em_acc > mv_acc && objective_monotone &&
                    data_ll_monotone && adv_off > 0.5;
    return {ok, "perfect workers: EM " + fmt("%.3f", em_perfect) + ", MV " + fmt("%.3f", mv_perfect) +
                    "; 3x0.9 + adversarial: EM " + fmt("%.3f", em_acc) + " vs MV " + fmt("%.3f", mv_acc) +
                    ", adversary off-diagonal " + fmt("%.3f", adv_off) + ", " + std::to_string(em.iterations) +
                    " iterations, objective " + (objective_monotone ? "monotone" : "NOT monotone") +
                    ", data log-likelihood " + (data_ll_monotone ? "monotone" : "NOT monotone")};
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& tag)
{
    auto p = fs::temp_directory_path() / ("crowder-accept-" + tag + "-" + std::to_string(::getpid()));
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

int run_binary(const std::vector<std::string>& args)
{
    std::string cmd = CROWDER_BINARY;
    for (const auto& a : args)
        cmd += " '" + a + "'";
    cmd += " >/dev/null 2>&1";
    return std::system(cmd.c_str());
}

Outcome determinism()
{
    const auto dir = scratch("det");
    const auto a = dir / "a", b = dir / "b";
    const int ra = run_binary({"run", "--config", data("table1.conf"), "--out-dir", a.string()});
    const int rb = run_binary({"run", "--config", data("table1.conf"), "--out-dir", b.string()});
    if (ra != 0 || rb != 0)
        return {false, "pipeline exited with " + std::to_string(ra) + "/" + std::to_string(rb)};

    std::size_t files = 0, identical = 0;
    for (const auto& e : fs::directory_iterator(a)) {
        ++files;
        identical += slurp(e.path()) == slurp(b / e.path().filename());
    }
    std::ifstream vin(a / "verdicts.csv");
    std::set<IdPair> matched;
    for (const auto& v : read_verdicts_csv(vin))
        if (v.decision)
            matched.insert(v.pair);
    const auto truth = load_truth(data("table1_truth.csv"));
    fs::remove_all(dir);
    const bool ok = files > 0 && identical == files && matched == truth.matches;
    std::string names;
    for (const auto& p : matched)
        names += " (" + p.a + "," + p.b + ")";
    return {ok, std::to_string(identical) + "/" + std::to_string(files) + " artifacts byte-identical; matches:" + names};
}

// --- service crash safety --------------------------------------------------

struct ServerProcess {
    pid_t pid = -1;
    int port = 0;

    static ServerProcess start(const std::vector<std::string>& args)
    {
        int fds[2];
        if (::pipe(fds) != 0)
            throw std::runtime_error("pipe failed");
        const pid_t pid = ::fork();
        if (pid == 0) {
            ::dup2(fds[1], STDOUT_FILENO);
            ::close(fds[0]);
            ::close(fds[1]);
            std::vector<char*> argv;
            static std::string bin = CROWDER_BINARY;
            argv.push_back(bin.data());
            std::vector<std::string> copy = args;
            for (auto& a : copy)
                argv.push_back(a.data());
            argv.push_back(nullptr);
            ::execv(bin.c_str(), argv.data());
            std::_Exit(127);
        }
        ::close(fds[1]);
        std::string line;
        char c;
        while (::read(fds[0], &c, 1) == 1 && c != '\n')
            line += c;
        ::close(fds[0]);
        const auto colon = line.rfind(':');
        if (line.rfind("listening on", 0) != 0 || colon == std::string::npos) {
            ::kill(pid, SIGKILL);
            ::waitpid(pid, nullptr, 0);
            throw std::runtime_error("server did not start: '" + line + "'");
        }
        return {pid, std::stoi(line.substr(colon + 1))};
    }

    void kill9()
    {
        ::kill(pid, SIGKILL);
        ::waitpid(pid, nullptr, 0);
        pid = -1;
    }

    ~ServerProcess()
    {
        if (pid > 0)
            kill9();
    }
};

struct Ack {
    HitId hit;
    std::string worker;
    bool operator<(const Ack& o) const { return std::tie(hit, worker) < std::tie(o.hit, o.worker); }
};

/// Each submitter asks for a HIT and answers it, up to `limit` times or until
/// `stop` is set. Acknowledged submissions are recorded.
void submitters(int port, std::size_t limit, std::atomic<bool>& stop, std::set<Ack>& acked, std::mutex& mu,
                std::atomic<int>& in_flight_errors)
{
    std::vector<std::thread> ts;
    for (std::size_t w = 0; w < kSubmitters; ++w)
        ts.emplace_back([&, w] {
            httplib::Client cli("127.0.0.1", port);
            cli.set_connection_timeout(2);
            cli.set_read_timeout(5);
            const std::string id = "worker" + std::to_string(w);
            for (std::size_t n = 0; n < limit && !stop; ++n) {
                auto next = cli.Get("/api/hits/next?worker_id=" + id);
                if (!next || next->status != 200) {
                    ++in_flight_errors;
                    return;
                }
                const auto hit = json::parse(next->body)["hit"];
                if (hit.is_null())
                    return;
                json answers = json::array();
                for (std::size_t i = 0; i < hit["pairs"].size(); ++i)
                    answers.push_back((w + i) % 3 == 0);
                const HitId hid = hit["id"].get<HitId>();
                auto res = cli.Post("/api/hits/" + std::to_string(hid) + "/assignments",
                                    json{{"worker_id", id}, {"answers", answers}}.dump(), "application/json");
                if (!res) {
                    ++in_flight_errors;
                    return;
                }
                if (res->status == 200) {
                    std::lock_guard lock(mu);
                    acked.insert({hid, id});
                }
            }
        });
    for (auto& t : ts)
        t.join();
}

json get_progress(int port)
{
    httplib::Client cli("127.0.0.1", port);
    auto r = cli.Get("/api/progress");
    if (!r)
        throw std::runtime_error("progress request failed");
    return json::parse(r->body);
}

Outcome crash_safety()
{
    const auto t0 = Clock::now();
    const auto dir = scratch("crash");
    const auto out = dir / "out", logdir = dir / "log";
    fs::create_directories(out);

    // 120 pair HITs over a random graph, replicated 3 times
    const auto pairs = oracle::random_graph(300, 480, 31);
    {
        std::ofstream r(dir / "records.csv");
        r << "id,name\n";
        std::set<std::string> ids;
        for (const auto& p : pairs) {
            ids.insert(p.a);
            ids.insert(p.b);
        }
        for (const auto& id : ids)
            r << id << ",item " << id << "\n";
        std::ofstream h(out / "hits.jsonl");
        write_hits_jsonl(h, to_hits(pair_based(pairs, 4)));
    }
    const std::vector<std::string> args{"serve",      "--port",    "0",          "--records", (dir / "records.csv").string(),
                                        "--out-dir",  out.string(), "--data-dir", logdir.string(), "--replicas",
                                        "3"};
    const auto log = logdir / "assignments.jsonl";

    std::set<Ack> acked;
    std::mutex mu;
    std::atomic<int> errors{0};
    std::atomic<bool> stop{false};
    std::string detail;
    bool ok = true;

    // phase 1: quiescent snapshot, then SIGKILL and compare
    {
        auto server = ServerProcess::start(args);
        submitters(server.port, 3, stop, acked, mu, errors);
        const auto before = get_progress(server.port);
        server.kill9();
        auto again = ServerProcess::start(args);
        const auto after = get_progress(again.port);
        const auto replayed = Campaign::replay(log);
        std::set<Ack> logged;
        for (const auto& [key, a] : replayed.submissions)
            logged.insert({key.first, key.second});
        const bool same = before == after && logged.size() == acked.size() &&
                          std::equal(logged.begin(), logged.end(), acked.begin(),
                                     [](const Ack& x, const Ack& y) { return !(x < y) && !(y < x); });
        ok = ok && same;
        detail += "quiescent kill: " + std::to_string(acked.size()) + " acknowledged, state " +
                  (same ? "identical" : "DIFFERENT") + " after restart;";
        again.kill9();
    }

    // phase 2: SIGKILL while 50 submitters are mid-request
    {
        auto server = ServerProcess::start(args);
        std::atomic<bool> never{false};
        std::set<Ack> acked2;
        std::thread load([&] { submitters(server.port, 1000, never, acked2, mu, errors); });
        std::this_thread::sleep_for(std::chrono::milliseconds(150));
        server.kill9();
        load.join();

        auto again = ServerProcess::start(args);
        const auto replayed = Campaign::replay(log);
        std::set<Ack> logged;
        for (const auto& [key, a] : replayed.submissions)
            logged.insert({key.first, key.second});
        std::size_t lost = 0;
        for (const auto& s : {acked, acked2})
            for (const auto& a : s)
                lost += !logged.count(a);
        std::size_t lines = 0;
        {
            std::ifstream in(log);
            std::string l;
            while (std::getline(in, l))
                lines += l.find("\"event\":\"assignment\"") != std::string::npos;
        }
        bool dup_free = lines == replayed.submissions.size();
        bool within_r = true;
        for (const auto& [hit, workers] : replayed.workers) {
            dup_free = dup_free && std::set<std::string>(workers.begin(), workers.end()).size() == workers.size();
            within_r = within_r && workers.size() <= 3;
        }
        const auto prog = get_progress(again.port);
        const bool counts_match = prog["assignments"].get<std::size_t>() == replayed.submissions.size();

        // finish the campaign on the restarted server
        std::atomic<bool> no{false};
        std::set<Ack> acked3;
        submitters(again.port, 1000, no, acked3, mu, errors);
        const auto done = get_progress(again.port);
        const bool finished = done["open"] == 0;
        const auto final_state = Campaign::replay(log);
        bool final_dup_free = true;
        for (const auto& [hit, workers] : final_state.workers)
            final_dup_free = final_dup_free && workers.size() == 3 &&
                             std::set<std::string>(workers.begin(), workers.end()).size() == 3;

        const bool phase_ok = lost == 0 && dup_free && within_r && counts_match && finished && final_dup_free;
        ok = ok && phase_ok;
        detail += " mid-flight kill: " + std::to_string(acked2.size()) + " acknowledged before kill, " +
                  std::to_string(lost) + " lost, " + (dup_free ? "no" : "SOME") + " duplicate (hit,worker), " +
                  "replayed count " + (counts_match ? "matches" : "DIFFERS from") + " served progress; campaign " +
                  (finished && final_dup_free ? "completed with 3 distinct workers per HIT" : "NOT completed cleanly") +
                  ";";
    }
    fs::remove_all(dir);
    const double secs = seconds_since(t0);
    ok = ok && secs < kCrashSeconds;
    return {ok, detail + " " + fmt("%.1fs", secs)};
}

struct Criterion {
    const char* name;
    const char* title;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv)
{
    const std::vector<Criterion> all{
        {"jaccard", "Jaccard golden values", jaccard_golden},
        {"table2", "Likelihood-threshold table reproduction", table2},
        {"worked_examples", "Worked-example suite", worked_examples},
        {"packing_oracle", "Packing optimality oracle", packing_oracle},
        {"generator_contracts", "Generator contracts", generator_contracts},
        {"comparison_model", "Comparison model", comparison_model},
        {"aggregation", "Aggregation", aggregation},
        {"determinism", "End-to-end determinism", determinism},
        {"crash_safety", "Service crash safety", crash_safety},
    };

    std::string only;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--criterion" && i + 1 < argc)
            only = argv[++i];
        else if (a == "--list") {
            for (const auto& c : all)
                std::cout << c.name << "\n";
            return 0;
        } else {
            std::cerr << "usage: acceptance [--criterion NAME] [--list]\n";
            return 2;
        }
    }

    int failed = 0, ran = 0;
    for (const auto& c : all) {
        if (!only.empty() && only != c.name)
            continue;
        ++ran;
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::cout << (o.pass ? "PASS  " : "FAIL  ") << c.title << ": " << o.detail << std::endl;
    }
    if (ran == 0) {
        std::cerr << "unknown criterion '" << only << "'\n";
        return 2;
    }
    return failed ? 1 : 0;
}
