#include "crowder/dataset.hpp"
#include "crowder/eval.hpp"
#include "crowder/pipeline.hpp"
#include "crowder/service.hpp"
#include "crowder/similarity.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <pthread.h>
#include <sstream>
#include <thread>

using namespace crowder;

namespace {

/// Options shared by every subcommand. Values given on the command line are
/// applied on top of the config file.
struct CommonOptions {
    std::string config;
    std::map<std::string, std::string> overrides;

    void attach(CLI::App* app)
    {
        app->add_option("--config", config, "key = value config file")->check(CLI::ExistingFile);
        add(app, "--records", "records", "records CSV (id[,source],attributes...)");
        add(app, "--truth", "truth", "ground truth CSV (id_a,id_b)");
        add(app, "--mode", "mode", "self or cross");
        add(app, "--threshold", "threshold", "likelihood threshold in [0,1]");
        add(app, "--cluster-size,-k", "cluster_size", "records per cluster HIT, pairs per pair HIT");
        add(app, "--generator", "generator", "two-tiered, approx, random, bfs, dfs or pair");
        add(app, "--replicas", "replicas", "assignments per HIT");
        add(app, "--seed", "seed", "root random seed");
        add(app, "--workers", "workers", "worker pool, e.g. diligent:8:0.9:0.95,spammer:2");
        add(app, "--aggregation", "aggregation", "em or majority");
        add(app, "--attributes", "attributes", "comma-separated attributes used for similarity");
        add(app, "--qualification", "qualification", "CSV id_a,id_b,match with three pairs");
        add(app, "--out-dir", "out_dir", "artifact directory");
        add(app, "--threads", "threads", "similarity threads (0 = all cores)");
    }

    void add(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help)
    {
        app->add_option_function<std::string>(
            flag, [this, key](const std::string& v) { overrides[key] = v; }, help);
    }

    PipelineConfig resolve() const
    {
        PipelineConfig cfg;
        if (!config.empty())
            apply_config_file(cfg, config);
        for (const auto& [k, v] : overrides)
            apply_setting(cfg, k, v);
        return cfg;
    }
};

std::vector<double> parse_doubles(const std::string& s)
{
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(std::stod(item));
    return out;
}

template <class T>
std::vector<T> parse_unsigned(const std::string& s)
{
    std::vector<T> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(static_cast<T>(std::stoull(item)));
    return out;
}

int serve(const PipelineConfig& cfg, ServeOptions opts, std::string data_dir, bool sync)
{
    if (data_dir.empty())
        if (const char* env = std::getenv("CROWDER_DATA_DIR"))
            data_dir = env;
    if (data_dir.empty())
        data_dir = cfg.out_dir;
    std::filesystem::create_directories(data_dir);

    std::ifstream in(std::filesystem::path(cfg.out_dir) / artifacts::hits);
    if (!in)
        throw Error("missing input " + (std::filesystem::path(cfg.out_dir) / artifacts::hits).string() +
                    " (run the generate stage first)");
    auto hits = read_hits_jsonl(in);
    if (cfg.records.empty())
        throw ConfigError("serve needs --records to show record attributes");
    auto records = load_records(cfg.records, cfg.mode);

    CampaignConfig cc;
    cc.replicas = cfg.replicas;
    cc.sync_writes = sync;
    if (!cfg.qualification.empty())
        cc.qualification = load_qualification(cfg.qualification);
    Campaign campaign(std::move(hits), cc, std::filesystem::path(data_dir) / artifacts::assignments);
    HitServer server(campaign, std::move(records));

    sigset_t set;
    sigemptyset(&set);
    sigaddset(&set, SIGINT);
    sigaddset(&set, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &set, nullptr);
    std::thread waiter([&] {
        int sig = 0;
        sigwait(&set, &sig);
        server.stop();
    });
    waiter.detach();

    const bool ok = server.run(opts, [&](int port) {
        std::cout << "listening on http://" << opts.host << ":" << port << std::endl;
    });
    if (!ok) {
        std::cerr << "crowder: cannot bind " << opts.host << ":" << opts.port << "\n";
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Hybrid human-machine entity resolution: prune, batch into HITs, crowd-verify, aggregate, evaluate"};
    app.require_subcommand(1);

    CommonOptions common;
    std::map<std::string, CLI::App*> sub;
    for (const auto& [name, help] : std::vector<std::pair<std::string, std::string>>{
             {"prune", "compute candidate pairs and the threshold report"},
             {"generate", "batch candidate pairs into HITs"},
             {"simulate", "answer HITs with a simulated worker pool"},
             {"aggregate", "turn assignments into per-pair verdicts"},
             {"evaluate", "precision/recall of the verdicts"},
             {"run", "all stages in order"},
             {"serve", "HTTP service handing HITs to workers"},
             {"bench", "HIT counts of generators across thresholds and cluster sizes"},
             {"synth", "inject token-swapped duplicates into a base dataset"}}) {
        sub[name] = app.add_subcommand(name, help);
        common.attach(sub[name]);
    }

    ServeOptions serve_opts;
    std::string data_dir;
    bool no_sync = false;
    sub["serve"]->add_option("--port", serve_opts.port, "0 picks a free port")->capture_default_str();
    sub["serve"]->add_option("--host", serve_opts.host)->capture_default_str();
    sub["serve"]->add_option("--ui-dir", serve_opts.ui_dir, "static UI bundle served at /");
    sub["serve"]->add_option("--data-dir", data_dir, "log directory (default $CROWDER_DATA_DIR, then --out-dir)");
    sub["serve"]->add_flag("--no-sync", no_sync, "skip fsync after each log append");

    std::string generators = "all", thresholds, cluster_sizes = "10", seeds = "1", pairs_path, bench_out;
    sub["bench"]->add_option("--generators", generators, "comma list or 'all'")->capture_default_str();
    sub["bench"]->add_option("--thresholds", thresholds, "comma list (default: --threshold)");
    sub["bench"]->add_option("--cluster-sizes", cluster_sizes, "comma list")->capture_default_str();
    sub["bench"]->add_option("--seeds", seeds, "comma list for seeded generators")->capture_default_str();
    sub["bench"]->add_option("--pairs", pairs_path, "use this pairs.jsonl instead of --records");
    sub["bench"]->add_option("--output", bench_out, "default <out-dir>/bench.csv");

    unsigned max_dups = 9;
    std::string name_attribute = "name";
    sub["synth"]->add_option("--max-dups", max_dups)->capture_default_str();
    sub["synth"]->add_option("--name-attribute", name_attribute)->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        const auto cfg = common.resolve();
        if (sub["prune"]->parsed())
            stage_prune(cfg);
        else if (sub["generate"]->parsed())
            stage_generate(cfg);
        else if (sub["simulate"]->parsed())
            stage_simulate(cfg);
        else if (sub["aggregate"]->parsed())
            stage_aggregate(cfg);
        else if (sub["evaluate"]->parsed())
            stage_evaluate(cfg);
        else if (sub["run"]->parsed())
            run_pipeline(cfg);
        else if (sub["serve"]->parsed())
            return serve(cfg, serve_opts, data_dir, !no_sync);
        else if (sub["bench"]->parsed()) {
            BenchConfig bc;
            if (generators != "all") {
                bc.generators.clear();
                std::stringstream ss(generators);
                std::string g;
                while (std::getline(ss, g, ','))
                    bc.generators.push_back(parse_generator(g));
            }
            bc.thresholds = thresholds.empty() ? std::vector<double>{cfg.threshold} : parse_doubles(thresholds);
            bc.cluster_sizes = parse_unsigned<std::size_t>(cluster_sizes);
            bc.seeds = parse_unsigned<std::uint64_t>(seeds);

            std::vector<CandidatePair> pairs;
            GroundTruth truth;
            if (!pairs_path.empty()) {
                std::ifstream in(pairs_path);
                if (!in)
                    throw Error("cannot open " + pairs_path);
                pairs = read_pairs_jsonl(in);
            } else {
                if (cfg.records.empty())
                    throw ConfigError("bench needs --records or --pairs");
                const auto records = load_records(cfg.records, cfg.mode);
                const double lowest = *std::min_element(bc.thresholds.begin(), bc.thresholds.end());
                pairs = generate_candidates(records, PruneConfig{lowest, cfg.mode, cfg.attributes, cfg.threads});
            }
            if (!cfg.truth.empty())
                truth = load_truth(cfg.truth);
            const auto rows = bench_generators(pairs, truth, bc);
            const auto path = bench_out.empty() ? std::filesystem::path(cfg.out_dir) / "bench.csv"
                                                : std::filesystem::path(bench_out);
            if (path.has_parent_path())
                std::filesystem::create_directories(path.parent_path());
            std::ofstream o(path);
            write_bench_csv(o, rows);
            for (const auto& r : rows)
                if (!r.error.empty())
                    std::cerr << "crowder: bench " << r.generator << " k=" << r.k << ": " << r.error << "\n";
        } else if (sub["synth"]->parsed()) {
            if (cfg.records.empty())
                throw ConfigError("synth needs --records");
            const auto base = load_records(cfg.records, JoinMode::Self);
            const auto dup = synthesize_dup_dataset(base, max_dups, cfg.seed, name_attribute);
            std::filesystem::create_directories(cfg.out_dir);
            std::ofstream r(std::filesystem::path(cfg.out_dir) / "records.csv");
            write_records(r, dup.records, false);
            std::ofstream t(std::filesystem::path(cfg.out_dir) / "truth.csv");
            write_truth(t, dup.truth);
            if (dup.unchanged_duplicates)
                std::cerr << "crowder: " << dup.unchanged_duplicates
                          << " duplicates copied unchanged (fewer than two name tokens)\n";
        }
    } catch (const StageError& e) {
        std::cerr << "crowder: " << e.what() << "\n";
        return 1;
    } catch (const ConfigError& e) {
        std::cerr << "crowder: configuration: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "crowder: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
