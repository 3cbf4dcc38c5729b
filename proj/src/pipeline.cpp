#include "crowder/pipeline.hpp"

#include "crowder/aggregate.hpp"
#include "crowder/csv.hpp"
#include "crowder/dataset.hpp"
#include "crowder/rng.hpp"
#include "crowder/similarity.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace crowder {

using nlohmann::json;
namespace fs = std::filesystem;

Aggregation parse_aggregation(const std::string& s)
{
    if (s == "em")
        return Aggregation::Em;
    if (s == "majority")
        return Aggregation::Majority;
    throw ConfigError("unknown aggregation '" + s + "' (em, majority)");
}

std::string to_string(Aggregation a)
{
    return a == Aggregation::Em ? "em" : "majority";
}

void PipelineConfig::validate() const
{
    if (!(threshold >= 0.0 && threshold <= 1.0))
        throw ConfigError("threshold must lie in [0,1]");
    const std::size_t min_k = generator == GeneratorKind::Pair ? 1 : 2;
    if (cluster_size < min_k)
        throw ConfigError("cluster_size must be at least " + std::to_string(min_k) + " for generator " +
                          to_string(generator));
    if (replicas < 1)
        throw ConfigError("replicas must be at least 1");
}

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (auto t = trim(item); !t.empty())
            out.push_back(t);
    return out;
}

template <class T, class F>
T parse_number(const std::string& key, const std::string& value, F f)
{
    try {
        std::size_t used = 0;
        T v = f(value, &used);
        if (used != value.size())
            throw std::invalid_argument(value);
        return v;
    } catch (const std::logic_error&) {
        throw ConfigError("setting '" + key + "': '" + value + "' is not a valid number");
    }
}

std::size_t parse_size(const std::string& key, const std::string& value)
{
    if (!value.empty() && value[0] == '-')
        throw ConfigError("setting '" + key + "' must not be negative");
    return parse_number<std::size_t>(key, value, [](const std::string& s, std::size_t* n) { return std::stoull(s, n); });
}

}  // namespace

void apply_setting(PipelineConfig& cfg, const std::string& key, const std::string& value)
{
    if (key == "records")
        cfg.records = value;
    else if (key == "truth")
        cfg.truth = value;
    else if (key == "mode")
        cfg.mode = parse_join_mode(value);
    else if (key == "threshold")
        cfg.threshold = parse_number<double>(key, value, [](const std::string& s, std::size_t* n) { return std::stod(s, n); });
    else if (key == "cluster_size")
        cfg.cluster_size = parse_size(key, value);
    else if (key == "generator")
        cfg.generator = parse_generator(value);
    else if (key == "replicas")
        cfg.replicas = parse_size(key, value);
    else if (key == "seed")
        cfg.seed = parse_size(key, value);
    else if (key == "workers")
        cfg.workers = value;
    else if (key == "aggregation")
        cfg.aggregation = parse_aggregation(value);
    else if (key == "attributes")
        cfg.attributes = split_list(value);
    else if (key == "qualification")
        cfg.qualification = value;
    else if (key == "out_dir")
        cfg.out_dir = value;
    else if (key == "threads")
        cfg.threads = static_cast<unsigned>(parse_size(key, value));
    else
        throw ConfigError("unknown setting '" + key + "'");
}

void apply_config_file(PipelineConfig& cfg, const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file " + path);
    const auto base = fs::path(path).parent_path();
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
        const auto key = trim(line.substr(0, eq));
        auto value = trim(line.substr(eq + 1));
        // paths in a config file are relative to the file itself
        if ((key == "records" || key == "truth" || key == "qualification" || key == "out_dir") && !value.empty() &&
            fs::path(value).is_relative())
            value = (base / value).lexically_normal().string();
        try {
            apply_setting(cfg, key, value);
        } catch (const ConfigError& e) {
            throw ConfigError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
}

PipelineConfig load_config(const std::string& path)
{
    PipelineConfig cfg;
    apply_config_file(cfg, path);
    return cfg;
}

QualificationTest load_qualification(const std::string& path)
{
    const auto rows = csv::read_file(path);
    if (rows.empty() || rows[0] != csv::Row{"id_a", "id_b", "match"})
        throw SchemaError(path + ": expected header id_a,id_b,match");
    if (rows.size() != 4)
        throw SchemaError(path + ": qualification test needs exactly 3 pairs, found " +
                          std::to_string(rows.size() - 1));
    QualificationTest test;
    for (std::size_t i = 0; i < 3; ++i) {
        const auto& r = rows[i + 1];
        if (r.size() != 3 || (r[2] != "0" && r[2] != "1"))
            throw SchemaError(path + ": row " + std::to_string(i + 2) + " must be id_a,id_b,0|1");
        test[i] = {IdPair{r[0], r[1]}, r[2] == "1"};
    }
    return test;
}

StageError::StageError(std::string stage, const std::string& cause)
    : Error(stage + ": " + cause), stage_(std::move(stage))
{
}

namespace {

fs::path out(const PipelineConfig& cfg, const char* name)
{
    return fs::path(cfg.out_dir) / name;
}

std::ifstream open_input(const fs::path& path, const char* produced_by)
{
    std::ifstream in(path);
    if (!in)
        throw Error("missing input " + path.string() + " (run the " + produced_by + " stage first)");
    return in;
}

std::ofstream open_output(const fs::path& path)
{
    fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
    std::ofstream o(path, std::ios::binary);
    if (!o)
        throw Error("cannot write " + path.string());
    return o;
}

void require_path(const std::string& value, const char* what)
{
    if (value.empty())
        throw ConfigError(std::string("no ") + what + " file configured");
}

std::vector<Record> records_of(const PipelineConfig& cfg)
{
    require_path(cfg.records, "records");
    return load_records(cfg.records, cfg.mode);
}

GroundTruth truth_of(const PipelineConfig& cfg, const std::vector<Record>* records)
{
    require_path(cfg.truth, "ground-truth");
    auto truth = load_truth(cfg.truth);
    if (records)
        validate_truth(truth, *records);
    return truth;
}

template <class F>
void run_stage(const char* name, F f)
{
    try {
        f();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(name, e.what());
    }
}

}  // namespace

std::vector<double> report_thresholds(double threshold)
{
    std::vector<double> out;
    for (int i = 5; i >= 0; --i) {
        const double t = i / 10.0;
        if (t >= threshold - 1e-12)
            out.push_back(t);
    }
    if (std::none_of(out.begin(), out.end(), [&](double t) { return std::abs(t - threshold) < 1e-12; }))
        out.push_back(threshold);
    std::sort(out.rbegin(), out.rend());
    return out;
}

void stage_prune(const PipelineConfig& cfg)
{
    run_stage("prune", [&] {
        cfg.validate();
        const auto records = records_of(cfg);
        std::optional<GroundTruth> truth;
        if (!cfg.truth.empty())
            truth = truth_of(cfg, &records);

        PruneConfig pc{cfg.threshold, cfg.mode, cfg.attributes, cfg.threads};
        const auto pairs = generate_candidates(records, pc);
        {
            auto o = open_output(out(cfg, artifacts::pairs));
            write_pairs_jsonl(o, pairs);
        }
        {
            auto o = open_output(out(cfg, artifacts::prune_report));
            if (truth && !truth->empty())
                write_prune_report(o, prune_report(pairs, *truth, report_thresholds(cfg.threshold)));
            else
                write_prune_report(o, {});
        }
        const auto st = compute_stats(records, cfg.mode, truth ? &*truth : nullptr);
        json j{{"records", st.record_count},
               {"total_pairs", st.total_pairs},
               {"matches", truth ? json(st.match_count) : json(nullptr)},
               {"threshold", cfg.threshold},
               {"candidate_pairs", pairs.size()}};
        auto o = open_output(out(cfg, artifacts::stats));
        o << j.dump(2) << '\n';
    });
}

void stage_generate(const PipelineConfig& cfg)
{
    run_stage("generate", [&] {
        cfg.validate();
        auto in = open_input(out(cfg, artifacts::pairs), "prune");
        const auto pairs = read_pairs_jsonl(in);
        const auto gen = run_generator(cfg.generator, pairs, cfg.cluster_size, derive_seed(cfg.seed, "generate"));
        {
            auto o = open_output(out(cfg, artifacts::hits));
            write_hits_jsonl(o, gen.hits);
        }
        json j{{"generator", to_string(cfg.generator)},
               {"cluster_size", cfg.cluster_size},
               {"pairs", pairs.size()},
               {"hits", gen.hits.size()},
               {"nominal_count", gen.nominal_count}};
        auto o = open_output(out(cfg, artifacts::generation));
        o << j.dump(2) << '\n';
    });
}

void stage_simulate(const PipelineConfig& cfg)
{
    run_stage("simulate", [&] {
        cfg.validate();
        auto in = open_input(out(cfg, artifacts::hits), "generate");
        const auto hits = read_hits_jsonl(in);
        const auto records = records_of(cfg);
        const auto truth = truth_of(cfg, &records);
        auto pool = parse_worker_pool(cfg.workers);
        if (!cfg.qualification.empty())
            pool = qualification_filter(pool, load_qualification(cfg.qualification),
                                        derive_seed(cfg.seed, "qualification"));
        std::vector<Assignment> assignments;
        if (!hits.empty())
            assignments = simulate_campaign(hits, TruthOracle(truth, records), pool, cfg.replicas,
                                            derive_seed(cfg.seed, "simulate"));
        auto o = open_output(out(cfg, artifacts::assignments));
        write_assignments_jsonl(o, assignments);
    });
}

void stage_aggregate(const PipelineConfig& cfg)
{
    run_stage("aggregate", [&] {
        auto hin = open_input(out(cfg, artifacts::hits), "generate");
        const auto hits = read_hits_jsonl(hin);
        auto ain = open_input(out(cfg, artifacts::assignments), "simulate");
        const auto judgments = extract_all(read_assignments_jsonl(ain), hits);

        std::vector<AggregatedVerdict> verdicts;
        json model{{"aggregation", to_string(cfg.aggregation)}};
        if (cfg.aggregation == Aggregation::Majority || judgments.empty()) {
            verdicts = majority_vote(judgments);
        } else {
            auto em = dawid_skene(judgments);
            verdicts = std::move(em.verdicts);
            json workers = json::object();
            for (const auto& [id, c] : em.workers)
                workers[id] = {{"sensitivity", c.sensitivity}, {"specificity", c.specificity}, {"judgments", c.judgments}};
            model["prior"] = em.prior;
            model["iterations"] = em.iterations;
            model["converged"] = em.converged;
            model["objective"] = em.objective;
            model["log_likelihood"] = em.log_likelihood;
            model["workers"] = workers;
        }
        {
            auto o = open_output(out(cfg, artifacts::verdicts));
            write_verdicts_csv(o, verdicts);
        }
        auto o = open_output(out(cfg, artifacts::em_model));
        o << model.dump(2) << '\n';
    });
}

void stage_evaluate(const PipelineConfig& cfg)
{
    run_stage("evaluate", [&] {
        auto in = open_input(out(cfg, artifacts::verdicts), "aggregate");
        const auto verdicts = read_verdicts_csv(in);
        const auto truth = truth_of(cfg, nullptr);

        std::vector<IdPair> ranked;
        std::size_t predicted = 0, correct = 0;
        for (const auto& v : verdicts) {
            ranked.push_back(v.pair);
            if (v.decision) {
                ++predicted;
                if (truth.contains(v.pair))
                    ++correct;
            }
        }
        std::vector<PRPoint> curve;
        json summary{{"verdicts", verdicts.size()}, {"predicted_matches", predicted}, {"correct_matches", correct},
                     {"true_matches", truth.size()}};
        summary["precision"] = predicted ? json(static_cast<double>(correct) / predicted) : json(nullptr);
        summary["recall"] = truth.empty() ? json(nullptr) : json(static_cast<double>(correct) / truth.size());
        if (!truth.empty())
            curve = precision_recall(ranked, truth);
        {
            auto o = open_output(out(cfg, artifacts::pr_curve));
            write_pr_curve(o, curve);
        }
        auto o = open_output(out(cfg, artifacts::evaluation));
        o << summary.dump(2) << '\n';
    });
}

void run_pipeline(const PipelineConfig& cfg)
{
    stage_prune(cfg);
    stage_generate(cfg);
    stage_simulate(cfg);
    stage_aggregate(cfg);
    stage_evaluate(cfg);
}

}  // namespace crowder
