#pragma once

#include "crowder/crowd_sim.hpp"
#include "crowder/errors.hpp"
#include "crowder/eval.hpp"
#include "crowder/types.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace crowder {

enum class Aggregation { Em, Majority };

Aggregation parse_aggregation(const std::string& s);
std::string to_string(Aggregation a);

struct PipelineConfig {
    std::string records;
    std::string truth;
    JoinMode mode = JoinMode::Self;
    double threshold = 0.5;
    std::size_t cluster_size = 10;
    GeneratorKind generator = GeneratorKind::TwoTiered;
    std::size_t replicas = 3;
    std::uint64_t seed = 1;
    std::string workers = "diligent:10";
    Aggregation aggregation = Aggregation::Em;
    std::vector<std::string> attributes;  ///< empty = all
    std::string qualification;            ///< CSV id_a,id_b,match with 3 rows; empty = no test
    std::string out_dir = "out";
    unsigned threads = 0;

    /// Throws ConfigError.
    void validate() const;
};

/// Sets one `key = value` entry; keys are the field names above.
void apply_setting(PipelineConfig& cfg, const std::string& key, const std::string& value);

/// Flat text file of `key = value` lines; `#` starts a comment.
PipelineConfig load_config(const std::string& path);
void apply_config_file(PipelineConfig& cfg, const std::string& path);

QualificationTest load_qualification(const std::string& path);

/// Failure inside one stage; what() is "<stage>: <cause>".
class StageError : public Error {
public:
    StageError(std::string stage, const std::string& cause);
    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

namespace artifacts {
inline constexpr const char* pairs = "pairs.jsonl";
inline constexpr const char* prune_report = "prune_report.csv";
inline constexpr const char* stats = "stats.json";
inline constexpr const char* hits = "hits.jsonl";
inline constexpr const char* generation = "generation.json";
inline constexpr const char* assignments = "assignments.jsonl";
inline constexpr const char* verdicts = "verdicts.csv";
inline constexpr const char* em_model = "em_model.json";
inline constexpr const char* pr_curve = "pr_curve.csv";
inline constexpr const char* evaluation = "evaluation.json";
}  // namespace artifacts

/// Thresholds the prune report covers: the fixed grid 0.5, 0.4, ..., 0 down
/// to the configured threshold, plus the configured threshold.
std::vector<double> report_thresholds(double threshold);

// Each stage reads its inputs from disk and writes its artifacts to out_dir.
void stage_prune(const PipelineConfig& cfg);
void stage_generate(const PipelineConfig& cfg);
void stage_simulate(const PipelineConfig& cfg);
void stage_aggregate(const PipelineConfig& cfg);
void stage_evaluate(const PipelineConfig& cfg);

/// prune -> generate -> simulate -> aggregate -> evaluate.
void run_pipeline(const PipelineConfig& cfg);

}  // namespace crowder
