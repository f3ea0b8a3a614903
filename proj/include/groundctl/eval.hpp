#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "groundctl/embed.hpp"
#include "groundctl/exec.hpp"
#include "groundctl/gen.hpp"
#include "groundctl/pipeline.hpp"
#include "groundctl/rag.hpp"
#include "groundctl/stats.hpp"
#include "groundctl/store.hpp"

namespace groundctl::eval {

using pipeline::Arm;

enum class FailureMode { syntax, hallucination, ambiguous, timeout, logic };
std::string to_string(FailureMode m);
std::optional<FailureMode> failure_mode_from_string(std::string_view s);

struct EvalRecord {
    std::uint64_t seed = 0;
    Arm arm = Arm::grounded;
    std::string scenario_id;
    std::string query;

    bool incomplete = false;  // provider failed; excluded from every metric
    std::string error;

    bool syntax_valid = false;
    std::string raw_script;
    std::size_t resolved = 0;  // M
    std::size_t locators = 0;  // N
    bool execution_success = false;
    std::optional<FailureMode> failure_mode;  // set iff the script did not succeed
    std::vector<std::string> step_outcomes;
    std::vector<std::string> retrieved_chunk_ids;

    // M/N; a syntax failure counts as 0, a script without locators as absent.
    std::optional<double> resolution_rate() const;
};

nlohmann::json to_json(const EvalRecord& r);

struct SuiteConfig {
    std::vector<Arm> arms;
    std::vector<std::uint64_t> seeds{42, 123, 456};
    std::vector<std::string> scenario_ids;  // empty: every manifest scenario
    rag::RetrievalConfig retrieval;
    std::size_t workers = 1;
};

using GeneratorFactory = std::function<std::unique_ptr<gen::Generator>(gen::GeneratorKind)>;
using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

// Records come back ordered by seed, then arm, then scenario. Mock arms ignore
// the seed; it is recorded regardless.
std::vector<EvalRecord> run_suite(const store::VectorStore& store, const embed::Embedder& embedder,
                                  const exec::Fixture& fixture, const SuiteConfig& cfg,
                                  const GeneratorFactory& factory = gen::make_generator,
                                  const ProgressFn& progress = {});

// One scenario through generate, parse and execute.
EvalRecord evaluate_one(const store::VectorStore& store, const embed::Embedder& embedder,
                        const gen::Generator& generator, const exec::Fixture& fixture,
                        const exec::ScenarioSpec& scenario, Arm arm, std::uint64_t seed,
                        const rag::RetrievalConfig& retrieval);

enum class Metric { syntax_validity, element_resolution, execution_success };
inline constexpr Metric kMetrics[] = {Metric::syntax_validity, Metric::element_resolution, Metric::execution_success};
std::string display_name(Metric m);
std::string to_string(Metric m);

struct MetricStats {
    std::vector<double> runs;  // one percentage per seed
    double mean = 0.0;
    std::optional<double> std;
};

struct ArmSummary {
    Arm arm = Arm::grounded;
    std::size_t records = 0;
    std::size_t incomplete = 0;
    std::map<Metric, MetricStats> metrics;
    std::map<FailureMode, std::size_t> failures;
};

struct Comparison {
    Arm a = Arm::grounded;
    Arm b = Arm::ungrounded;
    Metric metric = Metric::element_resolution;
    std::optional<stats::WelchResult> welch;
    std::optional<double> cohens_d;
};

struct MetricsSummary {
    std::vector<std::uint64_t> seeds;
    std::size_t scenarios = 0;
    std::vector<ArmSummary> arms;  // in requested order
    std::vector<Comparison> comparisons;

    const ArmSummary* arm(Arm a) const;
};

// Per-seed percentages first, then mean and sample std across seeds.
MetricsSummary summarize(const std::vector<EvalRecord>& records);

std::string render_markdown(const MetricsSummary& s);
nlohmann::json to_json(const MetricsSummary& s);
MetricsSummary summary_from_json(const nlohmann::json& j);  // throws ParseError on bad input

// report.md, report.json and raw_records.jsonl under dir (created if needed).
// Returns the three paths. Throws Error when a file cannot be written.
std::vector<std::filesystem::path> write_reports(const std::filesystem::path& dir, const std::vector<EvalRecord>& records,
                                                 const MetricsSummary& summary);

}  // namespace groundctl::eval
