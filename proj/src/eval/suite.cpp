#include <algorithm>
#include <atomic>
#include <mutex>
#include <thread>

#include "groundctl/eval.hpp"

namespace groundctl::eval {

std::string to_string(FailureMode m) {
    switch (m) {
        case FailureMode::syntax: return "syntax";
        case FailureMode::hallucination: return "hallucination";
        case FailureMode::ambiguous: return "ambiguous";
        case FailureMode::timeout: return "timeout";
        case FailureMode::logic: return "logic";
    }
    return "?";
}

std::optional<FailureMode> failure_mode_from_string(std::string_view s) {
    for (auto m : {FailureMode::syntax, FailureMode::hallucination, FailureMode::ambiguous, FailureMode::timeout,
                   FailureMode::logic}) {
        if (to_string(m) == s) return m;
    }
    return std::nullopt;
}

std::optional<double> EvalRecord::resolution_rate() const {
    if (incomplete) return std::nullopt;
    if (!syntax_valid) return 0.0;
    if (locators == 0) return std::nullopt;
    return static_cast<double>(resolved) / static_cast<double>(locators);
}

nlohmann::json to_json(const EvalRecord& r) {
    nlohmann::json j;
    j["seed"] = r.seed;
    j["arm"] = pipeline::to_string(r.arm);
    j["scenario_id"] = r.scenario_id;
    j["query"] = r.query;
    j["incomplete"] = r.incomplete;
    if (!r.error.empty()) j["error"] = r.error;
    j["syntax_valid"] = r.syntax_valid;
    j["resolved"] = r.resolved;
    j["locators"] = r.locators;
    const auto rate = r.resolution_rate();
    j["resolution_rate"] = rate ? nlohmann::json(*rate) : nlohmann::json(nullptr);
    j["execution_success"] = r.execution_success;
    j["failure_mode"] = r.failure_mode ? nlohmann::json(to_string(*r.failure_mode)) : nlohmann::json(nullptr);
    j["step_outcomes"] = r.step_outcomes;
    j["retrieved_chunk_ids"] = r.retrieved_chunk_ids;
    j["script"] = r.raw_script;
    return j;
}

EvalRecord evaluate_one(const store::VectorStore& store, const embed::Embedder& embedder,
                        const gen::Generator& generator, const exec::Fixture& fixture,
                        const exec::ScenarioSpec& scenario, Arm arm, std::uint64_t seed,
                        const rag::RetrievalConfig& retrieval) {
    EvalRecord r;
    r.seed = seed;
    r.arm = arm;
    r.scenario_id = scenario.id;
    r.query = scenario.query;

    pipeline::Generation g;
    try {
        g = pipeline::generate(store, embedder, generator, scenario.query, retrieval, pipeline::context_mode(arm));
    } catch (const ProviderError& e) {
        r.incomplete = true;
        r.error = e.what();
        return r;
    }
    for (const auto* c : g.context.ranked()) r.retrieved_chunk_ids.push_back(c->chunk_id);
    r.raw_script = g.raw;

    const auto* script = g.script();
    if (!script) {
        r.error = std::get<gen::SyntaxError>(g.parsed).message();
        r.failure_mode = FailureMode::syntax;
        return r;
    }
    r.syntax_valid = true;

    const std::string start = fixture.start_page_for(scenario.query);
    const auto res = exec::resolution_stats(*script, fixture, start);
    r.resolved = res.matched;
    r.locators = res.total;

    const auto trace = exec::execute(*script, fixture, &scenario, start);
    for (const auto& s : trace.steps) r.step_outcomes.push_back(exec::to_string(s.outcome));
    r.execution_success = trace.success();
    if (!r.execution_success) {
        switch (trace.failure().value_or(exec::Outcome::state_mismatch)) {
            case exec::Outcome::not_found: r.failure_mode = FailureMode::hallucination; break;
            case exec::Outcome::ambiguous: r.failure_mode = FailureMode::ambiguous; break;
            case exec::Outcome::timeout: r.failure_mode = FailureMode::timeout; break;
            case exec::Outcome::state_mismatch:
            case exec::Outcome::resolved: r.failure_mode = FailureMode::logic; break;
        }
    }
    return r;
}

std::vector<EvalRecord> run_suite(const store::VectorStore& store, const embed::Embedder& embedder,
                                  const exec::Fixture& fixture, const SuiteConfig& cfg,
                                  const GeneratorFactory& factory, const ProgressFn& progress) {
    cfg.retrieval.validate();
    if (cfg.arms.empty()) throw ConfigError("no arms to evaluate");
    if (cfg.seeds.empty()) throw ConfigError("no seeds given");

    std::vector<const exec::ScenarioSpec*> scenarios;
    if (cfg.scenario_ids.empty()) {
        for (const auto& s : fixture.manifest().scenarios) scenarios.push_back(&s);
    } else {
        for (const auto& id : cfg.scenario_ids) {
            const auto* s = fixture.manifest().scenario(id);
            if (!s) throw ConfigError("unknown scenario " + id);
            scenarios.push_back(s);
        }
    }

    // Generators are built once per arm; a provider that cannot even be
    // configured marks its whole arm incomplete.
    std::vector<std::unique_ptr<gen::Generator>> generators;
    std::vector<std::string> arm_errors;
    for (Arm a : cfg.arms) {
        try {
            generators.push_back(factory(pipeline::generator_kind(a)));
            arm_errors.emplace_back();
        } catch (const Error& e) {
            generators.push_back(nullptr);
            arm_errors.emplace_back(e.what());
        }
    }

    struct Task {
        std::uint64_t seed;
        std::size_t arm_index;
        const exec::ScenarioSpec* scenario;
    };
    std::vector<Task> tasks;
    for (auto seed : cfg.seeds)
        for (std::size_t a = 0; a < cfg.arms.size(); ++a)
            for (const auto* s : scenarios) tasks.push_back({seed, a, s});

    std::vector<EvalRecord> records(tasks.size());
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> done{0};
    std::mutex progress_mu;
    std::exception_ptr failure;
    std::mutex failure_mu;

    const auto worker = [&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) {
            const Task& t = tasks[i];
            const Arm arm = cfg.arms[t.arm_index];
            try {
                if (!generators[t.arm_index]) {
                    EvalRecord r;
                    r.seed = t.seed;
                    r.arm = arm;
                    r.scenario_id = t.scenario->id;
                    r.query = t.scenario->query;
                    r.incomplete = true;
                    r.error = arm_errors[t.arm_index];
                    records[i] = std::move(r);
                } else {
                    records[i] = evaluate_one(store, embedder, *generators[t.arm_index], fixture, *t.scenario, arm,
                                              t.seed, cfg.retrieval);
                }
            } catch (...) {
                std::lock_guard lock(failure_mu);
                if (!failure) failure = std::current_exception();
            }
            const std::size_t n = ++done;
            if (progress) {
                std::lock_guard lock(progress_mu);
                progress(n, tasks.size());
            }
        }
    };

    const std::size_t workers = std::max<std::size_t>(1, std::min(cfg.workers, tasks.size()));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);
    return records;
}

}  // namespace groundctl::eval
