#include <algorithm>

#include "groundctl/api.hpp"
#include "groundctl/text.hpp"

namespace groundctl::api {

namespace {

const std::vector<pipeline::Arm> kDefaultEvalArms{pipeline::Arm::grounded, pipeline::Arm::ungrounded,
                                                  pipeline::Arm::text_only, pipeline::Arm::html_only};

ApiError bad_request(std::string code, std::string message, json detail = json::object()) {
    return {400, std::move(code), std::move(message), std::move(detail)};
}

ApiError malformed(std::string message, json detail = json::object()) {
    return {422, "malformed_body", std::move(message), std::move(detail)};
}

std::string required_string(const json& body, const char* field) {
    if (!body.is_object()) throw malformed("request body must be a JSON object");
    const auto it = body.find(field);
    if (it == body.end() || !it->is_string()) throw malformed(std::string("missing string field '") + field + "'");
    return it->get<std::string>();
}

std::optional<std::string> optional_string(const json& body, const char* field) {
    if (!body.is_object()) return std::nullopt;
    const auto it = body.find(field);
    if (it == body.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) throw malformed(std::string("field '") + field + "' must be a string");
    return it->get<std::string>();
}

std::string query_of(const json& body) {
    auto q = required_string(body, "query");
    if (text::trim(q).empty()) throw malformed("query is empty");
    return q;
}

json syntax_error_json(const gen::SyntaxError& e) { return {{"line", e.line}, {"reason", e.reason}}; }

}  // namespace

json ApiError::body() const { return {{"code", code}, {"message", message}, {"detail", detail}}; }

void ServiceConfig::validate() const {
    if (port < 0 || port > 65535) throw ConfigError("port out of range");
    retrieval.validate();
    chunking.validate();
    if (fixture_path.empty() || !std::filesystem::is_regular_file(fixture_path))
        throw ConfigError("fixture manifest not found: " + fixture_path.string());
    if (store_path.empty()) throw ConfigError("store path is required");
    const auto parent = store_path.parent_path();
    if (!parent.empty() && !std::filesystem::is_directory(parent))
        throw ConfigError("store directory does not exist: " + parent.string());
    if (eval_workers == 0) throw ConfigError("eval_workers must be at least 1");
    if (http_threads == 0) throw ConfigError("http_threads must be at least 1");
}

struct Service::Job {
    std::string id;
    eval::SuiteConfig suite;
    store::VectorStore store;  // snapshot taken at submission
    std::string status = "queued";  // queued, running, done, failed
    std::size_t done = 0;
    std::size_t total = 0;
    std::string error;
    std::size_t records = 0;
    std::size_t incomplete = 0;
    json summary;
    std::string markdown;
    std::vector<std::string> files;
};

Service::Service(ServiceConfig cfg, std::shared_ptr<const embed::Embedder> embedder, eval::GeneratorFactory factory)
    : cfg_(std::move(cfg)), embedder_(std::move(embedder)), factory_(std::move(factory)) {
    cfg_.validate();
    if (!embedder_) throw ConfigError("service needs an embedder");
    fixture_ = std::make_unique<exec::Fixture>(exec::Fixture::load(cfg_.fixture_path));
    if (std::filesystem::exists(cfg_.store_path)) {
        store_ = store::VectorStore::load(cfg_.store_path);
        if (store_.dim() && *store_.dim() != embedder_->dim())
            throw DimensionMismatch(embedder_->dim(), *store_.dim());
    }
    for (std::size_t i = 0; i < cfg_.eval_workers; ++i) workers_.emplace_back([this] { run_worker(); });
}

Service::~Service() {
    {
        std::lock_guard lock(jobs_mu_);
        stopping_ = true;
    }
    jobs_cv_.notify_all();
    for (auto& w : workers_) w.join();
}

Reply Service::guarded(const std::function<Reply()>& fn) const {
    const auto fail = [](const ApiError& e) { return Reply{e.status, e.body()}; };
    try {
        return fn();
    } catch (const ApiError& e) {
        return fail(e);
    } catch (const rag::EmptyKnowledgeBase& e) {
        return fail({409, "empty_knowledge_base", e.what()});
    } catch (const ProviderError& e) {
        json detail{{"retryable", e.retryable()}};
        if (e.http_status()) detail["http_status"] = e.http_status();
        return fail({502, "provider_error", e.what(), detail});
    } catch (const DuplicateSource& e) {
        return fail(bad_request("duplicate_source", e.what(), {{"source", e.source_id()}}));
    } catch (const ParseError& e) {
        return fail(malformed(e.what(), {{"byte_offset", e.byte_offset()}}));
    } catch (const EncodingError& e) {
        return fail(malformed(e.what(), {{"byte_offset", e.byte_offset()}}));
    } catch (const ConfigError& e) {
        return fail(bad_request("invalid_request", e.what()));
    } catch (const std::exception& e) {
        return fail({500, "internal_error", e.what()});
    }
}

Reply Service::ingest(const json& body) {
    return guarded([&] {
        const json* list = &body;
        if (body.is_object() && body.contains("documents")) list = &body.at("documents");
        if (!list->is_array()) throw malformed("expected a JSON array of {name, type, content}");
        if (list->empty()) throw malformed("no documents given");

        std::vector<ingest::SourceDocument> docs;
        for (const auto& d : *list) {
            ingest::SourceDocument doc;
            doc.source_id = required_string(d, "name");
            doc.raw_bytes = required_string(d, "content");
            doc.origin = "request";
            if (doc.source_id.empty()) throw malformed("document name is empty");
            std::optional<ingest::SourceType> type;
            if (const auto t = optional_string(d, "type")) {
                type = ingest::source_type_from_string(*t);
                if (!type) throw bad_request("unsupported_type", "unsupported document type '" + *t + "'",
                                             {{"name", doc.source_id}, {"type", *t}});
            } else {
                type = ingest::source_type_from_path(doc.source_id);
                if (!type) throw bad_request("unsupported_type", "cannot infer a type for '" + doc.source_id + "'",
                                             {{"name", doc.source_id}});
            }
            doc.source_type = *type;
            docs.push_back(std::move(doc));
        }
        return ingest_documents(std::move(docs));
    });
}

Reply Service::ingest_documents(std::vector<ingest::SourceDocument> docs) {
    return guarded([&] {
        if (docs.empty()) throw malformed("no documents given");
        std::lock_guard lock(ingest_mu_);
        // Index into a copy so a failed persist leaves the served store untouched.
        store::VectorStore staged = store_;
        const auto report = pipeline::index_documents(staged, *embedder_, docs, cfg_.chunking);
        try {
            staged.persist(cfg_.store_path);
        } catch (const std::exception& e) {
            throw ApiError{507, "persistence_failed", e.what(), {{"path", cfg_.store_path.string()}}};
        }
        store_ = staged;

        json collisions = json::array();
        for (const auto& c : report.collisions) collisions.push_back(to_json(c));
        return Reply{200,
                     {{"chunks_indexed", report.chunks_indexed},
                      {"store_size", report.store_size},
                      {"html_recoveries", report.html_recoveries},
                      {"collisions", std::move(collisions)}}};
    });
}

Reply Service::stats() const {
    return guarded([&] {
        json sources = json::array();
        for (const auto& s : store_.sources()) {
            sources.push_back(
                {{"source_id", s.source_id}, {"source_type", ingest::to_string(s.source_type)}, {"chunks", s.chunks}});
        }
        const auto dim = store_.dim();
        const auto& m = fixture_->manifest();
        json pages = json::array();
        for (const auto& [id, file] : m.pages) pages.push_back(id);
        return Reply{200,
                     {{"chunks", store_.size()},
                      {"dim", dim ? json(*dim) : json(nullptr)},
                      {"sources", std::move(sources)},
                      {"fixture",
                       {{"name", m.name},
                        {"start_page", m.start_page},
                        {"pages", std::move(pages)},
                        {"scenarios", m.scenarios.size()},
                        {"unbound_selectors", fixture_->unbound()}}},
                      {"retrieval",
                       {{"k", cfg_.retrieval.k},
                        {"char_budget", cfg_.retrieval.char_budget},
                        {"per_type_minimum", cfg_.retrieval.per_type_minimum}}}}};
    });
}

std::pair<pipeline::Arm, std::unique_ptr<gen::Generator>> Service::generator_for(const json& body) const {
    pipeline::Arm arm = cfg_.default_arm;
    if (const auto g = optional_string(body, "generator")) {
        const auto a = pipeline::arm_from_string(*g);
        if (!a) throw bad_request("unknown_generator", "unknown generator '" + *g + "'", {{"generator", *g}});
        arm = *a;
    }
    try {
        return {arm, factory_(pipeline::generator_kind(arm))};
    } catch (const ConfigError& e) {
        throw ApiError{502, "provider_unavailable", e.what(), {{"retryable", false}}};
    }
}

Reply Service::generate_test_cases(const json& body) const {
    return guarded([&] {
        const auto query = query_of(body);
        const auto [arm, generator] = generator_for(body);
        const auto g =
            pipeline::generate(store_, *embedder_, *generator, query, cfg_.retrieval, pipeline::context_mode(arm));
        json out{{"query", query}, {"generator", pipeline::to_string(arm)}, {"retrieved", to_json(g.context)}};
        if (const auto* s = g.script()) {
            out["steps"] = gen::describe_steps(s->steps);
        } else {
            const auto& e = std::get<gen::SyntaxError>(g.parsed);
            throw ApiError{422, "generation_failed", e.message(), syntax_error_json(e)};
        }
        return Reply{200, std::move(out)};
    });
}

Reply Service::generate_script(const json& body) const {
    return guarded([&] {
        const auto query = query_of(body);
        const auto [arm, generator] = generator_for(body);
        const auto g =
            pipeline::generate(store_, *embedder_, *generator, query, cfg_.retrieval, pipeline::context_mode(arm));
        json out{{"query", query},
                 {"generator", pipeline::to_string(arm)},
                 {"script", g.raw},
                 {"retrieved", to_json(g.context)},
                 {"prompt",
                  {{"included_chunk_ids", g.prompt.included_chunk_ids},
                   {"dropped_chunk_ids", g.prompt.dropped_chunk_ids},
                   {"partial_chunk_id", g.prompt.partial_chunk_id ? json(*g.prompt.partial_chunk_id) : json(nullptr)},
                   {"chars", g.prompt_text.size()}}}};
        if (const auto* s = g.script()) {
            json steps = json::array();
            for (const auto& st : s->steps) steps.push_back(to_json(st));
            const auto start = fixture_->start_page_for(query);
            out["parsed"] = std::move(steps);
            out["syntax_error"] = nullptr;
            out["start_page"] = start;
            out["grounding"] = to_json(exec::resolution_stats(*s, *fixture_, start));
        } else {
            out["parsed"] = nullptr;
            out["syntax_error"] = syntax_error_json(std::get<gen::SyntaxError>(g.parsed));
            out["grounding"] = nullptr;
        }
        return Reply{200, std::move(out)};
    });
}

Reply Service::execute(const json& body) const {
    return guarded([&] {
        const auto raw = required_string(body, "script");
        auto parsed = gen::parse_script(gen::strip_code_fences(raw));
        if (const auto* e = std::get_if<gen::SyntaxError>(&parsed))
            throw bad_request("syntax_error", e->message(), syntax_error_json(*e));
        const auto& script = std::get<gen::ActionScript>(parsed);

        const exec::ScenarioSpec* scenario = nullptr;
        if (const auto id = optional_string(body, "scenario_id")) {
            scenario = fixture_->manifest().scenario(*id);
            if (!scenario) throw bad_request("unknown_scenario", "unknown scenario '" + *id + "'", {{"scenario_id", *id}});
        }
        std::string start = fixture_->manifest().start_page;
        if (const auto p = optional_string(body, "start_page")) {
            start = *p;
        } else if (const auto q = optional_string(body, "query")) {
            start = fixture_->start_page_for(*q);
        } else if (scenario) {
            start = fixture_->start_page_for(scenario->query);
        }

        json out = to_json(exec::execute(script, *fixture_, scenario, start));
        out["start_page"] = start;
        out["scenario_id"] = scenario ? json(scenario->id) : json(nullptr);
        out["grounding"] = to_json(exec::resolution_stats(script, *fixture_, start));
        return Reply{200, std::move(out)};
    });
}

Reply Service::start_evaluation(const json& body) {
    return guarded([&] {
        if (!body.is_object() && !body.is_null()) throw malformed("request body must be a JSON object");
        eval::SuiteConfig suite;
        suite.retrieval = cfg_.retrieval;
        suite.arms = kDefaultEvalArms;
        if (body.is_object() && body.contains("arms")) {
            const auto& arms = body.at("arms");
            if (!arms.is_array() || arms.empty()) throw malformed("arms must be a non-empty array of names");
            suite.arms.clear();
            for (const auto& a : arms) {
                const auto arm = a.is_string() ? pipeline::arm_from_string(a.get<std::string>()) : std::nullopt;
                if (!arm) throw bad_request("unknown_arm", "unknown arm " + a.dump(), {{"arm", a}});
                suite.arms.push_back(*arm);
            }
        }
        if (body.is_object() && body.contains("seeds")) {
            const auto& seeds = body.at("seeds");
            if (!seeds.is_array() || seeds.empty()) throw malformed("seeds must be a non-empty array of integers");
            suite.seeds.clear();
            for (const auto& s : seeds) {
                if (!s.is_number_integer() || (!s.is_number_unsigned() && s.get<std::int64_t>() < 0))
                    throw malformed("seed " + s.dump() + " is not a non-negative integer");
                suite.seeds.push_back(s.get<std::uint64_t>());
            }
        }
        if (body.is_object() && body.contains("scenario_ids")) {
            const auto& ids = body.at("scenario_ids");
            if (!ids.is_array()) throw malformed("scenario_ids must be an array of strings");
            for (const auto& id : ids) {
                if (!id.is_string()) throw malformed("scenario_ids must be an array of strings");
                if (!fixture_->manifest().scenario(id.get<std::string>()))
                    throw bad_request("unknown_scenario", "unknown scenario " + id.dump(), {{"scenario_id", id}});
                suite.scenario_ids.push_back(id.get<std::string>());
            }
        }
        if (store_.size() == 0) throw rag::EmptyKnowledgeBase();

        auto job = std::make_shared<Job>();
        job->suite = std::move(suite);
        job->store = store_;
        {
            std::lock_guard lock(jobs_mu_);
            job->id = "job-" + std::to_string(next_job_++);
            jobs_[job->id] = job;
            queue_.push_back(job);
        }
        jobs_cv_.notify_all();
        return Reply{202, {{"job_id", job->id}, {"status", "queued"}, {"location", "/evaluate/" + job->id}}};
    });
}

Reply Service::evaluation(const std::string& job_id) const {
    return guarded([&] {
        std::lock_guard lock(jobs_mu_);
        const auto it = jobs_.find(job_id);
        if (it == jobs_.end()) throw ApiError{404, "unknown_job", "no evaluation job '" + job_id + "'", {{"job_id", job_id}}};
        const Job& j = *it->second;
        json arms = json::array();
        for (auto a : j.suite.arms) arms.push_back(pipeline::to_string(a));
        json out{{"job_id", j.id},
                 {"status", j.status},
                 {"arms", std::move(arms)},
                 {"seeds", j.suite.seeds},
                 {"progress", {{"done", j.done}, {"total", j.total}}}};
        if (j.status == "done") {
            out["records"] = j.records;
            out["incomplete"] = j.incomplete;
            out["summary"] = j.summary;
            out["report_markdown"] = j.markdown;
            out["files"] = j.files;
        }
        if (j.status == "failed") out["error"] = j.error;
        return Reply{200, std::move(out)};
    });
}

void Service::wait_for_job(const std::string& job_id) const {
    std::unique_lock lock(jobs_mu_);
    const auto it = jobs_.find(job_id);
    if (it == jobs_.end()) return;
    const auto job = it->second;
    jobs_cv_.wait(lock, [&] { return job->status == "done" || job->status == "failed" || stopping_; });
}

void Service::run_worker() {
    for (;;) {
        std::shared_ptr<Job> job;
        {
            std::unique_lock lock(jobs_mu_);
            jobs_cv_.wait(lock, [&] { return stopping_ || !queue_.empty(); });
            if (stopping_) return;
            job = queue_.front();
            queue_.pop_front();
            job->status = "running";
        }
        run_job(*job);
        jobs_cv_.notify_all();
    }
}

void Service::run_job(Job& job) {
    try {
        const auto records = eval::run_suite(job.store, *embedder_, *fixture_, job.suite, factory_,
                                             [&](std::size_t done, std::size_t total) {
                                                 std::lock_guard lock(jobs_mu_);
                                                 job.done = done;
                                                 job.total = total;
                                             });
        const auto summary = eval::summarize(records);
        std::vector<std::string> files;
        if (cfg_.report_dir) {
            for (const auto& p : eval::write_reports(*cfg_.report_dir / job.id, records, summary))
                files.push_back(p.string());
        }
        const auto incomplete = static_cast<std::size_t>(
            std::count_if(records.begin(), records.end(), [](const auto& r) { return r.incomplete; }));

        std::lock_guard lock(jobs_mu_);
        job.records = records.size();
        job.incomplete = incomplete;
        job.summary = eval::to_json(summary);
        job.markdown = eval::render_markdown(summary);
        job.files = std::move(files);
        job.status = "done";
    } catch (const std::exception& e) {
        std::lock_guard lock(jobs_mu_);
        job.error = e.what();
        job.status = "failed";
    }
}

}  // namespace groundctl::api
