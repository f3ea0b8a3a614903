#pragma once

#include <atomic>
#include <condition_variable>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "groundctl/embed.hpp"
#include "groundctl/eval.hpp"
#include "groundctl/exec.hpp"
#include "groundctl/ingest.hpp"
#include "groundctl/pipeline.hpp"
#include "groundctl/rag.hpp"
#include "groundctl/store.hpp"

namespace httplib {
class Server;
}

namespace groundctl::api {

using nlohmann::json;

// JSON views shared by the service and the CLI.
json to_json(const gen::ActionStep& s);
json to_json(const exec::ExecutionTrace& t);
json to_json(const exec::ResolutionStats& r);
json to_json(const rag::RetrievedContext& c);
json to_json(const dom::IdCollision& c);
json state_to_json(const exec::State& s);

struct ServiceConfig {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::filesystem::path store_path;    // loaded when present, rewritten after every ingest
    std::filesystem::path fixture_path;  // manifest.json
    std::optional<std::filesystem::path> report_dir;  // evaluate jobs write reports here when set
    pipeline::Arm default_arm = pipeline::Arm::grounded;
    rag::RetrievalConfig retrieval;
    ingest::ChunkingConfig chunking;
    std::vector<std::string> cors_allowlist;  // exact origins; "*" allows any
    std::size_t eval_workers = 1;             // concurrent evaluate jobs
    std::size_t http_threads = 4;

    void validate() const;  // throws ConfigError
};

// Non-2xx reply in the uniform envelope {code, message, detail}.
struct ApiError {
    int status = 500;
    std::string code;
    std::string message;
    json detail = json::object();

    json body() const;
};

struct Reply {
    int status = 200;
    json body;
};

// Transport-free request handlers. Every method takes the parsed JSON body and
// returns a reply; failures come back as ApiError envelopes, never exceptions.
class Service {
public:
    Service(ServiceConfig cfg, std::shared_ptr<const embed::Embedder> embedder,
            eval::GeneratorFactory factory = gen::make_generator);
    ~Service();
    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    Reply ingest(const json& body);
    Reply ingest_documents(std::vector<ingest::SourceDocument> docs);
    Reply stats() const;
    Reply generate_test_cases(const json& body) const;
    Reply generate_script(const json& body) const;
    Reply execute(const json& body) const;
    Reply start_evaluation(const json& body);
    Reply evaluation(const std::string& job_id) const;

    // Blocks until the job leaves the queue and finishes. For tests and the CLI.
    void wait_for_job(const std::string& job_id) const;

    const ServiceConfig& config() const { return cfg_; }
    const exec::Fixture& fixture() const { return *fixture_; }
    store::VectorStore snapshot() const { return store_; }

private:
    struct Job;

    Reply guarded(const std::function<Reply()>& fn) const;
    std::pair<pipeline::Arm, std::unique_ptr<gen::Generator>> generator_for(const json& body) const;
    void run_worker();
    void run_job(Job& job);

    ServiceConfig cfg_;
    std::shared_ptr<const embed::Embedder> embedder_;
    eval::GeneratorFactory factory_;
    std::unique_ptr<exec::Fixture> fixture_;

    store::VectorStore store_;  // has its own reader/writer lock
    std::mutex ingest_mu_;      // one ingest (upsert + persist) at a time

    mutable std::mutex jobs_mu_;
    mutable std::condition_variable jobs_cv_;
    std::map<std::string, std::shared_ptr<Job>> jobs_;
    std::deque<std::shared_ptr<Job>> queue_;
    std::size_t next_job_ = 1;
    bool stopping_ = false;
    std::vector<std::thread> workers_;
};

// OpenAPI-style description of the HTTP surface.
json schema();

// cpp-httplib front end for a Service.
class Server {
public:
    explicit Server(Service& service);
    ~Server();

    // Binds and serves on a background thread; returns the bound port
    // (useful with port 0). Throws ConfigError when binding fails.
    int start();
    // Serves on the calling thread until stop().
    void listen();
    void stop();

private:
    void install_routes();

    Service& service_;
    std::unique_ptr<httplib::Server> http_;
    std::thread thread_;
};

}  // namespace groundctl::api
