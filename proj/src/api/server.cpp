#include <httplib.h>

#include <algorithm>

#include "groundctl/api.hpp"

namespace groundctl::api {

namespace {

constexpr std::size_t kMaxPayload = 64u << 20;

void send(httplib::Response& res, const Reply& r) {
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
}

std::optional<json> parse_body(const httplib::Request& req, httplib::Response& res, bool allow_empty = false) {
    if (req.body.empty() && allow_empty) return json::object();
    try {
        return json::parse(req.body);
    } catch (const json::parse_error& e) {
        const ApiError err{422, "malformed_body", "request body is not valid JSON",
                           {{"byte_offset", e.byte}, {"reason", e.what()}}};
        send(res, {err.status, err.body()});
        return std::nullopt;
    }
}

json op(const char* summary, json request, json responses) {
    json o{{"summary", summary}, {"responses", std::move(responses)}};
    if (!request.is_null()) o["requestBody"] = {{"content", {{"application/json", {{"schema", std::move(request)}}}}}};
    return o;
}

json ref(const char* name) { return {{"$ref", std::string("#/components/schemas/") + name}}; }

json obj(json props, std::vector<std::string> required = {}) {
    json o{{"type", "object"}, {"properties", std::move(props)}};
    if (!required.empty()) o["required"] = required;
    return o;
}

const json kString{{"type", "string"}};
const json kInt{{"type", "integer"}};
const json kBool{{"type", "boolean"}};
const json kNumber{{"type", "number"}};

}  // namespace

json schema() {
    const json error_resp{{"description", "error envelope"},
                          {"content", {{"application/json", {{"schema", ref("Error")}}}}}};
    const auto ok = [](const char* name) {
        return json{{"description", "ok"}, {"content", {{"application/json", {{"schema", ref(name)}}}}}};
    };
    const json arm{{"type", "string"}, {"enum", {"grounded", "ungrounded", "text-only", "html-only", "remote"}}};

    json schemas;
    schemas["Error"] = obj({{"code", kString}, {"message", kString}, {"detail", {{"type", "object"}}}},
                           {"code", "message", "detail"});
    schemas["Document"] = obj({{"name", kString},
                               {"type", {{"type", "string"}, {"enum", {"markdown", "text", "json", "html"}}}},
                               {"content", kString}},
                              {"name", "content"});
    schemas["IngestResult"] = obj({{"chunks_indexed", kInt},
                                   {"store_size", kInt},
                                   {"html_recoveries", kInt},
                                   {"collisions", {{"type", "array"}, {"items", {{"type", "object"}}}}}});
    schemas["Stats"] = obj({{"chunks", kInt},
                            {"dim", kInt},
                            {"sources", {{"type", "array"}, {"items", {{"type", "object"}}}}},
                            {"fixture", {{"type", "object"}}},
                            {"retrieval", {{"type", "object"}}}});
    schemas["QueryRequest"] = obj({{"query", kString}, {"generator", arm}}, {"query"});
    schemas["Retrieved"] = obj({{"query", kString},
                                {"candidates", kInt},
                                {"chunks", {{"type", "array"}, {"items", {{"type", "object"}}}}}});
    schemas["TestCases"] = obj({{"query", kString},
                                {"generator", arm},
                                {"steps", {{"type", "array"}, {"items", kString}}},
                                {"retrieved", ref("Retrieved")}});
    schemas["Grounding"] = obj({{"matched", kInt},
                                {"total", kInt},
                                {"rate", kNumber},
                                {"checks", {{"type", "array"}, {"items", {{"type", "object"}}}}}});
    schemas["Script"] = obj({{"query", kString},
                             {"generator", arm},
                             {"script", kString},
                             {"parsed", {{"type", "array"}, {"items", {{"type", "object"}}}}},
                             {"syntax_error", {{"type", "object"}}},
                             {"grounding", ref("Grounding")},
                             {"retrieved", ref("Retrieved")},
                             {"prompt", {{"type", "object"}}}});
    schemas["ExecuteRequest"] =
        obj({{"script", kString}, {"scenario_id", kString}, {"query", kString}, {"start_page", kString}}, {"script"});
    schemas["Trace"] = obj({{"steps", {{"type", "array"}, {"items", {{"type", "object"}}}}},
                            {"final_page", kString},
                            {"final_state", {{"type", "object"}}},
                            {"completed", kBool},
                            {"goal_met", kBool},
                            {"unmet_goals", {{"type", "array"}, {"items", kString}}},
                            {"success", kBool},
                            {"failure", kString},
                            {"grounding", ref("Grounding")}});
    schemas["EvaluateRequest"] = obj({{"arms", {{"type", "array"}, {"items", arm}}},
                                      {"seeds", {{"type", "array"}, {"items", kInt}}},
                                      {"scenario_ids", {{"type", "array"}, {"items", kString}}}});
    schemas["Job"] = obj({{"job_id", kString},
                          {"status", {{"type", "string"}, {"enum", {"queued", "running", "done", "failed"}}}},
                          {"progress", {{"type", "object"}}},
                          {"records", kInt},
                          {"summary", {{"type", "object"}}},
                          {"report_markdown", kString},
                          {"files", {{"type", "array"}, {"items", kString}}},
                          {"error", kString}});

    json paths;
    paths["/ingest"]["post"] =
        op("Chunk, embed and index documents (JSON array or multipart files)",
           {{"type", "array"}, {"items", ref("Document")}},
           {{"200", ok("IngestResult")}, {"400", error_resp}, {"422", error_resp}, {"507", error_resp}});
    paths["/stats"]["get"] = op("Knowledge base and fixture summary", nullptr, {{"200", ok("Stats")}});
    paths["/generate-test-cases"]["post"] = op("Numbered natural-language steps for a query", ref("QueryRequest"),
                                               {{"200", ok("TestCases")},
                                                {"409", error_resp},
                                                {"422", error_resp},
                                                {"502", error_resp}});
    paths["/generate-script"]["post"] = op("Action script with a static grounding preview", ref("QueryRequest"),
                                           {{"200", ok("Script")},
                                            {"409", error_resp},
                                            {"422", error_resp},
                                            {"502", error_resp}});
    paths["/execute"]["post"] = op("Run a script against the fixture", ref("ExecuteRequest"),
                                   {{"200", ok("Trace")}, {"400", error_resp}, {"422", error_resp}});
    paths["/evaluate"]["post"] = op("Queue an evaluation job", ref("EvaluateRequest"),
                                    {{"202", ok("Job")}, {"400", error_resp}, {"409", error_resp}});
    paths["/evaluate/{job_id}"]["get"] = op("Poll an evaluation job", nullptr, {{"200", ok("Job")}, {"404", error_resp}});
    paths["/evaluate/{job_id}"]["get"]["parameters"] =
        json::array({{{"name", "job_id"}, {"in", "path"}, {"required", true}, {"schema", kString}}});
    paths["/schema"]["get"] = op("This document", nullptr, {{"200", {{"description", "ok"}}}});

    return {{"openapi", "3.0.3"},
            {"info", {{"title", "groundctl"}, {"version", "1"}}},
            {"paths", std::move(paths)},
            {"components", {{"schemas", std::move(schemas)}}}};
}

Server::Server(Service& service) : service_(service), http_(std::make_unique<httplib::Server>()) {
    const auto threads = service_.config().http_threads;
    http_->new_task_queue = [threads] { return new httplib::ThreadPool(threads); };
    http_->set_payload_max_length(kMaxPayload);
    install_routes();
}

Server::~Server() { stop(); }

void Server::install_routes() {
    auto& s = *http_;
    const auto allow = service_.config().cors_allowlist;

    s.set_post_routing_handler([allow](const httplib::Request& req, httplib::Response& res) {
        const auto origin = req.get_header_value("Origin");
        if (origin.empty()) return;
        const bool any = std::find(allow.begin(), allow.end(), "*") != allow.end();
        if (any || std::find(allow.begin(), allow.end(), origin) != allow.end()) {
            res.set_header("Access-Control-Allow-Origin", origin);
            res.set_header("Vary", "Origin");
        }
    });
    s.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
        res.status = 204;
        res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type");
        res.set_header("Access-Control-Max-Age", "600");
    });

    s.Post("/ingest", [this](const httplib::Request& req, httplib::Response& res) {
        if (req.is_multipart_form_data()) {
            std::vector<ingest::SourceDocument> docs;
            for (const auto& [field, f] : req.files) {
                if (f.filename.empty()) continue;
                const auto type = ingest::source_type_from_path(f.filename);
                if (!type) {
                    const ApiError e{400, "unsupported_type", "unsupported file type: " + f.filename,
                                     {{"name", f.filename}}};
                    return send(res, {e.status, e.body()});
                }
                docs.push_back({f.filename, *type, f.content, "upload"});
            }
            return send(res, service_.ingest_documents(std::move(docs)));
        }
        if (const auto body = parse_body(req, res)) send(res, service_.ingest(*body));
    });
    s.Get("/stats", [this](const httplib::Request&, httplib::Response& res) { send(res, service_.stats()); });
    s.Post("/generate-test-cases", [this](const httplib::Request& req, httplib::Response& res) {
        if (const auto body = parse_body(req, res)) send(res, service_.generate_test_cases(*body));
    });
    s.Post("/generate-script", [this](const httplib::Request& req, httplib::Response& res) {
        if (const auto body = parse_body(req, res)) send(res, service_.generate_script(*body));
    });
    s.Post("/execute", [this](const httplib::Request& req, httplib::Response& res) {
        if (const auto body = parse_body(req, res)) send(res, service_.execute(*body));
    });
    s.Post("/evaluate", [this](const httplib::Request& req, httplib::Response& res) {
        if (const auto body = parse_body(req, res, true)) send(res, service_.start_evaluation(*body));
    });
    s.Get("/evaluate/:job_id", [this](const httplib::Request& req, httplib::Response& res) {
        send(res, service_.evaluation(req.path_params.at("job_id")));
    });
    s.Get("/schema", [](const httplib::Request&, httplib::Response& res) { send(res, {200, schema()}); });

    s.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
        if (!res.body.empty()) return;
        const ApiError e{res.status, res.status == 404 ? "not_found" : "http_error",
                         "no route for " + req.method + " " + req.path, json::object()};
        res.set_content(e.body().dump(), "application/json");
    });
    s.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        std::string what = "unknown error";
        try {
            std::rethrow_exception(ep);
        } catch (const std::exception& e) {
            what = e.what();
        } catch (...) {
        }
        const ApiError e{500, "internal_error", what, json::object()};
        send(res, {e.status, e.body()});
    });
}

int Server::start() {
    const auto& cfg = service_.config();
    int port = cfg.port;
    if (port == 0) {
        port = http_->bind_to_any_port(cfg.host);
        if (port < 0) throw ConfigError("cannot bind " + cfg.host);
    } else if (!http_->bind_to_port(cfg.host, port)) {
        throw ConfigError("cannot bind " + cfg.host + ":" + std::to_string(port));
    }
    thread_ = std::thread([this] { http_->listen_after_bind(); });
    http_->wait_until_ready();
    return port;
}

void Server::listen() {
    const auto& cfg = service_.config();
    if (!http_->listen(cfg.host, cfg.port)) throw ConfigError("cannot listen on " + cfg.host + ":" + std::to_string(cfg.port));
}

void Server::stop() {
    if (http_) http_->stop();
    if (thread_.joinable()) thread_.join();
}

}  // namespace groundctl::api
