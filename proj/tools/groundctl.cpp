// groundctl: command-line front end. Each subcommand mirrors an HTTP endpoint
// and prints the same JSON the service would return.
#include <CLI11.hpp>

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "groundctl/api.hpp"
#include "groundctl/eval.hpp"
#include "groundctl/text.hpp"

namespace fs = std::filesystem;
using namespace groundctl;
using nlohmann::json;

namespace {

#ifndef GROUNDCTL_DEFAULT_FIXTURE
#define GROUNDCTL_DEFAULT_FIXTURE "fixture/shop/manifest.json"
#endif

fs::path default_fixture() {
    if (const char* env = std::getenv("GROUNDCTL_FIXTURE")) return env;
    return GROUNDCTL_DEFAULT_FIXTURE;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string read_script(const std::string& path) {
    if (path == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    return read_file(path);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string part; std::getline(ss, part, ',');) {
        const auto t = text::trim(part);
        if (!t.empty()) out.emplace_back(t);
    }
    return out;
}

std::shared_ptr<const embed::Embedder> make_embedder(const std::string& provider) {
    embed::EmbedderConfig cfg;
    if (provider == "remote") cfg.provider = embed::EmbedderKind::remote_api;
    else if (provider != "local") throw ConfigError("unknown embedder " + provider);
    return embed::make_embedder(cfg);
}

int emit(const api::Reply& r) {
    std::cout << r.body.dump(2) << "\n";
    return r.status < 400 ? 0 : 1;
}

struct Common {
    std::string store = "groundctl-store.jsonl";
    std::string fixture = default_fixture().string();
    std::string embedder = "local";
    std::size_t k = 3;
    std::size_t char_budget = 8000;
    std::size_t per_type_minimum = 1;

    void add_store(CLI::App* cmd) {
        cmd->add_option("--store", store, "Vector store file")->capture_default_str();
        cmd->add_option("--embedder", embedder, "local or remote")->capture_default_str();
    }
    void add_fixture(CLI::App* cmd) {
        cmd->add_option("--fixture", fixture, "Fixture manifest")->capture_default_str();
    }
    void add_retrieval(CLI::App* cmd) {
        cmd->add_option("-k", k, "Chunks per retrieval query")->capture_default_str();
        cmd->add_option("--char-budget", char_budget, "Prompt size budget")->capture_default_str();
        cmd->add_option("--per-type-minimum", per_type_minimum)->capture_default_str();
    }

    rag::RetrievalConfig retrieval() const { return {k, char_budget, per_type_minimum}; }

    api::ServiceConfig service() const {
        api::ServiceConfig cfg;
        cfg.store_path = store;
        cfg.fixture_path = fixture;
        cfg.retrieval = retrieval();
        return cfg;
    }
};

api::Server* g_server = nullptr;

void on_signal(int) {
    if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Grounded test-script generation and evaluation"};
    app.require_subcommand(1);
    Common common;

    // ingest
    auto* ingest_cmd = app.add_subcommand("ingest", "Index a directory of .md/.txt/.json/.html files");
    std::string ingest_dir;
    ingest::ChunkingConfig chunking;
    ingest_cmd->add_option("--dir", ingest_dir, "Directory to ingest")->required();
    ingest_cmd->add_option("--chunk-size", chunking.chunk_size)->capture_default_str();
    ingest_cmd->add_option("--overlap", chunking.overlap)->capture_default_str();
    common.add_store(ingest_cmd);
    common.add_fixture(ingest_cmd);

    // gen-cases / gen-script
    std::string query;
    std::string arm_name = "grounded";
    auto* cases_cmd = app.add_subcommand("gen-cases", "Numbered test steps for a query");
    auto* script_cmd = app.add_subcommand("gen-script", "Action script for a query, with a grounding preview");
    bool script_only = false;
    for (auto* cmd : {cases_cmd, script_cmd}) {
        cmd->add_option("-q,--query", query, "Natural-language test intent")->required();
        cmd->add_option("--generator,--arm", arm_name, "grounded, ungrounded, text-only, html-only or remote")
            ->capture_default_str();
        common.add_store(cmd);
        common.add_fixture(cmd);
        common.add_retrieval(cmd);
    }
    script_cmd->add_flag("--script-only", script_only, "Print only the script text");

    // exec
    auto* exec_cmd = app.add_subcommand("exec", "Run a script against the fixture");
    std::string script_path;
    std::string scenario_id;
    std::string start_page;
    exec_cmd->add_option("script", script_path, "Script file, or - for stdin")->required();
    exec_cmd->add_option("--scenario", scenario_id, "Check this scenario's goals");
    exec_cmd->add_option("--start-page", start_page);
    exec_cmd->add_option("-q,--query", query, "Pick the start page from this query");
    common.add_fixture(exec_cmd);

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "Run the evaluation suite");
    std::string arms_arg = "grounded,ungrounded,text-only,html-only";
    std::string seeds_arg = "42,123,456";
    std::string scenarios_arg;
    std::string out_dir = "report";
    std::string eval_store;
    std::size_t workers = 1;
    bool quiet = false;
    eval_cmd->add_option("--arms", arms_arg)->capture_default_str();
    eval_cmd->add_option("--seeds", seeds_arg)->capture_default_str();
    eval_cmd->add_option("--scenarios", scenarios_arg, "Comma-separated scenario ids (default: all)");
    eval_cmd->add_option("--out", out_dir, "Report directory")->capture_default_str();
    eval_cmd->add_option("--store", eval_store, "Use this store instead of indexing the fixture corpus");
    eval_cmd->add_option("--embedder", common.embedder)->capture_default_str();
    eval_cmd->add_option("--workers", workers)->capture_default_str();
    eval_cmd->add_flag("--quiet", quiet, "No progress on stderr");
    common.add_fixture(eval_cmd);
    common.add_retrieval(eval_cmd);

    // serve
    auto* serve_cmd = app.add_subcommand("serve", "HTTP service");
    std::string host = "127.0.0.1";
    int port = 8080;
    std::string cors;
    std::string report_dir;
    bool dump_schema = false;
    std::size_t eval_workers = 1;
    serve_cmd->add_option("--host", host)->capture_default_str();
    serve_cmd->add_option("--port", port)->capture_default_str();
    serve_cmd->add_option("--cors", cors, "Comma-separated allowed origins, or *");
    serve_cmd->add_option("--report-dir", report_dir, "Where evaluation jobs write their reports");
    serve_cmd->add_option("--eval-workers", eval_workers)->capture_default_str();
    serve_cmd->add_flag("--dump-schema", dump_schema, "Print the API schema and exit");
    common.add_store(serve_cmd);
    common.add_fixture(serve_cmd);
    common.add_retrieval(serve_cmd);

    // export
    auto* export_cmd = app.add_subcommand("export", "Convert a script to another test format");
    std::string format = "selenium-python";
    std::string base_url = "http://localhost:8000";
    export_cmd->add_option("script", script_path, "Script file, or - for stdin")->required();
    export_cmd->add_option("--format", format)->check(CLI::IsMember({"selenium-python"}))->capture_default_str();
    export_cmd->add_option("--base-url", base_url)->capture_default_str();
    common.add_fixture(export_cmd);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*ingest_cmd) {
            chunking.validate();
            api::Service service(common.service(), make_embedder(common.embedder));
            return emit(service.ingest_documents(ingest::load_directory(ingest_dir)));
        }
        if (*cases_cmd || *script_cmd) {
            api::Service service(common.service(), make_embedder(common.embedder));
            const json body{{"query", query}, {"generator", arm_name}};
            if (*cases_cmd) return emit(service.generate_test_cases(body));
            const auto r = service.generate_script(body);
            if (script_only && r.status == 200) {
                std::cout << r.body.at("script").get<std::string>();
                return 0;
            }
            return emit(r);
        }
        if (*exec_cmd) {
            const auto fixture = exec::Fixture::load(common.fixture);
            auto parsed = gen::parse_script(gen::strip_code_fences(read_script(script_path)));
            if (const auto* e = std::get_if<gen::SyntaxError>(&parsed)) {
                std::cerr << "syntax error: " << e->message() << "\n";
                return 1;
            }
            const auto& script = std::get<gen::ActionScript>(parsed);
            const exec::ScenarioSpec* scenario = nullptr;
            if (!scenario_id.empty()) {
                scenario = fixture.manifest().scenario(scenario_id);
                if (!scenario) throw ConfigError("unknown scenario " + scenario_id);
            }
            std::string start = fixture.manifest().start_page;
            if (!start_page.empty()) start = start_page;
            else if (!query.empty()) start = fixture.start_page_for(query);
            else if (scenario) start = fixture.start_page_for(scenario->query);
            const auto trace = exec::execute(script, fixture, scenario, start);
            json out = api::to_json(trace);
            out["start_page"] = start;
            out["grounding"] = api::to_json(exec::resolution_stats(script, fixture, start));
            std::cout << out.dump(2) << "\n";
            return trace.success() ? 0 : 1;
        }
        if (*eval_cmd) {
            eval::SuiteConfig suite;
            suite.retrieval = common.retrieval();
            suite.workers = workers;
            suite.arms.clear();
            for (const auto& a : split_list(arms_arg)) {
                const auto arm = pipeline::arm_from_string(a);
                if (!arm) throw ConfigError("unknown arm " + a);
                suite.arms.push_back(*arm);
            }
            suite.seeds.clear();
            for (const auto& s : split_list(seeds_arg)) suite.seeds.push_back(std::stoull(s));
            suite.scenario_ids = split_list(scenarios_arg);

            const auto embedder = make_embedder(common.embedder);
            const auto fixture = exec::Fixture::load(common.fixture);
            store::VectorStore store;
            if (!eval_store.empty()) {
                store = store::VectorStore::load(eval_store);
            } else {
                std::vector<ingest::SourceDocument> docs;
                for (const auto& rel : fixture.manifest().corpus_files())
                    docs.push_back(ingest::load_source(fixture.manifest().root / rel));
                pipeline::index_documents(store, *embedder, docs, {});
            }

            eval::ProgressFn progress;
            if (!quiet) {
                progress = [](std::size_t done, std::size_t total) {
                    if (done == total || done % 20 == 0) std::cerr << "\r" << done << "/" << total << std::flush;
                    if (done == total) std::cerr << "\n";
                };
            }
            const auto records = eval::run_suite(store, *embedder, fixture, suite, gen::make_generator, progress);
            const auto summary = eval::summarize(records);
            const auto paths = eval::write_reports(out_dir, records, summary);
            std::cout << eval::render_markdown(summary);
            for (const auto& p : paths) std::cerr << "wrote " << p.string() << "\n";
            return 0;
        }
        if (*serve_cmd) {
            if (dump_schema) {
                std::cout << api::schema().dump(2) << "\n";
                return 0;
            }
            auto cfg = common.service();
            cfg.host = host;
            cfg.port = port;
            cfg.cors_allowlist = split_list(cors);
            cfg.eval_workers = eval_workers;
            if (!report_dir.empty()) cfg.report_dir = fs::path(report_dir);
            api::Service service(cfg, make_embedder(common.embedder));
            api::Server server(service);
            g_server = &server;
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            std::cerr << "listening on " << host << ":" << port << "\n";
            server.listen();
            g_server = nullptr;
            return 0;
        }
        if (*export_cmd) {
            auto parsed = gen::parse_script(gen::strip_code_fences(read_script(script_path)));
            if (const auto* e = std::get_if<gen::SyntaxError>(&parsed)) {
                std::cerr << "syntax error: " << e->message() << "\n";
                return 1;
            }
            std::map<std::string, std::string> pages;
            if (fs::exists(common.fixture)) pages = exec::FixtureManifest::load(common.fixture).pages;
            std::cout << gen::export_selenium_python(std::get<gen::ActionScript>(parsed), pages, base_url);
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
