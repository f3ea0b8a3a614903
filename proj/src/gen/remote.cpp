#include <cstdlib>

#include <json.hpp>

#include "groundctl/gen.hpp"
#include "net/http_post.hpp"

namespace groundctl::gen {

RemoteLlmConfig RemoteLlmConfig::from_env() {
    RemoteLlmConfig cfg;
    const char* url = std::getenv("LLM_API_URL");
    if (!url || !*url) throw ConfigError("LLM_API_URL is not set");
    cfg.url = url;
    const char* model = std::getenv("LLM_MODEL");
    if (!model || !*model) throw ConfigError("LLM_MODEL is not set");
    cfg.model = model;
    if (const char* key = std::getenv("LLM_API_KEY")) cfg.api_key = key;
    return cfg;
}

RemoteLlmGenerator::RemoteLlmGenerator(RemoteLlmConfig cfg) : cfg_(std::move(cfg)) {
    if (cfg_.url.empty()) throw ConfigError("remote LLM url is empty");
    if (cfg_.max_in_flight < 1) throw ConfigError("max_in_flight must be at least 1");
}

std::string RemoteLlmGenerator::generate(std::string_view prompt) const {
    {
        std::unique_lock lock(mu_);
        cv_.wait(lock, [this] { return in_flight_ < cfg_.max_in_flight; });
        ++in_flight_;
    }
    struct Release {
        const RemoteLlmGenerator* self;
        ~Release() {
            {
                std::lock_guard lock(self->mu_);
                --self->in_flight_;
            }
            self->cv_.notify_one();
        }
    } release{this};

    const nlohmann::json req = {
        {"model", cfg_.model},
        {"messages", nlohmann::json::array({{{"role", "user"}, {"content", std::string(prompt)}}})},
        {"temperature", 0},
    };
    std::vector<std::pair<std::string, std::string>> headers;
    if (!cfg_.api_key.empty()) headers.emplace_back("Authorization", "Bearer " + cfg_.api_key);
    const auto res = net::post_json(cfg_.url, req.dump(), headers, cfg_.timeout);
    if (res.status != 200) {
        const bool retryable = res.status == 429 || res.status >= 500;
        throw ProviderError("LLM provider returned HTTP " + std::to_string(res.status), retryable, res.status);
    }
    try {
        const auto body = nlohmann::json::parse(res.body);
        const auto& content = body.at("choices").at(0).at("message").at("content");
        if (!content.is_string()) throw ProviderError("LLM response content is not a string", false, res.status);
        return content.get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw ProviderError(std::string("malformed LLM response: ") + e.what(), false, res.status);
    }
}

}  // namespace groundctl::gen
