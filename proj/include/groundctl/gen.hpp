#pragma once

#include <chrono>
#include <condition_variable>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include "groundctl/error.hpp"

namespace groundctl::gen {

enum class GeneratorKind { remote_llm, mock_grounded, mock_ungrounded, mock_text_only, mock_html_only };

std::string to_string(GeneratorKind k);
std::optional<GeneratorKind> generator_kind_from_string(std::string_view s);

class NoGroundingContext : public Error {
public:
    NoGroundingContext() : Error("no grounding context: the prompt's HTML STRUCTURE block is empty") {}
};

class Generator {
public:
    virtual ~Generator() = default;
    virtual GeneratorKind kind() const = 0;
    // Raw script text for a rendered prompt.
    virtual std::string generate(std::string_view prompt) const = 0;
};

// Deterministic template generators. Each is a pure function of the prompt
// text: they read the delimited blocks and the query line back out of it.
class MockGenerator final : public Generator {
public:
    explicit MockGenerator(GeneratorKind kind);  // any kind except remote_llm
    GeneratorKind kind() const override { return kind_; }
    std::string generate(std::string_view prompt) const override;

private:
    GeneratorKind kind_;
};

struct RemoteLlmConfig {
    std::string url;  // chat-completions endpoint
    std::string api_key;
    std::string model;
    std::chrono::seconds timeout{60};
    int max_in_flight = 4;

    // LLM_API_URL / LLM_API_KEY / LLM_MODEL. Throws ConfigError when the URL or model is unset.
    static RemoteLlmConfig from_env();
};

// OpenAI-style chat completion at temperature 0. Throws ProviderError.
class RemoteLlmGenerator final : public Generator {
public:
    explicit RemoteLlmGenerator(RemoteLlmConfig cfg);
    GeneratorKind kind() const override { return GeneratorKind::remote_llm; }
    std::string generate(std::string_view prompt) const override;

private:
    RemoteLlmConfig cfg_;
    mutable std::mutex mu_;
    mutable std::condition_variable cv_;
    mutable int in_flight_ = 0;
};

std::unique_ptr<Generator> make_generator(GeneratorKind kind);

}  // namespace groundctl::gen
