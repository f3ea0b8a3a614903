#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace groundctl {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed structured input (JSON sources, manifests, request bodies).
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t byte_offset)
        : Error(what), byte_offset_(byte_offset) {}

    std::size_t byte_offset() const noexcept { return byte_offset_; }

private:
    std::size_t byte_offset_;
};

class EncodingError : public Error {
public:
    EncodingError(const std::string& what, std::size_t byte_offset)
        : Error(what), byte_offset_(byte_offset) {}

    std::size_t byte_offset() const noexcept { return byte_offset_; }

private:
    std::size_t byte_offset_;
};

// Caller violated a documented precondition or handed in a bad config.
class ConfigError : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    DimensionMismatch(std::size_t expected, std::size_t actual)
        : Error("dimension mismatch: expected " + std::to_string(expected) + ", got " +
                std::to_string(actual)),
          expected_(expected),
          actual_(actual) {}

    std::size_t expected() const noexcept { return expected_; }
    std::size_t actual() const noexcept { return actual_; }

private:
    std::size_t expected_;
    std::size_t actual_;
};

class DuplicateSource : public Error {
public:
    explicit DuplicateSource(const std::string& source_id)
        : Error("duplicate source_id: " + source_id), source_id_(source_id) {}

    const std::string& source_id() const noexcept { return source_id_; }

private:
    std::string source_id_;
};

// Persisted store could not be read back. Line numbers are 1-based.
class LoadError : public Error {
public:
    LoadError(const std::string& what, std::size_t line)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Remote embedding/LLM provider failure. Never carries a partial result.
class ProviderError : public Error {
public:
    ProviderError(const std::string& what, bool retryable, int http_status = 0)
        : Error(what), retryable_(retryable), http_status_(http_status) {}

    bool retryable() const noexcept { return retryable_; }
    int http_status() const noexcept { return http_status_; }

private:
    bool retryable_;
    int http_status_;
};

}  // namespace groundctl
