#pragma once

#include <chrono>
#include <string>
#include <utility>
#include <vector>

namespace groundctl::net {

struct HttpResponse {
    int status = 0;
    std::string body;
};

// Throws ProviderError(retryable) on transport failure; HTTP errors come back
// as a response with their status.
HttpResponse post_json(const std::string& url, const std::string& body,
                       const std::vector<std::pair<std::string, std::string>>& headers,
                       std::chrono::seconds timeout);

}  // namespace groundctl::net
