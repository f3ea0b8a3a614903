#include "net/http_post.hpp"

#include <httplib.h>

#include "groundctl/error.hpp"

namespace groundctl::net {

namespace {

std::pair<std::string, std::string> split_url(const std::string& url) {
    const std::size_t scheme = url.find("://");
    const std::size_t host_start = scheme == std::string::npos ? 0 : scheme + 3;
    const std::size_t slash = url.find('/', host_start);
    if (slash == std::string::npos) return {url, "/"};
    return {url.substr(0, slash), url.substr(slash)};
}

}  // namespace

HttpResponse post_json(const std::string& url, const std::string& body,
                       const std::vector<std::pair<std::string, std::string>>& headers,
                       std::chrono::seconds timeout) {
    const auto [origin, path] = split_url(url);
    httplib::Client client(origin);
    if (!client.is_valid()) throw ProviderError("unsupported endpoint " + url, false);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    httplib::Headers h;
    for (const auto& [k, v] : headers) h.emplace(k, v);
    auto res = client.Post(path, h, body, "application/json");
    if (!res) {
        throw ProviderError("request to " + url + " failed: " + httplib::to_string(res.error()), true);
    }
    return HttpResponse{res->status, res->body};
}

}  // namespace groundctl::net
