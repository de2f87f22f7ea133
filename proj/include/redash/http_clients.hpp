#pragma once

#include <cstdlib>
#include <memory>
#include <string>
#include <utility>

#include "httplib.h"

#include "redash/digest.hpp"
#include "redash/errors.hpp"
#include "redash/ingest.hpp"
#include "redash/serialize.hpp"
#include "redash/transfer.hpp"

namespace redash {

struct ServiceEndpoint {
    std::string url;  // http://host[:port]/path
    std::string apiKey;
    int timeoutSeconds{60};
};

namespace detail {

/// Splits "http://host:port/path" into ("http://host:port", "/path").
inline std::pair<std::string, std::string> split_url(const std::string& url) {
    const auto scheme = url.find("://");
    if (scheme == std::string::npos) throw InvalidArgument("endpoint url needs a scheme: " + url);
    const auto slash = url.find('/', scheme + 3);
    if (slash == std::string::npos) return {url, "/"};
    return {url.substr(0, slash), url.substr(slash)};
}

inline std::string post_json(const ServiceEndpoint& ep, const json& body) {
    const auto [base, path] = split_url(ep.url);
    httplib::Client cli(base);
    cli.set_connection_timeout(ep.timeoutSeconds, 0);
    cli.set_read_timeout(ep.timeoutSeconds, 0);
    httplib::Headers headers;
    if (!ep.apiKey.empty()) headers.emplace("Authorization", "Bearer " + ep.apiKey);
    auto res = cli.Post(path, headers, body.dump(), "application/json");
    if (!res) throw ExternalServiceError("request to " + ep.url + " failed: " + httplib::to_string(res.error()));
    if (res->status != 200)
        throw ExternalServiceError("request to " + ep.url + " returned HTTP " + std::to_string(res->status));
    return res->body;
}

inline std::optional<ServiceEndpoint> endpoint_from_env(const char* urlVar, const char* keyVar) {
    const char* url = std::getenv(urlVar);
    if (!url || !*url) return std::nullopt;
    const char* key = std::getenv(keyVar);
    return ServiceEndpoint{url, key ? key : "", 60};
}

}  // namespace detail

/// Request: {"image": <base64>, "schema": <descriptor>}; response body is
/// handed to the extraction normalizer as-is.
class HttpExtractorClient : public ExtractorClient {
public:
    explicit HttpExtractorClient(ServiceEndpoint ep) : ep_(std::move(ep)) {}

    std::string id() const override { return ep_.url; }

    std::string extract(std::span<const std::uint8_t> image, const json& schema) override {
        return detail::post_json(ep_, {{"image", base64_encode(image)}, {"schema", schema}});
    }

    static std::unique_ptr<ExtractorClient> from_env() {
        auto ep = detail::endpoint_from_env("REDASH_EXTRACTOR_URL", "REDASH_EXTRACTOR_KEY");
        if (!ep) return nullptr;
        return std::make_unique<HttpExtractorClient>(std::move(*ep));
    }

private:
    ServiceEndpoint ep_;
};

/// Request: {"sourceStyle", "targetStyle", "keySet"}; response: attrs map.
class HttpPairMerger : public PairMerger {
public:
    explicit HttpPairMerger(ServiceEndpoint ep) : ep_(std::move(ep)) {}

    json merge(const StyleSpec& source, const StyleSpec& target, const std::set<Attr>& keys) override {
        json keySet = json::array();
        for (Attr k : keys) keySet.push_back(key_name(k));
        const auto body = detail::post_json(
            ep_, {{"sourceStyle", style_to_json(source)}, {"targetStyle", style_to_json(target)}, {"keySet", keySet}});
        try {
            return json::parse(body);
        } catch (const json::parse_error& e) {
            throw ExternalServiceError(std::string("merger returned malformed json: ") + e.what());
        }
    }

    static std::unique_ptr<PairMerger> from_env() {
        auto ep = detail::endpoint_from_env("REDASH_MERGER_URL", "REDASH_MERGER_KEY");
        if (!ep) return nullptr;
        return std::make_unique<HttpPairMerger>(std::move(*ep));
    }

private:
    ServiceEndpoint ep_;
};

}  // namespace redash
