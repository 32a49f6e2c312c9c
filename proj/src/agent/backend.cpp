// SPDX-License-Identifier: Apache-2.0

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "motionfield/agent/backend.hpp"

#include <algorithm>
#include <cstdlib>

#include <json.hpp>

#include "motionfield/error.hpp"

namespace motionfield::agent {

MockBackend::MockBackend(std::vector<std::string> responses, std::string source)
    : responses_(std::move(responses)), source_(std::move(source)) {}

MockBackend MockBackend::from_script(const std::filesystem::path& script) {
    namespace fs = std::filesystem;
    std::vector<std::string> responses;
    if (fs::is_directory(script)) {
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(script)) {
            if (entry.is_regular_file()) files.push_back(entry.path());
        }
        std::sort(files.begin(), files.end());
        for (const auto& f : files) responses.push_back(io::read_text_file(f));
    } else {
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(io::read_text_file(script));
        } catch (const nlohmann::json::exception& e) {
            fail(ErrorKind::malformed, script.string() + ": " + e.what());
        }
        require(doc.is_array(), ErrorKind::malformed, script.string() + ": mock script must be a JSON array");
        for (const auto& item : doc) {
            require(item.is_string(), ErrorKind::malformed, script.string() + ": responses must be strings");
            responses.push_back(item.get<std::string>());
        }
    }
    return MockBackend(std::move(responses), script.string());
}

std::string MockBackend::complete(std::span<const ChatMessage> messages) {
    requests_.emplace_back(messages.begin(), messages.end());
    require(next_ < responses_.size(), ErrorKind::backend,
            "mock script " + source_ + " exhausted after " + std::to_string(responses_.size()) + " responses");
    return responses_[next_++];
}

HttpBackend::HttpBackend(HttpBackendOptions options) : options_(std::move(options)) {
    const std::string& url = options_.url;
    const std::size_t scheme_end = url.find("://");
    require(scheme_end != std::string::npos, ErrorKind::invalid_argument, "endpoint must be an http(s) URL: " + url);
    const std::string scheme = url.substr(0, scheme_end);
    require(scheme == "http" || scheme == "https", ErrorKind::invalid_argument, "unsupported scheme: " + scheme);
    const std::size_t path_start = url.find('/', scheme_end + 3);
    origin_ = url.substr(0, path_start);
    path_ = path_start == std::string::npos ? "/" : url.substr(path_start);
    require(origin_.size() > scheme_end + 3, ErrorKind::invalid_argument, "endpoint has no host: " + url);
}

std::string HttpBackend::request_body(std::span<const ChatMessage> messages) const {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& m : messages) {
        nlohmann::json content = nlohmann::json::array();
        content.push_back({{"type", "text"}, {"text", m.content}});
        for (const auto& img : m.images) {
            content.push_back({{"type", "image_url"},
                               {"image_url", {{"url", "data:" + img.media_type + ";base64," + io::base64_encode(img.data)}}}});
        }
        list.push_back({{"role", m.role}, {"content", content}});
    }
    return nlohmann::json{{"model", options_.model}, {"messages", list}, {"temperature", 0}}.dump();
}

std::string HttpBackend::complete(std::span<const ChatMessage> messages) {
    httplib::Client client(origin_);
    const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(options_.timeout);
    const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(options_.timeout - seconds);
    client.set_connection_timeout(seconds.count(), micros.count());
    client.set_read_timeout(seconds.count(), micros.count());
    client.set_write_timeout(seconds.count(), micros.count());

    httplib::Headers headers;
    if (!options_.api_key.empty()) headers.emplace("Authorization", "Bearer " + options_.api_key);
    const auto result = client.Post(path_, headers, request_body(messages), "application/json");
    require(static_cast<bool>(result), ErrorKind::backend,
            "request to " + options_.url + " failed: " + httplib::to_string(result.error()));
    require(result->status >= 200 && result->status < 300, ErrorKind::backend,
            "endpoint returned HTTP " + std::to_string(result->status) + ": " + result->body.substr(0, 200));

    nlohmann::json reply;
    try {
        reply = nlohmann::json::parse(result->body);
        return reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::backend, std::string("unexpected reply shape: ") + e.what());
    }
}

std::unique_ptr<ChatBackend> make_backend(std::string_view descriptor, const std::string& model,
                                          std::chrono::milliseconds timeout) {
    std::string d(descriptor);
    if (d.empty()) {
        const char* env = std::getenv("AGENT_ENDPOINT");
        require(env != nullptr && *env != '\0', ErrorKind::usage,
                "no backend given and AGENT_ENDPOINT is not set");
        d = env;
    }
    if (d.starts_with("mock:")) return std::make_unique<MockBackend>(MockBackend::from_script(d.substr(5)));
    const char* key = std::getenv("AGENT_API_KEY");
    return std::make_unique<HttpBackend>(HttpBackendOptions{d, key != nullptr ? key : "", model, timeout});
}

}  // namespace motionfield::agent
