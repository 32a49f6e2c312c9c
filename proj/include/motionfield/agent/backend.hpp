// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "motionfield/io/file.hpp"

namespace motionfield::agent {

struct ImageAttachment {
    std::string label;  // file name or short description; recorded in transcripts
    std::string media_type = "image/png";
    io::Bytes data;
};

struct ChatMessage {
    std::string role;  // "system", "user" or "assistant"
    std::string content;
    std::vector<ImageAttachment> images;
};

/// One request in flight at a time. Failures throw ErrorKind::backend.
class ChatBackend {
public:
    virtual ~ChatBackend() = default;
    virtual std::string complete(std::span<const ChatMessage> messages) = 0;
    virtual std::string describe() const = 0;
};

/// Replays scripted responses in order, ignoring the request content.
class MockBackend final : public ChatBackend {
public:
    explicit MockBackend(std::vector<std::string> responses, std::string source = "inline");

    /// A JSON array of strings, or a directory whose regular files (sorted by
    /// name) each hold one response.
    static MockBackend from_script(const std::filesystem::path& script);

    std::string complete(std::span<const ChatMessage> messages) override;
    std::string describe() const override { return "mock:" + source_; }

    std::size_t consumed() const noexcept { return next_; }
    std::size_t remaining() const noexcept { return responses_.size() - next_; }
    const std::vector<std::vector<ChatMessage>>& requests() const noexcept { return requests_; }

private:
    std::vector<std::string> responses_;
    std::string source_;
    std::size_t next_ = 0;
    std::vector<std::vector<ChatMessage>> requests_;
};

struct HttpBackendOptions {
    std::string url;      // full chat-completion endpoint, http:// or https://
    std::string api_key;  // sent as a bearer token when nonempty
    std::string model = "gpt-4o";
    std::chrono::milliseconds timeout{120'000};
};

/// Chat-completion over HTTP: POST {"model", "messages": [{"role", "content": [
/// {"type": "text", ...}, {"type": "image_url", "image_url": {"url": "data:..."}}]}]}
/// and read choices[0].message.content from the reply.
class HttpBackend final : public ChatBackend {
public:
    explicit HttpBackend(HttpBackendOptions options);

    std::string complete(std::span<const ChatMessage> messages) override;
    std::string describe() const override { return options_.url; }

    /// The JSON request body for `messages`.
    std::string request_body(std::span<const ChatMessage> messages) const;

private:
    HttpBackendOptions options_;
    std::string origin_;  // scheme://host[:port]
    std::string path_;
};

/// "mock:<script>" or an http(s) URL. An empty descriptor falls back to the
/// AGENT_ENDPOINT environment variable; the API key comes from AGENT_API_KEY.
std::unique_ptr<ChatBackend> make_backend(std::string_view descriptor, const std::string& model = "gpt-4o",
                                          std::chrono::milliseconds timeout = std::chrono::milliseconds{120'000});

}  // namespace motionfield::agent
