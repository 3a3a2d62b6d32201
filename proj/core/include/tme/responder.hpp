#pragma once

#include "tme/chat.hpp"

#include <chrono>
#include <map>
#include <memory>
#include <string>

namespace tme {

// Uniform responder surface over chat-completion backends. Implementations
// must be safe for concurrent calls.
class Responder {
public:
    virtual ~Responder() = default;
    virtual std::string respond(const ChatRequest& request) = 0;
};

// Replays fixture responses keyed by the canonical request hash. Unknown
// requests raise UnrecordedRequest; nothing touches the network.
class RecordedResponder : public Responder {
public:
    explicit RecordedResponder(std::map<std::string, std::string> responses)
        : responses_(std::move(responses)) {}

    // Loads a JSON object file mapping hash -> response text.
    static RecordedResponder from_file(const std::string& path);

    std::string respond(const ChatRequest& request) override;

    bool covers(const ChatRequest& request) const;

private:
    std::map<std::string, std::string> responses_;
};

struct HttpResponderConfig {
    std::string base_url;        // e.g. "http://127.0.0.1:8080"
    std::string api_key_env = "TME_API_KEY";
    std::chrono::milliseconds timeout{30000};
    int max_retries = 2;                         // retries after the first attempt
    std::chrono::milliseconds backoff_base{200}; // doubled per retry
    int max_in_flight = 4;
};

// OpenAI-compatible client: POST <base>/v1/chat/completions with bearer auth
// from the configured environment variable. Transport failures and 5xx
// responses are retried with exponential backoff up to max_retries, then
// surfaced as Transport/ApiError. A semaphore caps in-flight requests.
class HttpResponder : public Responder {
public:
    explicit HttpResponder(HttpResponderConfig config);
    ~HttpResponder() override;

    std::string respond(const ChatRequest& request) override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace tme
