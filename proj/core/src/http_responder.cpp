#include "tme/responder.hpp"

#include "tme/errors.hpp"

#include <httplib.h>
#include <json.hpp>

#include <condition_variable>
#include <cstdlib>
#include <mutex>
#include <thread>

namespace tme {

struct HttpResponder::Impl {
    HttpResponderConfig config;
    std::mutex mutex;
    std::condition_variable slot_free;
    int in_flight = 0;

    void acquire() {
        std::unique_lock lock(mutex);
        slot_free.wait(lock, [&] { return in_flight < config.max_in_flight; });
        ++in_flight;
    }

    void release() {
        {
            std::lock_guard lock(mutex);
            --in_flight;
        }
        slot_free.notify_one();
    }
};

HttpResponder::HttpResponder(HttpResponderConfig config)
    : impl_(std::make_unique<Impl>()) {
    impl_->config = std::move(config);
}

HttpResponder::~HttpResponder() = default;

std::string HttpResponder::respond(const ChatRequest& request) {
    const auto& cfg = impl_->config;

    nlohmann::json body;
    body["model"] = request.model;
    body["temperature"] = request.temperature;
    body["messages"] = nlohmann::json::array();
    for (const auto& m : request.messages)
        body["messages"].push_back({{"role", m.role}, {"content", m.content}});

    httplib::Headers headers;
    if (const char* key = std::getenv(cfg.api_key_env.c_str()); key && *key)
        headers.emplace("Authorization", std::string("Bearer ") + key);

    impl_->acquire();
    struct Release {
        Impl* impl;
        ~Release() { impl->release(); }
    } release{impl_.get()};

    std::string last_error;
    for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
        if (attempt > 0) {
            auto delay = cfg.backoff_base * (1 << (attempt - 1));
            std::this_thread::sleep_for(delay);
        }
        httplib::Client client(cfg.base_url);
        client.set_connection_timeout(std::chrono::duration_cast<std::chrono::seconds>(cfg.timeout));
        client.set_read_timeout(std::chrono::duration_cast<std::chrono::seconds>(cfg.timeout));
        auto res = client.Post("/v1/chat/completions", headers, body.dump(), "application/json");
        if (!res) {
            last_error = "transport failure: " + httplib::to_string(res.error());
            continue;  // retry
        }
        if (res->status >= 500) {
            last_error = "server error " + std::to_string(res->status) + ": " + res->body;
            continue;  // retry
        }
        if (res->status < 200 || res->status >= 300)
            throw Error(ErrorCode::ApiError,
                        "status " + std::to_string(res->status) + ": " + res->body);
        nlohmann::json doc = nlohmann::json::parse(res->body, nullptr, false);
        if (doc.is_discarded() || !doc.contains("choices") || doc["choices"].empty() ||
            !doc["choices"][0].contains("message") ||
            !doc["choices"][0]["message"].contains("content"))
            throw Error(ErrorCode::ApiError, "response body missing choices[0].message.content");
        return doc["choices"][0]["message"]["content"].get<std::string>();
    }
    if (last_error.rfind("server error", 0) == 0)
        throw Error(ErrorCode::ApiError, last_error + " (after " +
                                             std::to_string(cfg.max_retries + 1) + " attempts)");
    throw Error(ErrorCode::Transport,
                last_error + " (after " + std::to_string(cfg.max_retries + 1) + " attempts)");
}

} // namespace tme
