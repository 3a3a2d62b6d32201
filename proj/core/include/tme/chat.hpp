#pragma once

#include <string>
#include <vector>

namespace tme {

struct ChatMessage {
    std::string role;  // "system" | "user" | "assistant"
    std::string content;
};

// One chat-completion call. Defaults follow the reference runtime
// configuration: gpt-4o at temperature 0.3.
struct ChatRequest {
    std::vector<ChatMessage> messages;
    std::string model = "gpt-4o";
    double temperature = 0.3;
};

// Canonical JSON of (model, temperature, messages): compact, sorted keys,
// temperature fixed to one decimal. This is the byte stream both the
// recorded responder and fixture tooling hash.
std::string canonical_request_json(const ChatRequest& request);

// Lowercase hex SHA-256.
std::string sha256_hex(const std::string& data);

std::string request_hash(const ChatRequest& request);

} // namespace tme
