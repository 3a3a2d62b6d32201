#include "tme/chat.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <array>
#include <cstdio>

namespace tme {

std::string canonical_request_json(const ChatRequest& request) {
    // nlohmann::json orders object keys lexicographically, which is exactly
    // the canonical layout: {"messages":[...],"model":...,"temperature":...}.
    nlohmann::json j;
    j["model"] = request.model;
    char temp[32];
    std::snprintf(temp, sizeof temp, "%.1f", request.temperature);
    j["temperature"] = std::stod(temp);
    j["messages"] = nlohmann::json::array();
    for (const auto& m : request.messages)
        j["messages"].push_back({{"role", m.role}, {"content", m.content}});
    return j.dump();
}

std::string sha256_hex(const std::string& data) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha256(), nullptr);
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xF]);
    }
    return out;
}

std::string request_hash(const ChatRequest& request) {
    return sha256_hex(canonical_request_json(request));
}

} // namespace tme
