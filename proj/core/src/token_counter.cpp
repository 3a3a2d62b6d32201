#include "tme/token_counter.hpp"

#include "tme/chat.hpp"
#include "tme/errors.hpp"

#include <json.hpp>

#include <cctype>
#include <fstream>
#include <sstream>

namespace tme {

int ApproximateCounter::count(const std::string& text) const {
    int tokens = 0;
    std::size_t i = 0;
    while (i < text.size()) {
        unsigned char c = text[i];
        if (std::isspace(c)) {
            ++i;
            continue;
        }
        if (std::isalnum(c)) {
            std::size_t len = 0;
            while (i < text.size() && std::isalnum(static_cast<unsigned char>(text[i]))) {
                ++i;
                ++len;
            }
            tokens += 1 + static_cast<int>(len / 8);
        } else {
            ++tokens;
            ++i;
        }
    }
    return tokens;
}

RecordedCounter RecordedCounter::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::FixtureGap, "cannot open token fixture '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    nlohmann::json doc = nlohmann::json::parse(buf.str(), nullptr, false);
    if (doc.is_discarded() || !doc.is_object())
        throw Error(ErrorCode::FixtureGap, "token fixture '" + path + "' is not a JSON object");
    std::map<std::string, int> table;
    for (const auto& [hash, tokens] : doc.items()) {
        if (!tokens.is_number_integer())
            throw Error(ErrorCode::FixtureGap, "token fixture values must be integers");
        table[hash] = tokens.get<int>();
    }
    return RecordedCounter(std::move(table));
}

int RecordedCounter::count(const std::string& text) const {
    auto it = table_.find(sha256_hex(text));
    if (it == table_.end())
        throw Error(ErrorCode::UnrecordedPrompt,
                    "no recorded token count for prompt hash " + sha256_hex(text));
    return it->second;
}

bool RecordedCounter::covers(const std::string& text) const {
    return table_.count(sha256_hex(text)) > 0;
}

} // namespace tme
