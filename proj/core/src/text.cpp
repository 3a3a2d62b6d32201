#include "tme/text.hpp"

#include <cctype>
#include <sstream>

namespace tme {

std::string normalize(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (unsigned char c : text) {
        if (std::isalnum(c)) {
            if (pending_space && !out.empty()) out.push_back(' ');
            pending_space = false;
            out.push_back(static_cast<char>(std::tolower(c)));
        } else {
            // Whitespace and punctuation both act as separators.
            pending_space = true;
        }
    }
    return out;
}

std::vector<std::string> tokenize(const std::string& text) {
    std::istringstream in(normalize(text));
    std::vector<std::string> tokens;
    std::string tok;
    while (in >> tok) tokens.push_back(tok);
    return tokens;
}

std::string slot_from_title(const std::string& title) {
    std::string slot;
    for (const auto& tok : tokenize(title)) {
        if (!slot.empty()) slot.push_back('.');
        slot += tok;
    }
    return slot;
}

std::string title_from_slot(const std::string& slot) {
    std::string title = slot;
    for (auto& c : title) {
        if (c == '.') c = ' ';
    }
    if (!title.empty()) title[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(title[0])));
    return title;
}

std::string slot_tail(const std::string& slot) {
    auto pos = slot.rfind('.');
    return pos == std::string::npos ? slot : slot.substr(pos + 1);
}

} // namespace tme
