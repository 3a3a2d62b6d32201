#include "tme/responder.hpp"

#include "tme/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace tme {

RecordedResponder RecordedResponder::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::FixtureGap, "cannot open response fixture '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    nlohmann::json doc = nlohmann::json::parse(buf.str(), nullptr, false);
    if (doc.is_discarded() || !doc.is_object())
        throw Error(ErrorCode::FixtureGap, "response fixture '" + path + "' is not a JSON object");
    std::map<std::string, std::string> responses;
    for (const auto& [hash, text] : doc.items()) {
        if (!text.is_string())
            throw Error(ErrorCode::FixtureGap, "response fixture values must be strings");
        responses[hash] = text.get<std::string>();
    }
    return RecordedResponder(std::move(responses));
}

std::string RecordedResponder::respond(const ChatRequest& request) {
    auto it = responses_.find(request_hash(request));
    if (it == responses_.end())
        throw Error(ErrorCode::UnrecordedRequest,
                    "no recorded response for request hash " + request_hash(request));
    return it->second;
}

bool RecordedResponder::covers(const ChatRequest& request) const {
    return responses_.count(request_hash(request)) > 0;
}

} // namespace tme
