#pragma once

#include "tme/session.hpp"

#include <memory>
#include <string>

namespace tme {

// Line-oriented interactive session. Plain lines run through the engine as
// user turns; meta-commands inspect state:
//   :state   snapshot JSON (transcript for flat variants)
//   :dot     graphviz export
//   :tokens  per-round prompt token ledger
//   :quit    end the session
// Backend errors are reported per turn; the session itself keeps going.
class ReplSession {
public:
    // Null classifier selects the rule-based default (with a new-task
    // fallback); null responder selects local deterministic acknowledgments;
    // null counter selects the approximate counter.
    ReplSession(Variant variant, std::unique_ptr<Classifier> classifier = nullptr,
                std::unique_ptr<Responder> responder = nullptr,
                std::unique_ptr<TokenCounter> counter = nullptr);

    // Handles one input line and returns the text to display.
    std::string handle_line(const std::string& line);

    bool done() const { return done_; }
    const Session& session() const { return session_; }

private:
    Session session_;
    std::unique_ptr<Classifier> classifier_;
    std::unique_ptr<Responder> responder_;
    std::unique_ptr<TokenCounter> counter_;
    bool done_ = false;
};

} // namespace tme
