#include "tme/repl.hpp"

#include "tme/errors.hpp"
#include "tme/snapshot.hpp"

#include <json.hpp>

#include <sstream>

namespace tme {

namespace {

// Opens every otherwise-unmatched line as a new top-level task so the REPL
// never rejects input.
class DefaultNewClassifier : public Classifier {
public:
    std::vector<SubtaskIntent> decompose(const std::string& user_input, int,
                                         const Forest*) override {
        SubtaskIntent intent;
        intent.intent_type = IntentType::New;
        intent.subtask_title = user_input;
        return {intent};
    }
};

} // namespace

ReplSession::ReplSession(Variant variant, std::unique_ptr<Classifier> classifier,
                         std::unique_ptr<Responder> responder,
                         std::unique_ptr<TokenCounter> counter)
    : session_(variant),
      classifier_(std::move(classifier)),
      responder_(std::move(responder)),
      counter_(std::move(counter)) {
    if (!classifier_)
        classifier_ = std::make_unique<ChainedClassifier>(
            std::make_unique<RuleBasedClassifier>(), std::make_unique<DefaultNewClassifier>());
    if (!counter_) counter_ = std::make_unique<ApproximateCounter>();
}

std::string ReplSession::handle_line(const std::string& line) {
    if (line == ":quit" || line == ":q") {
        done_ = true;
        return "bye";
    }
    if (line == ":state") {
        if (session_.has_forest()) return snapshot(session_.forest());
        nlohmann::ordered_json j = nlohmann::ordered_json::array();
        for (const auto& [speaker, text] : session_.transcript())
            j.push_back({{"speaker", speaker}, {"text", text}});
        return j.dump(2);
    }
    if (line == ":dot") {
        if (!session_.has_forest()) return "(no graph for flat variants)";
        return to_dot(session_.forest());
    }
    if (line == ":tokens") {
        std::ostringstream out;
        for (const auto& row : session_.ledger().rows)
            out << "round " << row.round << ": " << row.prompt_tokens << " tokens\n";
        out << "total: " << session_.ledger().total() << " tokens";
        return out.str();
    }
    if (line.empty()) return "";
    if (line[0] == ':') return "unknown command '" + line + "' (:state :dot :tokens :quit)";

    try {
        const RoundLog& log = session_.step(line, classifier_.get(), responder_.get(), *counter_);
        std::string out = log.response;
        for (const auto& warning : log.warnings) out += "\n[warn] " + warning;
        return out;
    } catch (const Error& e) {
        return std::string("[error] ") + e.what();
    }
}

} // namespace tme
