// Regenerates the derived fixture files for each scenario:
//   <name>.responses.json                  request hash -> recorded reply
//   <name>.tokens.json                     prompt hash -> token count
//   <name>.prompt_comparison.tokens.json   labelled side-by-side token pair
//
// Replies come from the scenario's recorded_responses; token counts come
// from recorded_tokens where pinned and from the approximate counter
// otherwise (interior node lines always use the approximate count). Any
// change to the prompt template requires rerunning this tool.

#include "tme/chat.hpp"
#include "tme/errors.hpp"
#include "tme/replay.hpp"
#include "tme/reports.hpp"
#include "tme/session.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <map>

using namespace tme;

namespace {

struct Capture {
    std::map<std::string, std::string> responses;
    std::map<std::string, int> approx;  // every counted text, heuristic value
    std::map<std::string, int> pinned;  // round prompts with recorded counts
    std::map<std::string, int> comparison_tokens;

    void put_response(const std::string& hash, const std::string& text) {
        auto [it, inserted] = responses.emplace(hash, text);
        if (!inserted && it->second != text)
            throw Error(ErrorCode::FixtureGap,
                        "request hash collision with conflicting replies: " + hash + "\n  was: \"" +
                            it->second + "\"\n  now: \"" + text + "\"");
    }

    void put_tokens(const std::string& hash, int count) {
        approx.emplace(hash, count);  // deterministic heuristic, never conflicts
    }

    void pin_tokens(const std::string& hash, int count) {
        auto [it, inserted] = pinned.emplace(hash, count);
        if (!inserted && it->second != count)
            throw Error(ErrorCode::FixtureGap,
                        "conflicting pinned counts for prompt " + hash);
    }

    std::map<std::string, int> merged_tokens() const {
        std::map<std::string, int> out = approx;
        for (const auto& [hash, count] : pinned) out[hash] = count;
        return out;
    }
};

class CaptureResponder : public Responder {
public:
    explicit CaptureResponder(Capture& capture) : capture_(&capture) {}

    void set_reply(std::string reply) { reply_ = std::move(reply); }

    std::string respond(const ChatRequest& request) override {
        capture_->put_response(request_hash(request), reply_);
        return reply_;
    }

private:
    Capture* capture_;
    std::string reply_;
};

// Approximate counts for everything, recorded so replays resolve the same
// values; round prompts are pinned afterwards.
class CaptureCounter : public TokenCounter {
public:
    explicit CaptureCounter(Capture& capture) : capture_(&capture) {}

    int count(const std::string& text) const override {
        int n = approx_.count(text);
        capture_->put_tokens(sha256_hex(text), n);
        return n;
    }

private:
    Capture* capture_;
    ApproximateCounter approx_;
};

std::vector<Variant> variants_for(const ScenarioScript& script) {
    std::vector<Variant> variants{Variant::TmeDag};
    bool flat = false;
    bool random = false;
    bool baseline = false;
    for (const auto& round : script.rounds) {
        flat |= round.recorded_responses.count("tme_flat") > 0;
        random |= round.recorded_responses.count("tme_random_trim") > 0;
        baseline |= round.recorded_responses.count("baseline_flat") > 0;
    }
    if (flat) variants.push_back(Variant::TmeFlat);
    if (random) variants.push_back(Variant::TmeRandomTrim);
    if (baseline) variants.push_back(Variant::BaselineFlat);
    return variants;
}

int generate(const std::string& dir, const std::string& name, bool verbose) {
    auto script = ScenarioScript::from_file(scenario_path(dir, name));
    Capture capture;

    for (Variant variant : variants_for(script)) {
        std::unique_ptr<Classifier> classifier;
        if (variant == Variant::TmeRandomTrim)
            classifier = std::make_unique<RandomClassifier>(script.random_seed);
        else if (variant != Variant::BaselineFlat) {
            std::vector<ScriptedClassifier::Entry> entries;
            for (const auto& r : script.rounds)
                entries.push_back({r.index, r.user_input,
                                   r.scripted_intents ? *r.scripted_intents : r.gold_intents});
            classifier = std::make_unique<ScriptedClassifier>(std::move(entries));
        }

        CaptureResponder responder(capture);
        CaptureCounter counter(capture);
        Session session(variant);
        int mismatches = 0;

        for (const auto& round : script.rounds) {
            auto it = round.recorded_responses.find(variant_name(variant));
            responder.set_reply(it != round.recorded_responses.end() ? it->second : "Noted.");
            const RoundLog& log =
                session.step(round.user_input, classifier.get(), &responder, counter);

            // Pin the recorded measurement for the round prompt when given.
            auto pinned = round.recorded_tokens.find(variant_name(variant));
            if (pinned != round.recorded_tokens.end())
                capture.pin_tokens(log.prompt_hash, pinned->second);

            if (script.prompt_comparison && round.index == script.prompt_comparison->round) {
                auto cmp = script.prompt_comparison->tokens.find(variant_name(variant));
                if (cmp != script.prompt_comparison->tokens.end())
                    capture.comparison_tokens[log.prompt_hash] = cmp->second;
            }

            if (variant == Variant::TmeRandomTrim) {
                bool confused = log.intents.size() != round.gold_intents.size();
                for (std::size_t i = 0; !confused && i < log.intents.size(); ++i)
                    confused = log.intents[i].intent_type != round.gold_intents[i].intent_type;
                if (confused) ++mismatches;
            }
            if (verbose)
                std::cerr << name << " " << variant_name(variant) << " round " << round.index
                          << " prompt=" << log.prompt_hash.substr(0, 12) << "\n";
        }
        if (variant == Variant::TmeRandomTrim)
            std::cerr << name << ": random seed " << script.random_seed << " -> " << mismatches
                      << " intent-type mismatches over " << script.rounds.size() << " rounds\n";
    }

    auto write = [&](const std::string& path, const nlohmann::json& doc) {
        std::ofstream out(path);
        out << doc.dump(2) << "\n";
        std::cerr << "wrote " << path << "\n";
    };
    write(responses_path(dir, name), nlohmann::json(capture.responses));
    write(tokens_path(dir, name), nlohmann::json(capture.merged_tokens()));
    if (script.prompt_comparison)
        write(dir + "/" + name + ".prompt_comparison.tokens.json",
              nlohmann::json(capture.comparison_tokens));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"regenerate derived scenario fixtures (responses + token tables)"};
    std::vector<std::string> names{"form_filling", "trip", "cooking", "meeting", "cart",
                                   "cart_preadaptation"};
    std::string dir = fixture_dir();
    bool verbose = false;
    app.add_option("--fixtures", dir, "fixture directory");
    app.add_option("--scenario", names, "scenario names to regenerate");
    app.add_flag("-v,--verbose", verbose, "log per-round prompt hashes");

    CLI11_PARSE(app, argc, argv);
    try {
        for (const auto& name : names) generate(dir, name, verbose);
    } catch (const std::exception& e) {
        std::cerr << "fixgen: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
