#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support/builders.hpp"
#include "tme/chat.hpp"
#include "tme/classifier.hpp"
#include "tme/errors.hpp"
#include "tme/intent.hpp"
#include "tme/responder.hpp"
#include "tme/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

using namespace tme;
using namespace tme::testsupport;

namespace {

const char* kSubstitutionBlock = R"([
  {
    "intent_type": "update",
    "subtask_title": "use mushrooms instead of celery",
    "parent_node": null,
    "dependency_nodes": [],
    "from": "Prepare mushrooms",
    "to": "Prepare celery"
  }
])";

const char* kCheckBlock = R"([
  {
    "intent_type": "check",
    "subtask_title": "verify start location",
    "parent_node": "schedule trip",
    "dependency_nodes": []
  }
])";

const char* kNewBlock = R"([
  {
    "intent_type": "new",
    "subtask_title": "schedule team meeting",
    "parent_node": null,
    "dependency_nodes": []
  }
])";

} // namespace

TEST_SUITE("parse_intent_json") {
    TEST_CASE("substitution block maps from/to onto replacement/replaced") {
        auto intents = parse_intent_json(kSubstitutionBlock);
        REQUIRE(intents.size() == 1);
        CHECK(intents[0].intent_type == IntentType::Update);
        CHECK(intents[0].subtask_title == "use mushrooms instead of celery");
        CHECK_FALSE(intents[0].parent_node.has_value());
        CHECK(intents[0].dependency_nodes.empty());
        CHECK(intents[0].replacement == "Prepare mushrooms");
        CHECK(intents[0].replaced == "Prepare celery");
    }

    TEST_CASE("check block carries the parent task") {
        auto intents = parse_intent_json(kCheckBlock);
        REQUIRE(intents.size() == 1);
        CHECK(intents[0].intent_type == IntentType::Check);
        CHECK(intents[0].subtask_title == "verify start location");
        CHECK(intents[0].parent_node == "schedule trip");
        CHECK_FALSE(intents[0].replacement.has_value());
    }

    TEST_CASE("new block is minimal") {
        auto intents = parse_intent_json(kNewBlock);
        REQUIRE(intents.size() == 1);
        CHECK(intents[0].intent_type == IntentType::New);
        CHECK(intents[0].subtask_title == "schedule team meeting");
    }

    TEST_CASE("round-trips losslessly under both key conventions") {
        for (const char* block : {kSubstitutionBlock, kCheckBlock, kNewBlock}) {
            auto intents = parse_intent_json(block);
            CHECK(parse_intent_json(intents_to_json(intents, IntentKeys::Paper)) == intents);
            CHECK(parse_intent_json(intents_to_json(intents, IntentKeys::Internal)) == intents);
        }
    }

    TEST_CASE("internal key names parse directly") {
        auto intents = parse_intent_json(
            R"([{"intent_type":"update","subtask_title":"x","replacement":"a","replaced":"b"}])");
        CHECK(intents[0].replacement == "a");
        CHECK(intents[0].replaced == "b");
    }

    TEST_CASE("empty array and unknown keys") {
        CHECK(parse_intent_json("[]").empty());
        auto intents = parse_intent_json(
            R"([{"intent_type":"new","subtask_title":"x","confidence":0.9}])");
        CHECK(intents.size() == 1);  // unknown keys ignored
    }

    TEST_CASE("malformed inputs carry the raw text") {
        try {
            parse_intent_json("{not json");
            FAIL("expected MalformedOutput");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::MalformedOutput);
            CHECK(std::string(e.what()).find("{not json") != std::string::npos);
        }
        // Pairing violations and bad enum values are rejected too.
        CHECK_THROWS_AS(
            parse_intent_json(R"([{"intent_type":"update","subtask_title":"x","from":"a"}])"),
            Error);
        CHECK_THROWS_AS(
            parse_intent_json(R"([{"intent_type":"new","subtask_title":"x","from":"a","to":"b"}])"),
            Error);
        CHECK_THROWS_AS(parse_intent_json(R"([{"intent_type":"delete","subtask_title":"x"}])"),
                        Error);
        CHECK_THROWS_AS(parse_intent_json(R"([{"intent_type":"new","subtask_title":""}])"), Error);
    }
}

TEST_SUITE("scripted classifier") {
    TEST_CASE("replays its rounds and fails loudly off-script") {
        auto classifier = ScriptedClassifier::from_json(R"([
            {"round": 1, "user_input": "hello",
             "intents": [{"intent_type": "new", "subtask_title": "greet"}]}
        ])");
        auto intents = classifier.decompose("hello", 1, nullptr);
        REQUIRE(intents.size() == 1);
        CHECK(intents[0].subtask_title == "greet");

        try {
            classifier.decompose("hello", 2, nullptr);
            FAIL("expected OffScript");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::OffScript);
        }
        try {
            classifier.decompose("different input", 1, nullptr);
            FAIL("expected OffScript");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::OffScript);
        }
    }

    TEST_CASE("scenario fixtures load through the same entry point") {
        auto script = ScenarioScript::from_file(scenario_path(fixture_dir(), "meeting"));
        auto classifier = ScriptedClassifier::from_file(scenario_path(fixture_dir(), "meeting"));
        auto intents = classifier.decompose(script.rounds[0].user_input, 1, nullptr);
        CHECK(intents == script.rounds[0].gold_intents);
    }

    TEST_CASE("scripted output equals the gold intents on every fixture round") {
        for (const char* name : {"trip", "cooking", "meeting", "cart", "form_filling"}) {
            auto script = ScenarioScript::from_file(scenario_path(fixture_dir(), name));
            auto classifier = ScriptedClassifier::from_file(scenario_path(fixture_dir(), name));
            for (const auto& round : script.rounds) {
                auto produced = classifier.decompose(round.user_input, round.index, nullptr);
                CHECK(produced == round.gold_intents);
                CHECK(intents_to_json(produced) == intents_to_json(round.gold_intents));
            }
        }
    }
}

TEST_SUITE("random classifier") {
    TEST_CASE("pure function of seed and round") {
        RandomClassifier a(42), b(42);
        for (int round = 1; round <= 20; ++round) {
            auto x = a.decompose("anything", round, nullptr);
            auto y = b.decompose("something else entirely", round, nullptr);
            CHECK(x[0].intent_type == y[0].intent_type);  // input-independent
            CHECK(x == a.decompose("anything", round, nullptr));
        }
    }

    TEST_CASE("draws all three types across rounds") {
        std::set<IntentType> seen;
        for (int round = 1; round <= 60; ++round) seen.insert(RandomClassifier::draw(7, round));
        CHECK(seen.size() == 3);
    }

    TEST_CASE("title is the raw input") {
        RandomClassifier c(1);
        auto intents = c.decompose("Use celery in dumplings.", 3, nullptr);
        REQUIRE(intents.size() == 1);
        CHECK(intents[0].subtask_title == "Use celery in dumplings.");
    }

    TEST_CASE("pinned demo seed diverges from the cooking gold labels") {
        auto script = ScenarioScript::from_file(scenario_path(fixture_dir(), "cooking"));
        RandomClassifier c(script.random_seed);
        int mismatches = 0;
        for (const auto& round : script.rounds) {
            auto produced = c.decompose(round.user_input, round.index, nullptr);
            if (produced.size() != round.gold_intents.size() ||
                produced[0].intent_type != round.gold_intents[0].intent_type)
                ++mismatches;
        }
        CHECK(mismatches >= 1);
    }
}

TEST_SUITE("rule-based classifier") {
    RuleBasedClassifier rules;

    TEST_CASE("field prefix updates extract the payload") {
        auto intents = rules.decompose("destination: Set the destination to Seattle.", 2, nullptr);
        REQUIRE(intents.size() == 1);
        CHECK(intents[0].intent_type == IntentType::Update);
        CHECK(intents[0].replaced == "destination");
        CHECK(intents[0].replacement == "Seattle");
    }

    TEST_CASE("field prefix questions become checks") {
        auto intents = rules.decompose("start: By the way, wasn't I departing from Boston?", 9,
                                       nullptr);
        REQUIRE(intents.size() == 1);
        CHECK(intents[0].intent_type == IntentType::Check);
        CHECK(intents[0].subtask_title == "verify start");
    }

    TEST_CASE("personal statements map to collect fields") {
        auto intents = rules.decompose("My name is John Doe.", 2, nullptr);
        REQUIRE(intents.size() == 1);
        CHECK(intents[0].intent_type == IntentType::Update);
        CHECK(intents[0].subtask_title == "collect name");
        CHECK(intents[0].replacement == "John Doe");

        auto corrected = rules.decompose("Sorry, to correct, my name is John Smith.", 5, nullptr);
        REQUIRE(corrected.size() == 1);
        CHECK(corrected[0].replacement == "John Smith");
        CHECK(corrected[0].replaced == "collect name");
    }

    TEST_CASE("help requests open a task and unmatched input defers") {
        auto intents = rules.decompose(
            "Help me fill out a form, I will provide some of my information to you.", 1, nullptr);
        REQUIRE(intents.size() == 1);
        CHECK(intents[0].intent_type == IntentType::New);
        CHECK(intents[0].subtask_title == "fill out a form");

        CHECK(rules.decompose("To make soup, wash and chop celery.", 1, nullptr).empty());
    }

    TEST_CASE("bare questions become checks") {
        auto intents = rules.decompose("Did I ever say to remove celery?", 6, nullptr);
        REQUIRE(intents.size() == 1);
        CHECK(intents[0].intent_type == IntentType::Check);
    }
}

TEST_SUITE("fewshot prompt") {
    TEST_CASE("contains the system line and all three exemplars verbatim") {
        std::string prompt = render_fewshot_prompt("anything", nullptr);
        CHECK(prompt.find("System: You are a task intent classifier.") != std::string::npos);
        CHECK(prompt.find("\"subtask_title\": \"use mushrooms instead of celery\"") !=
              std::string::npos);
        CHECK(prompt.find("\"subtask_title\": \"verify start location\"") != std::string::npos);
        CHECK(prompt.find("\"subtask_title\": \"schedule team meeting\"") != std::string::npos);
        CHECK(prompt.find("(empty)") != std::string::npos);
        CHECK(prompt.find("Input: \"anything\"") != std::string::npos);
    }

    TEST_CASE("memory context lists active slots") {
        Forest f = cooking_forest();
        std::string prompt = render_fewshot_prompt("Also use celery in dumplings.", &f);
        CHECK(prompt.find("- prepare.celery: wash and chop celery") != std::string::npos);
        CHECK(prompt.find("(empty)") == std::string::npos);
    }

    TEST_CASE("rendering is pure") {
        Forest f = form_forest();
        CHECK(render_fewshot_prompt("x", &f) == render_fewshot_prompt("x", &f));
    }

    TEST_CASE("the versioned asset file matches the embedded text") {
        std::ifstream in(std::string(TME_SOURCE_DIR) + "/assets/trim_fewshot_v1.txt");
        REQUIRE(in.good());
        std::stringstream buf;
        buf << in.rdbuf();
        CHECK(buf.str() == fewshot_prompt_text());
    }
}

TEST_SUITE("llm classifier") {
    TEST_CASE("decomposes through a recorded responder") {
        Forest f = cooking_forest();
        const std::string input =
            "Wait! There's no celery in the refrigerator at all. Let's all use mushrooms instead.";
        ChatRequest request;
        request.messages.push_back({"user", render_fewshot_prompt(input, &f)});
        RecordedResponder responder({{request_hash(request), kSubstitutionBlock}});

        LlmClassifier classifier(responder);
        auto intents = classifier.decompose(input, 4, &f);
        REQUIRE(intents.size() == 1);
        CHECK(intents[0].replacement == "Prepare mushrooms");
        CHECK(intents[0].replaced == "Prepare celery");
    }

    TEST_CASE("tolerates prose around the array but rejects drift") {
        ChatRequest request;
        request.messages.push_back({"user", render_fewshot_prompt("hi", nullptr)});
        RecordedResponder fenced(
            {{request_hash(request),
              "Here you go:\n```json\n[{\"intent_type\":\"new\",\"subtask_title\":\"greet\"}]\n```"}});
        LlmClassifier ok(fenced);
        CHECK(ok.decompose("hi", 1, nullptr)[0].subtask_title == "greet");

        RecordedResponder broken({{request_hash(request), "I could not classify that."}});
        LlmClassifier bad(broken);
        try {
            bad.decompose("hi", 1, nullptr);
            FAIL("expected MalformedOutput");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::MalformedOutput);
            CHECK(std::string(e.what()).find("I could not classify that.") != std::string::npos);
        }
    }
}

TEST_SUITE("chained classifier") {
    TEST_CASE("rules first, fallback on no-match") {
        ChatRequest request;
        request.messages.push_back(
            {"user", render_fewshot_prompt("To make soup, wash and chop celery.", nullptr)});
        RecordedResponder responder(
            {{request_hash(request),
              R"([{"intent_type":"new","subtask_title":"make soup"}])"}});
        ChainedClassifier chain(std::make_unique<RuleBasedClassifier>(),
                                std::make_unique<LlmClassifier>(responder));

        // Rule hit: the fallback is never consulted.
        auto ruled = chain.decompose("My name is John Doe.", 1, nullptr);
        CHECK(ruled[0].subtask_title == "collect name");

        // Rule miss: the fallback answers.
        auto fallen = chain.decompose("To make soup, wash and chop celery.", 1, nullptr);
        CHECK(fallen[0].subtask_title == "make soup");
    }
}
