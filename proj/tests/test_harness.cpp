#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tme/errors.hpp"
#include "tme/replay.hpp"
#include "tme/repl.hpp"
#include "tme/reports.hpp"

#include <json.hpp>

#include <algorithm>

using namespace tme;

namespace {

FixtureSet fixtures() { return FixtureSet(); }

bool failed_assertion(const RunReport& report, int round, const std::string& target,
                      StateAssertion::Predicate predicate, const std::string& argument) {
    for (const auto& detail : report.round_details) {
        if (detail.round != round) continue;
        for (const auto& a : detail.failed_assertions) {
            if (a.slot_or_title == target && a.predicate == predicate && a.argument == argument)
                return true;
        }
    }
    return false;
}

} // namespace

TEST_SUITE("scenario fixtures") {
    TEST_CASE("all five scripts load with contiguous rounds and parseable gold intents") {
        for (const char* name : {"trip", "cooking", "meeting", "cart", "form_filling"}) {
            auto script = fixtures().scenario(name);
            CHECK(script.name == name);
            CHECK_FALSE(script.rounds.empty());
            for (std::size_t i = 0; i < script.rounds.size(); ++i) {
                CHECK(script.rounds[i].index == static_cast<int>(i + 1));
                // Gold intents re-serialize under the wire schema.
                auto json = intents_to_json(script.rounds[i].gold_intents);
                CHECK(parse_intent_json(json) == script.rounds[i].gold_intents);
            }
        }
    }

    TEST_CASE("round gaps are rejected") {
        CHECK_THROWS_AS(ScenarioScript::from_json(R"({"name":"x","rounds":[
            {"round": 1, "user_input": "a"}, {"round": 3, "user_input": "b"}]})"),
                        Error);
    }

    TEST_CASE("the trip script keeps its extra instruction round out of the headline count") {
        auto script = fixtures().scenario("trip");
        CHECK(script.rounds.size() == 11);
        CHECK(script.comparable_rounds() == 10);
    }
}

TEST_SUITE("replay scoring") {
    TEST_CASE("graph replay of the cooking script is clean") {
        auto report = fixtures().replay_cell("cooking", Variant::TmeDag);
        CHECK(report.hallucinations == 0);
        CHECK(report.confusions == 0);
        CHECK(report.consistent);
        CHECK(report.rounds == 7);
    }

    TEST_CASE("flat replay of the cooking script misses the substitution") {
        auto report = fixtures().replay_cell("cooking", Variant::TmeFlat);
        CHECK_FALSE(report.consistent);
        CHECK(report.hallucinations >= 1);
        CHECK(failed_assertion(report, 5, "soup", StateAssertion::Predicate::ValueNotContains,
                               "celery"));
    }

    TEST_CASE("flat replay of the trip script fails the final summary") {
        auto report = fixtures().replay_cell("trip", Variant::TmeFlat);
        CHECK_FALSE(report.consistent);
        CHECK(failed_assertion(report, 11, "start", StateAssertion::Predicate::ValueEquals,
                               "Chicago"));
    }

    TEST_CASE("empty scripts are vacuously consistent") {
        ScenarioScript empty;
        empty.name = "empty";
        ApproximateCounter counter;
        auto report = replay(empty, Variant::TmeDag, nullptr, nullptr, counter);
        CHECK(report.rounds == 0);
        CHECK(report.hallucinations == 0);
        CHECK(report.confusions == 0);
        CHECK(report.consistent);
    }

    TEST_CASE("missing recorded coverage surfaces as FixtureGap") {
        auto script = fixtures().scenario("cooking");
        script.rounds[1].user_input += " (edited)";
        RecordedResponder responder(std::map<std::string, std::string>{});
        ApproximateCounter counter;
        ScriptedClassifier classifier({{1, script.rounds[0].user_input,
                                        script.rounds[0].gold_intents}});
        try {
            replay(script, Variant::TmeDag, &classifier, &responder, counter);
            FAIL("expected FixtureGap");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::FixtureGap);
        }
    }

    TEST_CASE("the pre-adaptation cart regression reproduces one hallucination and one confusion") {
        auto report = fixtures().replay_cell("cart_preadaptation", Variant::TmeDag);
        CHECK(report.hallucinations == 1);
        CHECK(report.confusions == 1);
        CHECK_FALSE(report.consistent);
        // The divergence is exactly the round-3 charger revival.
        CHECK(report.round_details[2].confusion);
        CHECK(failed_assertion(report, 4, "charger", StateAssertion::Predicate::ValueContains,
                               "in cart"));
    }

    TEST_CASE("the adapted cart script is clean under both graph and flat replay") {
        CHECK(fixtures().replay_cell("cart", Variant::TmeDag).consistent);
        CHECK(fixtures().replay_cell("cart", Variant::TmeFlat).consistent);
    }
}

TEST_SUITE("suite") {
    TEST_CASE("cross product aggregates per variant") {
        auto reports = run_suite(fixtures(), {"trip", "cooking", "meeting", "cart"},
                                 {Variant::TmeDag, Variant::TmeFlat}, 2);
        REQUIRE(reports.size() == 8);
        int dag_consistent = 0, flat_consistent = 0;
        for (const auto& r : reports) {
            REQUIRE_FALSE(r.error.has_value());
            if (r.variant == Variant::TmeDag && r.consistent) ++dag_consistent;
            if (r.variant == Variant::TmeFlat && r.consistent) ++flat_consistent;
        }
        CHECK(dag_consistent == 4);
        CHECK(flat_consistent <= 1);
    }

    TEST_CASE("cell errors do not abort the rest") {
        auto reports = run_suite(fixtures(), {"no_such_scenario", "cooking"}, {Variant::TmeDag});
        REQUIRE(reports.size() == 2);
        CHECK(reports[0].error.has_value());
        CHECK_FALSE(reports[1].error.has_value());
        CHECK(reports[1].consistent);
    }
}

TEST_SUITE("token report") {
    TEST_CASE("reproduces the recorded form-filling table") {
        auto report = token_report(fixtures(), "form_filling");
        REQUIRE(report.rows.size() == 6);
        std::vector<int> baseline{49, 80, 116, 164, 215, 275};
        std::vector<int> tme{49, 82, 88, 104, 123, 279};
        for (int i = 0; i < 6; ++i) {
            CHECK(report.rows[i].baseline == baseline[i]);
            CHECK(report.rows[i].tme == tme[i]);
        }
        CHECK(report.baseline_total == 899);
        CHECK(report.tme_total == 725);
        CHECK(report.saved_total == 174);
        CHECK(report.savings_pct == doctest::Approx(19.4).epsilon(0.01));
        CHECK(report.first_five_baseline == 624);
        CHECK(report.first_five_tme == 446);
        CHECK(report.first_five_pct == doctest::Approx(28.5).epsilon(0.01));
    }

    TEST_CASE("degenerate equal prompts save nothing") {
        TokenReport report;
        report.rows.push_back({1, 10, 10, 0, 0.0});
        std::string text = format_token_report(report, TableFormat::Text);
        CHECK(text.find("0.0%") != std::string::npos);
    }

    TEST_CASE("formats render all cells") {
        auto report = token_report(fixtures(), "form_filling");
        std::string text = format_token_report(report, TableFormat::Text);
        CHECK(text.find("899") != std::string::npos);
        CHECK(text.find("19.4%") != std::string::npos);
        CHECK(text.find("28.5%") != std::string::npos);
        std::string csv = format_token_report(report, TableFormat::Csv);
        CHECK(csv.find("Round 5,215,123,92,42.8") != std::string::npos);
        auto parsed = nlohmann::json::parse(format_token_report(report, TableFormat::Json));
        CHECK(parsed["tme_total"] == 725);
    }
}

TEST_SUITE("export_table") {
    TEST_CASE("csv summary matches the headline row") {
        auto reports = run_suite(fixtures(), {"trip", "cooking", "meeting", "cart"},
                                 {Variant::TmeDag});
        std::string csv = export_table(reports, TableFormat::Csv);
        CHECK(csv.find("System,Rounds,Hallucinations,Confusions,Consistent Tasks\n") == 0);
        CHECK(csv.find("tme_dag,27,0,0,4/4") != std::string::npos);
    }

    TEST_CASE("empty input yields a header-only table") {
        CHECK(export_table({}, TableFormat::Csv) ==
              "System,Rounds,Hallucinations,Confusions,Consistent Tasks\n");
    }

    TEST_CASE("json output parses back") {
        auto reports = run_suite(fixtures(), {"cooking"}, {Variant::TmeDag});
        auto parsed = nlohmann::json::parse(export_table(reports, TableFormat::Json));
        REQUIRE(parsed.is_array());
        CHECK(parsed[0]["system"] == "tme_dag");
        CHECK(parsed[0]["consistent_tasks"] == "1/1");
    }
}

TEST_SUITE("reference tables") {
    TEST_CASE("recorded rows load and format") {
        auto tables = load_reference_tables(fixture_dir() + "/reference_tables.json");
        REQUIRE(tables.case_study.size() == 4);
        REQUIRE(tables.ablation.size() == 4);
        CHECK(tables.case_study[3].system == "TME-DAG");
        CHECK(tables.case_study[3].consistent == "4/4");
        std::string text = format_reference_tables(tables);
        CHECK(text.find("TME-RandomTRIM") != std::string::npos);
        CHECK(text.find("display only") != std::string::npos);
    }
}

TEST_SUITE("repl") {
    TEST_CASE("form-filling inputs leave the corrected name in memory") {
        ReplSession repl(Variant::TmeDag);
        repl.handle_line("Help me fill out a form, I will provide some of my information to you.");
        repl.handle_line("My name is John Doe.");
        repl.handle_line("My email is john@example.com.");
        repl.handle_line("My address is Market Street, San Francisco.");
        repl.handle_line("Sorry, to correct, my name is John Smith.");

        std::string state = repl.handle_line(":state");
        auto doc = nlohmann::json::parse(state);
        bool found = false;
        for (const auto& dag : doc["dags"]) {
            if (dag["nodes"].contains("collect.name")) {
                found = true;
                CHECK(dag["nodes"]["collect.name"]["value"] == "John Smith");
                CHECK(dag["nodes"]["collect.name"]["history"] ==
                      nlohmann::json::array({"John Doe"}));
            }
        }
        CHECK(found);

        std::string tokens = repl.handle_line(":tokens");
        CHECK(std::count(tokens.begin(), tokens.end(), '\n') == 5);  // 5 rounds + total line
        CHECK_FALSE(repl.done());
        repl.handle_line(":quit");
        CHECK(repl.done());
    }

    TEST_CASE("per-turn errors do not end the session") {
        ReplSession repl(Variant::TmeDag);
        std::string reply = repl.handle_line(":nonsense");
        CHECK(reply.find("unknown command") != std::string::npos);
        CHECK_FALSE(repl.done());
    }

    TEST_CASE("graph export works mid-session") {
        ReplSession repl(Variant::TmeDag);
        repl.handle_line("destination: Set the destination to Seattle.");
        std::string dot = repl.handle_line(":dot");
        CHECK(dot.find("digraph") != std::string::npos);
        CHECK(dot.find("Seattle") != std::string::npos);
    }
}
