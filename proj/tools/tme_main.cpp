#include "tme/errors.hpp"
#include "tme/replay.hpp"
#include "tme/reports.hpp"
#include "tme/repl.hpp"
#include "tme/snapshot.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

using namespace tme;

namespace {

// Exit codes: 0 success, 1 scoring failure under --strict, 2 usage error,
// 3 fixture or backend error.
constexpr int kExitOk = 0;
constexpr int kExitScoring = 1;
constexpr int kExitUsage = 2;
constexpr int kExitFixture = 3;

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty() || out_path == "-") {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << "\n";
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw Error(ErrorCode::UsageError, "cannot write '" + out_path + "'");
    out << text;
}

std::string describe_report(const RunReport& report, bool verbose) {
    std::ostringstream out;
    out << report.scenario << " x " << variant_name(report.variant) << ": ";
    if (report.error) {
        out << "error: " << *report.error << "\n";
        return out.str();
    }
    out << report.hallucinations << " hallucinations, " << report.confusions << " confusions, "
        << (report.consistent ? "consistent" : "inconsistent") << " (" << report.rounds
        << " rounds, " << report.rounds_comparable << " counted)\n";
    for (const auto& round : report.round_details) {
        if (verbose) {
            out << "  round " << round.round << ": tokens=" << round.prompt_tokens
                << " hash=" << round.prompt_hash.substr(0, 12);
            if (round.confusion) out << " [confusion]";
            out << "\n";
            for (const auto& op : round.operations) out << "    op: " << op << "\n";
            for (const auto& warn : round.warnings) out << "    warn: " << warn << "\n";
        }
        for (const auto& failed : round.failed_assertions)
            out << "  round " << round.round << " failed: " << failed.describe() << "\n";
        if (!verbose && round.confusion)
            out << "  round " << round.round << " intent mismatch vs gold\n";
    }
    return out.str();
}

struct GlobalOpts {
    std::string fixtures = fixture_dir();
    bool live = false;
};

int cmd_replay(const GlobalOpts& global, const std::string& scenario, const std::string& variant,
               bool strict, bool verbose, const std::string& format, const std::string& out) {
    FixtureSet fixtures(global.fixtures);
    auto report = fixtures.replay_cell(scenario, variant_from(variant));
    if (report.error) throw Error(ErrorCode::FixtureGap, *report.error);
    if (format == "text") {
        emit(describe_report(report, verbose), out);
    } else {
        emit(export_table({report}, table_format_from(format)), out);
    }
    return strict && !report.consistent ? kExitScoring : kExitOk;
}

int cmd_suite(const GlobalOpts& global, std::vector<std::string> scenarios,
              std::vector<std::string> variant_names, bool ablations, int jobs, bool strict,
              bool reference, bool verbose, const std::string& format, const std::string& out) {
    if (scenarios.empty()) scenarios = {"trip", "cooking", "meeting", "cart"};
    std::vector<Variant> variants;
    if (variant_names.empty()) {
        variants = {Variant::TmeDag};
        if (ablations) {
            variants.push_back(Variant::TmeFlat);
            variants.push_back(Variant::TmeRandomTrim);
        }
    } else {
        for (const auto& v : variant_names) variants.push_back(variant_from(v));
    }

    FixtureSet fixtures(global.fixtures);
    auto reports = run_suite(fixtures, scenarios, variants, jobs);

    std::ostringstream body;
    if (format == "text") {
        for (const auto& r : reports) body << describe_report(r, verbose);
        body << "\n" << export_table(reports, TableFormat::Text);
        if (reference) {
            body << "\n";
            body << format_reference_tables(
                load_reference_tables(global.fixtures + "/reference_tables.json"));
        }
    } else {
        body << export_table(reports, table_format_from(format));
    }
    emit(body.str(), out);

    bool any_error = false;
    bool any_inconsistent = false;
    for (const auto& r : reports) {
        any_error |= r.error.has_value();
        any_inconsistent |= !r.error && !r.consistent;
    }
    if (any_error) return kExitFixture;
    return strict && any_inconsistent ? kExitScoring : kExitOk;
}

int cmd_tokens(const GlobalOpts& global, const std::string& scenario, const std::string& format,
               const std::string& out) {
    FixtureSet fixtures(global.fixtures);
    auto report = token_report(fixtures, scenario);
    emit(format_token_report(report, table_format_from(format)), out);
    return kExitOk;
}

int cmd_export(const GlobalOpts& global, const std::string& scenario, const std::string& variant,
               int round, const std::string& format, const std::string& out) {
    FixtureSet fixtures(global.fixtures);
    auto script = fixtures.scenario(scenario);
    Session session = fixtures.replay_session(script, variant_from(variant), round);
    if (!session.has_forest())
        throw Error(ErrorCode::UsageError, "flat variants have no graph to export");
    if (format == "dot")
        emit(to_dot(session.forest()), out);
    else if (format == "json")
        emit(snapshot(session.forest()), out);
    else
        throw Error(ErrorCode::UsageError, "export format must be dot or json");
    return kExitOk;
}

int cmd_repl(const GlobalOpts& global, const std::string& variant,
             const std::string& responder_kind, const std::string& recorded_path,
             const std::string& http_base) {
    std::unique_ptr<Responder> responder;
    if (responder_kind == "recorded") {
        responder = std::make_unique<RecordedResponder>(RecordedResponder::from_file(
            recorded_path.empty() ? responses_path(global.fixtures, "cooking") : recorded_path));
    } else if (responder_kind == "http") {
        if (!global.live)
            throw Error(ErrorCode::UsageError, "http responder requires --live");
        HttpResponderConfig config;
        config.base_url = http_base;
        responder = std::make_unique<HttpResponder>(config);
    } else if (responder_kind != "none") {
        throw Error(ErrorCode::UsageError, "responder must be none|recorded|http");
    }

    ReplSession repl(variant_from(variant), nullptr, std::move(responder));
    std::cout << "tme repl (" << variant << ") — :state :dot :tokens :quit\n";
    std::string line;
    while (!repl.done() && std::getline(std::cin, line)) {
        std::string reply = repl.handle_line(line);
        if (!reply.empty()) std::cout << reply << "\n";
        if (!repl.done()) std::cout << std::flush;
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"task-memory engine: scenario replay, ablation suite, token reports"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    GlobalOpts global;
    app.add_option("--fixtures", global.fixtures, "fixture directory (env TME_FIXTURE_DIR)");
    app.add_flag("--live", global.live, "allow live HTTP backends");
    bool offline = true;
    app.add_flag("--offline", offline, "run offline (default; no network attempted)");

    auto* replay_cmd = app.add_subcommand("replay", "replay one scenario under one variant");
    std::string scenario = "cooking", variant = "tme_dag", format = "text", out;
    bool strict = false, verbose = false;
    replay_cmd->add_option("--scenario", scenario, "scenario name")->required();
    replay_cmd->add_option("--variant", variant, "tme_dag|tme_flat|tme_random_trim|baseline_flat");
    replay_cmd->add_flag("--strict", strict, "exit 1 when the run is inconsistent");
    replay_cmd->add_flag("-v,--verbose", verbose, "per-round operations and hashes");
    replay_cmd->add_option("--format", format, "text|csv|json");
    replay_cmd->add_option("--out", out, "write output to a file");

    auto* suite_cmd = app.add_subcommand("suite", "replay the scenario x variant cross product");
    std::vector<std::string> scenarios, variant_names;
    bool ablations = false, reference = false;
    int jobs = 1;
    suite_cmd->add_option("--scenarios", scenarios, "scenario names (default: the four case studies)");
    suite_cmd->add_option("--variants", variant_names, "explicit variant list");
    suite_cmd->add_flag("--ablations", ablations, "include tme_flat and tme_random_trim");
    suite_cmd->add_option("--jobs", jobs, "run cells in parallel");
    suite_cmd->add_flag("--strict", strict, "exit 1 when any cell is inconsistent");
    suite_cmd->add_flag("--reference", reference, "append recorded reference tables");
    suite_cmd->add_flag("-v,--verbose", verbose, "per-round detail");
    suite_cmd->add_option("--format", format, "text|csv|json");
    suite_cmd->add_option("--out", out, "write output to a file");

    auto* tokens_cmd = app.add_subcommand("tokens", "per-round token usage comparison");
    tokens_cmd->add_option("--scenario", scenario, "scenario name")->required();
    tokens_cmd->add_option("--format", format, "text|csv|json");
    tokens_cmd->add_option("--out", out, "write output to a file");

    auto* export_cmd = app.add_subcommand("export", "export the memory graph after a replay");
    int round = -1;
    std::string export_format = "dot";
    export_cmd->add_option("--scenario", scenario, "scenario name")->required();
    export_cmd->add_option("--variant", variant, "variant to replay");
    export_cmd->add_option("--round", round, "stop after this round (default: all)");
    export_cmd->add_option("--format", export_format, "dot|json");
    export_cmd->add_option("--out", out, "write output to a file");

    auto* repl_cmd = app.add_subcommand("repl", "interactive session");
    std::string responder_kind = "none", recorded_path, http_base = "http://127.0.0.1:8080";
    repl_cmd->add_option("--variant", variant, "variant to run");
    repl_cmd->add_option("--responder", responder_kind, "none|recorded|http");
    repl_cmd->add_option("--recorded", recorded_path, "recorded responder fixture path");
    repl_cmd->add_option("--base-url", http_base, "http responder base URL");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp" ? kExitOk
                                                                                 : kExitUsage;
    }

    try {
        if (*replay_cmd)
            return cmd_replay(global, scenario, variant, strict, verbose, format, out);
        if (*suite_cmd)
            return cmd_suite(global, scenarios, variant_names, ablations, jobs, strict, reference,
                             verbose, format, out);
        if (*tokens_cmd) return cmd_tokens(global, scenario, format, out);
        if (*export_cmd) return cmd_export(global, scenario, variant, round, export_format, out);
        if (*repl_cmd) return cmd_repl(global, variant, responder_kind, recorded_path, http_base);
    } catch (const Error& e) {
        std::cerr << "tme: " << e.what() << "\n";
        return e.code() == ErrorCode::UsageError ? kExitUsage : kExitFixture;
    } catch (const std::exception& e) {
        std::cerr << "tme: " << e.what() << "\n";
        return kExitFixture;
    }
    return kExitUsage;
}
