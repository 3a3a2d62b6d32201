#include "tme/reports.hpp"

#include "tme/errors.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace tme {

TableFormat table_format_from(const std::string& name) {
    if (name == "text") return TableFormat::Text;
    if (name == "csv") return TableFormat::Csv;
    if (name == "json") return TableFormat::Json;
    throw Error(ErrorCode::UsageError, "unknown format '" + name + "' (text|csv|json)");
}

namespace {

std::string pct(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f%%", value);
    return buf;
}

double savings(int baseline, int actual) {
    if (baseline == 0) return 0.0;
    return 100.0 * static_cast<double>(baseline - actual) / static_cast<double>(baseline);
}

} // namespace

TokenReport token_report(const FixtureSet& fixtures, const std::string& scenario_name) {
    TokenReport report;
    report.scenario = scenario_name;
    auto script = fixtures.scenario(scenario_name);

    auto baseline = fixtures.replay_cell(script, Variant::BaselineFlat);
    auto tme = fixtures.replay_cell(script, Variant::TmeDag);
    if (baseline.error)
        throw Error(ErrorCode::FixtureGap, "baseline replay failed: " + *baseline.error);
    if (tme.error) throw Error(ErrorCode::FixtureGap, "engine replay failed: " + *tme.error);

    for (std::size_t i = 0; i < script.rounds.size(); ++i) {
        TokenReport::Row row;
        row.round = static_cast<int>(i + 1);
        row.baseline = baseline.round_details[i].prompt_tokens;
        row.tme = tme.round_details[i].prompt_tokens;
        row.saved = row.baseline - row.tme;
        row.savings_pct = savings(row.baseline, row.tme);
        report.baseline_total += row.baseline;
        report.tme_total += row.tme;
        if (i < 5) {
            report.first_five_baseline += row.baseline;
            report.first_five_tme += row.tme;
        }
        report.rows.push_back(row);
    }
    report.saved_total = report.baseline_total - report.tme_total;
    report.savings_pct = savings(report.baseline_total, report.tme_total);
    report.first_five_pct = savings(report.first_five_baseline, report.first_five_tme);
    return report;
}

std::string format_token_report(const TokenReport& report, TableFormat format) {
    std::ostringstream out;
    switch (format) {
    case TableFormat::Csv: {
        out << "Round,Baseline-flat Tokens,TME Tokens,Tokens Saved,Savings (%)\n";
        for (const auto& r : report.rows) {
            char buf[16];
            std::snprintf(buf, sizeof buf, "%.1f", r.savings_pct);
            out << "Round " << r.round << "," << r.baseline << "," << r.tme << "," << r.saved
                << "," << buf << "\n";
        }
        char buf[16];
        std::snprintf(buf, sizeof buf, "%.1f", report.savings_pct);
        out << "Total," << report.baseline_total << "," << report.tme_total << ","
            << report.saved_total << "," << buf << "\n";
        break;
    }
    case TableFormat::Json: {
        nlohmann::ordered_json j;
        j["scenario"] = report.scenario;
        j["rounds"] = nlohmann::ordered_json::array();
        for (const auto& r : report.rows)
            j["rounds"].push_back({{"round", r.round},
                                   {"baseline_tokens", r.baseline},
                                   {"tme_tokens", r.tme},
                                   {"tokens_saved", r.saved},
                                   {"savings_pct", r.savings_pct}});
        j["baseline_total"] = report.baseline_total;
        j["tme_total"] = report.tme_total;
        j["tokens_saved"] = report.saved_total;
        j["savings_pct"] = report.savings_pct;
        j["first_five"] = {{"baseline_total", report.first_five_baseline},
                           {"tme_total", report.first_five_tme},
                           {"savings_pct", report.first_five_pct}};
        out << j.dump(2);
        break;
    }
    case TableFormat::Text: {
        out << "Round    Baseline-flat Tokens  TME Tokens  Tokens Saved  Savings (%)\n";
        for (const auto& r : report.rows) {
            char line[128];
            std::snprintf(line, sizeof line, "Round %-2d %21d %11d %13d %12s\n", r.round,
                          r.baseline, r.tme, r.saved, pct(r.savings_pct).c_str());
            out << line;
        }
        char line[128];
        std::snprintf(line, sizeof line, "Total    %21d %11d %13d %12s\n",
                      report.baseline_total, report.tme_total, report.saved_total,
                      pct(report.savings_pct).c_str());
        out << line;
        std::snprintf(line, sizeof line, "First five rounds: %d vs %d (savings %s)\n",
                      report.first_five_baseline, report.first_five_tme,
                      pct(report.first_five_pct).c_str());
        out << line;
        break;
    }
    }
    return out.str();
}

namespace {

struct VariantSummary {
    std::string system;
    int rounds = 0;
    int hallucinations = 0;
    int confusions = 0;
    int consistent_cells = 0;
    int total_cells = 0;
};

std::vector<VariantSummary> summarize(const std::vector<RunReport>& reports) {
    std::vector<VariantSummary> order;
    std::map<std::string, std::size_t> index;
    for (const auto& r : reports) {
        std::string system = variant_name(r.variant);
        auto it = index.find(system);
        if (it == index.end()) {
            index[system] = order.size();
            order.push_back({system, 0, 0, 0, 0, 0});
            it = index.find(system);
        }
        auto& s = order[it->second];
        s.rounds += r.rounds_comparable;
        s.hallucinations += r.hallucinations;
        s.confusions += r.confusions;
        s.total_cells += 1;
        if (!r.error && r.consistent) s.consistent_cells += 1;
    }
    return order;
}

} // namespace

std::string export_table(const std::vector<RunReport>& reports, TableFormat format) {
    auto rows = summarize(reports);
    std::ostringstream out;
    switch (format) {
    case TableFormat::Csv: {
        out << "System,Rounds,Hallucinations,Confusions,Consistent Tasks\n";
        for (const auto& s : rows)
            out << s.system << "," << s.rounds << "," << s.hallucinations << "," << s.confusions
                << "," << s.consistent_cells << "/" << s.total_cells << "\n";
        break;
    }
    case TableFormat::Json: {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const auto& s : rows)
            arr.push_back({{"system", s.system},
                           {"rounds", s.rounds},
                           {"hallucinations", s.hallucinations},
                           {"confusions", s.confusions},
                           {"consistent_tasks",
                            std::to_string(s.consistent_cells) + "/" +
                                std::to_string(s.total_cells)}});
        out << arr.dump(2);
        break;
    }
    case TableFormat::Text: {
        out << "System           Rounds  Hallucinations  Confusions  Consistent Tasks\n";
        for (const auto& s : rows) {
            char line[160];
            std::snprintf(line, sizeof line, "%-16s %6d %15d %11d %17s\n", s.system.c_str(),
                          s.rounds, s.hallucinations, s.confusions,
                          (std::to_string(s.consistent_cells) + "/" +
                           std::to_string(s.total_cells))
                              .c_str());
            out << line;
        }
        break;
    }
    }
    return out.str();
}

ReferenceTables load_reference_tables(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::FixtureGap, "cannot open reference tables '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    nlohmann::json doc = nlohmann::json::parse(buf.str(), nullptr, false);
    if (doc.is_discarded() || !doc.is_object())
        throw Error(ErrorCode::FixtureGap, "reference tables file is not a JSON object");

    auto parse_rows = [](const nlohmann::json& arr) {
        std::vector<ReferenceRow> rows;
        for (const auto& j : arr) {
            ReferenceRow row;
            row.system = j.at("system").get<std::string>();
            row.rounds = j.at("rounds").get<int>();
            row.hallucinations = j.at("hallucinations").get<int>();
            row.confusions = j.at("confusions").get<int>();
            row.consistent = j.at("consistent_tasks").get<std::string>();
            rows.push_back(std::move(row));
        }
        return rows;
    };
    ReferenceTables tables;
    if (doc.contains("case_study")) tables.case_study = parse_rows(doc["case_study"]);
    if (doc.contains("ablation")) tables.ablation = parse_rows(doc["ablation"]);
    return tables;
}

std::string format_reference_tables(const ReferenceTables& tables) {
    std::ostringstream out;
    auto emit = [&](const char* title, const std::vector<ReferenceRow>& rows) {
        if (rows.empty()) return;
        out << title << " (recorded reference, display only)\n";
        out << "System           Rounds  Hallucinations  Confusions  Consistent Tasks\n";
        for (const auto& r : rows) {
            char line[160];
            std::snprintf(line, sizeof line, "%-16s %6d %15d %11d %17s\n", r.system.c_str(),
                          r.rounds, r.hallucinations, r.confusions, r.consistent.c_str());
            out << line;
        }
    };
    emit("Case studies", tables.case_study);
    if (!tables.case_study.empty() && !tables.ablation.empty()) out << "\n";
    emit("Ablations", tables.ablation);
    return out.str();
}

} // namespace tme
