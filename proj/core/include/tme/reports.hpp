#pragma once

#include "tme/replay.hpp"

#include <string>
#include <vector>

namespace tme {

enum class TableFormat { Text, Csv, Json };

TableFormat table_format_from(const std::string& name);

// Per-round prompt-token comparison between the flat baseline and the DAG
// engine, replayed under the scenario's recorded counter.
struct TokenReport {
    struct Row {
        int round = 0;
        int baseline = 0;
        int tme = 0;
        int saved = 0;
        double savings_pct = 0.0;
    };
    std::string scenario;
    std::vector<Row> rows;
    int baseline_total = 0;
    int tme_total = 0;
    int saved_total = 0;
    double savings_pct = 0.0;
    int first_five_baseline = 0;
    int first_five_tme = 0;
    double first_five_pct = 0.0;
};

TokenReport token_report(const FixtureSet& fixtures, const std::string& scenario_name);
std::string format_token_report(const TokenReport& report, TableFormat format);

// Summary table over suite reports, aggregated per variant with the columns
// System, Rounds, Hallucinations, Confusions, Consistent Tasks.
std::string export_table(const std::vector<RunReport>& reports, TableFormat format);

// Display-only reference rows recorded from prior published runs; these are
// fixture constants, not replayable systems.
struct ReferenceRow {
    std::string system;
    int rounds = 0;
    int hallucinations = 0;
    int confusions = 0;
    std::string consistent;
};

struct ReferenceTables {
    std::vector<ReferenceRow> case_study;
    std::vector<ReferenceRow> ablation;
};

ReferenceTables load_reference_tables(const std::string& path);
std::string format_reference_tables(const ReferenceTables& tables);

} // namespace tme
