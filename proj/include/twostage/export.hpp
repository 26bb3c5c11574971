#pragma once

#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "twostage/welfare.hpp"

#include "json.hpp"

namespace twostage {

// 12 significant digits, '.' decimal separator — the frozen file precision.
std::string format_sig(double v, int sig = 12);

// The double that survives a format_sig round trip.
double round_sig(double v, int sig = 12);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

// UTF-8, header row, RFC-ish quoting for fields containing commas/quotes.
void write_csv(std::ostream& os, const Table& table);
void write_csv_file(const std::string& path, const Table& table);

// Rows as an array of objects; numeric-looking cells become JSON numbers
// (integers where exact), so CSV and JSON carry identical values.
nlohmann::json table_to_json(const Table& table);

// Sweep rows, sigma-major. `value` is recomputed from the rounded w_two and
// w_single columns so parsers that re-derive V reproduce the column exactly.
Table sweep_table(std::span<const RegionCell> cells);

struct WelfareCurveRow {
    double tau;
    double w_two;
    double w_single;
    double dw_dtau;
    bool is_tau_star = false;          // nearest grid row to the equilibrium
    bool is_tau_welfare_opt = false;   // nearest grid row to the welfare optimum
};
Table welfare_table(std::span<const WelfareCurveRow> rows);

struct ReplicationSummary {
    int replication;
    double theta;
    double participation;
    double total_welfare;
};
Table summary_table(std::span<const ReplicationSummary> rows);

// One record per agent: (replication, agent_id, theta, signal, a1, a2, payoff).
struct TraceRecord {
    int replication;
    int agent_id;
    double theta;
    double signal;
    int a1;
    int a2;
    double payoff;
};
Table trace_table(std::span<const TraceRecord> rows);

} // namespace twostage
