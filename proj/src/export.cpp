#include "twostage/export.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>

namespace twostage {

std::string format_sig(double v, int sig) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", sig, v);
    return std::string(buf);
}

double round_sig(double v, int sig) {
    return std::strtod(format_sig(v, sig).c_str(), nullptr);
}

namespace {

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

bool parse_number(const std::string& s, double* out) {
    if (s.empty()) return false;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) return false;
    *out = v;
    return true;
}

} // namespace

void write_csv(std::ostream& os, const Table& table) {
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        if (i) os << ',';
        os << csv_escape(table.header[i]);
    }
    os << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) os << ',';
            os << csv_escape(row[i]);
        }
        os << '\n';
    }
}

void write_csv_file(const std::string& path, const Table& table) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open for writing: " + path);
    write_csv(os, table);
    if (!os.good()) throw IoError("write failed: " + path);
}

nlohmann::json table_to_json(const Table& table) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : table.rows) {
        nlohmann::json obj = nlohmann::json::object();
        for (std::size_t i = 0; i < row.size() && i < table.header.size(); ++i) {
            double v;
            if (parse_number(row[i], &v)) {
                if (std::isfinite(v) && v == std::floor(v) && std::abs(v) < 9.0e15)
                    obj[table.header[i]] = static_cast<std::int64_t>(v);
                else
                    obj[table.header[i]] = v;
            } else {
                obj[table.header[i]] = row[i];
            }
        }
        rows.push_back(std::move(obj));
    }
    return rows;
}

Table sweep_table(std::span<const RegionCell> cells) {
    Table t;
    t.header = {"sigma",   "gamma",  "tau_two",    "tau_single", "w_two",
                "w_single", "value", "beneficial", "unique",     "error"};
    t.rows.reserve(cells.size());
    for (const RegionCell& c : cells) {
        std::vector<std::string> row(10);
        row[0] = format_sig(c.sigma);
        row[1] = format_sig(c.gamma);
        if (c.error.empty()) {
            row[2] = format_sig(c.tau_star_two);
            row[3] = format_sig(c.tau_star_single);
            row[4] = format_sig(c.w_two);
            row[5] = format_sig(c.w_single);
            // Derived from the rounded columns so the file is self-consistent.
            const double v = round_sig(c.w_two) - round_sig(c.w_single);
            row[6] = format_sig(v);
            row[7] = v > 0.0 ? "1" : "0";
        } else {
            row[7] = "0";
        }
        row[8] = c.unique ? "1" : "0";
        row[9] = c.error;
        t.rows.push_back(std::move(row));
    }
    return t;
}

Table welfare_table(std::span<const WelfareCurveRow> rows) {
    Table t;
    t.header = {"tau", "w_two_stage", "w_single_stage", "w_two_stage_dtau",
                "is_tau_star", "is_tau_welfare_opt"};
    t.rows.reserve(rows.size());
    for (const WelfareCurveRow& r : rows)
        t.rows.push_back({format_sig(r.tau), format_sig(r.w_two),
                          format_sig(r.w_single), format_sig(r.dw_dtau),
                          r.is_tau_star ? "1" : "0",
                          r.is_tau_welfare_opt ? "1" : "0"});
    return t;
}

Table summary_table(std::span<const ReplicationSummary> rows) {
    Table t;
    t.header = {"replication", "theta", "participation", "total_welfare"};
    t.rows.reserve(rows.size());
    for (const ReplicationSummary& r : rows)
        t.rows.push_back({std::to_string(r.replication), format_sig(r.theta),
                          format_sig(r.participation), format_sig(r.total_welfare)});
    return t;
}

Table trace_table(std::span<const TraceRecord> rows) {
    Table t;
    t.header = {"replication", "agent_id", "theta", "signal", "a1", "a2", "payoff"};
    t.rows.reserve(rows.size());
    for (const TraceRecord& r : rows)
        t.rows.push_back({std::to_string(r.replication), std::to_string(r.agent_id),
                          format_sig(r.theta), format_sig(r.signal),
                          std::to_string(r.a1), std::to_string(r.a2),
                          format_sig(r.payoff)});
    return t;
}

} // namespace twostage
