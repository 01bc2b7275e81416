#pragma once

#include <map>
#include <string>
#include <vector>

#include "domsplit/linalg.hpp"
#include "domsplit/scenario.hpp"

namespace domsplit {

inline constexpr const char* library_version = "0.1.0";

// provenance: measured | fitted | closed-form-bound
struct Quantity {
    double value = 0.0;
    std::string provenance = "measured";
    bool operator==(const Quantity& o) const;
};

struct TableRow {
    double n = 0.0;
    double value = 0.0;
};

struct Table {
    std::string name;
    std::string x_label = "n";
    std::string provenance = "measured";
    std::vector<TableRow> rows;  // sorted by n
    bool operator==(const Table& o) const;
};

struct PointRecord {
    std::vector<double> x;
    Matrix e;  // orthonormal basis columns
    Matrix f;
    double projection_norm = 0.0;
    bool operator==(const PointRecord& o) const;
};

struct Provenance {
    std::string config_hash;
    std::string seed;
    std::string library_version = domsplit::library_version;
    std::string scenario;
    bool operator==(const Provenance& o) const = default;
};

struct ReportBundle {
    Provenance provenance;
    std::string status;  // dominated | no-domination | not-verified
    std::string diagnostic;
    std::string config;  // canonical config text, echoed
    std::map<std::string, Quantity> quantities;
    std::map<std::string, bool> checks;
    std::vector<Table> tables;
    std::string points_provenance = "measured";
    std::vector<PointRecord> points;
    bool operator==(const ReportBundle& o) const;

    const Table* table(const std::string& name) const;
};

std::string to_json(const ReportBundle& b);
ReportBundle from_json(const std::string& text);
std::string to_csv(const Table& t);

enum class ReportFormat { json, csv_tables, both };
// report.json and tables/<name>.csv under dir
void emit_report(const ReportBundle& b, const std::string& dir, ReportFormat format = ReportFormat::both);

std::string sha256_hex(const std::string& data);

struct Outcome {
    ReportBundle bundle;
    int exit_code = 1;  // 0 dominated and verified, 2 otherwise
};

// End-to-end run of a discrete or flow scenario.
Outcome analyze(const ScenarioConfig& cfg, const RunOptions& opts = {});

}  // namespace domsplit
