#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace dunkl {

// Fitted constant of one inequality over a sweep.
struct FitReport {
    std::string id;                 // e.g. "2.4", "2.5:m=1", "L2.3:2.8:m=0"
    double requested_exponent = 0.0;
    double exponent = 0.0;          // after any halvings
    int halvings = 0;
    double constant = 0.0;          // max of the bounded quantity over the sweep
    double refined_constant = 0.0;  // same over the densified sweep
    std::string location;           // sweep point of the max
    bool finite = false;
    bool stable = false;            // |refined / constant - 1| < 0.25
    bool ok() const { return finite && stable; }
};

struct Check {
    std::string id;
    bool pass = false;
    double value = 0.0;
    double limit = 0.0;
    std::string detail;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> row) { rows.push_back(std::move(row)); }
    std::string str() const;
};

// Round-trip formatting used in every CSV and JSON number.
std::string fmt(double v);

struct SuiteReport {
    std::string suite;
    std::vector<FitReport> fits;
    std::vector<Check> checks;
    std::vector<std::string> notes;
    CsvTable csv;

    bool pass() const;
    Check& check(std::string id, bool pass, double value, double limit, std::string detail = {});
    void merge(const SuiteReport& o);

    // {suite, status, constants[], locations[], checks[], notes[], config_hash}
    nlohmann::ordered_json to_json(const std::string& config_hash) const;
    // Writes <dir>/<suite>.json and, when the table has a header, <dir>/<suite>.csv.
    void write(const std::filesystem::path& dir, const std::string& config_hash) const;
};

// 64-bit FNV-1a as 16 hex digits.
std::string config_hash(const std::string& text);

}  // namespace dunkl
