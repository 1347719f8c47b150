#include "dunkl/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dunkl/error.hpp"

namespace dunkl {

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

nlohmann::ordered_json number(double v) {
    if (std::isfinite(v)) return v;
    return fmt(v);
}

}  // namespace

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string CsvTable::str() const {
    std::ostringstream os;
    auto line = [&](const std::vector<std::string>& r) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << csv_field(r[i]);
        os << '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
    return os.str();
}

bool SuiteReport::pass() const {
    for (const auto& f : fits)
        if (!f.ok()) return false;
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

Check& SuiteReport::check(std::string id, bool pass, double value, double limit, std::string detail) {
    checks.push_back({std::move(id), pass, value, limit, std::move(detail)});
    return checks.back();
}

void SuiteReport::merge(const SuiteReport& o) {
    fits.insert(fits.end(), o.fits.begin(), o.fits.end());
    checks.insert(checks.end(), o.checks.begin(), o.checks.end());
    notes.insert(notes.end(), o.notes.begin(), o.notes.end());
    if (csv.header.empty()) csv.header = o.csv.header;
    if (csv.header == o.csv.header) csv.rows.insert(csv.rows.end(), o.csv.rows.begin(), o.csv.rows.end());
}

nlohmann::ordered_json SuiteReport::to_json(const std::string& hash) const {
    nlohmann::ordered_json j;
    j["suite"] = suite;
    j["status"] = pass() ? "pass" : "fail";
    auto constants = nlohmann::ordered_json::array();
    auto locations = nlohmann::ordered_json::array();
    for (const auto& f : fits) {
        nlohmann::ordered_json c;
        c["bound_name"] = f.id;
        c["requested_exponent"] = number(f.requested_exponent);
        c["exponent_used"] = number(f.exponent);
        c["halvings"] = f.halvings;
        c["fitted_constant"] = number(f.constant);
        c["refined_constant"] = number(f.refined_constant);
        c["finite"] = f.finite;
        c["stable"] = f.stable;
        c["max_location"] = f.location;
        constants.push_back(c);
        locations.push_back({{"bound_name", f.id}, {"location", f.location}});
    }
    auto checks_j = nlohmann::ordered_json::array();
    for (const auto& c : checks) {
        nlohmann::ordered_json e;
        e["id"] = c.id;
        e["pass"] = c.pass;
        e["value"] = number(c.value);
        e["limit"] = number(c.limit);
        if (!c.detail.empty()) e["detail"] = c.detail;
        checks_j.push_back(e);
    }
    j["constants"] = constants;
    j["locations"] = locations;
    j["checks"] = checks_j;
    j["notes"] = notes;
    j["config_hash"] = hash;
    return j;
}

void SuiteReport::write(const std::filesystem::path& dir, const std::string& hash) const {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    auto put = [&](const std::filesystem::path& p, const std::string& text) {
        std::ofstream out(p, std::ios::binary);
        if (!out) throw Error("cannot write report file " + p.string());
        out << text;
        if (!out) throw Error("cannot write report file " + p.string());
    };
    put(dir / (suite + ".json"), to_json(hash).dump(2) + "\n");
    if (!csv.header.empty()) put(dir / (suite + ".csv"), csv.str());
}

std::string config_hash(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace dunkl
