#include "crt/experiments.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace crt {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    // nlohmann prints the shortest representation that round-trips.
    return nlohmann::json(v).dump();
}

void ExperimentReport::parameter(const std::string& key, const std::string& value) {
    parameters.emplace_back(key, value);
}

void ExperimentReport::parameter(const std::string& key, double value) { parameter(key, format_double(value)); }

void ExperimentReport::value(const std::string& key, const std::string& text) { values.emplace_back(key, text); }

void ExperimentReport::value(const std::string& key, double v) { value(key, format_double(v)); }

bool ExperimentReport::check(const std::string& check_name, double v, const std::string& relation, double threshold) {
    bool ok = false;
    if (relation == "<=") {
        ok = v <= threshold;
    } else if (relation == ">=") {
        ok = v >= threshold;
    } else if (relation == "==") {
        ok = v == threshold;
    }
    checks.push_back({check_name, v, relation, threshold, ok});
    pass = pass && ok;
    return ok;
}

bool ExperimentReport::check_flag(const std::string& check_name, bool ok) {
    return check(check_name, ok ? 1.0 : 0.0, "==", 1.0);
}

namespace {

nlohmann::ordered_json number_or_string(double v) {
    if (std::isfinite(v)) return v;
    return format_double(v);
}

}  // namespace

std::string ExperimentReport::to_json() const {
    nlohmann::ordered_json out;
    out["name"] = name;
    nlohmann::ordered_json params = nlohmann::ordered_json::object();
    for (const auto& [k, v] : parameters) params[k] = v;
    out["parameters"] = params;
    nlohmann::ordered_json list = nlohmann::ordered_json::array();
    for (const Check& c : checks) {
        nlohmann::ordered_json j;
        j["name"] = c.name;
        j["value"] = number_or_string(c.value);
        j["relation"] = c.relation;
        j["threshold"] = number_or_string(c.threshold);
        j["pass"] = c.pass;
        list.push_back(j);
    }
    out["checks"] = list;
    nlohmann::ordered_json vals = nlohmann::ordered_json::object();
    for (const auto& [k, v] : values) vals[k] = v;
    out["values"] = vals;
    nlohmann::ordered_json cells_json = nlohmann::ordered_json::array();
    for (const CellRow& c : cells) {
        nlohmann::ordered_json j;
        j["shape"] = c.shape;
        j["lo"] = c.lo;
        j["hi"] = c.hi;
        j["empirical"] = number_or_string(c.empirical);
        j["theoretical"] = number_or_string(c.theoretical);
        j["rel_err"] = number_or_string(c.rel_err);
        j["exact"] = number_or_string(c.exact);
        j["z"] = number_or_string(c.z_score);
        cells_json.push_back(j);
    }
    out["cells"] = cells_json;
    out["pass"] = pass;
    return out.dump(2) + "\n";
}

std::string ExperimentReport::to_text() const {
    std::ostringstream os;
    os << "experiment " << name << "\n";
    std::size_t width = 0;
    for (const auto& [k, v] : parameters) width = std::max(width, k.size());
    for (const auto& [k, v] : values) width = std::max(width, k.size());
    for (const Check& c : checks) width = std::max(width, c.name.size());
    for (const auto& [k, v] : parameters) os << "  " << std::left << std::setw(static_cast<int>(width)) << k << "  " << v << "\n";
    if (!values.empty()) os << "values\n";
    for (const auto& [k, v] : values) os << "  " << std::left << std::setw(static_cast<int>(width)) << k << "  " << v << "\n";
    if (!checks.empty()) os << "checks\n";
    for (const Check& c : checks) {
        os << "  " << std::left << std::setw(static_cast<int>(width)) << c.name << "  " << std::setw(24)
           << format_double(c.value) << " " << std::setw(2) << c.relation << " " << std::setw(24)
           << format_double(c.threshold) << " " << (c.pass ? "PASS" : "FAIL") << "\n";
    }
    if (!cells.empty()) {
        os << "cells\n";
        os << "  " << std::left << std::setw(8) << "shape" << std::setw(26) << "lo" << std::setw(26) << "hi"
           << std::setw(14) << "empirical" << std::setw(14) << "exact" << std::setw(14) << "limit" << std::setw(12)
           << "rel_err" << "z\n";
        for (const CellRow& c : cells) {
            std::ostringstream lo, hi;
            for (std::size_t i = 0; i < c.lo.size(); ++i) {
                lo << (i ? "," : "") << std::setprecision(6) << c.lo[i];
                hi << (i ? "," : "") << std::setprecision(6) << c.hi[i];
            }
            os << "  " << std::left << std::setw(8) << c.shape << std::setw(26) << lo.str() << std::setw(26) << hi.str()
               << std::setprecision(6) << std::setw(14) << c.empirical << std::setw(14) << c.exact << std::setw(14)
               << c.theoretical << std::setw(12) << c.rel_err << c.z_score << "\n";
        }
    }
    os << "result " << (pass ? "PASS" : "FAIL") << "\n";
    return os.str();
}

std::string ExperimentReport::to_csv() const {
    std::ostringstream os;
    const std::size_t dims = cells.empty() ? 0 : cells.front().lo.size();
    os << "shape";
    for (std::size_t i = 0; i < dims; ++i) os << ",cell_lo_" << i;
    for (std::size_t i = 0; i < dims; ++i) os << ",cell_hi_" << i;
    os << ",empirical,theoretical,rel_err\n";
    for (const CellRow& c : cells) {
        os << c.shape;
        for (double v : c.lo) os << "," << format_double(v);
        for (double v : c.hi) os << "," << format_double(v);
        os << "," << format_double(c.empirical) << "," << format_double(c.theoretical) << ","
           << format_double(c.rel_err) << "\n";
    }
    return os.str();
}

}  // namespace crt
