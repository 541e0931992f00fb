#include "patsim/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "patsim/constants.hpp"
#include "patsim/numerics.hpp"

namespace patsim {

namespace {

struct UnitEntry {
    const char* suffix;
    Unit unit;
    double factor;
};

// longest-match table; factors convert to SI
const UnitEntry kUnits[] = {
    {"neV", Unit::energy, 1e-9 * consts::electronvolt},
    {"ueV", Unit::energy, 1e-6 * consts::electronvolt},
    {"meV", Unit::energy, 1e-3 * consts::electronvolt},
    {"eV", Unit::energy, consts::electronvolt},
    {"nV", Unit::voltage, 1e-9},
    {"uV", Unit::voltage, 1e-6},
    {"mV", Unit::voltage, 1e-3},
    {"V", Unit::voltage, 1.0},
    {"fA", Unit::current, 1e-15},
    {"pA", Unit::current, 1e-12},
    {"nA", Unit::current, 1e-9},
    {"uA", Unit::current, 1e-6},
    {"mA", Unit::current, 1e-3},
    {"A", Unit::current, 1.0},
    {"kHz", Unit::frequency, 1e3},
    {"MHz", Unit::frequency, 1e6},
    {"GHz", Unit::frequency, 1e9},
    {"THz", Unit::frequency, 1e12},
    {"Hz", Unit::frequency, 1.0},
    {"kohm", Unit::resistance, 1e3},
    {"Mohm", Unit::resistance, 1e6},
    {"Gohm", Unit::resistance, 1e9},
    {"ohm", Unit::resistance, 1.0},
    {"fF/m", Unit::capacitance_per_length, 1e-15},
    {"pF/m", Unit::capacitance_per_length, 1e-12},
    {"nF/m", Unit::capacitance_per_length, 1e-9},
    {"F/m", Unit::capacitance_per_length, 1.0},
    {"fF", Unit::capacitance, 1e-15},
    {"pF", Unit::capacitance, 1e-12},
    {"nF", Unit::capacitance, 1e-9},
    {"uF", Unit::capacitance, 1e-6},
    {"F", Unit::capacitance, 1.0},
    {"pH", Unit::inductance, 1e-12},
    {"nH", Unit::inductance, 1e-9},
    {"uH", Unit::inductance, 1e-6},
    {"H", Unit::inductance, 1.0},
    {"nm", Unit::length, 1e-9},
    {"um", Unit::length, 1e-6},
    {"mm", Unit::length, 1e-3},
    {"m", Unit::length, 1.0},
    {"mK", Unit::temperature, 1e-3},
    {"K", Unit::temperature, 1.0},
    {"dBm", Unit::power_dbm, 1.0},
    {"dB", Unit::decibel, 1.0},
    {"Gph/s", Unit::flux, 1e9},
    {"Mph/s", Unit::flux, 1e6},
    {"ph/s", Unit::flux, 1.0},
    {"ns", Unit::time, 1e-9},
    {"us", Unit::time, 1e-6},
    {"ms", Unit::time, 1e-3},
    {"s", Unit::time, 1.0},
};

const char* unit_name(Unit u) {
    switch (u) {
    case Unit::energy: return "energy";
    case Unit::voltage: return "voltage";
    case Unit::current: return "current";
    case Unit::frequency: return "frequency";
    case Unit::resistance: return "resistance";
    case Unit::capacitance: return "capacitance";
    case Unit::capacitance_per_length: return "capacitance/length";
    case Unit::inductance: return "inductance";
    case Unit::length: return "length";
    case Unit::temperature: return "temperature";
    case Unit::power_dbm: return "power (dBm)";
    case Unit::decibel: return "attenuation (dB)";
    case Unit::flux: return "photon flux";
    case Unit::time: return "time";
    case Unit::none: return "dimensionless";
    }
    return "?";
}

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

} // namespace

double parse_quantity(const std::string& token, Unit expected,
                      const std::string& context) {
    const std::string t = trim(token);
    errno = 0;
    char* end = nullptr;
    const double value = std::strtod(t.c_str(), &end);
    if (end == t.c_str() || errno == ERANGE) {
        throw ConfigError(context + ": cannot parse number in '" + t + "'");
    }
    const std::string suffix = trim(std::string(end));

    if (suffix.empty()) {
        if (expected == Unit::none) {
            return value;
        }
        throw ConfigError(context + ": '" + t + "' is missing a " +
                          unit_name(expected) + " unit suffix");
    }
    if (expected == Unit::none) {
        throw ConfigError(context + ": expected a dimensionless value, got '" + t +
                          "'");
    }
    for (const auto& entry : kUnits) {
        if (suffix == entry.suffix) {
            if (entry.unit != expected) {
                throw ConfigError(context + ": unit '" + suffix + "' is a " +
                                  unit_name(entry.unit) + ", expected " +
                                  unit_name(expected));
            }
            return value * entry.factor;
        }
    }
    throw ConfigError(context + ": unknown unit suffix '" + suffix + "'");
}

Scenario Scenario::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file: " + path);
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_text(ss.str(), path);
}

Scenario Scenario::parse_text(const std::string& text, const std::string& origin) {
    Scenario scn;
    scn.origin_ = origin;
    std::istringstream in(text);
    std::string line, section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t hash_pos = line.find('#');
        if (hash_pos != std::string::npos) {
            line = line.substr(0, hash_pos);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']' || line.size() < 3) {
                throw ConfigError(origin + ":" + std::to_string(line_no) +
                                  ": malformed section header");
            }
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(origin + ":" + std::to_string(line_no) +
                              ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty() || key.empty() || value.empty()) {
            throw ConfigError(origin + ":" + std::to_string(line_no) +
                              ": key-value outside a section or empty");
        }
        scn.sections_[section][key] = value;
    }
    return scn;
}

bool Scenario::has(const std::string& section, const std::string& key) const {
    const auto s = sections_.find(section);
    return s != sections_.end() && s->second.count(key) > 0;
}

const std::string& Scenario::raw(const std::string& section,
                                 const std::string& key) const {
    const auto s = sections_.find(section);
    if (s == sections_.end() || !s->second.count(key)) {
        throw ConfigError(origin_ + ": missing required key [" + section + "] " +
                          key);
    }
    return s->second.at(key);
}

double Scenario::quantity(const std::string& section, const std::string& key,
                          Unit expected) const {
    return parse_quantity(raw(section, key), expected,
                          origin_ + ": [" + section + "] " + key);
}

double Scenario::quantity_or(const std::string& section, const std::string& key,
                             Unit expected, double fallback) const {
    return has(section, key) ? quantity(section, key, expected) : fallback;
}

double Scenario::number(const std::string& section, const std::string& key) const {
    return quantity(section, key, Unit::none);
}

double Scenario::number_or(const std::string& section, const std::string& key,
                           double fallback) const {
    return has(section, key) ? number(section, key) : fallback;
}

long Scenario::integer(const std::string& section, const std::string& key) const {
    const double v = number(section, key);
    const long n = std::lround(v);
    if (double(n) != v) {
        throw ConfigError(origin_ + ": [" + section + "] " + key +
                          " must be an integer");
    }
    return n;
}

long Scenario::integer_or(const std::string& section, const std::string& key,
                          long fallback) const {
    return has(section, key) ? integer(section, key) : fallback;
}

bool Scenario::boolean_or(const std::string& section, const std::string& key,
                          bool fallback) const {
    if (!has(section, key)) {
        return fallback;
    }
    std::string v = raw(section, key);
    std::transform(v.begin(), v.end(), v.begin(),
                   [](unsigned char c) { return char(std::tolower(c)); });
    if (v == "true" || v == "on" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "off" || v == "no" || v == "0") return false;
    throw ConfigError(origin_ + ": [" + section + "] " + key +
                      " must be a boolean (true/false/on/off)");
}

std::string Scenario::text_or(const std::string& section, const std::string& key,
                              const std::string& fallback) const {
    return has(section, key) ? raw(section, key) : fallback;
}

std::vector<long> Scenario::integer_list(const std::string& section,
                                         const std::string& key) const {
    std::vector<long> out;
    std::string item;
    std::istringstream in(raw(section, key));
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (item.empty()) {
            continue;
        }
        out.push_back(std::stol(item));
    }
    if (out.empty()) {
        throw ConfigError(origin_ + ": [" + section + "] " + key +
                          " must list at least one integer");
    }
    return out;
}

void Scenario::set(const std::string& section, const std::string& key,
                   const std::string& value) {
    sections_[section][key] = value;
}

std::uint64_t Scenario::hash() const {
    std::string blob;
    for (const auto& [section, kv] : sections_) { // std::map: already sorted
        for (const auto& [key, value] : kv) {
            blob += section;
            blob += '.';
            blob += key;
            blob += '=';
            blob += value;
            blob += '\n';
        }
    }
    return fnv1a64(blob);
}

std::string Scenario::hash_hex() const {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(hash()));
    return buf;
}

} // namespace patsim
