#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace patsim {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Unit {
    energy,      // J
    voltage,     // V
    current,     // A
    frequency,   // Hz
    resistance,  // ohm
    capacitance, // F
    capacitance_per_length, // F/m
    inductance,  // H
    length,      // m
    temperature, // K
    power_dbm,   // kept as dBm
    decibel,     // kept as dB
    flux,        // photons/s
    time,        // s
    none,        // dimensionless
};

// Key-value scenario document: INI-style [section] headers, '#' comments,
// every physical quantity must carry a unit suffix ("203ueV", "75MHz",
// "1.75Mohm"); bare numbers are accepted only where a dimensionless value
// is expected. Getter misuse (wrong dimension) raises ConfigError.
class Scenario {
public:
    static Scenario parse_file(const std::string& path);
    static Scenario parse_text(const std::string& text, const std::string& origin);

    bool has(const std::string& section, const std::string& key) const;

    // SI-converted getters; *_or variants return the fallback when absent
    double quantity(const std::string& section, const std::string& key,
                    Unit expected) const;
    double quantity_or(const std::string& section, const std::string& key,
                       Unit expected, double fallback) const;
    double number(const std::string& section, const std::string& key) const;
    double number_or(const std::string& section, const std::string& key,
                     double fallback) const;
    long integer(const std::string& section, const std::string& key) const;
    long integer_or(const std::string& section, const std::string& key,
                    long fallback) const;
    bool boolean_or(const std::string& section, const std::string& key,
                    bool fallback) const;
    std::string text_or(const std::string& section, const std::string& key,
                        const std::string& fallback) const;
    std::vector<long> integer_list(const std::string& section,
                                   const std::string& key) const;

    void set(const std::string& section, const std::string& key,
             const std::string& value);

    // FNV-1a over the normalized (sorted) resolved content
    std::uint64_t hash() const;
    std::string hash_hex() const;

private:
    const std::string& raw(const std::string& section, const std::string& key) const;
    std::map<std::string, std::map<std::string, std::string>> sections_;
    std::string origin_;
};

// parses "<number><suffix>" returning the SI value; throws ConfigError on
// unknown suffix or dimension mismatch
double parse_quantity(const std::string& token, Unit expected,
                      const std::string& context);

} // namespace patsim
