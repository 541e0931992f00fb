#pragma once

#include <span>
#include <string>
#include <vector>

#include "patsim/calibration.hpp"
#include "patsim/junction.hpp"

namespace patsim {

// Delimited-text table with '#' header lines. Numbers are written with a
// fixed %.10e format so reruns are byte-identical.
class TableWriter {
public:
    TableWriter(const std::string& path, const std::string& config_hash);
    ~TableWriter();
    TableWriter(const TableWriter&) = delete;
    TableWriter& operator=(const TableWriter&) = delete;

    void header(const std::string& key, const std::string& value);
    void header(const std::string& key, double value);
    void columns(const std::vector<std::string>& names);
    void row(std::span<const double> values);
    void line(const std::string& text); // raw header-style line

private:
    std::FILE* file_;
    std::string path_;
};

std::string format_sci(double v);

// (volts, amperes) with a header naming kind, gap, dynes, R_T, T
void write_iv_curve(const std::string& path, const IvCurve& curve,
                    const std::string& config_hash);

// (power_dBm, current_A) with a header naming the step and bias
void write_power_sweep(const std::string& path, const PowerSweepData& data,
                       const std::string& config_hash);
PowerSweepData read_power_sweep(const std::string& path);

} // namespace patsim
