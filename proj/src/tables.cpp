#include "patsim/tables.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace patsim {

std::string format_sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10e", v);
    return buf;
}

TableWriter::TableWriter(const std::string& path, const std::string& config_hash)
    : file_(std::fopen(path.c_str(), "w")), path_(path) {
    if (!file_) {
        throw std::runtime_error("cannot open output file: " + path);
    }
    std::fprintf(file_, "# config: %s\n", config_hash.c_str());
}

TableWriter::~TableWriter() {
    if (file_) {
        std::fclose(file_);
    }
}

void TableWriter::header(const std::string& key, const std::string& value) {
    std::fprintf(file_, "# %s: %s\n", key.c_str(), value.c_str());
}

void TableWriter::header(const std::string& key, double value) {
    std::fprintf(file_, "# %s: %s\n", key.c_str(), format_sci(value).c_str());
}

void TableWriter::columns(const std::vector<std::string>& names) {
    std::fprintf(file_, "# columns:");
    for (const auto& n : names) {
        std::fprintf(file_, " %s", n.c_str());
    }
    std::fprintf(file_, "\n");
}

void TableWriter::row(std::span<const double> values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        std::fprintf(file_, "%s%s", i ? "\t" : "", format_sci(values[i]).c_str());
    }
    std::fprintf(file_, "\n");
}

void TableWriter::line(const std::string& text) {
    std::fprintf(file_, "# %s\n", text.c_str());
}

void write_iv_curve(const std::string& path, const IvCurve& curve,
                    const std::string& config_hash) {
    TableWriter w(path, config_hash);
    w.header("kind", curve.kind == IvKind::direct ? "direct" : "kramers_kronig");
    w.header("gap_J", curve.gap);
    w.header("dynes_J", curve.dynes);
    w.header("r_tunnel_ohm", curve.r_tunnel);
    w.header("temperature_K", curve.temperature);
    w.columns({"voltage_V", "current_A"});
    for (std::size_t i = 0; i < curve.voltages.size(); ++i) {
        const double row[] = {curve.voltages[i], curve.currents[i]};
        w.row(row);
    }
}

void write_power_sweep(const std::string& path, const PowerSweepData& data,
                       const std::string& config_hash) {
    TableWriter w(path, config_hash);
    w.header("step", double(data.step_index));
    w.header("bias_V", data.bias);
    w.columns({"source_power_dBm", "current_A"});
    for (std::size_t i = 0; i < data.currents.size(); ++i) {
        const double row[] = {data.source_powers_dbm[i], data.currents[i]};
        w.row(row);
    }
}

PowerSweepData read_power_sweep(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open power-sweep file: " + path);
    }
    PowerSweepData data;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        if (line.front() == '#') {
            std::istringstream hs(line.substr(1));
            std::string key;
            hs >> key;
            if (key == "step:") {
                double v = 0;
                hs >> v;
                data.step_index = int(v);
            } else if (key == "bias_V:") {
                hs >> data.bias;
            }
            continue;
        }
        std::istringstream row(line);
        double p = 0, c = 0;
        if (row >> p >> c) {
            data.source_powers_dbm.push_back(p);
            data.currents.push_back(c);
        }
    }
    data.validate();
    return data;
}

} // namespace patsim
