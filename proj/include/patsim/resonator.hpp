#pragma once

#include <utility>
#include <vector>

namespace patsim {

struct FilmProperties {
    double sheet_resistance; // ohm/sq, just above T_c
    double gap_gral;         // J

    void validate() const;
};

// low-temperature Mattis-Bardeen limit: L_sq = hbar R_sq / (pi Delta)
double sheet_inductance(const FilmProperties& film);

// Uniform lossless line, junction capacitance at the far port, resistive
// load at the waveguide port.
struct LineModel {
    double length;                  // m
    double width;                   // m
    double sheet_inductance;        // H/sq
    double capacitance_per_length;  // F/m
    double termination_capacitance; // F (C_j)
    double load_resistance;         // ohm (waveguide side)

    double inductance_per_length() const { return sheet_inductance / width; }
    double characteristic_impedance() const; // sqrt(L'/C')
    double phase_velocity() const;           // 1/sqrt(L'C')

    void validate() const;
};

struct ModeData {
    int index = 0;                       // 1-based
    double frequency_hz = 0.0;           // omega_n / 2pi
    double characteristic_impedance = 0; // Z_c, ohm
    double coupling = 0.0;               // lambda_n = sqrt(pi Z_c / R_K)
    double coupling_rate_hz = 0.0;       // kappa_c / 2pi
};

// Lowest n_modes resonances of the line with the waveguide port treated as a
// short (R_load << line impedance); each mode carries Z_c, lambda and
// kappa_c from the companion operations.
std::vector<ModeData> find_modes(const LineModel& line, int n_modes);

// Foster equivalent capacitance from the susceptance slope of everything
// except the termination capacitor: C_n = dB/domega / 2 + C_j,
// Z_c = 1/(omega C_n). A lumped parallel LC (slope 2C, no termination)
// recovers sqrt(L/C) exactly.
double foster_mode_impedance(double susceptance_slope,
                             double termination_capacitance, double omega);

// (Z_c, lambda) at a resonance previously returned by find_modes.
std::pair<double, double> mode_impedance_and_lambda(const LineModel& line,
                                                    double frequency_hz);

// External coupling rate kappa_c/2pi from the complex resonance of the
// loaded line, kappa_c = -2 Im(omega).
double coupling_rate(const LineModel& line, const ModeData& mode);

// Tunnel resistance satisfying kappa_j = kappa_c at the gap edge:
// 2 Delta lambda^2 exp(-lambda^2) / (e^2 kappa_c)
double matching_resistance(const ModeData& mode, double gap);

// Adjusts the termination capacitance so modes 1-2 land on the given
// frequencies (least squares over both); returns the fitted value.
double refit_termination_capacitance(const LineModel& line, double f1_target_hz,
                                     double f2_target_hz);

} // namespace patsim
