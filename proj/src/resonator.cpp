#include "patsim/resonator.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <stdexcept>

#include "patsim/constants.hpp"
#include "patsim/numerics.hpp"

namespace patsim {

namespace {
constexpr double kE = consts::elementary_charge;
using complexd = std::complex<double>;
} // namespace

void FilmProperties::validate() const {
    if (!(sheet_resistance > 0.0) || !(gap_gral > 0.0)) {
        throw std::invalid_argument("FilmProperties: fields must be > 0");
    }
}

double sheet_inductance(const FilmProperties& film) {
    film.validate();
    return consts::hbar * film.sheet_resistance / (consts::pi * film.gap_gral);
}

double LineModel::characteristic_impedance() const {
    return std::sqrt(inductance_per_length() / capacitance_per_length);
}

double LineModel::phase_velocity() const {
    return 1.0 / std::sqrt(inductance_per_length() * capacitance_per_length);
}

void LineModel::validate() const {
    if (!(length > 0.0) || !(width > 0.0) || !(sheet_inductance > 0.0) ||
        !(capacitance_per_length > 0.0) || !(termination_capacitance > 0.0) ||
        !(load_resistance > 0.0)) {
        throw std::invalid_argument("LineModel: all fields must be > 0");
    }
    if (length / width < 10.0) {
        throw std::invalid_argument(
            "LineModel: length/width too small for a distributed line");
    }
}

namespace {

// total susceptance at the junction port, waveguide port shorted:
// B(omega) = omega C_j - cot(omega l / v) / Z0
double port_susceptance(const LineModel& line, double omega) {
    const double beta_l = omega * line.length / line.phase_velocity();
    return omega * line.termination_capacitance -
           1.0 / (std::tan(beta_l) * line.characteristic_impedance());
}

double line_susceptance_slope(const LineModel& line, double omega) {
    const double lv = line.length / line.phase_velocity();
    const double s = std::sin(omega * lv);
    return lv / (s * s * line.characteristic_impedance());
}

} // namespace

std::vector<ModeData> find_modes(const LineModel& line, int n_modes) {
    line.validate();
    if (n_modes < 1) {
        throw std::invalid_argument("find_modes: n_modes must be >= 1");
    }

    // coarse sweep at a resolution of the quarter-wave estimate / 200;
    // B rises through zero at a resonance and jumps down across line poles
    const double omega_quarter =
        consts::two_pi * line.phase_velocity() / (4.0 * line.length);
    const double step = omega_quarter / 200.0;

    std::vector<ModeData> modes;
    double prev_omega = step;
    double prev_b = port_susceptance(line, prev_omega);
    const double omega_limit = omega_quarter * (4.0 * n_modes + 8.0);
    for (double omega = 2.0 * step; omega < omega_limit; omega += step) {
        const double b = port_susceptance(line, omega);
        if (prev_b < 0.0 && b >= 0.0) {
            double root;
            try {
                root = find_root([&](double w) { return port_susceptance(line, w); },
                                 prev_omega, omega);
            } catch (const std::exception& e) {
                char msg[192];
                std::snprintf(msg, sizeof msg,
                              "find_modes: root search failed in bracket "
                              "[%.6e, %.6e] rad/s (B: %.3e -> %.3e): %s",
                              prev_omega, omega, prev_b, b, e.what());
                throw std::runtime_error(msg);
            }
            ModeData m;
            m.index = int(modes.size()) + 1;
            m.frequency_hz = root / consts::two_pi;
            modes.push_back(m);
            if (int(modes.size()) == n_modes) {
                break;
            }
        }
        prev_omega = omega;
        prev_b = b;
    }
    if (int(modes.size()) < n_modes) {
        throw std::runtime_error("find_modes: sweep exhausted before finding all modes");
    }
    for (auto& m : modes) {
        auto [zc, lam] = mode_impedance_and_lambda(line, m.frequency_hz);
        m.characteristic_impedance = zc;
        m.coupling = lam;
        m.coupling_rate_hz = coupling_rate(line, m);
    }
    return modes;
}

double foster_mode_impedance(double susceptance_slope,
                             double termination_capacitance, double omega) {
    const double c_mode = 0.5 * susceptance_slope + termination_capacitance;
    return 1.0 / (omega * c_mode);
}

std::pair<double, double> mode_impedance_and_lambda(const LineModel& line,
                                                    double frequency_hz) {
    line.validate();
    const double omega = consts::two_pi * frequency_hz;
    // confirm this is a resonance of the shorted-port line
    const double b0 = port_susceptance(line, omega);
    const double scale = omega * line.termination_capacitance +
                         1.0 / (omega * line.inductance_per_length() * line.length);
    if (std::abs(b0) > 1e-6 * scale) {
        throw std::invalid_argument(
            "mode_impedance_and_lambda: frequency is not a resonance");
    }
    const double zc = foster_mode_impedance(line_susceptance_slope(line, omega),
                                            line.termination_capacitance, omega);
    const double lam = std::sqrt(consts::pi * zc / consts::klitzing);
    return {zc, lam};
}

namespace {

// admittance at the junction port with the resistive load included;
// analytic in omega, so the resonance continues into the complex plane
complexd loaded_port_admittance(const LineModel& line, complexd omega) {
    const double z0 = line.characteristic_impedance();
    const double rl = line.load_resistance;
    const complexd beta_l = omega * line.length / line.phase_velocity();
    const complexd t = std::tan(beta_l);
    const complexd i(0.0, 1.0);
    const complexd z_in = z0 * (rl + i * z0 * t) / (z0 + i * rl * t);
    return i * omega * line.termination_capacitance + 1.0 / z_in;
}

} // namespace

double coupling_rate(const LineModel& line, const ModeData& mode) {
    line.validate();
    if (line.load_resistance >= line.characteristic_impedance()) {
        throw std::invalid_argument(
            "coupling_rate: load resistance >= line impedance, "
            "perturbative coupling regime violated");
    }
    complexd omega(consts::two_pi * mode.frequency_hz, 0.0);
    const double h = 1e-7 * std::real(omega);
    for (int it = 0; it < 60; ++it) {
        const complexd f = loaded_port_admittance(line, omega);
        const complexd fp = (loaded_port_admittance(line, omega + h) -
                             loaded_port_admittance(line, omega - h)) /
                            (2.0 * h);
        const complexd delta = f / fp;
        omega -= delta;
        if (std::abs(delta) < 1e-12 * std::abs(omega)) {
            break;
        }
        if (it == 59) {
            throw std::runtime_error("coupling_rate: complex Newton did not converge");
        }
    }
    // two-port written with exp(+j omega t) phasors, so a decaying mode has
    // Im(omega) > 0; this is kappa_c = -2 Im(omega) of the exp(-i omega t)
    // convention
    const double kappa_c = 2.0 * std::imag(omega);
    if (!(kappa_c > 0.0)) {
        throw std::runtime_error("coupling_rate: found a non-decaying resonance");
    }
    return kappa_c / consts::two_pi;
}

double matching_resistance(const ModeData& mode, double gap) {
    if (!(gap > 0.0)) {
        throw std::invalid_argument("matching_resistance: gap must be > 0");
    }
    const double lam2 = mode.coupling * mode.coupling;
    const double kappa_c = consts::two_pi * mode.coupling_rate_hz;
    return 2.0 * gap * lam2 * std::exp(-lam2) / (kE * kE * kappa_c);
}

double refit_termination_capacitance(const LineModel& line, double f1_target_hz,
                                     double f2_target_hz) {
    line.validate();
    if (!(f1_target_hz > 0.0) || !(f2_target_hz > f1_target_hz)) {
        throw std::invalid_argument("refit_termination_capacitance: bad targets");
    }
    auto misfit = [&](double log_c) {
        LineModel trial = line;
        trial.termination_capacitance = std::exp(log_c);
        const auto modes = find_modes(trial, 2);
        const double r1 = modes[0].frequency_hz / f1_target_hz - 1.0;
        const double r2 = modes[1].frequency_hz / f2_target_hz - 1.0;
        return r1 * r1 + r2 * r2;
    };
    const auto [log_c, res] =
        minimize_scalar(misfit, std::log(0.05e-15), std::log(50e-15), 26);
    (void)res;
    return std::exp(log_c);
}

} // namespace patsim
