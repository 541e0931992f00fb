#pragma once

#include <complex>
#include <utility>

#include "patsim/numerics.hpp"

namespace patsim {

// All rates are angular (s^-1). kappa_total follows the reflection-side
// convention kappa_j + kappa_i; the master-equation damping kappa_c + kappa_i
// is always named kappa_env elsewhere, never a bare kappa.
struct RateSet {
    double kappa_c = 0.0;
    double kappa_i = 0.0;
    double kappa_j = 0.0;

    double kappa_total() const { return kappa_j + kappa_i; }
    void validate() const;
};

struct DetectorFigures {
    double quantum_efficiency = 0.0; // chi in [0, 1]
    double dark_current = 0.0;       // A
    double nep = 0.0;                // W/sqrt(Hz)
    double compression_1db_dbm = 0.0;
    double compression_3db_dbm = 0.0;
};

// kappa_j = lambda^2 exp(-lambda^2) I(V + hbar w / e) / e, the one-photon
// absorption loss rate in the linear regime.
double kappa_j_linear(double lambda, const PchipInterpolant& iv, double bias,
                      double frequency_hz);

// S11 = 1 - kappa_c / ((kappa_total + kappa_c)/2 + i delta)
std::complex<double> s11(const RateSet& rates, double detuning);

// (absorption 1 - |S11|^2 at resonance, efficiency 4 kj kc / (kc + ktot)^2)
std::pair<double, double> absorption_and_efficiency(const RateSet& rates);

// n_ph = 4 phi kappa_c / (kappa_c + kappa_total)^2, linear regime
double resonator_population(double photon_flux, const RateSet& rates);

// n_ph(T) = (kc + ki)/(kc + ki + kj) * n_BE(T)
double thermal_population(double temperature, double frequency_hz,
                          const RateSet& rates);

// closed-form multiphoton step currents, low-power expansion, N in 1..4;
// kappa_env is the kappa_c + kappa_i damping and i_edge = I(2Delta/e + hw/2e)
double step_current_analytic(int n, double eta, double kappa_env, double lambda,
                             double i_edge);

// per-step junction rate e^{-lambda^2} lambda^(2n)/n! * i_edge/e
double step_loss_rate(int n, double lambda, double i_edge);

// junction shot-noise power emitted in bandwidth bw around resonance in the
// ohmic high-bias regime
double shot_noise_power(double current, const RateSet& rates, double lambda,
                        double r_normal, double frequency_hz, double bandwidth_hz);

// I_D = e kappa_j n_residual
double dark_current(double n_residual, double kappa_j);

// NEP = hbar w * delta_I / (e chi)
double nep(double current_noise, double quantum_efficiency, double frequency_hz);

// measurement bandwidth above which this detector beats an ideal power
// detector behind a quantum-limited amplifier: (delta_I / (chi e))^2
double jpa_crossover_bandwidth(double current_noise, double quantum_efficiency);

} // namespace patsim
