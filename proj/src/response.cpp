#include "patsim/response.hpp"

#include <cmath>
#include <stdexcept>

#include "patsim/constants.hpp"

namespace patsim {

namespace {
constexpr double kE = consts::elementary_charge;
} // namespace

void RateSet::validate() const {
    if (kappa_c < 0.0 || kappa_i < 0.0 || kappa_j < 0.0) {
        throw std::invalid_argument("RateSet: rates must be >= 0");
    }
}

double kappa_j_linear(double lambda, const PchipInterpolant& iv, double bias,
                      double frequency_hz) {
    const double vph = consts::hbar * consts::two_pi * frequency_hz / kE;
    const double lam2 = lambda * lambda;
    return lam2 * std::exp(-lam2) * iv(bias + vph) / kE;
}

std::complex<double> s11(const RateSet& rates, double detuning) {
    rates.validate();
    const std::complex<double> den(0.5 * (rates.kappa_total() + rates.kappa_c),
                                   detuning);
    return 1.0 - rates.kappa_c / den;
}

std::pair<double, double> absorption_and_efficiency(const RateSet& rates) {
    rates.validate();
    const double kt = rates.kappa_total();
    const double sum = kt + rates.kappa_c;
    const double diff = kt - rates.kappa_c;
    const double absorption = 1.0 - (diff * diff) / (sum * sum);
    const double efficiency = 4.0 * rates.kappa_j * rates.kappa_c / (sum * sum);
    return {absorption, efficiency};
}

double resonator_population(double photon_flux, const RateSet& rates) {
    rates.validate();
    if (photon_flux < 0.0) {
        throw std::invalid_argument("resonator_population: flux must be >= 0");
    }
    const double sum = rates.kappa_c + rates.kappa_total();
    return 4.0 * photon_flux * rates.kappa_c / (sum * sum);
}

double thermal_population(double temperature, double frequency_hz,
                          const RateSet& rates) {
    rates.validate();
    if (temperature < 0.0) {
        throw std::invalid_argument("thermal_population: temperature must be >= 0");
    }
    if (temperature == 0.0) {
        return 0.0;
    }
    const double x = consts::hbar * consts::two_pi * frequency_hz /
                     (consts::boltzmann * temperature);
    const double n_be = 1.0 / std::expm1(x);
    const double cold = rates.kappa_c + rates.kappa_i;
    return cold / (cold + rates.kappa_j) * n_be;
}

double step_loss_rate(int n, double lambda, double i_edge) {
    if (n < 1) {
        throw std::invalid_argument("step_loss_rate: n must be >= 1");
    }
    double factorial = 1.0;
    for (int k = 2; k <= n; ++k) {
        factorial *= k;
    }
    const double lam2 = lambda * lambda;
    return std::exp(-lam2) * std::pow(lam2, n) / factorial * i_edge / kE;
}

double step_current_analytic(int n, double eta, double kappa_env, double lambda,
                             double i_edge) {
    if (n < 1 || n > 4) {
        throw std::invalid_argument("step_current_analytic: N must be in 1..4");
    }
    const double k = kappa_env;
    const double kj = step_loss_rate(n, lambda, i_edge);
    const double e2 = eta * eta;
    switch (n) {
    case 1:
        return 4.0 * e2 * kj * kE / ((k + kj) * (k + kj));
    case 2:
        return 32.0 * e2 * e2 * kj * kE / (k * k * (2.0 * k + kj) * (2.0 * k + kj));
    case 3:
        return 96.0 * e2 * e2 * e2 * kj * kE /
               (k * k * k * k * (3.0 * k + kj) * (3.0 * k + kj));
    default:
        return 512.0 * e2 * e2 * e2 * e2 * kj * kE /
               (3.0 * std::pow(k, 6) * (4.0 * k + kj) * (4.0 * k + kj));
    }
}

double shot_noise_power(double current, const RateSet& rates, double lambda,
                        double r_normal, double frequency_hz, double bandwidth_hz) {
    rates.validate();
    if (!(r_normal > 0.0)) {
        throw std::invalid_argument("shot_noise_power: r_normal must be > 0");
    }
    const double omega = consts::two_pi * frequency_hz;
    const double lam2 = lambda * lambda;
    const double kappa = rates.kappa_c + rates.kappa_i;
    const double den = kappa + omega * lam2 * r_normal / (consts::pi * consts::klitzing);
    return 4.0 * lam2 * rates.kappa_c * consts::hbar * omega * current /
           (kE * den * den) * bandwidth_hz;
}

double dark_current(double n_residual, double kappa_j) {
    if (n_residual < 0.0) {
        throw std::invalid_argument("dark_current: occupation must be >= 0");
    }
    return kE * kappa_j * n_residual;
}

double nep(double current_noise, double quantum_efficiency, double frequency_hz) {
    if (!(quantum_efficiency > 0.0) || quantum_efficiency > 1.0) {
        throw std::invalid_argument("nep: efficiency must be in (0, 1]");
    }
    return consts::hbar * consts::two_pi * frequency_hz * current_noise /
           (kE * quantum_efficiency);
}

double jpa_crossover_bandwidth(double current_noise, double quantum_efficiency) {
    if (!(quantum_efficiency > 0.0)) {
        throw std::invalid_argument("jpa_crossover_bandwidth: efficiency must be > 0");
    }
    const double ratio = current_noise / (quantum_efficiency * kE);
    return ratio * ratio;
}

} // namespace patsim
