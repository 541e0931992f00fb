#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "patsim/exec.hpp"
#include "patsim/lindblad.hpp"

namespace patsim {

// Frozen device description for the fitting pipeline. The IV curve is
// tabulated once at the reference tunnel resistance stored in `junction`;
// varying r_tunnel only rescales it (the current is 1/R_T times a
// resistance-independent integral).
struct DetectorModel {
    TunnelJunction junction; // r_tunnel here is the tabulation reference
    PchipInterpolant iv;
    PchipInterpolant iv_kk;
    double mode_frequency = 0.0; // Hz
    double kappa_c = 0.0;        // rad/s
    double kappa_i = 0.0;        // rad/s
    double lambda = 0.0;
    double r_tunnel = 0.0; // active value used by the dynamics
    bool include_lamb_shift = false;
    int n_max_ceiling = 48;

    double gap() const { return junction.dos_left.gap; }
    double kappa_env() const { return kappa_c + kappa_i; }
    double photon_voltage() const;
    double step_bias(int step) const; // (2 Delta - (N - 1/2) hbar w) / e
    SystemConfig system_for(int step, double photon_flux) const;
};

DetectorModel build_detector_model(const TunnelJunction& junction,
                                   double mode_frequency_hz, double kappa_c,
                                   double kappa_i, double lambda,
                                   const IvGrid& grid = {},
                                   Exec exec = Exec::parallel);

// photons/s at the resonator input for a source power and line attenuation:
// phi = 1e-3 * 10^((P_dBm - A_dB)/10) / (hbar * 2pi * f)
double flux_from_dbm(double power_dbm, double attenuation_db, double frequency_hz);

struct PowerSweepData {
    int step_index = 0;                    // N in 1..4
    std::vector<double> source_powers_dbm; // strictly increasing
    std::vector<double> currents;          // A, >= 0
    double bias = 0.0;                     // V

    void validate() const;
};

// Forward model: driven PAT current (drive-on minus drive-off frame, the
// quantity the measurement records) at each source power.
PowerSweepData simulate_power_sweep(const DetectorModel& model, int step,
                                    const std::vector<double>& source_powers_dbm,
                                    double attenuation_db,
                                    Exec exec = Exec::parallel);

struct NoiseModel {
    double floor = 50e-15; // A, additive
    double fraction = 0.01; // multiplicative
};

PowerSweepData synthesize_power_sweep(const DetectorModel& model, int step,
                                      const std::vector<double>& source_powers_dbm,
                                      double attenuation_db, const NoiseModel& noise,
                                      GaussianSampler& rng,
                                      Exec exec = Exec::parallel);

struct FitConfig {
    double a_lo = 95.0;  // dB search bounds
    double a_hi = 120.0;
    int brent_bits = 14;
    NoiseModel sigma;            // per-point sigma = floor + fraction*|I|
    bool release_shape = false;  // also fit lambda and r_tunnel
    double lambda_lo = 0.4, lambda_hi = 1.2;
    double rt_lo = 0.8e6, rt_hi = 3.5e6;
    int max_cycles = 8;
};

struct FitResult {
    double attenuation_db = 0.0;
    double quantum_efficiency = 0.0; // chi, linear-regime slope at the fit
    double chi2_reduced = 0.0;
    std::map<std::string, double> free_params; // lambda, r_tunnel when released
    // chi2_r <= 2*min region of the (lambda, R_T) surface, when computed
    std::vector<std::pair<double, double>> uncertainty_contour;
    double chi_spread = 0.0; // std of chi over that region
};

double chi2_of_attenuation(const DetectorModel& model,
                           const std::vector<PowerSweepData>& data,
                           const FitConfig& cfg, double attenuation_db,
                           Exec exec = Exec::parallel);

FitResult fit_attenuation(const DetectorModel& model,
                          const std::vector<PowerSweepData>& data,
                          const FitConfig& cfg, Exec exec = Exec::parallel);

struct Chi2Cell {
    double lambda = 0.0;
    double r_tunnel = 0.0;
    double attenuation_db = 0.0;
    double chi2_reduced = 0.0;
    double efficiency = 0.0; // linear-regime chi of this cell at its best A
    bool valid = false;
};

struct Chi2Surface {
    std::vector<double> lambda_grid;
    std::vector<double> rt_grid;
    std::vector<Chi2Cell> cells; // row-major over (lambda, rt)
    double min_chi2_reduced = 0.0;

    const Chi2Cell& at(std::size_t i_lambda, std::size_t i_rt) const;
    std::vector<const Chi2Cell*> region() const; // chi2_r <= 2 * min
    double efficiency_spread() const;            // std of cell chi over region
    double attenuation_spread() const;           // std of fitted A, dB
    // the A spread maps onto the efficiency through the flux calibration:
    // delta_chi = chi * ln(10)/10 * sigma_A
    double chi_uncertainty(double chi_best) const;
    // convex hull of the region points, as a closed polygon
    std::vector<std::pair<double, double>> contour() const;
};

Chi2Surface chi2_surface(const DetectorModel& model,
                         const std::vector<PowerSweepData>& data,
                         const std::vector<double>& lambda_grid,
                         const std::vector<double>& rt_grid, const FitConfig& cfg,
                         Exec exec = Exec::parallel);

// linear-regime conversion efficiency of the model (solver probe at tiny flux)
double linear_efficiency_probe(const DetectorModel& model);

// same quantity from the closed-form rates; the two agree in the linear regime
double linear_efficiency_formula(const DetectorModel& model);

} // namespace patsim
