#pragma once

#include <Eigen/Dense>

#include "patsim/fock.hpp"
#include "patsim/junction.hpp"
#include "patsim/numerics.hpp"

namespace patsim {

struct DriveParams {
    double eta = 0.0;      // s^-1, drive amplitude rate
    double detuning = 0.0; // rad/s, drive minus mode

    void validate() const;
};

// eta = sqrt(phi kappa_c); detuning is set separately by the caller
DriveParams drive_from_flux(double photon_flux, double kappa_c);

struct EnvParams {
    double kappa_env = 0.0;          // rad/s, kappa_c + kappa_i damping
    double thermal_occupation = 0.0; // mean bath occupancy (0 per default)

    void validate() const;
};

struct SystemConfig {
    TunnelJunction junction;
    PchipInterpolant iv;    // direct I(V) of the junction (renormalized R_T)
    PchipInterpolant iv_kk; // Kramers-Kronig companion; required if Lamb shift on
    JumpFamily jumps;
    double bias = 0.0;           // V
    double mode_frequency = 0.0; // Hz
    DriveParams drive;
    EnvParams env;
    bool include_lamb_shift = true;
    double lamb_shift_sign = 1.0; // -1 flips H_LS for sensitivity checks
    int n_max_ceiling = 48;      // truncation-guard escalation limit

    double photon_voltage() const; // hbar * 2pi * mode_frequency / e
    void validate() const;
};

// H = i eta (a - a^dag) - delta a^dag a + H_LS on the truncated space, in
// angular units (s^-1). H_LS = -(1/2e) sum_l I_KK(V + l hbar w/e) A_l A_l^dag.
Eigen::MatrixXcd build_hamiltonian(const SystemConfig& cfg);

// Generator of d rho/dt in column-stacked form, divided by rate_scale so the
// entries are O(1); the scale is the largest ingredient rate.
struct Liouvillian {
    Eigen::MatrixXcd matrix; // (d^2 x d^2), scaled
    double rate_scale = 1.0; // s^-1
    int dim = 0;             // Fock dimension d
};

Liouvillian build_liouvillian(const SystemConfig& cfg);

struct StationarySolve {
    Eigen::MatrixXcd rho;
    double residual = 0.0; // ||L rho||_2 in the scaled units
};

// L(rho) = 0 with unit trace, solved as the square bordered system
// [L, t; t^T, 0][x; mu] = [0; 1] (the d^2+1-row constrained form).
StationarySolve solve_stationary(const Liouvillian& liou);

struct SteadyStateResult {
    Eigen::MatrixXcd rho;
    double n_ph = 0.0;
    double i_pat = 0.0; // A
    int n_max_used = 0;
    double top_population = 0.0;    // highest kept Fock level
    double second_population = 0.0; // one below it
    double residual = 0.0;          // scaled units
};

// Steady state with the truncation guard: populations of the top two Fock
// levels must stay below 1e-6, otherwise the solve reruns at n_max + 4 up to
// cfg.n_max_ceiling.
SteadyStateResult steady_state(const SystemConfig& cfg);

// I_PAT = sum_{l != 0} I(V - l hbar w/e) Tr[A_l^dag A_l rho] with the signed
// interpolated current.
double pat_current(const SteadyStateResult& result, const SystemConfig& cfg);

// Adaptive integration of the master equation to time t (seconds); the
// independent check on steady_state.
Eigen::MatrixXcd time_evolve(const SystemConfig& cfg, const Eigen::MatrixXcd& rho0,
                             double t);

// population heuristic for priming the truncation before a solve
int suggest_n_max(double photon_flux, double kappa_c, double kappa_env);

} // namespace patsim
