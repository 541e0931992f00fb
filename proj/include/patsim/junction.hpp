#pragma once

#include <stdexcept>
#include <vector>

#include "patsim/exec.hpp"
#include "patsim/numerics.hpp"

namespace patsim {

// BCS density of states with Dynes broadening. Energies in joules.
struct DynesDos {
    double gap;   // Delta > 0
    double dynes; // Gamma > 0 (strictly, for convergence of the current integral)

    void validate() const;
};

// n(E) = |Re[(E + i*Gamma) / sqrt((E + i*Gamma)^2 - Delta^2)]|; the branch is
// fixed by requiring n >= 0 and n -> 1 as |E| -> infinity.
double dos_value(const DynesDos& dos, double energy);

struct TunnelJunction {
    DynesDos dos_left;
    DynesDos dos_right;
    double r_tunnel;    // ohm
    double temperature; // K, >= 0 (0 selects the sharp Fermi window)

    void validate() const;
};

struct QuadratureError : std::runtime_error {
    QuadratureError(const std::string& msg, double achieved)
        : std::runtime_error(msg), achieved_tolerance(achieved) {}
    double achieved_tolerance;
};

// Quasiparticle current through the junction at the given bias,
// (1/eR_T) Int n_L(E) n_R(E+eV) (f(E) - f(E+eV)) dE, odd in V by
// construction. Absolute tolerance is 1e-4 * |V|/R_T (the ohmic scale);
// failure to reach it throws QuadratureError with the achieved value.
double qp_current(const TunnelJunction& junction, double bias);

enum class IvKind { direct, kramers_kronig };

struct IvCurve {
    IvKind kind = IvKind::direct;
    std::vector<double> voltages; // strictly increasing, V
    std::vector<double> currents; // A
    // electrode metadata carried into the serialization header
    double gap = 0.0;         // J
    double dynes = 0.0;       // J
    double r_tunnel = 0.0;    // ohm
    double temperature = 0.0; // K

    PchipInterpolant interpolant() const;
};

struct IvGrid {
    double v_max = 2.0e-3; // tabulation reaches [-v_max, v_max]
    double step = 0.5e-6;
};

// Tabulates qp_current on a symmetric uniform grid; the negative half is the
// odd mirror of the computed positive half, so the curve is odd exactly.
IvCurve tabulate_iv(const TunnelJunction& junction, const IvGrid& grid = {},
                    Exec exec = Exec::parallel);

// Principal-value Hilbert companion of a direct curve, on the same grid.
// The affine background fitted on the outer 10% of the span (the ohmic
// asymptote I ~ V/R_T) is removed first and maps to zero; beyond the span
// the deviation from that background is taken as zero. Requires the span to
// cover >= 5x the gap-voltage scale (Delta_L + Delta_R)/2e.
IvCurve kk_transform(const IvCurve& curve, Exec exec = Exec::parallel);

// R_T = r_measured * exp(sum lambda_n^2): dynamical-Coulomb-blockade
// renormalization by higher modes frozen in their ground state.
double renormalized_resistance(double r_measured,
                               std::span<const double> higher_mode_couplings);

} // namespace patsim
