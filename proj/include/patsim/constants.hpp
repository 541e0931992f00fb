#pragma once

// Physical constants (2018 CODATA, SI). All module internals work in SI:
// joules, volts, amperes, ohms, kelvin, and angular rates in s^-1.

namespace patsim::consts {

inline constexpr double elementary_charge = 1.602176634e-19; // C
inline constexpr double planck = 6.62607015e-34;             // J s
inline constexpr double hbar = 1.054571817e-34;              // J s
inline constexpr double boltzmann = 1.380649e-23;            // J/K
inline constexpr double electronvolt = 1.602176634e-19;      // J

// resistance quantum h/e^2
inline constexpr double klitzing =
    planck / (elementary_charge * elementary_charge); // ohm

inline constexpr double pi = 3.141592653589793238462643383279502884;
inline constexpr double two_pi = 2.0 * pi;

} // namespace patsim::consts
