#include <doctest.h>

#include <cmath>

#include "patsim/constants.hpp"
#include "patsim/resonator.hpp"
#include "test_helpers.hpp"

using namespace patsim;
using namespace patsim::testing;
namespace C = patsim::consts;

namespace {

LineModel device_line() {
    return LineModel{180e-6, 720e-9, 620e-12, 41.7e-12, 2.6e-15, 50.0};
}

// SI Table values: frequency (GHz), Z_c (ohm), lambda per mode
constexpr double kTableFreq[7] = {5.52, 17.77, 31.39, 45.59, 60.04, 74.59, 89.21};
constexpr double kTableZc[7] = {5090, 770, 200, 70, 30, 20, 10};

} // namespace

TEST_CASE("sheet inductance from film properties") {
    const FilmProperties film{970.0, 330 * kUeV};
    const double l_sq = sheet_inductance(film);
    CHECK(l_sq == doctest::Approx(620e-12).epsilon(0.01));
    CHECK(sheet_inductance({2 * 970.0, 330 * kUeV}) ==
          doctest::Approx(2.0 * l_sq).epsilon(1e-12));
    CHECK(sheet_inductance({970.0, 1e9 * kUeV}) < 1e-15);
    CHECK_THROWS_AS(sheet_inductance({0.0, 330 * kUeV}), std::invalid_argument);
}

TEST_CASE("mode frequencies against the device table") {
    const auto modes = find_modes(device_line(), 7);
    REQUIRE(modes.size() == 7);
    for (int i = 0; i < 7; ++i) {
        CHECK(modes[i].index == i + 1);
        const double tol = i < 2 ? 0.02 : 0.05;
        CHECK(std::abs(modes[i].frequency_hz / (kTableFreq[i] * 1e9) - 1.0) < tol);
        if (i > 0) {
            CHECK(modes[i].frequency_hz > modes[i - 1].frequency_hz);
        }
    }
}

TEST_CASE("quarter-wave limit and capacitive loading") {
    LineModel line = device_line();
    line.termination_capacitance = 1e-22;
    const double f1 = find_modes(line, 1)[0].frequency_hz;
    const double quarter = line.phase_velocity() / (4.0 * line.length);
    CHECK(f1 == doctest::Approx(quarter).epsilon(1e-3));

    // loading by C_j pulls every mode down, monotonically in C_j
    double prev_f1 = f1;
    for (double cj = 0.5e-15; cj < 9e-15; cj *= 2.0) {
        LineModel loaded = device_line();
        loaded.termination_capacitance = cj;
        const double f = find_modes(loaded, 1)[0].frequency_hz;
        CHECK(f < prev_f1);
        prev_f1 = f;
    }

    CHECK_THROWS_AS(find_modes(device_line(), 0), std::invalid_argument);
    LineModel bad = device_line();
    bad.width = 0.0;
    CHECK_THROWS_AS(find_modes(bad, 1), std::invalid_argument);
}

TEST_CASE("mode impedance and coupling constant") {
    const auto modes = find_modes(device_line(), 7);
    CHECK(std::abs(modes[0].characteristic_impedance / kTableZc[0] - 1.0) < 0.25);
    CHECK(std::abs(modes[0].coupling / 0.79 - 1.0) < 0.15);
    // impedance ratio trend, modes 2-4 vs mode 1
    for (int i = 1; i < 4; ++i) {
        const double model_ratio =
            modes[i].characteristic_impedance / modes[0].characteristic_impedance;
        const double table_ratio = kTableZc[i] / kTableZc[0];
        CHECK(std::abs(model_ratio / table_ratio - 1.0) < 0.30);
    }
    // lambda = sqrt(pi Zc / R_K) by definition
    for (const auto& m : modes) {
        CHECK(m.coupling ==
              doctest::Approx(std::sqrt(C::pi * m.characteristic_impedance /
                                        C::klitzing))
                  .epsilon(1e-12));
    }
    // renormalization consistency: exp(sum lambda_n^2, n >= 2) vs 1.75/1.53
    double sum = 0.0;
    for (int i = 1; i < 7; ++i) {
        sum += modes[i].coupling * modes[i].coupling;
    }
    CHECK(std::exp(sum) == doctest::Approx(1.75 / 1.53).epsilon(0.15));

    CHECK_THROWS_AS(mode_impedance_and_lambda(device_line(), 6.0e9),
                    std::invalid_argument);
}

TEST_CASE("foster slope formula is exact for a lumped parallel LC") {
    const double l = 5e-9, c = 100e-15;
    const double omega = 1.0 / std::sqrt(l * c);
    const double slope = c + 1.0 / (omega * omega * l); // dB/domega = 2C
    CHECK(foster_mode_impedance(slope, 0.0, omega) ==
          doctest::Approx(std::sqrt(l / c)).epsilon(1e-12));
}

TEST_CASE("coupling rate to the waveguide") {
    const LineModel line = device_line();
    const auto modes = find_modes(line, 1);
    const double kc_hz = modes[0].coupling_rate_hz;
    CHECK(std::abs(kc_hz / 78e6 - 1.0) < 0.10);

    // quarter-wave external-Q estimate agrees within 10%
    const double q_ext = C::pi / 4.0 * line.characteristic_impedance() / 50.0;
    CHECK(std::abs(kc_hz / (modes[0].frequency_hz / q_ext) - 1.0) < 0.10);

    // linear in the load resistance through the perturbative window
    const double ref = kc_hz / 50.0;
    for (double rl : {5.0, 20.0, 100.0}) {
        LineModel loaded = line;
        loaded.load_resistance = rl;
        const double k = coupling_rate(loaded, modes[0]);
        CHECK(std::abs(k / rl / ref - 1.0) < 0.05);
    }
    LineModel tiny = line;
    tiny.load_resistance = 1e-3;
    CHECK(coupling_rate(tiny, modes[0]) < 2e3);

    LineModel heavy = line;
    heavy.load_resistance = 2.0 * line.characteristic_impedance();
    CHECK_THROWS_AS(coupling_rate(heavy, modes[0]), std::invalid_argument);
}

TEST_CASE("impedance-matching tunnel resistance") {
    const ModeData mode{1, 5.52e9, 5090.0, 0.79, 78e6};
    const double r = matching_resistance(mode, 203 * kUeV);
    CHECK(r == doctest::Approx(1.7e6).epsilon(0.03));

    // lambda = 1 maximizes lambda^2 exp(-lambda^2) and with it the tunnel
    // resistance the matching condition can afford
    auto with_lambda = [&](double lam) {
        ModeData m = mode;
        m.coupling = lam;
        return matching_resistance(m, 203 * kUeV);
    };
    CHECK(with_lambda(1.0) > with_lambda(0.79));
    CHECK(with_lambda(1.0) > with_lambda(1.3));

    ModeData fast = mode;
    fast.coupling_rate_hz *= 2.0;
    CHECK(matching_resistance(fast, 203 * kUeV) ==
          doctest::Approx(0.5 * r).epsilon(1e-12));
    CHECK_THROWS_AS(matching_resistance(mode, 0.0), std::invalid_argument);
}

TEST_CASE("termination capacitance refit reproduces the device value") {
    const double cj = refit_termination_capacitance(device_line(), 5.52e9, 17.77e9);
    CHECK(cj == doctest::Approx(2.6e-15).epsilon(0.05));
}
