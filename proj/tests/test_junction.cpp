#include <doctest.h>

#include <cmath>
#include <random>

#include "patsim/constants.hpp"
#include "patsim/junction.hpp"
#include "test_helpers.hpp"

using namespace patsim;
using namespace patsim::testing;
namespace C = patsim::consts;

namespace {

// independent oracle: plain trapezoid over the T=0 window, no panel tricks
double brute_force_current_t0(const TunnelJunction& j, double bias, long n_points) {
    const double ev = C::elementary_charge * bias;
    const double h = ev / double(n_points);
    double sum = 0.0;
    for (long k = 1; k < n_points; ++k) {
        const double u = k * h;
        sum += dos_value(j.dos_left, u) * dos_value(j.dos_right, ev - u);
    }
    return sum * h / (C::elementary_charge * j.r_tunnel);
}

IvCurve synthetic_curve(double (*f)(double), double span, double step) {
    IvCurve c;
    c.kind = IvKind::direct;
    for (double x = -span; x <= span + 0.5 * step; x += step) {
        c.voltages.push_back(x);
        c.currents.push_back(f(x));
    }
    return c;
}

} // namespace

TEST_CASE("dynes density of states") {
    const DynesDos sharp{203 * kUeV, 1e-9 * kUeV};
    CHECK(dos_value(sharp, 0.0) < 1e-6);
    CHECK(dos_value(sharp, 2 * 203 * kUeV) ==
          doctest::Approx(2.0 / std::sqrt(3.0)).epsilon(1e-9));
    CHECK(std::abs(dos_value(sharp, 100 * 203 * kUeV) - 1.0) < 1e-4);
    CHECK(std::abs(dos_value(sharp, 1000 * 203 * kUeV) - 1.0) < 1e-6);
    // nonnegative through the gap and beyond, both signs of E
    for (double e = -5.0; e <= 5.0; e += 0.01) {
        CHECK(dos_value(sharp, e * 203 * kUeV) >= 0.0);
    }
    CHECK(dos_value(sharp, -2 * 203 * kUeV) ==
          doctest::Approx(dos_value(sharp, 2 * 203 * kUeV)));
    CHECK_THROWS_AS((DynesDos{-1.0, 1e-25}).validate(), std::invalid_argument);
    CHECK_THROWS_AS((DynesDos{203 * kUeV, 0.0}).validate(), std::invalid_argument);
}

TEST_CASE("quasiparticle current: gap-edge value and asymptote") {
    const TunnelJunction j = device_junction();
    CHECK(qp_current(j, 0.0) == 0.0);

    // current just above the gap at eV = 2*Delta + hbar*omega/2
    const double i_edge = qp_current(j, 417.4e-6);
    CHECK(i_edge == doctest::Approx(189.77e-12).epsilon(0.005));
    CHECK(i_edge > 180e-12);
    CHECK(i_edge < 200e-12);

    // high-bias approach to the ohmic line, cross-checked against the
    // brute-force oracle; the approach is from below
    const TunnelJunction j0 = device_junction(0.01, 0.0);
    const double i_15 = qp_current(j0, 1.5e-3);
    const double oracle = brute_force_current_t0(j0, 1.5e-3, 4000000);
    CHECK(i_15 == doctest::Approx(oracle).epsilon(2e-4));
    const double ohmic = 1.5e-3 / j.r_tunnel;
    CHECK(std::abs(i_15 / ohmic - 1.0) < 0.15);
    CHECK(i_15 < ohmic);
    CHECK(qp_current(j0, 0.6e-3) / (0.6e-3 / j.r_tunnel) <
          qp_current(j0, 3e-3) / (3e-3 / j.r_tunnel));
}

TEST_CASE("quasiparticle current: oddness and subgap suppression") {
    const TunnelJunction j = device_junction();
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> v(1e-6, 1.8e-3);
    for (int k = 0; k < 8; ++k) {
        const double bias = v(rng);
        CHECK(qp_current(j, -bias) == -qp_current(j, bias));
    }

    // T = 0 and Gamma -> 0+: essentially no current below the gap
    const TunnelJunction cold = device_junction(1e-6, 0.0);
    for (double bias : {50e-6, 200e-6, 380e-6, 400e-6}) {
        CHECK(std::abs(qp_current(cold, bias)) < 1e-12);
    }
    // monotone non-decreasing above threshold at T = 0
    double prev = 0.0;
    for (double bias = 0.0; bias <= 2e-3; bias += 50e-6) {
        const double i = qp_current(cold, bias);
        CHECK(i >= prev - 1e-16);
        prev = i;
    }
}

TEST_CASE("iv tabulation is odd and interpolates accurately") {
    const IvCurve& curve = device_iv();
    REQUIRE(curve.kind == IvKind::direct);
    const std::size_t n = curve.voltages.size();
    REQUIRE(n % 2 == 1);
    for (std::size_t i = 0; i < n; ++i) {
        CHECK(curve.currents[i] == -curve.currents[n - 1 - i]);
        CHECK(curve.voltages[i] == -curve.voltages[n - 1 - i]);
    }
    const PchipInterpolant interp = curve.interpolant();
    const TunnelJunction j = device_junction();
    for (double bias : {417.4e-6, 394.58e-6, 1.1e-3, 250e-6}) {
        const double direct = qp_current(j, bias);
        CHECK(std::abs(interp(bias) - direct) < 2e-3 * 190e-12 + 1e-15);
    }
    CHECK_THROWS_AS(interp(5e-3), std::out_of_range);
}

TEST_CASE("kramers-kronig: analytic pairs") {
    // constant maps to zero (affine background is gauge)
    IvCurve flat = synthetic_curve([](double) { return 3.7; }, 10.0, 0.05);
    const IvCurve flat_kk = kk_transform(flat);
    CHECK(flat_kk.kind == IvKind::kramers_kronig);
    for (double c : flat_kk.currents) {
        CHECK(std::abs(c) < 1e-12);
    }

    // 1/(1+V^2) -> V/(1+V^2)
    IvCurve lorentz =
        synthetic_curve([](double x) { return 1.0 / (1.0 + x * x); }, 60.0, 0.02);
    const IvCurve hk = kk_transform(lorentz);
    const PchipInterpolant hi = hk.interpolant();
    double worst = 0.0;
    for (double x = -3.0; x <= 3.0; x += 0.1) {
        worst = std::max(worst, std::abs(hi(x) - x / (1.0 + x * x)));
    }
    CHECK(worst < 5e-4); // 1e-3 of the output peak 0.5

    // parity: odd input gives an even transform
    IvCurve odd =
        synthetic_curve([](double x) { return x * std::exp(-x * x); }, 20.0, 0.01);
    const IvCurve odd_kk = kk_transform(odd);
    const std::size_t n = odd_kk.currents.size();
    for (std::size_t i = 0; i < n; ++i) {
        CHECK(odd_kk.currents[i] ==
              doctest::Approx(odd_kk.currents[n - 1 - i]).epsilon(1e-10));
    }
}

TEST_CASE("kramers-kronig: involution and linearity") {
    // odd gaussian: both it and its transform decay fast, so the finite
    // span does not pollute the double transform
    auto probe = [](double x) { return x * std::exp(-x * x); };
    IvCurve gauss = synthetic_curve(probe, 20.0, 0.01);
    IvCurve once = kk_transform(gauss);
    once.kind = IvKind::direct; // feed it back through
    const IvCurve twice = kk_transform(once);
    const PchipInterpolant ti = twice.interpolant();
    double worst = 0.0;
    for (double x = -2.0; x <= 2.0; x += 0.05) {
        worst = std::max(worst, std::abs(ti(x) + probe(x)));
    }
    CHECK(worst < 1e-2 * 0.43); // peak of x exp(-x^2) is 0.429

    // linearity is exact up to rounding
    IvCurve f =
        synthetic_curve([](double x) { return std::exp(-x * x); }, 15.0, 0.05);
    IvCurve g = synthetic_curve([](double x) { return x * std::exp(-0.5 * x * x); },
                                15.0, 0.05);
    IvCurve combo = f;
    for (std::size_t i = 0; i < combo.currents.size(); ++i) {
        combo.currents[i] = 2.0 * f.currents[i] + 3.0 * g.currents[i];
    }
    const IvCurve tf = kk_transform(f);
    const IvCurve tg = kk_transform(g);
    const IvCurve tc = kk_transform(combo);
    for (std::size_t i = 0; i < tc.currents.size(); ++i) {
        CHECK(tc.currents[i] ==
              doctest::Approx(2.0 * tf.currents[i] + 3.0 * tg.currents[i])
                  .epsilon(1e-11));
    }
}

TEST_CASE("kramers-kronig: error contracts") {
    IvCurve wrong_kind = synthetic_curve([](double) { return 1.0; }, 10.0, 0.1);
    wrong_kind.kind = IvKind::kramers_kronig;
    CHECK_THROWS_AS(kk_transform(wrong_kind), std::invalid_argument);

    // span check names the requirement when gap metadata is present
    IvCurve narrow = synthetic_curve([](double x) { return x; }, 0.4e-3, 1e-5);
    narrow.gap = 203 * kUeV;
    try {
        kk_transform(narrow);
        FAIL("expected a span error");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("span") != std::string::npos);
    }
}

TEST_CASE("tunnel resistance renormalization") {
    const double table_lambdas[] = {0.31, 0.16, 0.09, 0.06, 0.05, 0.04};
    const double r = renormalized_resistance(1.53e6, table_lambdas);
    CHECK(r == doctest::Approx(1.75e6).epsilon(0.01));
    CHECK(renormalized_resistance(42.0, {}) == 42.0);
    const double one[] = {1.0};
    CHECK(renormalized_resistance(1.0, one) ==
          doctest::Approx(std::exp(1.0)).epsilon(1e-12));
    const double bad[] = {-0.1};
    CHECK_THROWS_AS(renormalized_resistance(1.0, bad), std::invalid_argument);
    CHECK_THROWS_AS(renormalized_resistance(0.0, {}), std::invalid_argument);
}
