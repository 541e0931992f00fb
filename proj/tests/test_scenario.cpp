#include <doctest.h>

#include "patsim/constants.hpp"
#include "patsim/scenario.hpp"

using namespace patsim;
namespace C = patsim::consts;

namespace {

const char* kSample = R"(
# device description
[junction]
gap = 203ueV
dynes = 0.01ueV
r_tunnel = 1.75Mohm
temperature = 20mK

[resonator]
capacitance_per_length = 41.7pF/m
termination_capacitance = 2.6fF
sheet_inductance = 620pH
width = 720nm

[mode]
frequency = 5.525GHz
lambda = 0.79

[drive]
power = -119dBm
attenuation = 107dB
flux = 1e9ph/s

[run]
seed = 7
enabled = on
steps = 1, 2, 4
)";

} // namespace

TEST_CASE("unit parsing to SI") {
    const Scenario s = Scenario::parse_text(kSample, "sample");
    CHECK(s.quantity("junction", "gap", Unit::energy) ==
          doctest::Approx(203e-6 * C::electronvolt));
    CHECK(s.quantity("junction", "r_tunnel", Unit::resistance) ==
          doctest::Approx(1.75e6));
    CHECK(s.quantity("junction", "temperature", Unit::temperature) ==
          doctest::Approx(0.020));
    CHECK(s.quantity("resonator", "capacitance_per_length",
                     Unit::capacitance_per_length) == doctest::Approx(41.7e-12));
    CHECK(s.quantity("resonator", "termination_capacitance", Unit::capacitance) ==
          doctest::Approx(2.6e-15));
    CHECK(s.quantity("resonator", "sheet_inductance", Unit::inductance) ==
          doctest::Approx(620e-12));
    CHECK(s.quantity("resonator", "width", Unit::length) == doctest::Approx(720e-9));
    CHECK(s.quantity("mode", "frequency", Unit::frequency) ==
          doctest::Approx(5.525e9));
    CHECK(s.number("mode", "lambda") == doctest::Approx(0.79));
    CHECK(s.quantity("drive", "power", Unit::power_dbm) == doctest::Approx(-119.0));
    CHECK(s.quantity("drive", "attenuation", Unit::decibel) ==
          doctest::Approx(107.0));
    CHECK(s.quantity("drive", "flux", Unit::flux) == doctest::Approx(1e9));
    CHECK(s.integer("run", "seed") == 7);
    CHECK(s.boolean_or("run", "enabled", false));
    CHECK(s.integer_list("run", "steps") == std::vector<long>{1, 2, 4});
}

TEST_CASE("physical quantities must carry units") {
    Scenario s = Scenario::parse_text("[j]\ngap = 203\n", "t");
    CHECK_THROWS_AS(s.quantity("j", "gap", Unit::energy), ConfigError);

    Scenario wrong = Scenario::parse_text("[j]\ngap = 203uV\n", "t");
    CHECK_THROWS_AS(wrong.quantity("j", "gap", Unit::energy), ConfigError);

    Scenario unknown = Scenario::parse_text("[j]\ngap = 203parsec\n", "t");
    CHECK_THROWS_AS(unknown.quantity("j", "gap", Unit::energy), ConfigError);

    Scenario dimless = Scenario::parse_text("[m]\nlambda = 0.79ueV\n", "t");
    CHECK_THROWS_AS(dimless.number("m", "lambda"), ConfigError);

    Scenario ok = Scenario::parse_text("[m]\nlambda = 0.79\n", "t");
    CHECK(ok.number("m", "lambda") == doctest::Approx(0.79));
    CHECK_THROWS_AS(ok.quantity("m", "missing", Unit::energy), ConfigError);
    CHECK(ok.quantity_or("m", "missing", Unit::energy, 42.0) == 42.0);
}

TEST_CASE("parse errors carry location") {
    CHECK_THROWS_AS(Scenario::parse_text("[broken\nk = v\n", "t"), ConfigError);
    CHECK_THROWS_AS(Scenario::parse_text("key_without_section = 1\n", "t"),
                    ConfigError);
    CHECK_THROWS_AS(Scenario::parse_text("[s]\nnot_a_pair\n", "t"), ConfigError);
}

TEST_CASE("config hash is order-independent and value-sensitive") {
    const Scenario a =
        Scenario::parse_text("[s]\nx = 1\ny = 2\n[t]\nz = 3V\n", "a");
    const Scenario b =
        Scenario::parse_text("[t]\nz = 3V\n[s]\ny = 2\nx = 1\n", "b");
    CHECK(a.hash() == b.hash());
    CHECK(a.hash_hex().size() == 16);

    Scenario c = a;
    c.set("s", "x", "9");
    CHECK(c.hash() != a.hash());
}
