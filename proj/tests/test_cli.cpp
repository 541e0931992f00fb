#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

std::string binary() {
    const char* bin = std::getenv("PATSIM_BIN");
    REQUIRE_MESSAGE(bin != nullptr, "PATSIM_BIN must point at the CLI binary");
    return bin;
}

int run(const std::string& args) {
    const std::string cmd = binary() + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

fs::path workspace() {
    static const fs::path dir = [] {
        fs::path p = fs::temp_directory_path() / "patsim_cli_test";
        fs::remove_all(p);
        fs::create_directories(p);
        return p;
    }();
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE_MESSAGE(in.good(), "missing output file: " << p.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::vector<double>> data_rows(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line.front() == '#') {
            continue;
        }
        std::istringstream ls(line);
        std::vector<double> row;
        double v;
        while (ls >> v) {
            row.push_back(v);
        }
        if (!row.empty()) {
            rows.push_back(row);
        }
    }
    return rows;
}

double header_value(const std::string& content, const std::string& key) {
    const std::string tag = "# " + key + ":";
    const std::size_t pos = content.find(tag);
    REQUIRE_MESSAGE(pos != std::string::npos, "header key not found: " << key);
    return std::stod(content.substr(pos + tag.size()));
}

const char* kBaseConfig = R"(
[junction]
gap = 203ueV
dynes = 0.01ueV
r_tunnel = 1.75Mohm
temperature = 20mK

[iv]
v_max = 1.2mV
step = 2uV

[resonator]
length = 180um
width = 720nm
sheet_inductance = 620pH
capacitance_per_length = 41.7pF/m
termination_capacitance = 2.6fF
load_resistance = 50ohm
n_modes = 7

[mode]
frequency = 5.525GHz
lambda = 0.79

[rates]
kappa_c = 75MHz
kappa_i = 9.5MHz
kappa_j = 65MHz

[fock]
ceiling = 24

[drive]
flux = 2e8ph/s

[thermal]
t_start = 20mK
t_stop = 150mK
points = 14
dark_current = 55fA

[spectroscopy]
v_start = 330uV
v_stop = 420uV
v_points = 10
f_start = 5.35GHz
f_stop = 5.70GHz
f_points = 71

[sweep]
steps = 1
power_start = -26dBm
power_stop = -20dBm
power_points = 3
attenuation = 107dB

[calibrate]
synthesize = true
true_attenuation = 107dB
noise_floor = 2fA
noise_fraction = 0.01
power_start = -20dBm
power_stop = -13dBm
power_points = 4
steps = 1,2
a_lo = 104dB
a_hi = 110dB

[run]
seed = 3
)";

fs::path write_config(const std::string& name, const std::string& content) {
    const fs::path p = workspace() / name;
    std::ofstream out(p);
    out << content;
    return p;
}

} // namespace

TEST_CASE("cli: modes table") {
    const fs::path cfg = write_config("base.cfg", kBaseConfig);
    const fs::path out = workspace() / "modes_out";
    REQUIRE(run("modes --config " + cfg.string() + " --out " + out.string()) == 0);
    const auto rows = data_rows(out / "modes.txt");
    REQUIRE(rows.size() == 7);
    CHECK(rows[0][1] == doctest::Approx(5.52).epsilon(0.02)); // GHz column
    CHECK(rows[1][1] == doctest::Approx(17.77).epsilon(0.02));
    CHECK(rows[0][3] == doctest::Approx(0.79).epsilon(0.15)); // lambda column

    std::string refit_cfg = kBaseConfig;
    refit_cfg += "\n[resonator]\nrefit_cj = true\ntarget_mode1 = 5.52GHz\n"
                 "target_mode2 = 17.77GHz\nn_modes = 2\n";
    const fs::path cfg2 = write_config("refit.cfg", refit_cfg);
    REQUIRE(run("modes --config " + cfg2.string() + " --out " + out.string()) == 0);
    const double cj = header_value(slurp(out / "modes.txt"),
                                   "refit_termination_capacitance_F");
    CHECK(cj == doctest::Approx(2.6e-15).epsilon(0.05));
}

TEST_CASE("cli: junction iv table") {
    const fs::path cfg = write_config("base.cfg", kBaseConfig);
    const fs::path out = workspace() / "iv_out";
    REQUIRE(run("iv --config " + cfg.string() + " --out " + out.string()) == 0);
    const std::string content = slurp(out / "iv.txt");
    CHECK(content.find("# kind: direct") != std::string::npos);
    CHECK(content.find("# r_tunnel_ohm:") != std::string::npos);
    const auto rows = data_rows(out / "iv.txt");
    REQUIRE(rows.size() == 1201);
    // odd curve through the origin
    CHECK(rows[600][0] == 0.0);
    CHECK(rows[600][1] == 0.0);
    CHECK(rows[0][1] == doctest::Approx(-rows.back()[1]));
}

TEST_CASE("cli: spectroscopy dip at the internal-loss floor") {
    const fs::path cfg = write_config("base.cfg", kBaseConfig);
    const fs::path out = workspace() / "spec_out";
    REQUIRE(run("spectroscopy --config " + cfg.string() + " --out " + out.string()) ==
            0);
    const auto rows = data_rows(out / "spectroscopy.txt");
    REQUIRE(rows.size() == 10 * 71);
    // at 340 uV the junction is quiet: dip is about -2 dB
    double dip = 1.0;
    for (const auto& r : rows) {
        if (std::abs(r[0] - 340e-6) < 1e-9) {
            dip = std::min(dip, r[2]);
        }
    }
    CHECK(10.0 * std::log10(dip) == doctest::Approx(-2.2).epsilon(0.15));
}

TEST_CASE("cli: thermal curve saturates at the dark current") {
    const fs::path cfg = write_config("base.cfg", kBaseConfig);
    const fs::path out = workspace() / "thermal_out";
    REQUIRE(run("thermal --config " + cfg.string() + " --out " + out.string()) == 0);
    const auto rows = data_rows(out / "thermal.txt");
    REQUIRE(rows.size() == 14);
    CHECK(rows[0][2] == doctest::Approx(55e-15).epsilon(0.01));
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(rows[i][2] >= rows[i - 1][2]);
    }
    CHECK(rows.back()[2] > 10.0 * 55e-15);
}

TEST_CASE("cli: steady dump") {
    const fs::path cfg = write_config("base.cfg", kBaseConfig);
    const fs::path out = workspace() / "steady_out";
    REQUIRE(run("steady --config " + cfg.string() + " --out " + out.string()) == 0);
    const std::string content = slurp(out / "steady.txt");
    const double nph = header_value(content, "n_ph");
    CHECK(nph > 0.0);
    CHECK(nph < 5.0);
    CHECK(header_value(content, "residual") < 1e-8);
    const auto rows = data_rows(out / "steady.txt");
    double total = 0.0;
    for (const auto& r : rows) {
        total += r[1];
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("cli: every output carries the resolved config hash") {
    const fs::path cfg = write_config("base.cfg", kBaseConfig);
    const fs::path out = workspace() / "hash_out";
    REQUIRE(run("thermal --config " + cfg.string() + " --out " + out.string()) == 0);
    REQUIRE(run("modes --config " + cfg.string() + " --out " + out.string()) == 0);
    const std::string thermal = slurp(out / "thermal.txt");
    const std::string modes = slurp(out / "modes.txt");
    CHECK(thermal.rfind("# config: ", 0) == 0);
    CHECK(modes.rfind("# config: ", 0) == 0);
    // same resolved config, same stamp
    CHECK(thermal.substr(0, 27) == modes.substr(0, 27));
    // changing the seed resolves to a different stamp
    REQUIRE(run("modes --config " + cfg.string() + " --out " + out.string() +
                " --seed 99") == 0);
    CHECK(slurp(out / "modes.txt").substr(0, 27) != modes.substr(0, 27));
}

TEST_CASE("cli: sweep determinism and empty grid") {
    const fs::path cfg = write_config("base.cfg", kBaseConfig);
    const fs::path out_a = workspace() / "sweep_a";
    const fs::path out_b = workspace() / "sweep_b";
    REQUIRE(run("sweep --config " + cfg.string() + " --out " + out_a.string()) == 0);
    REQUIRE(run("sweep --config " + cfg.string() + " --out " + out_b.string() +
                " --threads 1") == 0);
    CHECK(slurp(out_a / "sweep_step1.txt") == slurp(out_b / "sweep_step1.txt"));
    CHECK(data_rows(out_a / "sweep_step1.txt").size() == 3);

    std::string empty_cfg = kBaseConfig;
    empty_cfg += "\n[sweep]\npower_points = 0\n";
    const fs::path cfg_e = write_config("empty.cfg", empty_cfg);
    const fs::path out_e = workspace() / "sweep_empty";
    REQUIRE(run("sweep --config " + cfg_e.string() + " --out " + out_e.string()) ==
            0);
    CHECK(data_rows(out_e / "sweep_step1.txt").empty());
}

TEST_CASE("cli: calibrate round trip on synthetic data") {
    const fs::path cfg = write_config("base.cfg", kBaseConfig);
    const fs::path out = workspace() / "cal_out";
    REQUIRE(run("calibrate --config " + cfg.string() + " --out " + out.string()) ==
            0);
    const std::string content = slurp(out / "calibration.txt");
    CHECK(header_value(content, "attenuation_dB") ==
          doctest::Approx(107.0).epsilon(0.01)); // within ~1 dB
    CHECK(header_value(content, "quantum_efficiency") ==
          doctest::Approx(0.87).epsilon(0.05));
    // synthesized inputs are written alongside
    CHECK(data_rows(out / "data_step1.txt").size() == 4);
    CHECK(data_rows(out / "data_step2.txt").size() == 4);
}

TEST_CASE("cli: exit codes") {
    // config error: bad unit
    std::string bad = kBaseConfig;
    bad += "\n[junction]\ngap = 203uV\n";
    const fs::path cfg_bad = write_config("bad.cfg", bad);
    CHECK(run("iv --config " + cfg_bad.string() + " --out " +
              (workspace() / "x1").string()) == 2);

    // config error: calibrate without a seed
    std::string no_seed(kBaseConfig);
    const std::size_t pos = no_seed.find("seed = 3");
    no_seed.erase(pos, 8);
    const fs::path cfg_ns = write_config("noseed.cfg", no_seed);
    CHECK(run("calibrate --config " + cfg_ns.string() + " --out " +
              (workspace() / "x2").string()) == 2);

    // numerical failure: truncation ceiling too low for the requested drive
    std::string hot = kBaseConfig;
    hot += "\n[drive]\nflux = 3e9ph/s\n[fock]\nn_max = 2\nceiling = 8\n";
    const fs::path cfg_hot = write_config("hot.cfg", hot);
    CHECK(run("steady --config " + cfg_hot.string() + " --out " +
              (workspace() / "x3").string()) == 3);

    // missing config file
    CHECK(run("modes --config /nonexistent.cfg --out " +
              (workspace() / "x4").string()) == 2);
}
