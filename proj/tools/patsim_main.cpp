#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "patsim/calibration.hpp"
#include "patsim/constants.hpp"
#include "patsim/exec.hpp"
#include "patsim/fock.hpp"
#include "patsim/junction.hpp"
#include "patsim/lindblad.hpp"
#include "patsim/resonator.hpp"
#include "patsim/response.hpp"
#include "patsim/scenario.hpp"
#include "patsim/tables.hpp"

namespace C = patsim::consts;
using namespace patsim;

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir = ".";
    long seed = -1; // overrides [run] seed when >= 0
    int threads = 0;
};

struct Context {
    Scenario scenario;
    std::string out_dir;
    std::string hash;
    long seed = 1;
};

Context make_context(const CommonArgs& args, bool seed_required) {
    Context ctx{Scenario::parse_file(args.config_path), args.out_dir, "", 1};
    if (args.threads > 0) {
        set_threads(args.threads);
    }
    if (args.seed >= 0) {
        ctx.scenario.set("run", "seed", std::to_string(args.seed));
    }
    if (seed_required && !ctx.scenario.has("run", "seed")) {
        throw ConfigError("a PRNG seed is required: set [run] seed or pass --seed");
    }
    ctx.seed = ctx.scenario.integer_or("run", "seed", 1);
    ctx.hash = ctx.scenario.hash_hex();
    std::filesystem::create_directories(ctx.out_dir);
    return ctx;
}

std::string out_path(const Context& ctx, const std::string& name) {
    return ctx.out_dir + "/" + name;
}

TunnelJunction junction_from(const Scenario& s) {
    const double gap = s.quantity("junction", "gap", Unit::energy);
    const double dynes = s.quantity_or("junction", "dynes", Unit::energy,
                                       0.01e-6 * C::electronvolt);
    TunnelJunction j{{gap, dynes},
                     {gap, dynes},
                     s.quantity("junction", "r_tunnel", Unit::resistance),
                     s.quantity_or("junction", "temperature", Unit::temperature,
                                   0.020)};
    j.validate();
    return j;
}

IvGrid iv_grid_from(const Scenario& s) {
    IvGrid grid;
    grid.v_max = s.quantity_or("iv", "v_max", Unit::voltage, grid.v_max);
    grid.step = s.quantity_or("iv", "step", Unit::voltage, grid.step);
    return grid;
}

LineModel line_from(const Scenario& s) {
    double l_sq;
    if (s.has("resonator", "sheet_inductance")) {
        l_sq = s.quantity("resonator", "sheet_inductance", Unit::inductance);
    } else {
        const FilmProperties film{
            s.quantity("resonator", "sheet_resistance", Unit::resistance),
            s.quantity("resonator", "gap_gral", Unit::energy)};
        l_sq = sheet_inductance(film);
    }
    LineModel line{
        s.quantity("resonator", "length", Unit::length),
        s.quantity("resonator", "width", Unit::length),
        l_sq,
        s.quantity("resonator", "capacitance_per_length",
                   Unit::capacitance_per_length),
        s.quantity("resonator", "termination_capacitance", Unit::capacitance),
        s.quantity_or("resonator", "load_resistance", Unit::resistance, 50.0)};
    line.validate();
    return line;
}

// [rates] values are kappa/2pi in frequency units
RateSet rates_from(const Scenario& s, bool need_kj) {
    RateSet r;
    r.kappa_c = C::two_pi * s.quantity("rates", "kappa_c", Unit::frequency);
    r.kappa_i = C::two_pi * s.quantity("rates", "kappa_i", Unit::frequency);
    r.kappa_j = need_kj
                    ? C::two_pi * s.quantity("rates", "kappa_j", Unit::frequency)
                    : 0.0;
    r.validate();
    return r;
}

DetectorModel model_from(const Context& ctx) {
    const Scenario& s = ctx.scenario;
    const RateSet rates = rates_from(s, false);
    DetectorModel model = build_detector_model(
        junction_from(s), s.quantity("mode", "frequency", Unit::frequency),
        rates.kappa_c, rates.kappa_i, s.number("mode", "lambda"),
        iv_grid_from(s));
    model.include_lamb_shift = s.boolean_or("lindblad", "lamb_shift", false);
    model.n_max_ceiling = int(s.integer_or("fock", "ceiling", 48));
    return model;
}

std::vector<double> linspace(double a, double b, long n) {
    std::vector<double> v;
    if (n <= 0) {
        return v;
    }
    if (n == 1) {
        v.push_back(a);
        return v;
    }
    v.reserve(std::size_t(n));
    for (long i = 0; i < n; ++i) {
        v.push_back(a + (b - a) * double(i) / double(n - 1));
    }
    return v;
}

int cmd_modes(const CommonArgs& args) {
    Context ctx = make_context(args, false);
    const Scenario& s = ctx.scenario;
    LineModel line = line_from(s);
    const int n_modes = int(s.integer_or("resonator", "n_modes", 7));

    TableWriter w(out_path(ctx, "modes.txt"), ctx.hash);
    if (s.boolean_or("resonator", "refit_cj", false)) {
        const double cj = refit_termination_capacitance(
            line, s.quantity("resonator", "target_mode1", Unit::frequency),
            s.quantity("resonator", "target_mode2", Unit::frequency));
        line.termination_capacitance = cj;
        w.header("refit_termination_capacitance_F", cj);
    }
    const auto modes = find_modes(line, n_modes);
    w.header("kappa_c_mode1_MHz", modes.front().coupling_rate_hz / 1e6);
    w.columns({"mode", "frequency_GHz", "Zc_kohm", "lambda"});
    for (const auto& m : modes) {
        const double row[] = {double(m.index), m.frequency_hz / 1e9,
                              m.characteristic_impedance / 1e3, m.coupling};
        w.row(row);
    }
    return 0;
}

int cmd_iv(const CommonArgs& args) {
    Context ctx = make_context(args, false);
    const TunnelJunction j = junction_from(ctx.scenario);
    const IvCurve curve = tabulate_iv(j, iv_grid_from(ctx.scenario));
    write_iv_curve(out_path(ctx, "iv.txt"), curve, ctx.hash);
    if (ctx.scenario.boolean_or("iv", "include_kk", false)) {
        write_iv_curve(out_path(ctx, "iv_kk.txt"), kk_transform(curve), ctx.hash);
    }
    return 0;
}

int cmd_spectroscopy(const CommonArgs& args) {
    Context ctx = make_context(args, false);
    const Scenario& s = ctx.scenario;
    const TunnelJunction j = junction_from(s);
    const PchipInterpolant iv = tabulate_iv(j, iv_grid_from(s)).interpolant();
    const RateSet base = rates_from(s, false);
    const double f0 = s.quantity("mode", "frequency", Unit::frequency);
    const double lambda = s.number("mode", "lambda");

    const auto v_grid = linspace(s.quantity("spectroscopy", "v_start", Unit::voltage),
                                 s.quantity("spectroscopy", "v_stop", Unit::voltage),
                                 s.integer("spectroscopy", "v_points"));
    const auto f_grid =
        linspace(s.quantity("spectroscopy", "f_start", Unit::frequency),
                 s.quantity("spectroscopy", "f_stop", Unit::frequency),
                 s.integer("spectroscopy", "f_points"));

    std::vector<double> s11_sq(v_grid.size() * f_grid.size(), 0.0);
    parallel_for(std::ptrdiff_t(v_grid.size()), Exec::parallel,
                 [&](std::ptrdiff_t iv_idx) {
                     RateSet rates = base;
                     rates.kappa_j = std::max(
                         0.0, kappa_j_linear(lambda, iv, v_grid[std::size_t(iv_idx)], f0));
                     for (std::size_t k = 0; k < f_grid.size(); ++k) {
                         const double delta = C::two_pi * (f_grid[k] - f0);
                         s11_sq[std::size_t(iv_idx) * f_grid.size() + k] =
                             std::norm(s11(rates, delta));
                     }
                 });

    TableWriter w(out_path(ctx, "spectroscopy.txt"), ctx.hash);
    w.header("mode_frequency_Hz", f0);
    w.columns({"bias_V", "frequency_Hz", "s11_squared"});
    for (std::size_t i = 0; i < v_grid.size(); ++i) {
        for (std::size_t k = 0; k < f_grid.size(); ++k) {
            const double row[] = {v_grid[i], f_grid[k], s11_sq[i * f_grid.size() + k]};
            w.row(row);
        }
    }
    return 0;
}

int cmd_thermal(const CommonArgs& args) {
    Context ctx = make_context(args, false);
    const Scenario& s = ctx.scenario;
    const RateSet rates = rates_from(s, true);
    const double f0 = s.quantity("mode", "frequency", Unit::frequency);
    double i_dark = 0.0;
    if (s.has("thermal", "dark_current")) {
        i_dark = s.quantity("thermal", "dark_current", Unit::current);
    } else if (s.has("thermal", "residual_occupation")) {
        i_dark = dark_current(s.number("thermal", "residual_occupation"),
                              rates.kappa_j);
    }
    const auto t_grid = linspace(s.quantity("thermal", "t_start", Unit::temperature),
                                 s.quantity("thermal", "t_stop", Unit::temperature),
                                 s.integer("thermal", "points"));
    TableWriter w(out_path(ctx, "thermal.txt"), ctx.hash);
    w.header("dark_current_A", i_dark);
    w.columns({"temperature_K", "n_ph", "current_A"});
    for (double t : t_grid) {
        const double n = thermal_population(t, f0, rates);
        const double row[] = {t, n, C::elementary_charge * rates.kappa_j * n + i_dark};
        w.row(row);
    }
    return 0;
}

int cmd_steady(const CommonArgs& args) {
    Context ctx = make_context(args, false);
    const Scenario& s = ctx.scenario;
    DetectorModel model = model_from(ctx);

    double flux;
    if (s.has("drive", "flux")) {
        flux = s.quantity("drive", "flux", Unit::flux);
    } else {
        flux = flux_from_dbm(s.quantity("drive", "power", Unit::power_dbm),
                             s.quantity("drive", "attenuation", Unit::decibel),
                             model.mode_frequency);
    }
    SystemConfig cfg = model.system_for(1, flux);
    cfg.bias = s.quantity_or("drive", "bias", Unit::voltage, cfg.bias);
    cfg.drive.detuning =
        C::two_pi * s.quantity_or("drive", "detuning", Unit::frequency, 0.0);
    cfg.lamb_shift_sign = s.number_or("lindblad", "lamb_sign", 1.0);
    const long n_max = s.integer_or("fock", "n_max", 0);
    if (n_max > 0) {
        cfg.jumps = build_jump_family(model.lambda, FockTruncation{int(n_max)});
    }
    const auto ss = steady_state(cfg);

    TableWriter w(out_path(ctx, "steady.txt"), ctx.hash);
    w.header("bias_V", cfg.bias);
    w.header("photon_flux_ph_s", flux);
    w.header("n_ph", ss.n_ph);
    w.header("i_pat_A", ss.i_pat);
    w.header("residual", ss.residual);
    w.header("n_max_used", double(ss.n_max_used));
    w.header("top_population", ss.top_population);
    w.header("second_population", ss.second_population);
    w.columns({"fock_level", "population"});
    for (int n = 0; n <= ss.n_max_used; ++n) {
        const double row[] = {double(n), std::real(ss.rho(n, n))};
        w.row(row);
    }
    return 0;
}

int cmd_sweep(const CommonArgs& args) {
    Context ctx = make_context(args, false);
    const Scenario& s = ctx.scenario;
    DetectorModel model = model_from(ctx);
    const double attenuation = s.quantity("sweep", "attenuation", Unit::decibel);
    const auto powers = linspace(s.quantity("sweep", "power_start", Unit::power_dbm),
                                 s.quantity("sweep", "power_stop", Unit::power_dbm),
                                 s.integer("sweep", "power_points"));
    std::vector<long> steps{1, 2, 3, 4};
    if (s.has("sweep", "steps")) {
        steps = s.integer_list("sweep", "steps");
    }

    for (long step : steps) {
        const double dark =
            powers.empty() ? 0.0
                           : steady_state(model.system_for(int(step), 0.0)).i_pat;
        std::vector<double> current(powers.size()), nph(powers.size());
        parallel_for(std::ptrdiff_t(powers.size()), Exec::parallel,
                     [&](std::ptrdiff_t i) {
                         const double flux = flux_from_dbm(
                             powers[std::size_t(i)], attenuation, model.mode_frequency);
                         const auto ss =
                             steady_state(model.system_for(int(step), flux));
                         current[std::size_t(i)] = ss.i_pat - dark;
                         nph[std::size_t(i)] = ss.n_ph;
                     });

        char name[32];
        std::snprintf(name, sizeof name, "sweep_step%ld.txt", step);
        TableWriter w(out_path(ctx, name), ctx.hash);
        w.header("step", double(step));
        w.header("bias_V", model.step_bias(int(step)));
        w.header("attenuation_dB", attenuation);
        w.line("current is the driven difference: drive-on minus drive-off");
        w.columns({"source_power_dBm", "sample_power_dBm", "flux_ph_s", "i_pat_A",
                   "n_ph"});
        for (std::size_t i = 0; i < powers.size(); ++i) {
            const double row[] = {
                powers[i], powers[i] - attenuation,
                flux_from_dbm(powers[i], attenuation, model.mode_frequency),
                current[i], nph[i]};
            w.row(row);
        }

        if (step == 1 && powers.size() >= 4) {
            // compression against the low-power linear slope (mean chi of the
            // three lowest powers)
            std::vector<double> chi(powers.size());
            for (std::size_t i = 0; i < powers.size(); ++i) {
                const double flux =
                    flux_from_dbm(powers[i], attenuation, model.mode_frequency);
                chi[i] = current[i] / (C::elementary_charge * flux);
            }
            const double chi_lin = (chi[0] + chi[1] + chi[2]) / 3.0;
            TableWriter cw(out_path(ctx, "compression.txt"), ctx.hash);
            cw.header("chi_linear", chi_lin);
            cw.columns({"compression_dB", "sample_power_dBm"});
            for (double target : {1.0, 3.0}) {
                const double want = chi_lin * std::pow(10.0, -target / 10.0);
                for (std::size_t i = 1; i < chi.size(); ++i) {
                    if (chi[i - 1] > want && chi[i] <= want) {
                        const double frac = (chi[i - 1] - want) / (chi[i - 1] - chi[i]);
                        const double p = powers[i - 1] + frac * (powers[i] - powers[i - 1]);
                        const double row[] = {target, p - attenuation};
                        cw.row(row);
                        break;
                    }
                }
            }
        }
    }
    return 0;
}

int cmd_calibrate(const CommonArgs& args) {
    Context ctx = make_context(
        args, /*seed_required=*/true);
    const Scenario& s = ctx.scenario;
    DetectorModel model = model_from(ctx);

    FitConfig fit_cfg;
    fit_cfg.a_lo = s.quantity_or("calibrate", "a_lo", Unit::decibel, 95.0);
    fit_cfg.a_hi = s.quantity_or("calibrate", "a_hi", Unit::decibel, 120.0);
    fit_cfg.sigma.floor =
        s.quantity_or("calibrate", "noise_floor", Unit::current, 50e-15);
    fit_cfg.sigma.fraction = s.number_or("calibrate", "noise_fraction", 0.01);
    fit_cfg.release_shape = s.boolean_or("calibrate", "release_shape", false);

    std::vector<long> steps{1, 2, 3, 4};
    if (s.has("calibrate", "steps")) {
        steps = s.integer_list("calibrate", "steps");
    }

    std::vector<PowerSweepData> data;
    if (s.boolean_or("calibrate", "synthesize", false)) {
        const double a_true =
            s.quantity("calibrate", "true_attenuation", Unit::decibel);
        const auto powers =
            linspace(s.quantity("calibrate", "power_start", Unit::power_dbm),
                     s.quantity("calibrate", "power_stop", Unit::power_dbm),
                     s.integer("calibrate", "power_points"));
        GaussianSampler rng(std::uint64_t(ctx.seed));
        NoiseModel noise{fit_cfg.sigma.floor, fit_cfg.sigma.fraction};
        for (long step : steps) {
            data.push_back(synthesize_power_sweep(model, int(step), powers, a_true,
                                                  noise, rng));
            char name[32];
            std::snprintf(name, sizeof name, "data_step%ld.txt", step);
            write_power_sweep(out_path(ctx, name), data.back(), ctx.hash);
        }
    } else {
        for (long step : steps) {
            char key[32];
            std::snprintf(key, sizeof key, "data_step%ld", step);
            data.push_back(
                read_power_sweep(s.text_or("calibrate", key, "")));
            if (data.back().step_index != step) {
                throw ConfigError("calibrate: data file step header mismatch");
            }
        }
    }

    FitResult fit = fit_attenuation(model, data, fit_cfg);

    if (s.boolean_or("calibrate", "surface", false)) {
        const auto lg = linspace(s.number("calibrate", "lambda_min"),
                                 s.number("calibrate", "lambda_max"),
                                 s.integer("calibrate", "lambda_points"));
        const auto rg =
            linspace(s.quantity("calibrate", "rt_min", Unit::resistance),
                     s.quantity("calibrate", "rt_max", Unit::resistance),
                     s.integer("calibrate", "rt_points"));
        const Chi2Surface surface = chi2_surface(model, data, lg, rg, fit_cfg);
        fit.uncertainty_contour = surface.contour();
        fit.chi_spread = surface.chi_uncertainty(fit.quantum_efficiency);

        TableWriter sw(out_path(ctx, "surface.txt"), ctx.hash);
        sw.header("min_chi2_reduced", surface.min_chi2_reduced);
        sw.columns({"lambda", "r_tunnel_ohm", "best_attenuation_dB", "chi2_reduced",
                    "efficiency", "valid"});
        for (const auto& c : surface.cells) {
            const double row[] = {c.lambda,       c.r_tunnel,  c.attenuation_db,
                                  c.chi2_reduced, c.efficiency, double(c.valid)};
            sw.row(row);
        }
    }

    TableWriter w(out_path(ctx, "calibration.txt"), ctx.hash);
    w.header("attenuation_dB", fit.attenuation_db);
    w.header("quantum_efficiency", fit.quantum_efficiency);
    w.header("chi2_reduced", fit.chi2_reduced);
    w.header("lambda", fit.free_params.at("lambda"));
    w.header("r_tunnel_ohm", fit.free_params.at("r_tunnel"));
    if (fit.chi_spread > 0.0) {
        w.header("chi_spread", fit.chi_spread);
    }
    w.columns({"contour_lambda", "contour_r_tunnel_ohm"});
    for (const auto& [lam, rt] : fit.uncertainty_contour) {
        const double row[] = {lam, rt};
        w.row(row);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "patsim: photon-assisted tunneling detector simulation and calibration.\n"
        "Power bookkeeping: source powers are dBm; the photon flux at the\n"
        "resonator input is phi = 1e-3*10^((P_dBm - A_dB)/10) / (hbar*2*pi*f)."};
    app.require_subcommand(1);

    CommonArgs args;
    int rc = 0;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", args.config_path, "scenario file")->required();
        sub->add_option("--out", args.out_dir, "output directory");
        sub->add_option("--seed", args.seed, "PRNG seed override");
        sub->add_option("--threads", args.threads, "OpenMP thread count");
    };
    auto wire = [&](const char* name, const char* desc, int (*fn)(const CommonArgs&)) {
        CLI::App* sub = app.add_subcommand(name, desc);
        add_common(sub);
        sub->callback([&args, fn, &rc]() { rc = fn(args); });
    };
    wire("modes", "resonator mode table", cmd_modes);
    wire("iv", "junction current-voltage tabulation", cmd_iv);
    wire("spectroscopy", "reflection map |S11|^2 over bias and frequency",
         cmd_spectroscopy);
    wire("sweep", "PAT current vs drive power per step", cmd_sweep);
    wire("thermal", "thermally driven current vs temperature", cmd_thermal);
    wire("calibrate", "attenuation / quantum-efficiency fit", cmd_calibrate);
    wire("steady", "single steady-state solve dump", cmd_steady);

    try {
        app.parse(argc, argv);
        return rc;
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::out_of_range& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    }
}
