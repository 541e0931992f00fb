#include "patsim/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <tuple>

#include "patsim/constants.hpp"
#include "patsim/response.hpp"

namespace patsim {

namespace {
constexpr double kE = consts::elementary_charge;
} // namespace

double DetectorModel::photon_voltage() const {
    return consts::hbar * consts::two_pi * mode_frequency / kE;
}

double DetectorModel::step_bias(int step) const {
    if (step < 1 || step > 4) {
        throw std::invalid_argument("DetectorModel: step index must be in 1..4");
    }
    return 2.0 * gap() / kE - (step - 0.5) * photon_voltage();
}

SystemConfig DetectorModel::system_for(int step, double photon_flux) const {
    const int n_max = suggest_n_max(photon_flux, kappa_c, kappa_env());
    SystemConfig cfg;
    cfg.junction = junction;
    cfg.junction.r_tunnel = r_tunnel;
    cfg.iv = iv;
    cfg.iv.set_scale(junction.r_tunnel / r_tunnel);
    cfg.iv_kk = iv_kk;
    cfg.iv_kk.set_scale(junction.r_tunnel / r_tunnel);
    cfg.jumps = build_jump_family(lambda, FockTruncation{n_max});
    cfg.bias = step_bias(step);
    cfg.mode_frequency = mode_frequency;
    cfg.drive = drive_from_flux(photon_flux, kappa_c);
    cfg.env = EnvParams{kappa_env(), 0.0};
    cfg.include_lamb_shift = include_lamb_shift;
    cfg.n_max_ceiling = n_max_ceiling;
    return cfg;
}

DetectorModel build_detector_model(const TunnelJunction& junction,
                                   double mode_frequency_hz, double kappa_c,
                                   double kappa_i, double lambda,
                                   const IvGrid& grid, Exec exec) {
    junction.validate();
    DetectorModel model;
    model.junction = junction;
    const IvCurve curve = tabulate_iv(junction, grid, exec);
    model.iv = curve.interpolant();
    model.iv_kk = kk_transform(curve, exec).interpolant();
    model.mode_frequency = mode_frequency_hz;
    model.kappa_c = kappa_c;
    model.kappa_i = kappa_i;
    model.lambda = lambda;
    model.r_tunnel = junction.r_tunnel;
    return model;
}

double flux_from_dbm(double power_dbm, double attenuation_db, double frequency_hz) {
    const double watts = 1e-3 * std::pow(10.0, (power_dbm - attenuation_db) / 10.0);
    return watts / (consts::hbar * consts::two_pi * frequency_hz);
}

void PowerSweepData::validate() const {
    if (step_index < 1 || step_index > 4) {
        throw std::invalid_argument("PowerSweepData: step index must be in 1..4");
    }
    if (source_powers_dbm.size() != currents.size()) {
        throw std::invalid_argument("PowerSweepData: column length mismatch");
    }
    for (std::size_t i = 1; i < source_powers_dbm.size(); ++i) {
        if (!(source_powers_dbm[i] > source_powers_dbm[i - 1])) {
            throw std::invalid_argument(
                "PowerSweepData: powers must be strictly increasing");
        }
    }
    for (double c : currents) {
        if (c < 0.0) {
            throw std::invalid_argument("PowerSweepData: currents must be >= 0");
        }
    }
}

namespace {

// dark frame: steady PAT current with the drive off, at this step's bias
double dark_frame_current(const DetectorModel& model, int step) {
    return steady_state(model.system_for(step, 0.0)).i_pat;
}

} // namespace

PowerSweepData simulate_power_sweep(const DetectorModel& model, int step,
                                    const std::vector<double>& source_powers_dbm,
                                    double attenuation_db, Exec exec) {
    PowerSweepData data;
    data.step_index = step;
    data.source_powers_dbm = source_powers_dbm;
    data.bias = model.step_bias(step);
    data.currents.assign(source_powers_dbm.size(), 0.0);
    if (source_powers_dbm.empty()) {
        return data;
    }
    const double dark = dark_frame_current(model, step);
    parallel_for(std::ptrdiff_t(source_powers_dbm.size()), exec,
                 [&](std::ptrdiff_t i) {
                     const double flux =
                         flux_from_dbm(source_powers_dbm[std::size_t(i)],
                                       attenuation_db, model.mode_frequency);
                     const auto ss = steady_state(model.system_for(step, flux));
                     data.currents[std::size_t(i)] = ss.i_pat - dark;
                 });
    return data;
}

PowerSweepData synthesize_power_sweep(const DetectorModel& model, int step,
                                      const std::vector<double>& source_powers_dbm,
                                      double attenuation_db, const NoiseModel& noise,
                                      GaussianSampler& rng, Exec exec) {
    PowerSweepData data =
        simulate_power_sweep(model, step, source_powers_dbm, attenuation_db, exec);
    for (double& c : data.currents) {
        c = c * (1.0 + noise.fraction * rng.next()) + noise.floor * rng.next();
        c = std::max(0.0, c);
    }
    return data;
}

double chi2_of_attenuation(const DetectorModel& model,
                           const std::vector<PowerSweepData>& data,
                           const FitConfig& cfg, double attenuation_db, Exec exec) {
    double chi2 = 0.0;
    for (const auto& sweep : data) {
        const PowerSweepData sim = simulate_power_sweep(
            model, sweep.step_index, sweep.source_powers_dbm, attenuation_db, exec);
        for (std::size_t i = 0; i < sweep.currents.size(); ++i) {
            const double sigma =
                cfg.sigma.floor + cfg.sigma.fraction * std::abs(sweep.currents[i]);
            const double r = (sim.currents[i] - sweep.currents[i]) / sigma;
            chi2 += r * r;
        }
    }
    return chi2;
}

double linear_efficiency_probe(const DetectorModel& model) {
    constexpr double probe_flux = 1e6; // deep linear regime
    const double dark = dark_frame_current(model, 1);
    const auto ss = steady_state(model.system_for(1, probe_flux));
    return (ss.i_pat - dark) / (kE * probe_flux);
}

double linear_efficiency_formula(const DetectorModel& model) {
    PchipInterpolant scaled = model.iv;
    scaled.set_scale(model.junction.r_tunnel / model.r_tunnel);
    const double kj = kappa_j_linear(model.lambda, scaled, model.step_bias(1),
                                     model.mode_frequency);
    return absorption_and_efficiency({model.kappa_c, model.kappa_i, kj}).second;
}

FitResult fit_attenuation(const DetectorModel& model,
                          const std::vector<PowerSweepData>& data,
                          const FitConfig& cfg, Exec exec) {
    if (data.size() < 2) {
        throw std::invalid_argument("fit_attenuation: need at least 2 sweeps");
    }
    std::size_t n_points = 0;
    for (const auto& sweep : data) {
        sweep.validate();
        if (sweep.source_powers_dbm.size() < 2) {
            throw std::invalid_argument(
                "fit_attenuation: degenerate sweep with < 2 powers");
        }
        n_points += sweep.currents.size();
    }

    DetectorModel active = model;
    auto fit_a_only = [&](const DetectorModel& m) {
        return minimize_scalar(
            [&](double a) { return chi2_of_attenuation(m, data, cfg, a, exec); },
            cfg.a_lo, cfg.a_hi, cfg.brent_bits);
    };

    double best_a, best_chi2;
    int n_free = 1;
    if (!cfg.release_shape) {
        std::tie(best_a, best_chi2) = fit_a_only(active);
    } else {
        n_free = 3;
        std::tie(best_a, best_chi2) = fit_a_only(active);
        for (int cycle = 0; cycle < cfg.max_cycles; ++cycle) {
            const double previous = best_chi2;
            auto [lam, c1] = minimize_scalar(
                [&](double l) {
                    DetectorModel m = active;
                    m.lambda = l;
                    return chi2_of_attenuation(m, data, cfg, best_a, exec);
                },
                cfg.lambda_lo, cfg.lambda_hi, cfg.brent_bits);
            active.lambda = lam;
            auto [rt, c2] = minimize_scalar(
                [&](double r) {
                    DetectorModel m = active;
                    m.r_tunnel = r;
                    return chi2_of_attenuation(m, data, cfg, best_a, exec);
                },
                cfg.rt_lo, cfg.rt_hi, cfg.brent_bits);
            active.r_tunnel = rt;
            std::tie(best_a, best_chi2) = fit_a_only(active);
            (void)c1;
            (void)c2;
            if (previous - best_chi2 < 1e-3 * (1.0 + best_chi2)) {
                break;
            }
        }
    }
    if (!std::isfinite(best_chi2)) {
        throw std::runtime_error("fit_attenuation: objective did not converge");
    }

    FitResult result;
    result.attenuation_db = best_a;
    result.chi2_reduced =
        best_chi2 / double(n_points > std::size_t(n_free) ? n_points - n_free : 1);
    result.quantum_efficiency = linear_efficiency_probe(active);
    result.free_params["lambda"] = active.lambda;
    result.free_params["r_tunnel"] = active.r_tunnel;
    return result;
}

const Chi2Cell& Chi2Surface::at(std::size_t i_lambda, std::size_t i_rt) const {
    return cells.at(i_lambda * rt_grid.size() + i_rt);
}

std::vector<const Chi2Cell*> Chi2Surface::region() const {
    std::vector<const Chi2Cell*> out;
    const double cut = 2.0 * min_chi2_reduced;
    for (const auto& c : cells) {
        if (c.valid && c.chi2_reduced <= cut) {
            out.push_back(&c);
        }
    }
    return out;
}

namespace {

double spread(const std::vector<const Chi2Cell*>& cells,
              double (*pick)(const Chi2Cell&)) {
    if (cells.size() < 2) {
        return 0.0;
    }
    double mean = 0.0;
    for (const auto* c : cells) {
        mean += pick(*c);
    }
    mean /= double(cells.size());
    double var = 0.0;
    for (const auto* c : cells) {
        const double d = pick(*c) - mean;
        var += d * d;
    }
    return std::sqrt(var / double(cells.size()));
}

} // namespace

double Chi2Surface::efficiency_spread() const {
    return spread(region(), [](const Chi2Cell& c) { return c.efficiency; });
}

double Chi2Surface::attenuation_spread() const {
    return spread(region(), [](const Chi2Cell& c) { return c.attenuation_db; });
}

double Chi2Surface::chi_uncertainty(double chi_best) const {
    return chi_best * std::log(10.0) / 10.0 * attenuation_spread();
}

std::vector<std::pair<double, double>> Chi2Surface::contour() const {
    // Andrew monotone chain over the region cell centers
    std::vector<std::pair<double, double>> pts;
    for (const auto* c : region()) {
        pts.emplace_back(c->lambda, c->r_tunnel);
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    const std::size_t n = pts.size();
    if (n < 3) {
        return pts;
    }
    auto cross = [](const std::pair<double, double>& o,
                    const std::pair<double, double>& a,
                    const std::pair<double, double>& b) {
        return (a.first - o.first) * (b.second - o.second) -
               (a.second - o.second) * (b.first - o.first);
    };
    std::vector<std::pair<double, double>> hull(2 * n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) {
            --k;
        }
        hull[k++] = pts[i];
    }
    for (std::size_t i = n - 1, t = k + 1; i-- > 0;) {
        while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) {
            --k;
        }
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

Chi2Surface chi2_surface(const DetectorModel& model,
                         const std::vector<PowerSweepData>& data,
                         const std::vector<double>& lambda_grid,
                         const std::vector<double>& rt_grid, const FitConfig& cfg,
                         Exec exec) {
    for (double l : lambda_grid) {
        if (!(l > 0.0) || l > 1.5) {
            throw std::invalid_argument("chi2_surface: lambda grid outside (0, 1.5]");
        }
    }
    for (double r : rt_grid) {
        if (!(r > 0.0)) {
            throw std::invalid_argument("chi2_surface: R_T grid must be > 0");
        }
    }
    Chi2Surface surface;
    surface.lambda_grid = lambda_grid;
    surface.rt_grid = rt_grid;
    surface.cells.assign(lambda_grid.size() * rt_grid.size(), Chi2Cell{});

    std::size_t n_points = 0;
    for (const auto& sweep : data) {
        n_points += sweep.currents.size();
    }
    const double dof = double(n_points > 1 ? n_points - 1 : 1);

    parallel_for(std::ptrdiff_t(surface.cells.size()), exec, [&](std::ptrdiff_t idx) {
        const std::size_t il = std::size_t(idx) / rt_grid.size();
        const std::size_t ir = std::size_t(idx) % rt_grid.size();
        Chi2Cell& cell = surface.cells[std::size_t(idx)];
        cell.lambda = lambda_grid[il];
        cell.r_tunnel = rt_grid[ir];
        try {
            DetectorModel m = model;
            m.lambda = cell.lambda;
            m.r_tunnel = cell.r_tunnel;
            auto [a, chi2] = minimize_scalar(
                [&](double av) {
                    return chi2_of_attenuation(m, data, cfg, av, Exec::serial);
                },
                cfg.a_lo, cfg.a_hi, cfg.brent_bits);
            cell.attenuation_db = a;
            cell.chi2_reduced = chi2 / dof;
            cell.efficiency = linear_efficiency_formula(m);
            cell.valid = true;
        } catch (const std::exception&) {
            cell.valid = false;
        }
    });

    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : surface.cells) {
        if (c.valid) {
            best = std::min(best, c.chi2_reduced);
        }
    }
    if (!std::isfinite(best)) {
        throw std::runtime_error("chi2_surface: every cell failed");
    }
    surface.min_chi2_reduced = best;
    return surface;
}

} // namespace patsim
