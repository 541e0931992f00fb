#include "patsim/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include <boost/numeric/odeint.hpp>
#include <boost/numeric/odeint/external/eigen/eigen.hpp>
#include <unsupported/Eigen/KroneckerProduct>

#include "patsim/constants.hpp"

namespace boost::numeric::odeint {
// the stock Eigen adapter propagates the complex scalar as the norm type
template <>
struct vector_space_norm_inf<Eigen::VectorXcd> {
    using result_type = double;
    double operator()(const Eigen::VectorXcd& v) const {
        return v.cwiseAbs().maxCoeff();
    }
};
} // namespace boost::numeric::odeint

namespace patsim {

namespace {
constexpr double kE = consts::elementary_charge;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
const std::complex<double> kI(0.0, 1.0);
} // namespace

void DriveParams::validate() const {
    if (eta < 0.0) {
        throw std::invalid_argument("DriveParams: eta must be >= 0");
    }
}

DriveParams drive_from_flux(double photon_flux, double kappa_c) {
    if (photon_flux < 0.0 || kappa_c < 0.0) {
        throw std::invalid_argument("drive_from_flux: arguments must be >= 0");
    }
    return DriveParams{std::sqrt(photon_flux * kappa_c), 0.0};
}

void EnvParams::validate() const {
    if (!(kappa_env > 0.0)) {
        throw std::invalid_argument("EnvParams: kappa_env must be > 0");
    }
    if (thermal_occupation < 0.0) {
        throw std::invalid_argument("EnvParams: thermal_occupation must be >= 0");
    }
}

double SystemConfig::photon_voltage() const {
    return consts::hbar * consts::two_pi * mode_frequency / kE;
}

void SystemConfig::validate() const {
    junction.validate();
    jumps.truncation.validate();
    drive.validate();
    env.validate();
    if (!(mode_frequency > 0.0)) {
        throw std::invalid_argument("SystemConfig: mode_frequency must be > 0");
    }
    if (iv.empty()) {
        throw std::invalid_argument("SystemConfig: missing tabulated IV curve");
    }
    if (include_lamb_shift && iv_kk.empty()) {
        throw std::invalid_argument(
            "SystemConfig: Lamb shift requested but no Kramers-Kronig tabulation");
    }
    const double reach = std::abs(bias) + jumps.l_max() * photon_voltage();
    if (reach > iv.max_x() || -reach < iv.min_x()) {
        char msg[160];
        std::snprintf(msg, sizeof msg,
                      "SystemConfig: bias +- l_max shifts reach %.3e V, outside "
                      "the tabulated span [%.3e, %.3e] V",
                      reach, iv.min_x(), iv.max_x());
        throw std::out_of_range(msg);
    }
}

namespace {

// signed shifted currents I(V - l vph), l = -l_max..l_max
std::vector<double> shifted_currents(const SystemConfig& cfg) {
    const int lm = cfg.jumps.l_max();
    const double vph = cfg.photon_voltage();
    std::vector<double> out(std::size_t(2 * lm + 1), 0.0);
    for (int l = -lm; l <= lm; ++l) {
        out[std::size_t(l + lm)] = cfg.iv(cfg.bias - l * vph);
    }
    return out;
}

void add_dissipator(Matrix& target, const Matrix& f, double rate) {
    if (rate == 0.0) {
        return;
    }
    const int d = int(f.rows());
    const Matrix id = Matrix::Identity(d, d);
    const Matrix ff = f.adjoint() * f;
    target += rate * kroneckerProduct(f.conjugate(), f);
    target -= 0.5 * rate * kroneckerProduct(id, ff);
    target -= 0.5 * rate * kroneckerProduct(ff.transpose(), id);
}

} // namespace

Eigen::MatrixXcd build_hamiltonian(const SystemConfig& cfg) {
    cfg.validate();
    const int d = cfg.jumps.dim();
    const Matrix a = annihilation_operator(d);

    Matrix h = kI * cfg.drive.eta * (a - a.adjoint());
    h -= cfg.drive.detuning * (a.adjoint() * a);

    if (cfg.include_lamb_shift) {
        // Sign pinned by the direction of the dispersive pull: the mode
        // frequency must move down when the bias approaches the absorption
        // edge from below, given the Hilbert-transform convention
        // H[1/(1+V^2)] = V/(1+V^2) used by kk_transform.
        const int lm = cfg.jumps.l_max();
        const double vph = cfg.photon_voltage();
        for (int l = -lm; l <= lm; ++l) {
            const double coeff = cfg.lamb_shift_sign *
                                 cfg.iv_kk(cfg.bias + l * vph) / (2.0 * kE);
            const Matrix& al = cfg.jumps.op(l);
            h += coeff * (al * al.adjoint());
        }
    }
    return h;
}

Liouvillian build_liouvillian(const SystemConfig& cfg) {
    cfg.validate();
    const int d = cfg.jumps.dim();
    const int lm = cfg.jumps.l_max();
    const Matrix a = annihilation_operator(d);
    const Matrix id = Matrix::Identity(d, d);
    const Matrix h = build_hamiltonian(cfg);

    const auto currents = shifted_currents(cfg);
    // jump rates must be nonnegative for a completely positive generator;
    // the clamp only touches deep-subgap arguments where |I|/e is
    // negligible against kappa_env
    std::vector<double> rates(currents.size());
    for (std::size_t i = 0; i < currents.size(); ++i) {
        rates[i] = std::max(0.0, currents[i]) / kE;
    }

    const double n_th = cfg.env.thermal_occupation;
    double scale = cfg.env.kappa_env * (1.0 + 2.0 * n_th);
    scale = std::max(scale, cfg.drive.eta);
    scale = std::max(scale, std::abs(cfg.drive.detuning));
    for (double r : rates) {
        scale = std::max(scale, r);
    }
    scale = std::max(scale, h.cwiseAbs().maxCoeff());

    Liouvillian liou;
    liou.dim = d;
    liou.rate_scale = scale;

    Matrix l = Matrix::Zero(d * d, d * d);
    const Matrix hs = h / scale;
    l -= kI * kroneckerProduct(id, hs);
    l += kI * kroneckerProduct(hs.transpose(), id);

    for (int lidx = -lm; lidx <= lm; ++lidx) {
        const double r = rates[std::size_t(lidx + lm)] / scale;
        add_dissipator(l, cfg.jumps.op(lidx), r);
    }
    add_dissipator(l, a, cfg.env.kappa_env * (1.0 + n_th) / scale);
    if (n_th > 0.0) {
        add_dissipator(l, a.adjoint(), cfg.env.kappa_env * n_th / scale);
    }
    liou.matrix = std::move(l);
    return liou;
}

StationarySolve solve_stationary(const Liouvillian& liou) {
    const int d = liou.dim;
    const int d2 = d * d;

    // bordered square system: the trace row is appended and a compensating
    // column keeps the matrix square; mu vanishes because the trace
    // functional spans the left null space of L
    Matrix a = Matrix::Zero(d2 + 1, d2 + 1);
    a.topLeftCorner(d2, d2) = liou.matrix;
    for (int n = 0; n < d; ++n) {
        a(d2, n * d + n) = 1.0;
        a(n * d + n, d2) = 1.0;
    }
    Vector b = Vector::Zero(d2 + 1);
    b(d2) = 1.0;

    Eigen::PartialPivLU<Matrix> lu(a);
    Vector x = lu.solve(b);
    const double back_err = (a * x - b).norm();
    if (!(back_err < 1e-8) || !x.allFinite()) {
        throw std::runtime_error(
            "solve_stationary: singular system beyond the trace degeneracy");
    }

    StationarySolve out;
    Matrix rho = Eigen::Map<Matrix>(x.data(), d, d);
    rho = 0.5 * (rho + rho.adjoint()).eval();   // exact steady state is Hermitian
    rho /= rho.trace().real();
    out.rho = std::move(rho);
    out.residual =
        (liou.matrix * Eigen::Map<const Vector>(out.rho.data(), d2)).norm();
    return out;
}

namespace {

SystemConfig with_truncation(const SystemConfig& cfg, int n_max) {
    if (cfg.jumps.truncation.n_max == n_max) {
        return cfg;
    }
    SystemConfig grown = cfg;
    grown.jumps = build_jump_family(cfg.jumps.coupling, FockTruncation{n_max});
    return grown;
}

double populated(const Matrix& rho, int n) { return std::real(rho(n, n)); }

} // namespace

SteadyStateResult steady_state(const SystemConfig& cfg) {
    cfg.validate();
    constexpr double guard = 1e-6;

    int n_max = cfg.jumps.truncation.n_max;
    for (;;) {
        const SystemConfig active = with_truncation(cfg, n_max);
        const Liouvillian liou = build_liouvillian(active);
        const StationarySolve sol = solve_stationary(liou);
        const int d = liou.dim;

        SteadyStateResult result;
        result.top_population = populated(sol.rho, d - 1);
        result.second_population = populated(sol.rho, d - 2);
        if (std::max(result.top_population, result.second_population) < guard) {
            result.rho = sol.rho;
            result.residual = sol.residual;
            result.n_max_used = n_max;
            double nph = 0.0;
            for (int n = 0; n < d; ++n) {
                nph += n * populated(sol.rho, n);
            }
            result.n_ph = nph;
            result.i_pat = pat_current(result, active);
            return result;
        }
        if (n_max + 4 > cfg.n_max_ceiling) {
            char msg[160];
            std::snprintf(msg, sizeof msg,
                          "steady_state: truncation guard still failing at "
                          "n_max = %d; need at least %d (ceiling %d)",
                          n_max, n_max + 4, cfg.n_max_ceiling);
            throw std::runtime_error(msg);
        }
        n_max += 4;
    }
}

double pat_current(const SteadyStateResult& result, const SystemConfig& cfg) {
    const int d = int(result.rho.rows());
    const SystemConfig active = with_truncation(cfg, d - 1);
    const auto currents = shifted_currents(active);
    const int lm = active.jumps.l_max();

    double total = 0.0;
    for (int l = -lm; l <= lm; ++l) {
        if (l == 0) {
            continue;
        }
        const Matrix& al = active.jumps.op(l);
        const double weight =
            std::real((al.adjoint() * al * result.rho).trace());
        total += currents[std::size_t(l + lm)] * weight;
    }
    return total;
}

Eigen::MatrixXcd time_evolve(const SystemConfig& cfg, const Eigen::MatrixXcd& rho0,
                             double t) {
    cfg.validate();
    const int d = cfg.jumps.dim();
    if (rho0.rows() != d || rho0.cols() != d) {
        throw std::invalid_argument("time_evolve: rho0 dimension mismatch");
    }
    if (t < 0.0) {
        throw std::invalid_argument("time_evolve: t must be >= 0");
    }
    if (t == 0.0) {
        return rho0;
    }
    const Liouvillian liou = build_liouvillian(cfg);
    Vector x = Eigen::Map<const Vector>(rho0.data(), d * d);

    const double t_end = t * liou.rate_scale; // dimensionless time
    auto rhs = [&](const Vector& v, Vector& dvdt, double) {
        dvdt = liou.matrix * v;
    };
    namespace ode = boost::numeric::odeint;
    using stepper_t = ode::runge_kutta_dopri5<Vector, double, Vector, double,
                                              ode::vector_space_algebra>;
    std::size_t steps = 0;
    try {
        steps = ode::integrate_adaptive(
            ode::make_controlled<stepper_t>(1e-12, 1e-10), rhs, x, 0.0, t_end,
            std::min(0.05, t_end / 16.0));
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("time_evolve: stepper failed: ") +
                                 e.what());
    }
    (void)steps;
    return Eigen::Map<Matrix>(x.data(), d, d);
}

int suggest_n_max(double photon_flux, double kappa_c, double kappa_env) {
    const double n_lin =
        4.0 * photon_flux * kappa_c / (kappa_env * kappa_env);
    const int n = int(std::ceil(n_lin + 6.0 * std::sqrt(n_lin + 1.0) + 4.0));
    return std::max(6, n);
}

} // namespace patsim
