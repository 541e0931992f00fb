#include "patsim/junction.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>

#include "patsim/constants.hpp"

namespace patsim {

namespace {
constexpr double kE = consts::elementary_charge;
constexpr double kKb = consts::boltzmann;
} // namespace

void DynesDos::validate() const {
    if (!(gap > 0.0)) {
        throw std::invalid_argument("DynesDos: gap must be > 0");
    }
    if (!(dynes > 0.0)) {
        throw std::invalid_argument("DynesDos: dynes parameter must be > 0");
    }
}

void TunnelJunction::validate() const {
    dos_left.validate();
    dos_right.validate();
    if (!(r_tunnel > 0.0)) {
        throw std::invalid_argument("TunnelJunction: r_tunnel must be > 0");
    }
    if (temperature < 0.0) {
        throw std::invalid_argument("TunnelJunction: temperature must be >= 0");
    }
}

double dos_value(const DynesDos& dos, double energy) {
    const std::complex<double> z(energy, dos.dynes);
    const std::complex<double> w = std::sqrt(z * z - dos.gap * dos.gap);
    return std::abs(std::real(z / w));
}

namespace {

// f(E) - f(E + eV) without cancellation blowup; T = 0 gives the sharp window
double fermi_window(double e, double ev, double temperature) {
    if (temperature <= 0.0) {
        if (e > -ev && e < 0.0) return 1.0;
        return (e == -ev || e == 0.0) ? 0.5 : 0.0;
    }
    const double kt2 = 2.0 * kKb * temperature;
    return 0.5 * (std::tanh((e + ev) / kt2) - std::tanh(e / kt2));
}

double qp_current_positive(const TunnelJunction& j, double bias) {
    const double ev = kE * bias;
    const double dl = j.dos_left.gap;
    const double dr = j.dos_right.gap;
    const double kt = kKb * j.temperature;

    auto integrand = [&](double e) {
        return dos_value(j.dos_left, e) * dos_value(j.dos_right, e + ev) *
               fermi_window(e, ev, j.temperature);
    };

    double lo, hi;
    if (j.temperature <= 0.0) {
        lo = -ev;
        hi = 0.0;
    } else {
        const double margin =
            45.0 * kt + 5.0 * (j.dos_left.dynes + j.dos_right.dynes) + 0.02e-6 * kE;
        lo = -ev - margin;
        hi = margin;
    }
    // DOS peaks and Fermi edges become panel edges
    const double breaks[] = {-dl, dl, -ev - dr, -ev + dr, 0.0, -ev};
    const auto q = integrate_panels(integrand, lo, hi, breaks, 1e-9);

    const double current = q.value / (kE * j.r_tunnel);
    const double err = q.error_estimate / (kE * j.r_tunnel);
    const double abs_tol = 1e-4 * bias / j.r_tunnel;
    if (!(err <= abs_tol) || !std::isfinite(current)) {
        char msg[160];
        std::snprintf(msg, sizeof msg,
                      "qp_current: quadrature reached %.3e A, needed %.3e A "
                      "at V = %.6e V",
                      err, abs_tol, bias);
        throw QuadratureError(msg, err);
    }
    return current;
}

} // namespace

double qp_current(const TunnelJunction& junction, double bias) {
    junction.validate();
    if (bias == 0.0) {
        return 0.0;
    }
    const double sign = bias > 0.0 ? 1.0 : -1.0;
    return sign * qp_current_positive(junction, std::abs(bias));
}

PchipInterpolant IvCurve::interpolant() const {
    return PchipInterpolant(voltages, currents);
}

IvCurve tabulate_iv(const TunnelJunction& junction, const IvGrid& grid,
                    Exec exec) {
    junction.validate();
    if (!(grid.v_max > 0.0) || !(grid.step > 0.0) || grid.step > grid.v_max) {
        throw std::invalid_argument("tabulate_iv: invalid grid");
    }
    const std::ptrdiff_t n_pos = std::ptrdiff_t(std::llround(grid.v_max / grid.step));

    std::vector<double> pos(std::size_t(n_pos) + 1, 0.0);
    parallel_for(n_pos, exec, [&](std::ptrdiff_t k) {
        const double v = double(k + 1) * grid.step;
        pos[std::size_t(k) + 1] = qp_current(junction, v);
    });

    IvCurve curve;
    curve.kind = IvKind::direct;
    curve.gap = junction.dos_left.gap;
    curve.dynes = junction.dos_left.dynes;
    curve.r_tunnel = junction.r_tunnel;
    curve.temperature = junction.temperature;
    curve.voltages.resize(2 * std::size_t(n_pos) + 1);
    curve.currents.resize(2 * std::size_t(n_pos) + 1);
    for (std::ptrdiff_t k = -n_pos; k <= n_pos; ++k) {
        const std::size_t i = std::size_t(k + n_pos);
        curve.voltages[i] = double(k) * grid.step;
        curve.currents[i] = k >= 0 ? pos[std::size_t(k)] : -pos[std::size_t(-k)];
    }
    return curve;
}

IvCurve kk_transform(const IvCurve& curve, Exec exec) {
    if (curve.kind != IvKind::direct) {
        throw std::invalid_argument("kk_transform: input must be a direct curve");
    }
    const std::size_t n = curve.voltages.size();
    if (n < 8) {
        throw std::invalid_argument("kk_transform: curve too short");
    }
    const double span = std::min(-curve.voltages.front(), curve.voltages.back());
    const double required = 5.0 * (curve.gap + curve.gap) / (2.0 * kE);
    if (span < required) {
        char msg[160];
        std::snprintf(msg, sizeof msg,
                      "kk_transform: tabulation half-span %.3e V insufficient, "
                      "need >= %.3e V for this gap",
                      span, required);
        throw std::invalid_argument(msg);
    }

    const auto& x = curve.voltages;
    const auto& y = curve.currents;

    // affine background from the outer 10% of each end (ordinary LS);
    // a global affine piece has no principal-value transform and is gauge
    std::size_t n_tail = std::max<std::size_t>(3, n / 10);
    double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    auto accumulate = [&](std::size_t i) {
        sw += 1.0;
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    };
    for (std::size_t i = 0; i < n_tail; ++i) accumulate(i);
    for (std::size_t i = n - n_tail; i < n; ++i) accumulate(i);
    const double det = sw * sxx - sx * sx;
    const double slope = (sw * sxy - sx * sy) / det;
    const double offset = (sxx * sy - sx * sxy) / det;

    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) {
        g[i] = y[i] - offset - slope * x[i];
    }
    // derivative of the deviation, for the regularized kernel at s = x_i
    std::vector<double> gp(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t a = i == 0 ? 0 : i - 1;
        const std::size_t b = i == n - 1 ? n - 1 : i + 1;
        gp[i] = (g[b] - g[a]) / (x[b] - x[a]);
    }
    // trapezoid weights
    std::vector<double> w(n);
    w[0] = 0.5 * (x[1] - x[0]);
    w[n - 1] = 0.5 * (x[n - 1] - x[n - 2]);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        w[i] = 0.5 * (x[i + 1] - x[i - 1]);
    }

    IvCurve out;
    out.kind = IvKind::kramers_kronig;
    out.voltages = curve.voltages;
    out.currents.assign(n, 0.0);
    out.gap = curve.gap;
    out.dynes = curve.dynes;
    out.r_tunnel = curve.r_tunnel;
    out.temperature = curve.temperature;

    // H[g](x_i) = (1/pi) [ Int (g(s)-g(x_i))/(x_i-s) ds
    //                      + g(x_i) ln((x_i-a)/(b-x_i)) ]
    parallel_for(std::ptrdiff_t(n), exec, [&](std::ptrdiff_t ii) {
        const std::size_t i = std::size_t(ii);
        const double xi = x[i];
        double acc = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double reg = (k == i) ? -gp[i] : (g[k] - g[i]) / (xi - x[k]);
            acc += w[k] * reg;
        }
        if (i > 0 && i + 1 < n) {
            acc += g[i] * std::log((xi - x.front()) / (x.back() - xi));
        }
        out.currents[i] = acc / consts::pi;
    });
    return out;
}

double renormalized_resistance(double r_measured,
                               std::span<const double> higher_mode_couplings) {
    if (!(r_measured > 0.0)) {
        throw std::invalid_argument("renormalized_resistance: r_measured must be > 0");
    }
    double sum = 0.0;
    for (double lam : higher_mode_couplings) {
        if (lam < 0.0) {
            throw std::invalid_argument(
                "renormalized_resistance: couplings must be >= 0");
        }
        sum += lam * lam;
    }
    return r_measured * std::exp(sum);
}

} // namespace patsim
