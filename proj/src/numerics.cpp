#include "patsim/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/toms748_solve.hpp>

namespace patsim {

PchipInterpolant::PchipInterpolant(std::span<const double> x,
                                   std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw std::invalid_argument("pchip: need >= 2 matching knots");
    }
    for (std::size_t i = 1; i < x.size(); ++i) {
        if (!(x[i] > x[i - 1])) {
            throw std::invalid_argument("pchip: knots must be strictly increasing");
        }
    }
    x_.assign(x.begin(), x.end());
    y_.assign(y.begin(), y.end());

    const std::size_t n = x_.size();
    std::vector<double> h(n - 1), delta(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = x_[i + 1] - x_[i];
        delta[i] = (y_[i + 1] - y_[i]) / h[i];
    }
    d_.assign(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (delta[i - 1] * delta[i] <= 0.0) {
            d_[i] = 0.0;
        } else {
            const double w1 = 2.0 * h[i] + h[i - 1];
            const double w2 = h[i] + 2.0 * h[i - 1];
            d_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    auto end_slope = [](double h0, double h1, double d0, double d1) {
        double d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (d * d0 <= 0.0) {
            d = 0.0;
        } else if (d0 * d1 < 0.0 && std::abs(d) > 3.0 * std::abs(d0)) {
            d = 3.0 * d0;
        }
        return d;
    };
    if (n == 2) {
        d_[0] = d_[1] = delta[0];
    } else {
        d_[0] = end_slope(h[0], h[1], delta[0], delta[1]);
        d_[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    }
}

double PchipInterpolant::operator()(double x) const {
    if (empty()) {
        throw std::logic_error("pchip: empty interpolant");
    }
    if (x < x_.front() || x > x_.back()) {
        throw std::out_of_range("pchip: evaluation outside tabulated span");
    }
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    std::size_t i = (it == x_.begin()) ? 0 : std::size_t(it - x_.begin()) - 1;
    if (i >= x_.size() - 1) {
        i = x_.size() - 2;
    }
    const double h = x_[i + 1] - x_[i];
    const double t = (x - x_[i]) / h;
    const double t2 = t * t;
    const double t3 = t2 * t;
    const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    const double h10 = t3 - 2.0 * t2 + t;
    const double h01 = -2.0 * t3 + 3.0 * t2;
    const double h11 = t3 - t2;
    return scale_ * (h00 * y_[i] + h10 * h * d_[i] + h01 * y_[i + 1] +
                     h11 * h * d_[i + 1]);
}

QuadratureResult integrate_panels(const std::function<double(double)>& f,
                                  double a, double b,
                                  std::span<const double> breakpoints,
                                  double rel_tol) {
    if (!(b > a)) {
        throw std::invalid_argument("integrate_panels: need b > a");
    }
    std::vector<double> edges;
    edges.push_back(a);
    for (double p : breakpoints) {
        if (p > a && p < b) {
            edges.push_back(p);
        }
    }
    edges.push_back(b);
    std::sort(edges.begin(), edges.end());
    // drop panels narrower than the local floating-point grain
    std::vector<double> clean;
    clean.push_back(edges.front());
    for (double e : edges) {
        const double width = e - clean.back();
        if (width > 16.0 * std::abs(e) * 1e-16 && width > 0.0) {
            clean.push_back(e);
        }
    }
    if (clean.size() < 2) {
        return {0.0, 0.0};
    }

    boost::math::quadrature::tanh_sinh<double> rule(12);
    QuadratureResult total;
    for (std::size_t i = 0; i + 1 < clean.size(); ++i) {
        double err = 0.0;
        double l1 = 0.0;
        const double v =
            rule.integrate(f, clean[i], clean[i + 1], rel_tol, &err, &l1);
        total.value += v;
        total.error_estimate += err * l1; // boost reports relative error
    }
    return total;
}

std::pair<double, double> minimize_scalar(const std::function<double(double)>& f,
                                          double lo, double hi, int bits) {
    std::uintmax_t max_iter = 200;
    return boost::math::tools::brent_find_minima(f, lo, hi, bits, max_iter);
}

double find_root(const std::function<double(double)>& f, double lo, double hi) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (flo * fhi > 0.0) {
        throw std::invalid_argument("find_root: bracket does not change sign");
    }
    boost::math::tools::eps_tolerance<double> tol(52);
    std::uintmax_t max_iter = 200;
    auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, max_iter);
    return 0.5 * (r.first + r.second);
}

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

double GaussianSampler::next() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u, v, s;
    do {
        // 53-bit uniforms in (-1, 1)
        u = 2.0 * (double(engine_() >> 11) * 0x1.0p-53) - 1.0;
        v = 2.0 * (double(engine_() >> 11) * 0x1.0p-53) - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    have_spare_ = true;
    return u * m;
}

} // namespace patsim
