#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace patsim {

// Shape-preserving monotone cubic interpolant (Fritsch-Carlson slopes).
// Knots must be strictly increasing. Evaluation outside the knot span throws.
class PchipInterpolant {
public:
    PchipInterpolant() = default;
    PchipInterpolant(std::span<const double> x, std::span<const double> y);

    double operator()(double x) const;
    double min_x() const { return x_.empty() ? 0.0 : x_.front(); }
    double max_x() const { return x_.empty() ? 0.0 : x_.back(); }
    bool empty() const { return x_.empty(); }

    // multiplies all values on evaluation; used to rescale tabulated
    // currents when only the tunnel resistance prefactor changes
    void set_scale(double s) { scale_ = s; }
    double scale() const { return scale_; }

private:
    std::vector<double> x_, y_, d_; // knots, values, knot slopes
    double scale_ = 1.0;
};

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
};

// Integrates f over [a, b] split at the given interior breakpoints, with a
// tanh-sinh rule per panel (nodes cluster at panel edges, where the
// integrable peaks sit). Breakpoints outside (a, b) are ignored.
QuadratureResult integrate_panels(const std::function<double(double)>& f,
                                  double a, double b,
                                  std::span<const double> breakpoints,
                                  double rel_tol = 1e-9);

// Scalar bounded minimization (Brent). Returns {x_min, f(x_min)}.
std::pair<double, double> minimize_scalar(const std::function<double(double)>& f,
                                          double lo, double hi, int bits = 30);

// Root of f on a sign-changing bracket [lo, hi] (TOMS 748).
double find_root(const std::function<double(double)>& f, double lo, double hi);

// FNV-1a 64-bit hash; used to stamp output files with the resolved config.
std::uint64_t fnv1a64(std::string_view data);

// Deterministic standard-normal stream: mt19937_64 + polar Box-Muller,
// pinned here so synthetic data does not depend on the stdlib's
// normal_distribution implementation.
class GaussianSampler {
public:
    explicit GaussianSampler(std::uint64_t seed) : engine_(seed) {}
    double next();

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace patsim
