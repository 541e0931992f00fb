#include "patsim/fock.hpp"

#include <cmath>
#include <stdexcept>

namespace patsim {

double laguerre(int n, int l, double x) {
    if (n < 0 || l < 0) {
        throw std::invalid_argument("laguerre: need n >= 0 and l >= 0");
    }
    if (n == 0) {
        return 1.0;
    }
    double prev = 1.0;
    double cur = 1.0 + l - x;
    for (int k = 1; k < n; ++k) {
        const double next =
            ((2.0 * k + 1.0 + l - x) * cur - (k + l) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    return cur;
}

std::complex<double> jump_matrix_element(double lambda, int n, int l) {
    if (n < 0 || l < 0) {
        throw std::invalid_argument("jump_matrix_element: need n >= 0 and l >= 0");
    }
    if (lambda == 0.0) {
        return l == 0 ? 1.0 : 0.0;
    }
    const double x = lambda * lambda;
    const double log_ratio = 0.5 * (std::lgamma(n + 1.0) - std::lgamma(n + l + 1.0));
    const double mag = std::exp(log_ratio + double(l) * std::log(lambda) - 0.5 * x) *
                       laguerre(n, l, x);
    // (i)^l cycles through {1, i, -1, -i}
    static const std::complex<double> phases[4] = {
        {1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}};
    return phases[l % 4] * mag;
}

void FockTruncation::validate() const {
    if (n_max < 1) {
        throw std::invalid_argument("FockTruncation: n_max must be >= 1");
    }
}

JumpFamily build_jump_family(double lambda, FockTruncation trunc) {
    trunc.validate();
    if (lambda < 0.0) {
        throw std::invalid_argument("build_jump_family: lambda must be >= 0");
    }
    const int d = trunc.n_max + 1;
    const int lm = trunc.n_max;

    JumpFamily family;
    family.coupling = lambda;
    family.truncation = trunc;
    family.operators.assign(std::size_t(2 * lm + 1), Eigen::MatrixXcd::Zero(d, d));

    for (int l = 0; l <= lm; ++l) {
        Eigen::MatrixXcd& a = family.operators[std::size_t(l + lm)];
        for (int n = 0; n + l < d; ++n) {
            a(n + l, n) = jump_matrix_element(lambda, n, l);
        }
    }
    for (int l = 1; l <= lm; ++l) {
        const double sign = (l % 2 == 0) ? 1.0 : -1.0;
        family.operators[std::size_t(lm - l)] =
            sign * family.operators[std::size_t(lm + l)].adjoint();
    }
    return family;
}

Eigen::MatrixXcd annihilation_operator(int dim) {
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(dim, dim);
    for (int n = 1; n < dim; ++n) {
        a(n - 1, n) = std::sqrt(double(n));
    }
    return a;
}

} // namespace patsim
