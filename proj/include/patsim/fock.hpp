#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace patsim {

// generalized Laguerre polynomial L_n^(l)(x), three-term recurrence
double laguerre(int n, int l, double x);

// <n+l| A_l |n> = sqrt(n!/(n+l)!) (i lambda)^l exp(-lambda^2/2) L_n^(l)(lambda^2)
// for l >= 0; the factorial ratio is evaluated in log space.
std::complex<double> jump_matrix_element(double lambda, int n, int l);

struct FockTruncation {
    int n_max = 1; // highest Fock index kept; dimension n_max + 1

    void validate() const;
};

// Charge-displacement jump operators A_l on the truncated Fock space,
// |l| <= n_max (operators with larger |l| vanish identically there).
// A_{-l} = (-1)^l A_l^dagger by construction, never recomputed.
struct JumpFamily {
    double coupling = 0.0; // lambda
    FockTruncation truncation;
    std::vector<Eigen::MatrixXcd> operators; // index l + l_max

    int l_max() const { return truncation.n_max; }
    int dim() const { return truncation.n_max + 1; }
    const Eigen::MatrixXcd& op(int l) const {
        return operators.at(std::size_t(l + l_max()));
    }
};

JumpFamily build_jump_family(double lambda, FockTruncation trunc);

// truncated annihilation operator, a(n-1, n) = sqrt(n)
Eigen::MatrixXcd annihilation_operator(int dim);

} // namespace patsim
