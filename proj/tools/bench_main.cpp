#include <cmath>
#include <cstdio>
#include <cstring>
#include <vector>

#include <omp.h>

#include "patsim/calibration.hpp"
#include "patsim/constants.hpp"
#include "patsim/exec.hpp"
#include "patsim/junction.hpp"
#include "patsim/lindblad.hpp"

namespace C = patsim::consts;
using namespace patsim;

namespace {

TunnelJunction device_junction() {
    const double ueV = 1e-6 * C::electronvolt;
    return {{203 * ueV, 0.01 * ueV}, {203 * ueV, 0.01 * ueV}, 1.75e6, 0.020};
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        m = std::max(m, std::abs(a[i] - b[i]));
    }
    return m;
}

struct Timing {
    double serial_s = 0.0;
    double parallel_s = 0.0;
    double max_diff = 0.0;
};

void report(const char* name, const Timing& t) {
    std::printf("%-22s serial %8.3f s   parallel %8.3f s   speedup %5.2fx   "
                "max|diff| %.3e\n",
                name, t.serial_s, t.parallel_s, t.serial_s / t.parallel_s,
                t.max_diff);
}

} // namespace

int main(int argc, char** argv) {
    bool quick = false;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--quick") == 0) {
            quick = true;
        }
    }
    std::printf("threads: %d\n", hardware_threads());

    const TunnelJunction junction = device_junction();
    IvGrid grid;
    grid.v_max = quick ? 1.1e-3 : 2.0e-3;
    grid.step = quick ? 2.0e-6 : 0.5e-6;

    // IV tabulation: one adaptive quadrature per grid point
    Timing t_iv;
    IvCurve serial_curve, parallel_curve;
    {
        double t0 = omp_get_wtime();
        serial_curve = tabulate_iv(junction, grid, Exec::serial);
        t_iv.serial_s = omp_get_wtime() - t0;
        t0 = omp_get_wtime();
        parallel_curve = tabulate_iv(junction, grid, Exec::parallel);
        t_iv.parallel_s = omp_get_wtime() - t0;
        t_iv.max_diff = max_abs_diff(serial_curve.currents, parallel_curve.currents);
    }
    report("iv tabulation", t_iv);

    // Kramers-Kronig: O(N^2) principal-value transform
    Timing t_kk;
    {
        double t0 = omp_get_wtime();
        const IvCurve kk_serial = kk_transform(serial_curve, Exec::serial);
        t_kk.serial_s = omp_get_wtime() - t0;
        t0 = omp_get_wtime();
        const IvCurve kk_parallel = kk_transform(serial_curve, Exec::parallel);
        t_kk.parallel_s = omp_get_wtime() - t0;
        t_kk.max_diff = max_abs_diff(kk_serial.currents, kk_parallel.currents);
    }
    report("kramers-kronig", t_kk);

    // steady-state batch: one dense solve per drive power
    Timing t_sweep;
    {
        DetectorModel model =
            build_detector_model(junction, 5.525e9, C::two_pi * 75e6,
                                 C::two_pi * 9.5e6, 0.79, grid, Exec::parallel);
        std::vector<double> powers;
        const int n_powers = quick ? 6 : 12;
        for (int i = 0; i < n_powers; ++i) {
            powers.push_back(-18.0 + 0.75 * i); // source dBm at 107 dB attenuation
        }
        double t0 = omp_get_wtime();
        const auto serial_sweep =
            simulate_power_sweep(model, 1, powers, 107.0, Exec::serial);
        t_sweep.serial_s = omp_get_wtime() - t0;
        t0 = omp_get_wtime();
        const auto parallel_sweep =
            simulate_power_sweep(model, 1, powers, 107.0, Exec::parallel);
        t_sweep.parallel_s = omp_get_wtime() - t0;
        t_sweep.max_diff = max_abs_diff(serial_sweep.currents, parallel_sweep.currents);
    }
    report("steady-state sweep", t_sweep);

    return 0;
}
