#include "otfs/power.hpp"

#include <cmath>
#include <string>

namespace otfs {

PowerAllocation allocate(double snr_db, double alpha, int N_d, int N_p, int N, int M) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw ConfigError("alpha must lie strictly inside (0,1), got " + std::to_string(alpha));
    if (N_d < 1 || N_p < 1 || N < 1 || M < 1)
        throw ConfigError("symbol and grid counts must be positive");

    PowerAllocation a;
    a.snr_db = snr_db;
    a.alpha = alpha;
    a.N_d = N_d;
    a.N_p = N_p;
    a.sigma2 = 1.0;
    a.E_s = std::pow(10.0, snr_db / 10.0) * a.sigma2 * N * M;
    a.E_p = alpha * a.E_s;
    a.E_d = (1.0 - alpha) * a.E_s;
    a.sigma_d2 = a.E_d / N_d;
    a.sigma_p2 = a.E_p / N_p;
    return a;
}

double snr_db_from_energy(const PowerAllocation& a, int N, int M) {
    return 10.0 * std::log10(a.E_s / (a.sigma2 * N * M));
}

}  // namespace otfs
