// power.hpp - Unified SNR definition and data/pilot power split
//
// All schemes are compared at equal total frame energy E_s with the noise
// variance normalized to 1, so SNR = E_s / (sigma^2 * N * M). The pilot
// power ratio alpha splits E_s as E_p / E_d = alpha / (1 - alpha).

#pragma once

#include "otfs/types.hpp"

namespace otfs {

struct PowerAllocation {
    double snr_db = 0.0;
    double E_s = 0.0;       // total frame energy (linear)
    double E_p = 0.0;       // total pilot energy
    double E_d = 0.0;       // total data energy
    double alpha = 0.0;     // pilot power ratio, in (0,1)
    double sigma_d2 = 0.0;  // per data symbol power, E_d / N_d
    double sigma_p2 = 0.0;  // per pilot symbol power, E_p / N_p
    double sigma2 = 1.0;    // noise variance per symbol (normalization)
    int N_d = 0;
    int N_p = 0;
};

// Throws ConfigError for alpha outside (0,1) or non-positive symbol counts.
PowerAllocation allocate(double snr_db, double alpha, int N_d, int N_p, int N, int M);

// Inverse of the SNR definition, for round-trip checks.
double snr_db_from_energy(const PowerAllocation& a, int N, int M);

}  // namespace otfs
