// config.hpp - Link configuration, file parsing, validation
//
// Config files are plain `key = value` text (TOML-like subset: numbers,
// strings, booleans, [lists], # comments). CLI flags override file values.

#pragma once

#include <cstdint>
#include <string>

#include "otfs/constellation.hpp"
#include "otfs/frame.hpp"
#include "otfs/receiver.hpp"
#include "otfs/types.hpp"

namespace otfs {

struct LinkConfig {
    int N = 15;
    int M = 15;
    double delta_f = 15e3;  // Hz
    double f_c = 4e9;       // Hz
    int l_max = 4;
    int k_max = 2;
    int P = 4;
    ConstellationId modulation = ConstellationId::QPSK;
    double r_c = 0.75;
    SchemeId scheme{SchemeKind::SP, 9};
    IterationPlan plan{0, 4};
    int I_MP = 15;
    int I_LDPC = 20;
    double mp_damping = 0.6;
    double mp_conv_tol = 1e-6;
    double logit_clip = 30.0;
    std::vector<double> snr_grid = {10.0};
    double alpha = 0.5;
    bool alpha_auto = false;
    int alpha_trials = 200;  // frames per candidate in the grid search
    int trials = 200;
    uint64_t seed = 1;
    bool pcsi = false;
    bool strict_unnormalized_pmf = false;
    int threads = 1;
    std::string code_file = "auto";
    std::string alpha_cache;  // CSV cache path; empty disables persistence

    int NM() const { return N * M; }
    int N_d() const { return data_capacity(scheme, N, M, l_max, k_max); }
    MpConfig mp_config() const { return {I_MP, mp_damping, mp_conv_tol, logit_clip}; }
};

LinkConfig parse_config_file(const std::string& path);

// Throws ConfigError describing the first violated constraint.
void validate(const LinkConfig& cfg);

}  // namespace otfs
