// metrics.hpp - Per-point metric accumulators and rate arithmetic

#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "otfs/frame.hpp"
#include "otfs/types.hpp"

namespace otfs {

struct MetricsRecord {
    std::string scheme;
    double snr_db = 0.0;
    double alpha = 0.0;

    uint64_t bit_errors = 0;
    uint64_t bits_total = 0;
    uint64_t block_errors = 0;
    uint64_t blocks_total = 0;

    // Eq.-style NMSE keeps numerator and denominator expectations separate;
    // the per-frame ratio moments feed standard-error estimates.
    double nmse_num_sum = 0.0;
    double nmse_den_sum = 0.0;
    double nmse_ratio_sum = 0.0;
    double nmse_ratio_sq_sum = 0.0;
    uint64_t nmse_frames = 0;

    double ber_frame_sum = 0.0;
    double ber_frame_sq_sum = 0.0;

    double mults_sum = 0.0;
    double throughput = 0.0;  // filled by the harness from BLER
    uint64_t trials = 0;

    double ber() const { return bits_total ? double(bit_errors) / bits_total : 0.0; }
    double bler() const { return blocks_total ? double(block_errors) / blocks_total : 0.0; }
    double nmse() const { return nmse_den_sum > 0.0 ? nmse_num_sum / nmse_den_sum : 0.0; }
    double nmse_mean() const { return nmse_frames ? nmse_ratio_sum / nmse_frames : 0.0; }
    double mults_per_frame() const { return trials ? mults_sum / trials : 0.0; }

    double nmse_se() const {
        if (nmse_frames < 2) return 0.0;
        double m = nmse_mean();
        double var = (nmse_ratio_sq_sum / nmse_frames - m * m) * nmse_frames / (nmse_frames - 1.0);
        return std::sqrt(std::max(var, 0.0) / nmse_frames);
    }

    double ber_se() const {
        if (blocks_total < 2) return 0.0;
        double m = blocks_total ? ber_frame_sum / blocks_total : 0.0;
        double var =
            (ber_frame_sq_sum / blocks_total - m * m) * blocks_total / (blocks_total - 1.0);
        return std::sqrt(std::max(var, 0.0) / blocks_total);
    }
};

// N_d * r_c * log2(L) / (N*M), with N_d from the scheme's frame layout.
double transmission_rate(const SchemeId& scheme, int N, int M, int l_max, int k_max, double r_c,
                         int L);

// (1 - BLER) * N_d * r_c * log2(L) / (N*M).
double effective_throughput(double bler, int N_d, double r_c, int L, int NM);

// Code rate that matches a target transmission rate for the scheme.
double matched_code_rate(double target_rate, const SchemeId& scheme, int N, int M, int l_max,
                         int k_max, int L);

}  // namespace otfs
