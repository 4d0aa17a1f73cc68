// estimator.hpp - Threshold-based joint path detection and gain estimation
//
// Shared by the EP and SP schemes: a path at (l, k) is declared present when
// the summed received magnitude over all pilots' image cells reaches the
// threshold, and its gain is the phase-derotated average over those cells.
// With several superimposed pilots the averaging cancels data interference
// and refines the estimate at the same time.

#pragma once

#include <optional>

#include "otfs/channel.hpp"
#include "otfs/frame.hpp"
#include "otfs/opcount.hpp"
#include "otfs/sparse.hpp"
#include "otfs/types.hpp"

namespace otfs {

struct ChannelEstimate {
    std::vector<PathTap> paths;  // (h_hat, l_hat, k_hat)
    double threshold_used = 0.0;
    SchemeId scheme;

    int P_hat() const { return static_cast<int>(paths.size()); }
};

// Scan l in [0, l_max], k in [-k_max, k_max] with cyclic indexing and return
// every lattice point whose summed magnitude over pilots meets `threshold`.
std::vector<std::pair<int, int>> detect_paths(const Grid& Y,
                                              const std::vector<std::pair<int, int>>& pilots,
                                              double threshold, int l_max, int k_max,
                                              OpCounts* ops = nullptr);

// Gain per detected tap: average of Y[m_pj + l, n_pj + k] / z^{k m_pj} / x_p
// over the pilots.
ChannelEstimate estimate_gains(const Grid& Y, const std::vector<std::pair<int, int>>& pilots,
                               const std::vector<std::pair<int, int>>& detected, Complex x_p,
                               const SchemeId& scheme, OpCounts* ops = nullptr);

// Detection threshold. stage refers to the receiver iteration the estimate
// feeds (0 = first pass); EP ignores it.
double threshold_for(const SchemeId& scheme, int stage, double sigma2, double sigma_d2, int N_p);

// Per-realization ||H_hat - H||_F^2 / ||H||_F^2; the harness accumulates
// numerator and denominator separately across trials. Returns nullopt when
// ||H||_F == 0 (missing sample).
std::optional<double> nmse(const SparseCMat& H_hat, const SparseCMat& H);

}  // namespace otfs
