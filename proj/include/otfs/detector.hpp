// detector.hpp - Message-passing symbol detection on the sparse DD factor graph
//
// Observation nodes treat the interference from every other connected symbol
// as Gaussian (mean/variance accumulated over the <= P channel neighbors),
// variable nodes exchange damped PMF messages. Produces hard decisions,
// per-symbol PMFs/logits, and per-bit LLRs for the decoder.

#pragma once

#include "otfs/constellation.hpp"
#include "otfs/opcount.hpp"
#include "otfs/sparse.hpp"
#include "otfs/types.hpp"

#include <iosfwd>

namespace otfs {

struct MpConfig {
    int max_iters = 15;
    double damping = 0.6;      // convex weight on the fresh message
    double conv_tol = 1e-6;    // early exit on max PMF change; 0 disables
    double logit_clip = 30.0;  // shared by every LLR/logit path
};

struct SoftBeliefs {
    int positions = 0;  // NM
    int L = 0;
    std::vector<double> pmf;     // row-major positions x L, rows sum to 1
    std::vector<double> logits;  // logit(pmf), clipped
    std::vector<double> llr;     // per-bit LLRs over data positions
    ConstellationId constellation = ConstellationId::QPSK;

    double& pmf_at(int i, int j) { return pmf[static_cast<size_t>(i) * L + j]; }
    double pmf_at(int i, int j) const { return pmf[static_cast<size_t>(i) * L + j]; }
};

struct MpResult {
    CVec hard_symbols;    // NM, zero at positions outside the variable set
    SoftBeliefs beliefs;
    int sweeps = 0;
    bool degenerate = false;  // empty channel matrix: uniform fallback
};

// Detect the symbols at `variables` (vec indices) from y = H x + w.
// H rows/cols outside the variable set are ignored.
MpResult mp_detect(const CVec& y, const SparseCMat& H, const std::vector<int>& variables,
                   const Constellation& constellation, double sigma2, const MpConfig& cfg,
                   OpCounts* ops = nullptr);

// Elementwise log(p / (1-p)), symmetric clip.
std::vector<double> pmf_to_logits(const std::vector<double>& pmf, double clip);

// Per-bit LLRs L[k] = log(sum of PMF mass on points with bit k == 0 over
// mass with bit k == 1), data positions only, clipped.
std::vector<double> beliefs_to_bit_llrs(const SoftBeliefs& beliefs,
                                        const std::vector<int>& data_positions,
                                        const Constellation& constellation, double clip);

// Debug CSV: one row per position with its L probabilities.
void dump_beliefs(const SoftBeliefs& beliefs, std::ostream& out);

}  // namespace otfs
