// receiver.hpp - Iterative estimation / cancellation / detection receiver
//
// Per iteration: estimate the channel from the current pilot observation,
// cancel the known pilots, run MP detection, then either reuse hard symbol
// decisions (uncoded iterations) or push LLRs through the decoder and build
// soft symbol replicas (coded iterations); finally cancel the data estimate
// to refresh the pilot observation for the next round. Decoded bits always
// come from a decoder call, appended after the loop when the plan never
// entered a coded iteration.

#pragma once

#include <optional>

#include "otfs/channel.hpp"
#include "otfs/detector.hpp"
#include "otfs/estimator.hpp"
#include "otfs/frame.hpp"
#include "otfs/ldpc.hpp"
#include "otfs/types.hpp"

#include <iosfwd>

namespace otfs {

struct IterationPlan {
    int r_unc = 0;
    int r_cod = 1;

    int r_end() const { return r_unc + r_cod; }
    bool valid() const { return r_unc >= 0 && r_cod >= 0 && r_end() >= 1; }
};

enum class IterationMode { Uncoded, Coded };

struct IterationRecord {
    int r = 0;  // 1-based
    IterationMode mode = IterationMode::Uncoded;
    double threshold = 0.0;
    int P_hat = 0;
    double nmse = 0.0;  // vs the true channel, when known
    bool decoder_ran = false;
    bool decoder_converged = false;
    int mp_sweeps = 0;
    OpCounts ops;
};

struct ReceiverTrace {
    std::vector<IterationRecord> records;
    bool erased = false;
};

// Frame layout the receiver is allowed to know: everything except the data.
struct FrameMeta {
    int M = 0;
    int N = 0;
    SchemeId scheme;
    std::vector<std::pair<int, int>> pilot_positions;
    Complex x_p;
    std::vector<int> data_positions;
};

FrameMeta layout_of(const DDFrame& frame);

struct ReceiverContext {
    FrameMeta meta;
    const CodeSpec* code = nullptr;
    Constellation constellation;  // scaled to sigma_d2
    MpConfig mp;
    IterationPlan plan;
    int l_max = 0;
    int k_max = 0;
    double sigma2 = 1.0;
    double sigma_d2 = 1.0;
    int I_LDPC = 20;
    bool pcsi = false;
    bool strict_unnormalized_pmf = false;  // skip the row renormalization after Eq.-style sigmoid
    // True realization: required for PCSI, otherwise only enables NMSE tracing.
    const ChannelRealization* true_channel = nullptr;
};

struct ReceiverResult {
    std::vector<uint8_t> bits;  // decoded info bits
    ReceiverTrace trace;
    SparseCMat H_hat;           // final channel estimate
    bool erased = false;
};

// y_d = y - H_hat * x_p_vec; x_p_vec is nonzero only at pilot positions.
CVec cancel_pilots(const CVec& y, const SparseCMat& H_hat, const CVec& x_p_vec,
                   OpCounts* ops = nullptr);

// y_p = y - H_hat * x_d_hat (hard decisions or soft replicas).
CVec cancel_data(const CVec& y, const SparseCMat& H_hat, const CVec& x_d_hat,
                 OpCounts* ops = nullptr);

// Decoder LLRs -> per-symbol log probabilities, one row per grid position
// (rows outside data_positions stay uniform). Stabilized log-sigmoid sums.
std::vector<double> llrs_to_symbol_logits(const std::vector<double>& llr_out,
                                          const Constellation& constellation,
                                          const std::vector<int>& data_positions, int NM,
                                          OpCounts* ops = nullptr);

// Elementwise sigmoid; renormalizes each row to the simplex unless
// `normalize` is false.
std::vector<double> logits_to_pmf(const std::vector<double>& Z, int L, bool normalize = true,
                                  OpCounts* ops = nullptr);

// Posterior-mean symbols at data positions, zero elsewhere.
CVec generate_replicas(const std::vector<double>& pmf, const Constellation& constellation,
                       const std::vector<int>& data_positions, int NM, OpCounts* ops = nullptr);

ReceiverResult run_receiver(const CVec& y, const ReceiverContext& ctx);

// One JSON object per iteration record.
void write_trace_jsonl(const ReceiverTrace& trace, int frame_index, std::ostream& out);

}  // namespace otfs
