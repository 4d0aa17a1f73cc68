#include "otfs/receiver.hpp"

#include <cmath>
#include <ostream>

#include <json.hpp>

namespace otfs {

namespace {

// y - H*x counting 4 real multiplications per touched nonzero.
CVec subtract_sparse_product(const CVec& y, const SparseCMat& H, const CVec& x,
                             uint64_t* mults) {
    CVec out = y;
    uint64_t used = 0;
    for (const auto& e : H.entries()) {
        if (x[e.c] == Complex(0.0, 0.0)) continue;
        out[e.r] -= e.v * x[e.c];
        ++used;
    }
    if (mults) *mults += 4 * used;
    return out;
}

double stable_log_sigmoid(double x) {
    // log(1/(1+exp(-x))) without overflow.
    if (x >= 0.0) return -std::log1p(std::exp(-x));
    return x - std::log1p(std::exp(x));
}

}  // namespace

FrameMeta layout_of(const DDFrame& frame) {
    return {frame.M(), frame.N(), frame.scheme, frame.pilot_positions, frame.x_p,
            frame.data_positions};
}

CVec cancel_pilots(const CVec& y, const SparseCMat& H_hat, const CVec& x_p_vec, OpCounts* ops) {
    return subtract_sparse_product(y, H_hat, x_p_vec, ops ? &ops->pilot_cancel : nullptr);
}

CVec cancel_data(const CVec& y, const SparseCMat& H_hat, const CVec& x_d_hat, OpCounts* ops) {
    return subtract_sparse_product(y, H_hat, x_d_hat, ops ? &ops->data_cancel : nullptr);
}

std::vector<double> llrs_to_symbol_logits(const std::vector<double>& llr_out,
                                          const Constellation& constellation,
                                          const std::vector<int>& data_positions, int NM,
                                          OpCounts* ops) {
    const int L = constellation.L;
    const int K = constellation.bits;
    // Uniform rows (all-zero LLRs give K * log(1/2)) keep exp-rows normalized.
    std::vector<double> Z(static_cast<size_t>(NM) * L, K * std::log(0.5));
    for (size_t i = 0; i < data_positions.size(); ++i) {
        const double* llr = &llr_out[i * K];
        double* row = &Z[static_cast<size_t>(data_positions[i]) * L];
        for (int j = 0; j < L; ++j) {
            double acc = 0.0;
            for (int k = 0; k < K; ++k) {
                double b = constellation.bit_of(j, k) == 0 ? 1.0 : -1.0;  // labels with 0 -> +1
                acc += stable_log_sigmoid(llr[k] * b);
            }
            row[j] = acc;
        }
    }
    if (ops) ops->llr_to_logits += 2ull * data_positions.size() * L * K;
    return Z;
}

std::vector<double> logits_to_pmf(const std::vector<double>& Z, int L, bool normalize,
                                  OpCounts* ops) {
    std::vector<double> pmf(Z.size());
    for (size_t i = 0; i < Z.size(); ++i) pmf[i] = 1.0 / (1.0 + std::exp(-Z[i]));
    if (normalize) {
        for (size_t r = 0; r < pmf.size() / L; ++r) {
            double s = 0.0;
            for (int j = 0; j < L; ++j) s += pmf[r * L + j];
            if (s > 0.0)
                for (int j = 0; j < L; ++j) pmf[r * L + j] /= s;
        }
    }
    if (ops) ops->logits_to_pmf += 2ull * Z.size();
    return pmf;
}

CVec generate_replicas(const std::vector<double>& pmf, const Constellation& constellation,
                       const std::vector<int>& data_positions, int NM, OpCounts* ops) {
    const int L = constellation.L;
    CVec x(NM, Complex(0.0, 0.0));
    for (int pos : data_positions) {
        Complex acc(0.0, 0.0);
        const double* row = &pmf[static_cast<size_t>(pos) * L];
        for (int j = 0; j < L; ++j) acc += row[j] * constellation.points[j];
        x[pos] = acc;
    }
    if (ops) ops->replica += 2ull * data_positions.size() * L;
    return x;
}

ReceiverResult run_receiver(const CVec& y, const ReceiverContext& ctx) {
    if (!ctx.plan.valid()) throw ConfigError("invalid iteration plan");
    if (ctx.code == nullptr) throw ConfigError("run_receiver needs a code");
    if (ctx.pcsi && ctx.true_channel == nullptr)
        throw ConfigError("PCSI mode needs the true channel");

    const FrameMeta& meta = ctx.meta;
    const int NM = meta.M * meta.N;
    const int N_p = static_cast<int>(meta.pilot_positions.size());
    CVec x_p_vec(NM, Complex(0.0, 0.0));
    for (auto [mp, np] : meta.pilot_positions) x_p_vec[vec_index(mp, np, meta.M)] = meta.x_p;

    ReceiverResult res;
    CVec pilot_obs = y;  // refreshed by data cancellation each round
    SparseCMat H_hat(NM, NM);
    H_hat.finalize();
    std::optional<DecodeResult> last_decode;
    std::optional<MpResult> last_mp;

    for (int r = 1; r <= ctx.plan.r_end(); ++r) {
        IterationRecord rec;
        rec.r = r;
        rec.mode = r <= ctx.plan.r_unc ? IterationMode::Uncoded : IterationMode::Coded;

        // (a) channel estimation from the current pilot observation
        if (ctx.pcsi) {
            H_hat = ctx.true_channel->dd_matrix();
            rec.P_hat = ctx.true_channel->P();
        } else {
            rec.threshold = threshold_for(meta.scheme, r - 1, ctx.sigma2, ctx.sigma_d2, N_p);
            Grid Y(meta.M, meta.N);
            Y.v = pilot_obs;
            auto detected = detect_paths(Y, meta.pilot_positions, rec.threshold, ctx.l_max,
                                         ctx.k_max, &rec.ops);
            if (detected.empty() && r == 1) {
                // Nothing to hand the detector: erase the frame.
                res.erased = true;
                res.trace.erased = true;
                std::vector<double> zeros(ctx.code->R_c(), 0.0);
                DecodeResult dec = decode(*ctx.code, zeros, ctx.I_LDPC, ctx.mp.logit_clip, &rec.ops);
                rec.decoder_ran = true;
                rec.decoder_converged = dec.converged;
                rec.nmse = 1.0;  // H_hat == 0
                res.bits = std::move(dec.bits);
                res.trace.records.push_back(std::move(rec));
                res.H_hat = std::move(H_hat);
                return res;
            }
            if (!detected.empty()) {
                auto est = estimate_gains(Y, meta.pilot_positions, detected, meta.x_p, meta.scheme,
                                          &rec.ops);
                H_hat = effective_dd_matrix(est.paths, meta.N, meta.M);
            }
            // Empty detection after the first round keeps the previous estimate.
            rec.P_hat = static_cast<int>(detected.size());
        }

        if (ctx.true_channel != nullptr) {
            auto v = nmse(H_hat, ctx.true_channel->dd_matrix());
            rec.nmse = v.value_or(0.0);
        }

        // (b) pilot cancellation, (c) MP detection
        CVec y_d = cancel_pilots(y, H_hat, x_p_vec, &rec.ops);
        MpResult mp = mp_detect(y_d, H_hat, meta.data_positions, ctx.constellation, ctx.sigma2,
                                ctx.mp, &rec.ops);
        rec.mp_sweeps = mp.sweeps;

        CVec x_d_hat;
        if (rec.mode == IterationMode::Uncoded) {
            x_d_hat = mp.hard_symbols;
        } else {
            auto llr = beliefs_to_bit_llrs(mp.beliefs, meta.data_positions, ctx.constellation,
                                           ctx.mp.logit_clip);
            DecodeResult dec = decode(*ctx.code, llr, ctx.I_LDPC, ctx.mp.logit_clip, &rec.ops);
            rec.decoder_ran = true;
            rec.decoder_converged = dec.converged;
            auto Z = llrs_to_symbol_logits(dec.llr_out, ctx.constellation, meta.data_positions,
                                           NM, &rec.ops);
            auto pmf = logits_to_pmf(Z, ctx.constellation.L, !ctx.strict_unnormalized_pmf,
                                     &rec.ops);
            x_d_hat = generate_replicas(pmf, ctx.constellation, meta.data_positions, NM, &rec.ops);
            last_decode = std::move(dec);
        }
        last_mp = std::move(mp);

        // (d) data cancellation refreshes the pilot observation
        pilot_obs = cancel_data(y, H_hat, x_d_hat, &rec.ops);
        res.trace.records.push_back(std::move(rec));
    }

    if (!last_decode.has_value()) {
        // All-uncoded plan: terminal decode folded into the last record.
        auto llr = beliefs_to_bit_llrs(last_mp->beliefs, meta.data_positions, ctx.constellation,
                                       ctx.mp.logit_clip);
        auto& rec = res.trace.records.back();
        DecodeResult dec = decode(*ctx.code, llr, ctx.I_LDPC, ctx.mp.logit_clip, &rec.ops);
        rec.decoder_ran = true;
        rec.decoder_converged = dec.converged;
        last_decode = std::move(dec);
    }

    res.bits = std::move(last_decode->bits);
    res.H_hat = std::move(H_hat);
    return res;
}

void write_trace_jsonl(const ReceiverTrace& trace, int frame_index, std::ostream& out) {
    for (const auto& rec : trace.records) {
        nlohmann::json j;
        j["frame"] = frame_index;
        j["r"] = rec.r;
        j["mode"] = rec.mode == IterationMode::Uncoded ? "uncoded" : "coded";
        j["threshold"] = rec.threshold;
        j["p_hat"] = rec.P_hat;
        j["nmse"] = rec.nmse;
        j["erased"] = trace.erased;
        j["decoder_ran"] = rec.decoder_ran;
        j["decoder_converged"] = rec.decoder_converged;
        j["mp_sweeps"] = rec.mp_sweeps;
        j["mults"] = {{"estimation", rec.ops.estimation},
                      {"pilot_cancel", rec.ops.pilot_cancel},
                      {"mp_detect", rec.ops.mp_detect},
                      {"ldpc_decode", rec.ops.ldpc_decode},
                      {"llr_to_logits", rec.ops.llr_to_logits},
                      {"logits_to_pmf", rec.ops.logits_to_pmf},
                      {"replica", rec.ops.replica},
                      {"data_cancel", rec.ops.data_cancel}};
        out << j.dump() << "\n";
    }
}

}  // namespace otfs
