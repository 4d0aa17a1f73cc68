#include "otfs/detector.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace otfs {

namespace {

double clip_to(double v, double clip) { return std::max(-clip, std::min(clip, v)); }

}  // namespace

MpResult mp_detect(const CVec& y, const SparseCMat& H, const std::vector<int>& variables,
                   const Constellation& constellation, double sigma2, const MpConfig& cfg,
                   OpCounts* ops) {
    const int NM = static_cast<int>(y.size());
    const int L = constellation.L;

    MpResult res;
    res.beliefs.positions = NM;
    res.beliefs.L = L;
    res.beliefs.constellation = constellation.id;
    res.beliefs.pmf.assign(static_cast<size_t>(NM) * L, 1.0 / L);
    res.hard_symbols.assign(NM, Complex(0.0, 0.0));

    std::vector<char> is_var(NM, 0);
    for (int v : variables) is_var[v] = 1;

    // Edge list: one per (observation row, variable column) channel entry.
    struct Edge {
        int obs;
        int var;        // variable slot index
        Complex h;
        double h2;
        std::vector<double> msg;   // variable -> observation PMF
        std::vector<double> ll;    // observation -> variable log-likelihood
    };
    std::vector<int> slot_of(NM, -1);
    for (size_t s = 0; s < variables.size(); ++s) slot_of[variables[s]] = static_cast<int>(s);

    std::vector<Edge> edges;
    std::vector<std::vector<int>> obs_edges(NM), var_edges(variables.size());
    for (const auto& e : H.entries()) {
        if (slot_of[e.c] < 0) continue;
        Edge ed;
        ed.obs = e.r;
        ed.var = slot_of[e.c];
        ed.h = e.v;
        ed.h2 = std::norm(e.v);
        ed.msg.assign(L, 1.0 / L);
        ed.ll.assign(L, 0.0);
        obs_edges[e.r].push_back(static_cast<int>(edges.size()));
        var_edges[ed.var].push_back(static_cast<int>(edges.size()));
        edges.push_back(std::move(ed));
    }

    if (edges.empty()) {
        res.degenerate = true;
        res.beliefs.logits = pmf_to_logits(res.beliefs.pmf, cfg.logit_clip);
        return res;
    }

    std::vector<double> point_p2(L);
    for (int j = 0; j < L; ++j) point_p2[j] = std::norm(constellation.points[j]);

    const size_t nvar = variables.size();
    std::vector<double> final_pmf(nvar * L, 1.0 / L);
    std::vector<double> prev_pmf = final_pmf;
    std::vector<Complex> edge_mean(edges.size());
    std::vector<double> edge_var(edges.size());
    std::vector<double> total_ll(nvar * L);

    int sweep = 0;
    for (sweep = 0; sweep < cfg.max_iters; ++sweep) {
        // Per-edge mean and variance of the transmitted symbol under the
        // current variable -> observation message.
        for (auto& ed : edges) {
            Complex mean(0.0, 0.0);
            double p2 = 0.0;
            for (int j = 0; j < L; ++j) {
                mean += ed.msg[j] * constellation.points[j];
                p2 += ed.msg[j] * point_p2[j];
            }
            edge_mean[&ed - edges.data()] = mean;
            edge_var[&ed - edges.data()] = std::max(p2 - std::norm(mean), 0.0);
        }

        // Observation side: Gaussian interference with the target symbol
        // excluded by subtracting its contribution from the row totals.
        for (int d = 0; d < NM; ++d) {
            if (obs_edges[d].empty()) continue;
            Complex mu_all(0.0, 0.0);
            double var_all = sigma2;
            for (int ei : obs_edges[d]) {
                mu_all += edges[ei].h * edge_mean[ei];
                var_all += edges[ei].h2 * edge_var[ei];
            }
            for (int ei : obs_edges[d]) {
                auto& ed = edges[ei];
                Complex mu = mu_all - ed.h * edge_mean[ei];
                double var = std::max(var_all - ed.h2 * edge_var[ei], 1e-300);
                for (int j = 0; j < L; ++j) {
                    Complex rterm = y[d] - mu - ed.h * constellation.points[j];
                    ed.ll[j] = -std::norm(rterm) / var;
                }
            }
        }

        // Variable side: damped extrinsic messages plus fresh posteriors.
        for (size_t c = 0; c < nvar; ++c) {
            double* tot = &total_ll[c * L];
            std::fill(tot, tot + L, 0.0);
            for (int ei : var_edges[c])
                for (int j = 0; j < L; ++j) tot[j] += edges[ei].ll[j];

            for (int ei : var_edges[c]) {
                auto& ed = edges[ei];
                double mx = -1e300;
                for (int j = 0; j < L; ++j) mx = std::max(mx, tot[j] - ed.ll[j]);
                double sum = 0.0;
                std::array<double, 64> fresh{};
                for (int j = 0; j < L; ++j) {
                    fresh[j] = std::exp(tot[j] - ed.ll[j] - mx);
                    sum += fresh[j];
                }
                for (int j = 0; j < L; ++j)
                    ed.msg[j] = cfg.damping * (fresh[j] / sum) + (1.0 - cfg.damping) * ed.msg[j];
            }

            double mx = *std::max_element(tot, tot + L);
            double sum = 0.0;
            for (int j = 0; j < L; ++j) {
                final_pmf[c * L + j] = std::exp(tot[j] - mx);
                sum += final_pmf[c * L + j];
            }
            for (int j = 0; j < L; ++j) final_pmf[c * L + j] /= sum;
        }

        double delta = 0.0;
        for (size_t i = 0; i < final_pmf.size(); ++i)
            delta = std::max(delta, std::abs(final_pmf[i] - prev_pmf[i]));
        prev_pmf = final_pmf;
        if (cfg.conv_tol > 0.0 && delta < cfg.conv_tol) {
            ++sweep;
            break;
        }
    }
    res.sweeps = sweep;

    if (ops)
        ops->mp_detect += static_cast<uint64_t>(sweep) * edges.size() * (13ull * L + 9) +
                          2ull * nvar * L;

    for (size_t c = 0; c < nvar; ++c) {
        const int pos = variables[c];
        int best = 0;
        for (int j = 0; j < L; ++j) {
            res.beliefs.pmf_at(pos, j) = final_pmf[c * L + j];
            if (final_pmf[c * L + j] > final_pmf[c * L + best]) best = j;
        }
        res.hard_symbols[pos] = constellation.points[best];
    }
    res.beliefs.logits = pmf_to_logits(res.beliefs.pmf, cfg.logit_clip);
    return res;
}

std::vector<double> pmf_to_logits(const std::vector<double>& pmf, double clip) {
    std::vector<double> z(pmf.size());
    for (size_t i = 0; i < pmf.size(); ++i) {
        double p = pmf[i];
        if (p <= 0.0)
            z[i] = -clip;
        else if (p >= 1.0)
            z[i] = clip;
        else
            z[i] = clip_to(std::log(p / (1.0 - p)), clip);
    }
    return z;
}

std::vector<double> beliefs_to_bit_llrs(const SoftBeliefs& beliefs,
                                        const std::vector<int>& data_positions,
                                        const Constellation& constellation, double clip) {
    const int K = constellation.bits;
    std::vector<double> llr;
    llr.reserve(data_positions.size() * K);
    for (int pos : data_positions) {
        for (int k = 0; k < K; ++k) {
            double p0 = 0.0, p1 = 0.0;
            for (int j = 0; j < constellation.L; ++j)
                (constellation.bit_of(j, k) == 0 ? p0 : p1) += beliefs.pmf_at(pos, j);
            double v;
            if (p1 <= 0.0)
                v = clip;
            else if (p0 <= 0.0)
                v = -clip;
            else
                v = clip_to(std::log(p0 / p1), clip);
            llr.push_back(v);
        }
    }
    return llr;
}

void dump_beliefs(const SoftBeliefs& beliefs, std::ostream& out) {
    out << "position";
    for (int j = 0; j < beliefs.L; ++j) out << ",p" << j;
    out << "\n";
    for (int i = 0; i < beliefs.positions; ++i) {
        out << i;
        char buf[32];
        for (int j = 0; j < beliefs.L; ++j) {
            std::snprintf(buf, sizeof(buf), ",%.9g", beliefs.pmf_at(i, j));
            out << buf;
        }
        out << "\n";
    }
}

}  // namespace otfs
