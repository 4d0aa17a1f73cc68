#include "otfs/channel.hpp"

#include <cmath>

#include <json.hpp>

namespace otfs {

ChannelRealization::ChannelRealization(std::vector<PathTap> paths, int N, int M)
    : paths_(std::move(paths)), N_(N), M_(M) {}

const SparseCMat& ChannelRealization::dd_matrix() const {
    std::call_once(once_, [this] {
        cached_ = std::make_unique<SparseCMat>(effective_dd_matrix(paths_, N_, M_));
    });
    return *cached_;
}

ChannelRealization sample_channel(CounterRng& rng, int P, int l_max, int k_max, int N, int M) {
    const int lattice = (l_max + 1) * (2 * k_max + 1);
    if (P > lattice)
        throw ConfigError("P=" + std::to_string(P) + " exceeds the tap lattice size " +
                          std::to_string(lattice));

    // Partial Fisher-Yates over lattice indices: distinct (l, k) pairs.
    std::vector<int> idx(lattice);
    for (int i = 0; i < lattice; ++i) idx[i] = i;
    std::vector<PathTap> paths(P);
    for (int i = 0; i < P; ++i) {
        int j = i + static_cast<int>(rng.below(lattice - i));
        std::swap(idx[i], idx[j]);
        paths[i].l = idx[i] / (2 * k_max + 1);
        paths[i].k = idx[i] % (2 * k_max + 1) - k_max;
        paths[i].h = rng.cgaussian(1.0 / P);
    }
    return ChannelRealization(std::move(paths), N, M);
}

TimeSignal apply_time_domain(const ChannelRealization& ch, const TimeSignal& s,
                             CounterRng& rng, double sigma2) {
    const int NM = ch.N() * ch.M();
    if (static_cast<int>(s.samples.size()) != NM)
        throw std::invalid_argument("apply_time_domain: signal length mismatch");

    TimeSignal r;
    r.N = s.N;
    r.M = s.M;
    r.samples.assign(NM, Complex(0.0, 0.0));
    for (const auto& p : ch.paths()) {
        for (int n = 0; n < NM; ++n) {
            double ang = 2.0 * M_PI * p.k * (n - p.l) / NM;
            r.samples[n] += p.h * Complex(std::cos(ang), std::sin(ang)) *
                            s.samples[mod_floor(n - p.l, NM)];
        }
    }
    if (sigma2 > 0.0)
        for (int n = 0; n < NM; ++n) r.samples[n] += rng.cgaussian(sigma2);
    return r;
}

SparseCMat effective_dd_matrix(const std::vector<PathTap>& paths, int N, int M) {
    // Closed form of (F_N (x) I_M) G (F_N^H (x) I_M) for rectangular pulses.
    // Input cell (m', n') maps to output cell ([m'+l]_M, [n'+k]_N) with
    // coefficient h z^{k m'}, picking up an extra e^{-j2pi n/N} when the
    // delay shift wraps past the delay axis.
    const int NM = N * M;
    SparseCMat H(NM, NM);
    for (const auto& p : paths) {
        for (int mi = 0; mi < M; ++mi) {
            const int mo = mod_floor(mi + p.l, M);
            const bool wrapped = mi + p.l >= M;
            const double base = 2.0 * M_PI * p.k * mi / NM;
            const Complex coeff = p.h * Complex(std::cos(base), std::sin(base));
            for (int ni = 0; ni < N; ++ni) {
                const int no = mod_floor(ni + p.k, N);
                Complex v = coeff;
                if (wrapped) {
                    double ang = -2.0 * M_PI * no / N;
                    v *= Complex(std::cos(ang), std::sin(ang));
                }
                H.add(vec_index(mo, no, M), vec_index(mi, ni, M), v);
            }
        }
    }
    H.finalize();
    return H;
}

Complex received_pilot_relation(const ChannelRealization& ch, const DDFrame& frame,
                                int pilot_index, int path_index) {
    const auto& [mp, np] = frame.pilot_positions.at(pilot_index);
    const auto& p = ch.paths().at(path_index);
    const int NM = ch.N() * ch.M();
    double ang = 2.0 * M_PI * p.k * mp / NM;
    return p.h * Complex(std::cos(ang), std::sin(ang)) * frame.grid(mp, np);
}

std::string ChannelRealization::to_json() const {
    nlohmann::json j;
    for (const auto& p : paths_)
        j["paths"].push_back({{"re", p.h.real()}, {"im", p.h.imag()}, {"l", p.l}, {"k", p.k}});
    return j.dump();
}

ChannelRealization ChannelRealization::from_json(const std::string& text, int N, int M) {
    auto j = nlohmann::json::parse(text);
    std::vector<PathTap> paths;
    for (const auto& e : j.at("paths"))
        paths.push_back({Complex(e.at("re").get<double>(), e.at("im").get<double>()),
                         e.at("l").get<int>(), e.at("k").get<int>()});
    return ChannelRealization(std::move(paths), N, M);
}

}  // namespace otfs
