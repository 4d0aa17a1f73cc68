#include "otfs/estimator.hpp"

#include <cmath>

namespace otfs {

std::vector<std::pair<int, int>> detect_paths(const Grid& Y,
                                              const std::vector<std::pair<int, int>>& pilots,
                                              double threshold, int l_max, int k_max,
                                              OpCounts* ops) {
    std::vector<std::pair<int, int>> hits;
    for (int l = 0; l <= l_max; ++l) {
        for (int k = -k_max; k <= k_max; ++k) {
            double s = 0.0;
            for (auto [mp, np] : pilots) s += std::abs(Y.at_cyclic(mp + l, np + k));
            if (s >= threshold) hits.emplace_back(l, k);
        }
    }
    if (ops)
        ops->estimation += static_cast<uint64_t>(l_max + 1) * (2 * k_max + 1) * pilots.size() * 2;
    return hits;
}

ChannelEstimate estimate_gains(const Grid& Y, const std::vector<std::pair<int, int>>& pilots,
                               const std::vector<std::pair<int, int>>& detected, Complex x_p,
                               const SchemeId& scheme, OpCounts* ops) {
    if (x_p == Complex(0.0, 0.0)) throw std::invalid_argument("estimate_gains: x_p must be nonzero");

    const int NM = Y.N * Y.M;
    ChannelEstimate est;
    est.scheme = scheme;
    est.paths.reserve(detected.size());
    for (auto [l, k] : detected) {
        Complex acc(0.0, 0.0);
        for (auto [mp, np] : pilots) {
            double ang = -2.0 * M_PI * k * mp / NM;  // divide by z^{k m_p}
            acc += Y.at_cyclic(mp + l, np + k) * Complex(std::cos(ang), std::sin(ang));
        }
        est.paths.push_back({acc / (static_cast<double>(pilots.size()) * x_p), l, k});
    }
    if (ops) ops->estimation += 6ull * detected.size() * pilots.size();
    return est;
}

double threshold_for(const SchemeId& scheme, int stage, double sigma2, double sigma_d2, int N_p) {
    if (scheme.kind == SchemeKind::EP) return 3.0 * std::sqrt(sigma2);
    if (stage == 0) return 3.0 * std::sqrt(N_p * (sigma2 + sigma_d2));
    return 3.0 * std::sqrt(N_p * sigma2);
}

std::optional<double> nmse(const SparseCMat& H_hat, const SparseCMat& H) {
    if (H_hat.rows() != H.rows() || H_hat.cols() != H.cols())
        throw std::invalid_argument("nmse: dimension mismatch");
    double den = H.frob_sq();
    if (den == 0.0) return std::nullopt;
    return SparseCMat::frob_diff_sq(H_hat, H) / den;
}

}  // namespace otfs
