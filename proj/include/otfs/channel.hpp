// channel.hpp - Doubly-selective channel: sampling, application, DD-domain matrix
//
// A realization is P paths (gain, delay tap, Doppler tap) with distinct tap
// pairs. Application in the time domain is a cyclic delay plus progressive
// phase rotation per path; the equivalent delay-Doppler matrix is sparse with
// exactly P nonzeros per row and column, materialized lazily.

#pragma once

#include <memory>
#include <mutex>
#include <string>

#include "otfs/frame.hpp"
#include "otfs/modem.hpp"
#include "otfs/rng.hpp"
#include "otfs/sparse.hpp"
#include "otfs/types.hpp"

namespace otfs {

struct PathTap {
    Complex h;  // gain
    int l = 0;  // delay tap in [0, l_max]
    int k = 0;  // Doppler tap in [-k_max, k_max]
};

class ChannelRealization {
public:
    ChannelRealization() = default;
    ChannelRealization(std::vector<PathTap> paths, int N, int M);

    const std::vector<PathTap>& paths() const { return paths_; }
    int N() const { return N_; }
    int M() const { return M_; }
    int P() const { return static_cast<int>(paths_.size()); }

    // Effective DD-domain matrix, built once and cached. Safe for
    // concurrent readers.
    const SparseCMat& dd_matrix() const;

    std::string to_json() const;
    static ChannelRealization from_json(const std::string& text, int N, int M);

private:
    std::vector<PathTap> paths_;
    int N_ = 0;
    int M_ = 0;
    mutable std::once_flag once_;
    mutable std::unique_ptr<SparseCMat> cached_;
};

// h_i ~ CN(0, 1/P) with (l_i, k_i) drawn uniformly without replacement from
// the (l_max+1) x (2*k_max+1) tap lattice. Throws ConfigError when P exceeds
// the lattice size.
ChannelRealization sample_channel(CounterRng& rng, int P, int l_max, int k_max, int N, int M);

// r(n) = sum_i h_i z^{k_i (n - l_i)} s([n - l_i]_{NM}) + w, w ~ CN(0, sigma2).
// sigma2 == 0 gives the noiseless channel.
TimeSignal apply_time_domain(const ChannelRealization& ch, const TimeSignal& s,
                             CounterRng& rng, double sigma2);

// Sparse DD matrix for arbitrary paths (the closed form behind dd_matrix).
SparseCMat effective_dd_matrix(const std::vector<PathTap>& paths, int N, int M);

// Predicted noiseless DD-domain value at pilot j's image cell for path i:
// h_i z^{k_i m_pj} X[m_pj, n_pj]. Test oracle, not part of the receive path.
Complex received_pilot_relation(const ChannelRealization& ch, const DDFrame& frame,
                                int pilot_index, int path_index);

}  // namespace otfs
