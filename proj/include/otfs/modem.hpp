// modem.hpp - OTFS modulation between the delay-Doppler grid and time domain
//
// Rectangular pulses collapse the Heisenberg/Wigner transforms to Kronecker
// forms: s = (F_N^H (x) I_M) vec(X) and y = (F_N (x) I_M) r. Both are
// evaluated matrix-free as per-delay-row N-point DFTs with the unitary
// 1/sqrt(N) convention, so noise statistics are preserved across domains.

#pragma once

#include "otfs/types.hpp"

namespace otfs {

struct TimeSignal {
    CVec samples;  // length N*M
    int N = 0;
    int M = 0;
};

// vec(X * F_N^H), computed as a unitary inverse DFT along each delay row.
TimeSignal modulate(const Grid& x);

// Inverse of modulate: forward unitary DFT along each delay row.
Grid demodulate(const TimeSignal& r);

}  // namespace otfs
