// frame.hpp - Delay-Doppler frame construction for EP and SP pilot schemes
//
// EP places a single pilot inside a zeroed guard block sized by the channel
// spread; SP adds the pilot amplitude on top of data symbols so every grid
// cell carries data. Multiple SPs sit on a lattice whose strides keep each
// pilot's delay-Doppler images from overlapping any other pilot's.

#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include "otfs/power.hpp"
#include "otfs/types.hpp"

namespace otfs {

enum class SchemeKind { EP, SP };

struct SchemeId {
    SchemeKind kind = SchemeKind::SP;
    int n_pilots = 1;  // EP always 1

    std::string label() const {
        return kind == SchemeKind::EP ? "ep" : "sp" + std::to_string(n_pilots);
    }
};

struct DDFrame {
    Grid grid;                                   // data + pilots (+ zero guard)
    std::vector<uint8_t> pilot_mask;             // column-major, size M*N
    std::vector<uint8_t> guard_mask;             // column-major, size M*N
    SchemeId scheme;
    std::vector<std::pair<int, int>> pilot_positions;  // (m_p, n_p)
    Complex x_p;                                 // pilot amplitude, real positive
    std::vector<int> data_positions;             // vec indices, ascending

    int M() const { return grid.M; }
    int N() const { return grid.N; }
};

// floor(M/(l_max+1)) * floor(N/(2*k_max+1)).
int max_feasible_pilots(int N, int M, int l_max, int k_max);

// Deterministic pilot coordinates. EP and single-SP use the grid center;
// multiple SPs use a row-major lattice with strides (l_max+1, 2*k_max+1)
// starting at (0, k_max). Throws ConfigError naming the maximum feasible
// count when n_pilots does not fit.
std::vector<std::pair<int, int>> place_pilots(const SchemeId& scheme, int N, int M,
                                              int l_max, int k_max);

// Number of data symbols the scheme carries per frame.
int data_capacity(const SchemeId& scheme, int N, int M, int l_max, int k_max);

// Assemble a frame from already-mapped data symbols (ascending vec order
// over data positions). Throws ConfigError on a data count mismatch.
DDFrame build_frame(const SchemeId& scheme, const PowerAllocation& alloc,
                    const CVec& data_symbols, int N, int M, int l_max, int k_max);

// Pilot-only NM vector (x_p at pilot cells, zero elsewhere), the "known a
// priori" term used by pilot cancellation.
CVec pilot_vector(const DDFrame& frame);

// Expected transmit energy of the frame layout: N_p*sigma_p2 + N_d*sigma_d2
// evaluated from the masks (fairness contract of the SNR definition).
double expected_frame_energy(const DDFrame& frame, const PowerAllocation& alloc);

// Debug dump: <prefix>.cf64 (row-major complex64 pairs) plus <prefix>.json
// sidecar with scheme, positions, and masks. Not a wire format.
void dump_frame(const DDFrame& frame, const std::string& path_prefix);

}  // namespace otfs
