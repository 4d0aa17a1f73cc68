// constellation.hpp - Gray-mapped constellations and bit/symbol conversion

#pragma once

#include <cstdint>
#include <string>

#include "otfs/types.hpp"

namespace otfs {

enum class ConstellationId { QPSK, PSK8, QAM16 };

ConstellationId constellation_from_string(const std::string& s);
std::string to_string(ConstellationId id);

// Constellation points indexed by bit label (MSB-first), scaled so the
// average symbol power equals sigma_d2.
struct Constellation {
    ConstellationId id;
    int L = 0;             // number of points
    int bits = 0;          // log2(L)
    double sigma_d2 = 1.0; // average symbol power
    std::vector<Complex> points;

    // k-th bit (0 = MSB) of point label j.
    int bit_of(int j, int k) const { return (j >> (bits - 1 - k)) & 1; }
};

Constellation make_constellation(ConstellationId id, double sigma_d2);

// Nearest constellation point (label index) to a received value.
int hard_decision(const Constellation& c, Complex y);

// Gray-mapped symbols, average power sigma_d2. Throws ConfigError when the
// bit count is not a multiple of log2(L).
CVec map_bits_to_symbols(const std::vector<uint8_t>& bits, ConstellationId id, double sigma_d2);

// Hard demap back to bits (nearest point), inverse of map_bits_to_symbols
// in the noiseless case.
std::vector<uint8_t> symbols_to_bits(const CVec& symbols, const Constellation& c);

}  // namespace otfs
