#include "otfs/constellation.hpp"

#include <cmath>
#include <limits>

namespace otfs {

ConstellationId constellation_from_string(const std::string& s) {
    if (s == "qpsk" || s == "QPSK" || s == "4") return ConstellationId::QPSK;
    if (s == "8psk" || s == "psk8" || s == "8PSK" || s == "8") return ConstellationId::PSK8;
    if (s == "16qam" || s == "qam16" || s == "16QAM" || s == "16") return ConstellationId::QAM16;
    throw ConfigError("unknown modulation: " + s);
}

std::string to_string(ConstellationId id) {
    switch (id) {
        case ConstellationId::QPSK: return "qpsk";
        case ConstellationId::PSK8: return "8psk";
        case ConstellationId::QAM16: return "16qam";
    }
    return "?";
}

namespace {

// 2-bit Gray code to 4-PAM level, adjacent levels differ in one bit:
// 00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3.
double pam4_level(int b_hi, int b_lo) {
    static const double lut[4] = {-3.0, -1.0, +1.0, +3.0};
    int g = (b_hi << 1) | b_lo;
    static const int order[4] = {0, 1, 3, 2};  // Gray sequence
    for (int i = 0; i < 4; ++i)
        if (order[i] == g) return lut[i];
    return 0.0;
}

}  // namespace

Constellation make_constellation(ConstellationId id, double sigma_d2) {
    Constellation c;
    c.id = id;
    c.sigma_d2 = sigma_d2;
    double a = std::sqrt(sigma_d2);
    switch (id) {
        case ConstellationId::QPSK: {
            c.L = 4;
            c.bits = 2;
            c.points.resize(4);
            // bit 0 -> real sign, bit 1 -> imag sign; 0 maps to +.
            double s = a / std::sqrt(2.0);
            for (int j = 0; j < 4; ++j) {
                double re = ((j >> 1) & 1) ? -s : s;
                double im = (j & 1) ? -s : s;
                c.points[j] = {re, im};
            }
            break;
        }
        case ConstellationId::PSK8: {
            c.L = 8;
            c.bits = 3;
            c.points.resize(8);
            // Gray sequence around the circle starting at angle 0.
            static const int gray[8] = {0, 1, 3, 2, 6, 7, 5, 4};
            for (int i = 0; i < 8; ++i) {
                double ang = 2.0 * M_PI * i / 8.0;
                c.points[gray[i]] = {a * std::cos(ang), a * std::sin(ang)};
            }
            break;
        }
        case ConstellationId::QAM16: {
            c.L = 16;
            c.bits = 4;
            c.points.resize(16);
            // Bits (b0 b1) set the I level, (b2 b3) the Q level; E|x|^2 of the
            // unnormalized square grid is 10.
            double s = a / std::sqrt(10.0);
            for (int j = 0; j < 16; ++j) {
                int b0 = (j >> 3) & 1, b1 = (j >> 2) & 1, b2 = (j >> 1) & 1, b3 = j & 1;
                c.points[j] = {pam4_level(b0, b1) * s, pam4_level(b2, b3) * s};
            }
            break;
        }
    }
    return c;
}

int hard_decision(const Constellation& c, Complex y) {
    int best = 0;
    double best_d = std::numeric_limits<double>::max();
    for (int j = 0; j < c.L; ++j) {
        double d = std::norm(y - c.points[j]);
        if (d < best_d) {
            best_d = d;
            best = j;
        }
    }
    return best;
}

CVec map_bits_to_symbols(const std::vector<uint8_t>& bits, ConstellationId id, double sigma_d2) {
    Constellation c = make_constellation(id, sigma_d2);
    if (bits.size() % c.bits != 0)
        throw ConfigError("bit count " + std::to_string(bits.size()) +
                          " not divisible by bits per symbol " + std::to_string(c.bits));
    CVec out(bits.size() / c.bits);
    for (size_t i = 0; i < out.size(); ++i) {
        int label = 0;
        for (int k = 0; k < c.bits; ++k) label = (label << 1) | (bits[i * c.bits + k] & 1);
        out[i] = c.points[label];
    }
    return out;
}

std::vector<uint8_t> symbols_to_bits(const CVec& symbols, const Constellation& c) {
    std::vector<uint8_t> bits(symbols.size() * c.bits);
    for (size_t i = 0; i < symbols.size(); ++i) {
        int label = hard_decision(c, symbols[i]);
        for (int k = 0; k < c.bits; ++k) bits[i * c.bits + k] = static_cast<uint8_t>(c.bit_of(label, k));
    }
    return bits;
}

}  // namespace otfs
