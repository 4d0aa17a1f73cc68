#include "otfs/modem.hpp"

#include <cmath>

namespace otfs {

namespace {

// Unitary DFT along the Doppler axis of a column-major M x N buffer.
// sign = +1 inverse, -1 forward. Grids stay small (N <= 32 at desk scale),
// so a direct O(N^2) transform per row beats FFT bookkeeping.
void dft_rows(const CVec& in, CVec& out, int M, int N, int sign) {
    out.assign(in.size(), Complex(0.0, 0.0));
    const double scale = 1.0 / std::sqrt(static_cast<double>(N));
    std::vector<Complex> twiddle(N);
    for (int t = 0; t < N; ++t) {
        double ang = sign * 2.0 * M_PI * t / N;
        twiddle[t] = {std::cos(ang), std::sin(ang)};
    }
    for (int m = 0; m < M; ++m) {
        for (int c = 0; c < N; ++c) {
            Complex acc(0.0, 0.0);
            for (int n = 0; n < N; ++n) acc += in[static_cast<size_t>(n) * M + m] * twiddle[(n * c) % N];
            out[static_cast<size_t>(c) * M + m] = acc * scale;
        }
    }
}

}  // namespace

TimeSignal modulate(const Grid& x) {
    if (x.M <= 0 || x.N <= 0 || x.v.size() != static_cast<size_t>(x.M) * x.N)
        throw std::invalid_argument("modulate: grid dimensions do not match storage");
    TimeSignal s;
    s.N = x.N;
    s.M = x.M;
    dft_rows(x.v, s.samples, x.M, x.N, +1);
    return s;
}

Grid demodulate(const TimeSignal& r) {
    if (r.samples.size() != static_cast<size_t>(r.N) * r.M)
        throw std::invalid_argument("demodulate: signal length does not match N*M");
    Grid y(r.M, r.N);
    dft_rows(r.samples, y.v, r.M, r.N, -1);
    return y;
}

}  // namespace otfs
