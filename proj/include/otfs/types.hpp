// types.hpp - Shared scalar and grid types for the delay-Doppler link simulator

#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace otfs {

using Complex = std::complex<double>;
using CVec = std::vector<Complex>;

// Raised for bad user-facing parameters (CLI/config); maps to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// M x N complex grid with delay index m (rows) and Doppler index n (columns).
// Storage is column-major so the underlying buffer IS the column-wise
// vectorization: vec(X)[n*M + m] == X[m,n].
struct Grid {
    int M = 0;
    int N = 0;
    CVec v;

    Grid() = default;
    Grid(int M_, int N_) : M(M_), N(N_), v(static_cast<size_t>(M_) * N_) {}

    Complex& operator()(int m, int n) { return v[static_cast<size_t>(n) * M + m]; }
    const Complex& operator()(int m, int n) const { return v[static_cast<size_t>(n) * M + m]; }

    // Cyclic accessor: indices wrap modulo (M, N). Accepts negative indices.
    const Complex& at_cyclic(int m, int n) const {
        m %= M; if (m < 0) m += M;
        n %= N; if (n < 0) n += N;
        return (*this)(m, n);
    }

    size_t size() const { return v.size(); }
};

inline int mod_floor(int a, int n) {
    int r = a % n;
    return r < 0 ? r + n : r;
}

// Vector index of grid cell (m, n) under the column-wise convention.
inline int vec_index(int m, int n, int M) { return n * M + m; }

}  // namespace otfs
