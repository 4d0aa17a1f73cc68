#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "otfs/modem.hpp"
#include "otfs/rng.hpp"
#include "oracles.hpp"

using namespace otfs;

namespace {

Grid random_grid(int M, int N, CounterRng& rng) {
    Grid x(M, N);
    for (auto& v : x.v) v = rng.cgaussian(1.0);
    return x;
}

double frob_sq(const CVec& v) {
    double s = 0;
    for (auto& c : v) s += std::norm(c);
    return s;
}

}  // namespace

TEST_CASE("all-zero grid modulates to all-zero signal") {
    Grid x(4, 4);
    auto s = modulate(x);
    for (auto& v : s.samples) CHECK(std::abs(v) == 0.0);
}

TEST_CASE("N=1 modulation is the identity on vec(X)") {
    CounterRng rng(derive_key(7, 1));
    Grid x = random_grid(5, 1, rng);
    auto s = modulate(x);
    for (size_t i = 0; i < x.v.size(); ++i) CHECK(std::abs(s.samples[i] - x.v[i]) < 1e-14);
}

TEST_CASE("matrix-free modulate matches the dense Kronecker operator") {
    CounterRng rng(derive_key(7, 2));
    const int M = 4, N = 4;
    auto F = oracle::dft_matrix(N);
    auto K = oracle::kron(oracle::hermitian(F), oracle::identity(M));
    for (int trial = 0; trial < 20; ++trial) {
        Grid x = random_grid(M, N, rng);
        auto s = modulate(x);
        auto ref = oracle::matvec(K, x.v);
        CHECK(oracle::rel_err(s.samples, ref) < 1e-12);
    }
}

TEST_CASE("matrix-free demodulate matches the dense Kronecker operator") {
    CounterRng rng(derive_key(7, 3));
    const int M = 3, N = 5;
    auto F = oracle::dft_matrix(N);
    auto K = oracle::kron(F, oracle::identity(M));
    for (int trial = 0; trial < 20; ++trial) {
        TimeSignal r;
        r.M = M;
        r.N = N;
        r.samples.resize(M * N);
        for (auto& v : r.samples) v = rng.cgaussian(1.0);
        auto y = demodulate(r);
        auto ref = oracle::matvec(K, r.samples);
        CHECK(oracle::rel_err(y.v, ref) < 1e-12);
    }
}

TEST_CASE("demodulate(modulate(X)) == X and norms are preserved") {
    CounterRng rng(derive_key(7, 4));
    for (int trial = 0; trial < 50; ++trial) {
        Grid x = random_grid(15, 15, rng);
        auto s = modulate(x);
        auto y = demodulate(s);
        CHECK(oracle::rel_err(y.v, x.v) < 1e-12);
        CHECK(std::abs(frob_sq(s.samples) / frob_sq(x.v) - 1.0) < 1e-9);
    }
}

TEST_CASE("modulate is linear") {
    CounterRng rng(derive_key(7, 5));
    const int M = 6, N = 5;
    Grid x1 = random_grid(M, N, rng), x2 = random_grid(M, N, rng);
    Complex a(0.3, -1.2), b(-0.7, 0.25);
    Grid mix(M, N);
    for (size_t i = 0; i < mix.v.size(); ++i) mix.v[i] = a * x1.v[i] + b * x2.v[i];
    auto s_mix = modulate(mix);
    auto s1 = modulate(x1), s2 = modulate(x2);
    CVec ref(s1.samples.size());
    for (size_t i = 0; i < ref.size(); ++i) ref[i] = a * s1.samples[i] + b * s2.samples[i];
    CHECK(oracle::rel_err(s_mix.samples, ref) < 1e-12);
}

TEST_CASE("dimension mismatch is rejected") {
    TimeSignal r;
    r.M = 4;
    r.N = 4;
    r.samples.resize(15);
    CHECK_THROWS_AS(demodulate(r), std::invalid_argument);
}
