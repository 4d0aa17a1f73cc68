#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "otfs/channel.hpp"
#include "otfs/modem.hpp"
#include "oracles.hpp"

using namespace otfs;

TEST_CASE("single forced lattice point") {
    CounterRng rng(derive_key(11, 0));
    auto ch = sample_channel(rng, 1, 0, 0, 4, 4);
    REQUIRE(ch.P() == 1);
    CHECK(ch.paths()[0].l == 0);
    CHECK(ch.paths()[0].k == 0);
}

TEST_CASE("P exceeding the tap lattice is rejected") {
    CounterRng rng(derive_key(11, 1));
    CHECK_THROWS_AS(sample_channel(rng, 50, 4, 2, 15, 15), ConfigError);
}

TEST_CASE("tap pairs are distinct and within range") {
    CounterRng rng(derive_key(11, 2));
    for (int trial = 0; trial < 200; ++trial) {
        auto ch = sample_channel(rng, 4, 4, 2, 15, 15);
        for (int i = 0; i < ch.P(); ++i) {
            CHECK(ch.paths()[i].l >= 0);
            CHECK(ch.paths()[i].l <= 4);
            CHECK(std::abs(ch.paths()[i].k) <= 2);
            for (int j = i + 1; j < ch.P(); ++j) {
                bool same = ch.paths()[i].l == ch.paths()[j].l && ch.paths()[i].k == ch.paths()[j].k;
                CHECK_FALSE(same);
            }
        }
    }
}

TEST_CASE("uniform power profile: mean of sum |h_i|^2 near 1") {
    CounterRng rng(derive_key(11, 3));
    double acc = 0.0;
    const int trials = 100000;
    for (int t = 0; t < trials; ++t) {
        auto ch = sample_channel(rng, 4, 4, 2, 15, 15);
        for (const auto& p : ch.paths()) acc += std::norm(p.h);
    }
    double mean = acc / trials;
    CHECK(mean > 0.99);
    CHECK(mean < 1.01);
}

TEST_CASE("identity channel leaves the signal untouched") {
    CounterRng rng(derive_key(11, 4));
    ChannelRealization ch({{Complex(1, 0), 0, 0}}, 4, 4);
    TimeSignal s;
    s.N = s.M = 4;
    s.samples.resize(16);
    for (auto& v : s.samples) v = rng.cgaussian(1.0);
    auto r = apply_time_domain(ch, s, rng, 0.0);
    CHECK(oracle::rel_err(r.samples, s.samples) < 1e-14);
}

TEST_CASE("pure delay is a cyclic shift") {
    CounterRng rng(derive_key(11, 5));
    ChannelRealization ch({{Complex(1, 0), 1, 0}}, 3, 3);
    TimeSignal s;
    s.N = s.M = 3;
    s.samples.resize(9);
    for (auto& v : s.samples) v = rng.cgaussian(1.0);
    auto r = apply_time_domain(ch, s, rng, 0.0);
    for (int n = 0; n < 9; ++n) CHECK(std::abs(r.samples[n] - s.samples[mod_floor(n - 1, 9)]) < 1e-14);
}

TEST_CASE("time-domain application matches the dense Pi/Delta operator") {
    CounterRng rng(derive_key(11, 6));
    const int N = 4, M = 4;
    for (int trial = 0; trial < 25; ++trial) {
        auto ch = sample_channel(rng, 3, 2, 1, N, M);
        TimeSignal s;
        s.N = N;
        s.M = M;
        s.samples.resize(N * M);
        for (auto& v : s.samples) v = rng.cgaussian(1.0);
        auto r = apply_time_domain(ch, s, rng, 0.0);
        auto G = oracle::dense_time_channel(ch.paths(), N * M);
        auto ref = oracle::matvec(G, s.samples);
        CHECK(oracle::rel_err(r.samples, ref) < 1e-12);
    }
}

TEST_CASE("sparse DD matrix matches dense conjugation and the pipeline") {
    CounterRng rng(derive_key(11, 7));
    const int N = 5, M = 4;
    for (int trial = 0; trial < 10; ++trial) {
        auto ch = sample_channel(rng, 3, 2, 1, N, M);
        const auto& H = ch.dd_matrix();

        // Dense conjugation oracle.
        auto Hd = oracle::dense_dd_channel(ch.paths(), N, M);
        CVec x(N * M);
        for (auto& v : x) v = rng.cgaussian(1.0);
        auto y_sparse = H.matvec(x);
        auto y_dense = oracle::matvec(Hd, x);
        CHECK(oracle::rel_err(y_sparse, y_dense) < 1e-12);

        // Full pipeline: modulate -> time channel -> demodulate.
        Grid xg(M, N);
        xg.v = x;
        auto r = apply_time_domain(ch, modulate(xg), rng, 0.0);
        auto y_pipe = demodulate(r);
        CHECK(oracle::rel_err(y_sparse, y_pipe.v) < 1e-10);
    }
}

TEST_CASE("DD matrix sparsity: P nonzeros per row and column, magnitudes |h_i|") {
    CounterRng rng(derive_key(11, 8));
    auto ch = sample_channel(rng, 4, 4, 2, 15, 15);
    const auto& H = ch.dd_matrix();
    const int NM = 225;
    CHECK(H.nnz() == static_cast<size_t>(4 * NM));

    std::vector<int> row_count(NM, 0), col_count(NM, 0);
    for (const auto& e : H.entries()) {
        row_count[e.r]++;
        col_count[e.c]++;
        bool magnitude_matches = false;
        for (const auto& p : ch.paths())
            if (std::abs(std::abs(e.v) - std::abs(p.h)) < 1e-12) magnitude_matches = true;
        CHECK(magnitude_matches);
    }
    for (int i = 0; i < NM; ++i) {
        CHECK(row_count[i] == 4);
        CHECK(col_count[i] == 4);
    }
}

TEST_CASE("identity channel gives the identity DD matrix") {
    auto H = effective_dd_matrix({{Complex(1, 0), 0, 0}}, 4, 3);
    CHECK(H.nnz() == 12);
    for (const auto& e : H.entries()) {
        CHECK(e.r == e.c);
        CHECK(std::abs(e.v - Complex(1, 0)) < 1e-15);
    }
}

TEST_CASE("statistical energy preservation of H") {
    CounterRng rng(derive_key(11, 9));
    const int N = 5, M = 5;
    CVec x(N * M);
    for (auto& v : x) v = rng.cgaussian(1.0);
    double x2 = 0;
    for (auto& v : x) x2 += std::norm(v);

    double acc = 0;
    const int trials = 10000;
    for (int t = 0; t < trials; ++t) {
        auto ch = sample_channel(rng, 2, 2, 1, N, M);
        auto y = ch.dd_matrix().matvec(x);
        for (auto& v : y) acc += std::norm(v);
    }
    double ratio = acc / trials / x2;
    CHECK(ratio > 0.98);
    CHECK(ratio < 1.02);
}

TEST_CASE("channel JSON round trip") {
    CounterRng rng(derive_key(11, 10));
    auto ch = sample_channel(rng, 4, 4, 2, 15, 15);
    auto ch2 = ChannelRealization::from_json(ch.to_json(), 15, 15);
    REQUIRE(ch2.P() == ch.P());
    for (int i = 0; i < ch.P(); ++i) {
        CHECK(ch2.paths()[i].l == ch.paths()[i].l);
        CHECK(ch2.paths()[i].k == ch.paths()[i].k);
        CHECK(std::abs(ch2.paths()[i].h - ch.paths()[i].h) < 1e-15);
    }
}
