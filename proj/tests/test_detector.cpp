#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "otfs/channel.hpp"
#include "otfs/detector.hpp"
#include "otfs/modem.hpp"
#include "otfs/rng.hpp"

using namespace otfs;

namespace {

std::vector<int> all_positions(int NM) {
    std::vector<int> v(NM);
    for (int i = 0; i < NM; ++i) v[i] = i;
    return v;
}

SparseCMat identity_matrix(int n) {
    SparseCMat H(n, n);
    for (int i = 0; i < n; ++i) H.add(i, i, Complex(1, 0));
    H.finalize();
    return H;
}

}  // namespace

TEST_CASE("identity channel recovers symbols with near one-hot PMFs") {
    CounterRng rng(derive_key(41, 1));
    const int NM = 16;
    auto cons = make_constellation(ConstellationId::QPSK, 1.0);
    CVec x(NM);
    for (auto& v : x) v = cons.points[rng.below(4)];
    auto H = identity_matrix(NM);

    auto res = mp_detect(x, H, all_positions(NM), cons, 1e-6, MpConfig{});
    CHECK_FALSE(res.degenerate);
    for (int i = 0; i < NM; ++i) {
        CHECK(std::abs(res.hard_symbols[i] - x[i]) < 1e-12);
        double mx = 0;
        for (int j = 0; j < 4; ++j) mx = std::max(mx, res.beliefs.pmf_at(i, j));
        CHECK(mx > 0.999);
    }
}

TEST_CASE("single-path channel is recovered noiselessly") {
    CounterRng rng(derive_key(41, 2));
    const int N = 5, M = 5, NM = 25;
    ChannelRealization ch({{Complex(0.9, -0.3), 2, 1}}, N, M);
    auto cons = make_constellation(ConstellationId::QPSK, 2.0);
    CVec x(NM);
    for (auto& v : x) v = cons.points[rng.below(4)];
    auto y = ch.dd_matrix().matvec(x);

    auto res = mp_detect(y, ch.dd_matrix(), all_positions(NM), cons, 1e-9, MpConfig{});
    for (int i = 0; i < NM; ++i) CHECK(std::abs(res.hard_symbols[i] - x[i]) < 1e-12);
}

TEST_CASE("multipath PCSI detection at moderate SNR has low uncoded BER") {
    // Operating-region check: P=4, QPSK, 15 dB, perfect CSI.
    const int N = 15, M = 15, NM = 225;
    const double snr_db = 15.0;
    const double sigma_d2 = std::pow(10.0, snr_db / 10.0);  // all-data frame, sigma2 = 1
    auto cons = make_constellation(ConstellationId::QPSK, sigma_d2);

    uint64_t errors = 0, bits = 0;
    for (int t = 0; t < 500; ++t) {
        CounterRng rng(derive_key(41, 300 + t));
        auto ch = sample_channel(rng, 4, 4, 2, N, M);
        std::vector<int> labels(NM);
        CVec x(NM);
        for (int i = 0; i < NM; ++i) {
            labels[i] = static_cast<int>(rng.below(4));
            x[i] = cons.points[labels[i]];
        }
        auto y = ch.dd_matrix().matvec(x);
        for (auto& v : y) v += rng.cgaussian(1.0);

        auto res = mp_detect(y, ch.dd_matrix(), all_positions(NM), cons, 1.0, MpConfig{});
        for (int i = 0; i < NM; ++i) {
            int hat = hard_decision(cons, res.hard_symbols[i]);
            for (int k = 0; k < 2; ++k) {
                errors += cons.bit_of(hat, k) != cons.bit_of(labels[i], k);
                ++bits;
            }
        }
    }
    double ber = static_cast<double>(errors) / bits;
    CHECK(ber < 1e-2);
}

TEST_CASE("empty channel matrix falls back to uniform PMFs and flags the frame") {
    SparseCMat H(16, 16);
    H.finalize();
    auto cons = make_constellation(ConstellationId::QPSK, 1.0);
    CVec y(16, Complex(1, 1));
    auto res = mp_detect(y, H, all_positions(16), cons, 1.0, MpConfig{});
    CHECK(res.degenerate);
    for (int i = 0; i < 16; ++i)
        for (int j = 0; j < 4; ++j) CHECK(res.beliefs.pmf_at(i, j) == doctest::Approx(0.25));
}

TEST_CASE("PMF rows stay normalized and in the simplex") {
    CounterRng rng(derive_key(41, 3));
    const int N = 5, M = 5, NM = 25;
    auto ch = sample_channel(rng, 3, 2, 1, N, M);
    auto cons = make_constellation(ConstellationId::QAM16, 3.0);
    CVec y(NM);
    for (auto& v : y) v = rng.cgaussian(4.0);

    auto res = mp_detect(y, ch.dd_matrix(), all_positions(NM), cons, 1.0, MpConfig{});
    for (int i = 0; i < NM; ++i) {
        double sum = 0;
        int best = 0;
        for (int j = 0; j < 16; ++j) {
            double p = res.beliefs.pmf_at(i, j);
            CHECK(p >= 0.0);
            CHECK(p <= 1.0);
            sum += p;
            if (p > res.beliefs.pmf_at(i, best)) best = j;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
        // Hard decision consistent with argmax.
        CHECK(std::abs(res.hard_symbols[i] - cons.points[best]) < 1e-12);
    }
}

TEST_CASE("logit conversions") {
    std::vector<double> pmf = {0.5, 1.0, 0.0, 0.3};
    auto z = pmf_to_logits(pmf, 30.0);
    CHECK(z[0] == doctest::Approx(0.0));
    CHECK(z[1] == doctest::Approx(30.0));
    CHECK(z[2] == doctest::Approx(-30.0));
    CHECK(z[3] == doctest::Approx(std::log(0.3 / 0.7)).epsilon(1e-12));

    // sigmoid(logit(p)) == p away from clips.
    for (double p : {0.01, 0.2, 0.5, 0.77, 0.99}) {
        auto zz = pmf_to_logits({p}, 30.0);
        CHECK(1.0 / (1.0 + std::exp(-zz[0])) == doctest::Approx(p).epsilon(1e-9));
    }
}

TEST_CASE("bit LLRs from beliefs") {
    auto cons = make_constellation(ConstellationId::QPSK, 1.0);
    SoftBeliefs b;
    b.positions = 2;
    b.L = 4;
    b.constellation = cons.id;
    b.pmf = {1.0, 0.0, 0.0, 0.0,   // one-hot on label 00
             0.25, 0.25, 0.25, 0.25};

    auto llr = beliefs_to_bit_llrs(b, {0, 1}, cons, 30.0);
    REQUIRE(llr.size() == 4);
    CHECK(llr[0] == doctest::Approx(30.0));
    CHECK(llr[1] == doctest::Approx(30.0));
    CHECK(llr[2] == doctest::Approx(0.0));
    CHECK(llr[3] == doctest::Approx(0.0));

    // Brute-force marginalization oracle on an arbitrary PMF.
    b.pmf = {0.7, 0.1, 0.1, 0.1, 0.25, 0.25, 0.25, 0.25};
    llr = beliefs_to_bit_llrs(b, {0}, cons, 30.0);
    for (int k = 0; k < 2; ++k) {
        double p0 = 0, p1 = 0;
        for (int j = 0; j < 4; ++j) (cons.bit_of(j, k) ? p1 : p0) += b.pmf[j];
        CHECK(llr[k] == doctest::Approx(std::log(p0 / p1)).epsilon(1e-12));
    }
}

TEST_CASE("damped update stays in the simplex for any damping in (0,1]") {
    CounterRng rng(derive_key(41, 4));
    const int N = 4, M = 4, NM = 16;
    auto ch = sample_channel(rng, 2, 2, 1, N, M);
    auto cons = make_constellation(ConstellationId::QPSK, 1.0);
    CVec y(NM);
    for (auto& v : y) v = rng.cgaussian(2.0);
    for (double damping : {0.1, 0.6, 1.0}) {
        MpConfig cfg;
        cfg.damping = damping;
        auto res = mp_detect(y, ch.dd_matrix(), all_positions(NM), cons, 1.0, cfg);
        for (size_t i = 0; i < res.beliefs.pmf.size(); ++i) {
            CHECK(res.beliefs.pmf[i] >= 0.0);
            CHECK(res.beliefs.pmf[i] <= 1.0 + 1e-12);
        }
    }
}

TEST_CASE("multiplication count scales with the Table-style MP formula") {
    CounterRng rng(derive_key(41, 5));
    const int N = 8, M = 8, NM = 64;
    auto ch = sample_channel(rng, 4, 4, 2, N, M);
    auto cons = make_constellation(ConstellationId::QPSK, 10.0);
    CVec y(NM);
    for (auto& v : y) v = rng.cgaussian(11.0);

    MpConfig cfg;
    cfg.conv_tol = 0.0;  // force all sweeps
    OpCounts ops;
    auto res = mp_detect(y, ch.dd_matrix(), all_positions(NM), cons, 1.0, cfg, &ops);
    CHECK(res.sweeps == cfg.max_iters);

    // Reference: I_MP * NM * P * L * c, with c the per-edge constant.
    double expected = double(cfg.max_iters) * NM * 4 * cons.L * 13.0;
    double ratio = double(ops.mp_detect) / expected;
    CHECK(ratio > 0.5);
    CHECK(ratio < 2.0);
}

TEST_CASE("belief dump emits one CSV row per position") {
    SoftBeliefs b;
    b.positions = 3;
    b.L = 2;
    b.pmf = {0.5, 0.5, 1.0, 0.0, 0.25, 0.75};
    std::ostringstream out;
    dump_beliefs(b, out);
    std::string s = out.str();
    CHECK(s.find("position,p0,p1\n") == 0);
    int lines = 0;
    for (char c : s)
        if (c == '\n') ++lines;
    CHECK(lines == 4);
}
