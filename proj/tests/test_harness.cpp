#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "otfs/harness.hpp"

using namespace otfs;

namespace {

LinkConfig quick_cfg() {
    LinkConfig cfg;
    cfg.trials = 20;
    cfg.plan = {0, 2};
    cfg.snr_grid = {10.0};
    return cfg;
}

}  // namespace

TEST_CASE("transmission rate arithmetic at the reference parameters") {
    SchemeId ep{SchemeKind::EP, 1};
    SchemeId sp{SchemeKind::SP, 9};
    CHECK(data_capacity(ep, 15, 15, 4, 2) == 144);
    CHECK(data_capacity(sp, 15, 15, 4, 2) == 225);

    double rate_ep = transmission_rate(ep, 15, 15, 4, 2, 0.75, 4);
    double rate_sp = transmission_rate(sp, 15, 15, 4, 2, 0.75, 4);
    CHECK(rate_sp == doctest::Approx(1.5));
    CHECK(rate_ep == doctest::Approx(0.96));
    CHECK(rate_sp / rate_ep == doctest::Approx(225.0 / 144.0));

    // Code rates that match EP to 1.5 bit/sym.
    CHECK(matched_code_rate(1.5, ep, 15, 15, 4, 2, 8) == doctest::Approx(0.78125));
    CHECK(matched_code_rate(1.5, ep, 15, 15, 4, 2, 16) == doctest::Approx(0.5859375));
}

TEST_CASE("effective throughput endpoints") {
    CHECK(effective_throughput(0.0, 225, 0.75, 4, 225) == doctest::Approx(1.5));
    CHECK(effective_throughput(1.0, 225, 0.75, 4, 225) == doctest::Approx(0.0));
    CHECK(effective_throughput(0.0, 144, 0.75, 4, 225) == doctest::Approx(0.96));
}

TEST_CASE("run_point accumulates sane metrics") {
    auto cfg = quick_cfg();
    auto rec = run_point(cfg, 10.0);
    CHECK(rec.trials == 20);
    CHECK(rec.blocks_total == 20);
    CHECK(rec.bits_total == 20u * 338);
    CHECK(rec.ber() >= 0.0);
    CHECK(rec.ber() <= 1.0);
    CHECK(rec.bler() >= 0.0);
    CHECK(rec.bler() <= 1.0);
    // A block error needs at least one bit error.
    CHECK(rec.ber() <= rec.bler());
    CHECK(rec.throughput <=
          transmission_rate(cfg.scheme, cfg.N, cfg.M, cfg.l_max, cfg.k_max, cfg.r_c, 4) + 1e-12);
    CHECK(rec.nmse_frames == 20);
    CHECK(rec.nmse() > 0.0);
}

TEST_CASE("identical seeds give byte-identical sweeps, different seeds differ") {
    auto cfg = quick_cfg();
    cfg.trials = 10;
    std::ostringstream a, b, c;
    run_sweep(cfg, {cfg.scheme}, a);
    run_sweep(cfg, {cfg.scheme}, b);
    cfg.seed = 2;
    run_sweep(cfg, {cfg.scheme}, c);
    CHECK(a.str() == b.str());
    CHECK(a.str() != c.str());
}

TEST_CASE("thread count does not change the bytes") {
    auto cfg = quick_cfg();
    cfg.trials = 12;
    std::ostringstream a, b;
    run_sweep(cfg, {cfg.scheme}, a);
    cfg.threads = 4;
    run_sweep(cfg, {cfg.scheme}, b);
    CHECK(a.str() == b.str());
}

TEST_CASE("sweep emits one row per scheme x SNR plus a fixed header") {
    auto cfg = quick_cfg();
    cfg.trials = 4;
    cfg.snr_grid = {6.0, 9.0, 12.0};
    std::ostringstream out;
    run_sweep(cfg, {{SchemeKind::SP, 1}, {SchemeKind::SP, 9}}, out);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "scheme,snr_db,alpha,ber,bler,nmse,throughput,mults_per_frame,trials");
    int rows = 0;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 6);
}

TEST_CASE("PCSI throughput upper-bounds estimated CSI") {
    auto cfg = quick_cfg();
    cfg.trials = 500;
    cfg.plan = {0, 2};
    auto est = run_point(cfg, 8.0);
    cfg.pcsi = true;
    auto pcsi = run_point(cfg, 8.0);
    // One-sided slack of one standard error on the BLER gap.
    double se = std::sqrt(est.bler() * (1 - est.bler()) / est.blocks_total +
                          pcsi.bler() * (1 - pcsi.bler()) / pcsi.blocks_total);
    CHECK(pcsi.throughput >= est.throughput - se);
}

TEST_CASE("alpha grid search returns a grid value and ties break low") {
    auto cfg = quick_cfg();
    cfg.pcsi = true;  // noiseless-equivalent detection: all alphas tie at 0
    cfg.trials = 2;
    // PCSI probe is not meaningful for the uncoded search; use a tiny budget
    // real search instead and just check the contract.
    cfg.pcsi = false;
    double a = alpha_grid_search(cfg, cfg.scheme, 14.0, 3);
    bool on_grid = false;
    for (int i = 1; i <= 9; ++i)
        if (std::abs(a - i / 10.0) < 1e-12) on_grid = true;
    CHECK(on_grid);
}

TEST_CASE("alpha cache round trip") {
    AlphaCache cache;
    SchemeId sp{SchemeKind::SP, 9};
    cache.store(sp, 12.5, ConstellationId::QPSK, 9, 0.4, 0.0123);
    cache.save("/tmp/otfs_alpha_cache_test.csv");

    AlphaCache loaded;
    loaded.load("/tmp/otfs_alpha_cache_test.csv");
    auto hit = loaded.lookup(sp, 12.5, ConstellationId::QPSK, 9);
    REQUIRE(hit.has_value());
    CHECK(*hit == doctest::Approx(0.4));
    CHECK_FALSE(loaded.lookup(sp, 10.0, ConstellationId::QPSK, 9).has_value());
    CHECK_FALSE(loaded.lookup({SchemeKind::EP, 1}, 12.5, ConstellationId::QPSK, 9).has_value());
}

TEST_CASE("config file parsing and overrides") {
    const char* path = "/tmp/otfs_cfg_test.toml";
    {
        std::ofstream f(path);
        f << "# comment line\n"
          << "n = 9\n"
          << "m = 9\n"
          << "l_max = 2\n"
          << "k_max = 1\n"
          << "paths = 3\n"
          << "scheme = \"sp\"\n"
          << "n_pilots = 9\n"
          << "modulation = \"qpsk\"\n"
          << "snr_db = [5, 10, 15]\n"
          << "alpha = 0.3\n"
          << "trials = 7\n"
          << "seed = 99\n"
          << "r_unc = 1\n"
          << "r_cod = 2\n";
    }
    auto cfg = parse_config_file(path);
    CHECK(cfg.N == 9);
    CHECK(cfg.M == 9);
    CHECK(cfg.scheme.n_pilots == 9);
    CHECK(cfg.snr_grid.size() == 3);
    CHECK(cfg.alpha == doctest::Approx(0.3));
    CHECK(cfg.trials == 7);
    CHECK(cfg.seed == 99);
    CHECK(cfg.plan.r_unc == 1);
    CHECK(cfg.plan.r_cod == 2);
    validate(cfg);
}

TEST_CASE("validation rejects bad configs") {
    LinkConfig cfg;
    cfg.l_max = 20;
    CHECK_THROWS_AS(validate(cfg), ConfigError);
    cfg = LinkConfig{};
    cfg.scheme.n_pilots = 10;
    CHECK_THROWS_AS(validate(cfg), ConfigError);
    cfg = LinkConfig{};
    cfg.plan = {0, 0};
    CHECK_THROWS_AS(validate(cfg), ConfigError);
    cfg = LinkConfig{};
    cfg.alpha = 1.5;
    CHECK_THROWS_AS(validate(cfg), ConfigError);
}

TEST_CASE("unknown config key is a config error") {
    const char* path = "/tmp/otfs_cfg_bad.toml";
    std::ofstream(path) << "garbage_key = 1\n";
    CHECK_THROWS_AS(parse_config_file(path), ConfigError);
}

TEST_CASE("resolve_code picks the registry entry matching capacity and rate") {
    LinkConfig cfg;  // SP QPSK 0.75 -> 450-bit code
    auto code = resolve_code(cfg);
    CHECK(code.R_c() == 450);
    CHECK(code.R_b() == 338);

    cfg.scheme = {SchemeKind::EP, 1};
    code = resolve_code(cfg);
    CHECK(code.R_c() == 288);
    CHECK(code.R_b() == 216);

    cfg = LinkConfig{};
    cfg.modulation = ConstellationId::QAM16;
    cfg.r_c = 0.5;
    code = resolve_code(cfg);
    CHECK(code.R_c() == 900);
    CHECK(code.R_b() == 450);
}

TEST_CASE("count_multiplications sums the trace and zero plans cost zero") {
    ReceiverTrace empty;
    CHECK(count_multiplications(empty) == 0);

    ReceiverTrace t;
    IterationRecord a, b;
    a.ops.mp_detect = 100;
    b.ops.ldpc_decode = 50;
    t.records = {a, b};
    CHECK(count_multiplications(t) == 150);
}
