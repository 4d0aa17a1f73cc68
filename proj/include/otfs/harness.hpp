// harness.hpp - Monte Carlo driver: per-point runs, sweeps, alpha search, CSV
//
// All randomness flows from per-frame keys derived from (seed, SNR, scheme,
// frame index), so a sweep's CSV is byte-identical across runs and thread
// counts. Frames execute in parallel when cfg.threads > 1; deltas reduce in
// frame order into a single accumulator.

#pragma once

#include <iosfwd>
#include <optional>

#include "otfs/config.hpp"
#include "otfs/ldpc.hpp"
#include "otfs/metrics.hpp"
#include "otfs/receiver.hpp"

namespace otfs {

// Locate and load the parity-check file for cfg (explicit path, or pick the
// shipped code matching the frame's bit capacity and nominal rate), applying
// shortening/puncturing so R_c equals the capacity exactly.
CodeSpec resolve_code(const LinkConfig& cfg);

// Returns the directory holding data/codes (env OTFS_DATA_DIR overrides the
// build-time source path).
std::string data_dir();

// One (scheme, SNR) Monte Carlo point over cfg.trials frames. `alpha`
// overrides cfg.alpha when given (the sweep passes the resolved value).
MetricsRecord run_point(const LinkConfig& cfg, double snr_db,
                        std::optional<double> alpha = std::nullopt,
                        std::ostream* trace_out = nullptr,
                        std::ostream* beliefs_out = nullptr);

// Uncoded probe used by the alpha search: cfg.plan.r_end() estimation and
// cancellation rounds with hard decisions, BER measured on raw detector bits.
double run_uncoded_ber(const LinkConfig& cfg, const SchemeId& scheme, double snr_db, double alpha,
                       int trials);

// Grid search over alpha in {0.1, ..., 0.9} minimizing uncoded BER; ties go
// to the smaller alpha.
double alpha_grid_search(const LinkConfig& cfg, const SchemeId& scheme, double snr_db, int trials);

// CSV cache of alpha search results keyed by (scheme, snr, modulation, N_p).
class AlphaCache {
public:
    void load(const std::string& path);  // missing file is an empty cache
    void save(const std::string& path) const;
    std::optional<double> lookup(const SchemeId& scheme, double snr_db, ConstellationId mod,
                                 int n_pilots) const;
    void store(const SchemeId& scheme, double snr_db, ConstellationId mod, int n_pilots,
               double alpha, double uncoded_ber);

private:
    struct Row {
        std::string scheme;
        double snr_db;
        std::string modulation;
        int n_pilots;
        double alpha;
        double uncoded_ber;
    };
    std::vector<Row> rows_;
};

// Cross product of schemes x cfg.snr_grid; one CSV row per point.
void run_sweep(const LinkConfig& cfg, const std::vector<SchemeId>& schemes, std::ostream& csv,
               std::ostream* log = nullptr, std::ostream* trace_out = nullptr);

uint64_t count_multiplications(const ReceiverTrace& trace);

std::string csv_header();
std::string csv_row(const MetricsRecord& rec);

// Per-frame RNG key: (seed, snr, scheme label, frame, purpose).
uint64_t frame_key(uint64_t seed, double snr_db, const SchemeId& scheme, uint64_t frame,
                   uint64_t purpose);

}  // namespace otfs
