// sim_main.cpp - CLI entry point for the link-level simulator
//
// sim run --config <file> [--scheme ep|sp] [--np <k>] [--snr <list>]
//         [--alpha auto|<v>] [--plan <r_unc>,<r_cod>] [--trials <n>]
//         [--seed <u64>] [--pcsi] [--out <csv>] [--trace <jsonl>]
//
// Exit codes: 0 success, 2 configuration error.

#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "otfs/harness.hpp"

using namespace otfs;

namespace {

std::vector<double> parse_snr_list(const std::string& s) {
    std::vector<double> out;
    std::string item;
    std::istringstream ss(s);
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(std::stod(item));
    if (out.empty()) throw ConfigError("empty SNR list");
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"OTFS link-level simulator: embedded vs superimposed pilots"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Run a Monte Carlo sweep and emit CSV");
    std::string config_path, scheme_str, snr_str, alpha_str, plan_str;
    std::string out_path, trace_path, beliefs_path, alpha_cache;
    std::optional<int> np, trials, threads;
    std::optional<uint64_t> seed;
    bool pcsi = false, quiet = false;

    run->add_option("--config", config_path, "Config file (key = value)");
    run->add_option("--scheme", scheme_str, "ep or sp");
    run->add_option("--np", np, "Number of superimposed pilots");
    run->add_option("--snr", snr_str, "Comma-separated SNR grid in dB");
    run->add_option("--alpha", alpha_str, "Pilot power ratio in (0,1), or auto");
    run->add_option("--plan", plan_str, "Iterations as r_unc,r_cod");
    run->add_option("--trials", trials, "Frames per (scheme, SNR) point");
    run->add_option("--seed", seed, "Root seed");
    run->add_flag("--pcsi", pcsi, "Bypass estimation with the true channel");
    run->add_option("--out", out_path, "CSV output path (default stdout)");
    run->add_option("--trace", trace_path, "Per-iteration JSONL trace output");
    run->add_option("--dump-beliefs", beliefs_path, "CSV dump of frame 0 detector beliefs");
    run->add_option("--alpha-cache", alpha_cache, "CSV cache for alpha search results");
    run->add_option("--threads", threads, "Worker threads (default 1)");
    run->add_flag("--quiet", quiet, "Suppress progress logging");

    CLI11_PARSE(app, argc, argv);

    try {
        LinkConfig cfg;
        if (!config_path.empty()) cfg = parse_config_file(config_path);

        if (!scheme_str.empty()) {
            if (scheme_str == "ep") {
                cfg.scheme.kind = SchemeKind::EP;
                cfg.scheme.n_pilots = 1;
            } else if (scheme_str == "sp") {
                cfg.scheme.kind = SchemeKind::SP;
            } else {
                throw ConfigError("--scheme must be ep or sp");
            }
        }
        if (np) cfg.scheme.n_pilots = *np;
        if (!snr_str.empty()) cfg.snr_grid = parse_snr_list(snr_str);
        if (!alpha_str.empty()) {
            if (alpha_str == "auto") {
                cfg.alpha_auto = true;
            } else {
                cfg.alpha_auto = false;
                cfg.alpha = std::stod(alpha_str);
            }
        }
        if (!plan_str.empty()) {
            auto comma = plan_str.find(',');
            if (comma == std::string::npos) throw ConfigError("--plan expects r_unc,r_cod");
            cfg.plan.r_unc = std::stoi(plan_str.substr(0, comma));
            cfg.plan.r_cod = std::stoi(plan_str.substr(comma + 1));
        }
        if (trials) cfg.trials = *trials;
        if (seed) cfg.seed = *seed;
        if (pcsi) cfg.pcsi = true;
        if (threads) cfg.threads = *threads;
        if (!alpha_cache.empty()) cfg.alpha_cache = alpha_cache;
        validate(cfg);

        std::ofstream out_file, trace_file, beliefs_file;
        std::ostream* csv = &std::cout;
        if (!out_path.empty()) {
            out_file.open(out_path, std::ios::binary);  // LF endings everywhere
            if (!out_file) throw ConfigError("cannot open output file: " + out_path);
            csv = &out_file;
        }
        std::ostream* trace = nullptr;
        if (!trace_path.empty()) {
            trace_file.open(trace_path, std::ios::binary);
            if (!trace_file) throw ConfigError("cannot open trace file: " + trace_path);
            trace = &trace_file;
        }

        if (!beliefs_path.empty()) {
            beliefs_file.open(beliefs_path, std::ios::binary);
            if (!beliefs_file) throw ConfigError("cannot open beliefs file: " + beliefs_path);
            // Beliefs come from a dedicated single-point run on the first grid point.
            auto rec = run_point(cfg, cfg.snr_grid.front(), std::nullopt, nullptr, &beliefs_file);
            (void)rec;
        }

        run_sweep(cfg, {cfg.scheme}, *csv, quiet ? nullptr : &std::cerr, trace);
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
