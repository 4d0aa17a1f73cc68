#include "otfs/config.hpp"

#include <fstream>
#include <sstream>

namespace otfs {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::string unquote(std::string v) {
    if (v.size() >= 2 && ((v.front() == '"' && v.back() == '"') || (v.front() == '\'' && v.back() == '\'')))
        return v.substr(1, v.size() - 2);
    return v;
}

std::vector<double> parse_list(const std::string& v) {
    std::string body = v;
    if (!body.empty() && body.front() == '[') {
        if (body.back() != ']') throw ConfigError("unterminated list: " + v);
        body = body.substr(1, body.size() - 2);
    }
    std::vector<double> out;
    std::string item;
    std::istringstream ss(body);
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        out.push_back(std::stod(item));
    }
    if (out.empty()) throw ConfigError("empty list: " + v);
    return out;
}

bool parse_bool(const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("expected boolean, got: " + v);
}

}  // namespace

LinkConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);

    LinkConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string val = unquote(trim(line.substr(eq + 1)));

        try {
            if (key == "n") cfg.N = std::stoi(val);
            else if (key == "m") cfg.M = std::stoi(val);
            else if (key == "delta_f") cfg.delta_f = std::stod(val);
            else if (key == "f_c") cfg.f_c = std::stod(val);
            else if (key == "l_max") cfg.l_max = std::stoi(val);
            else if (key == "k_max") cfg.k_max = std::stoi(val);
            else if (key == "paths") cfg.P = std::stoi(val);
            else if (key == "modulation") cfg.modulation = constellation_from_string(val);
            else if (key == "code_rate") cfg.r_c = std::stod(val);
            else if (key == "scheme") {
                if (val == "ep") cfg.scheme.kind = SchemeKind::EP;
                else if (val == "sp") cfg.scheme.kind = SchemeKind::SP;
                else throw ConfigError("scheme must be ep or sp, got: " + val);
            }
            else if (key == "n_pilots") cfg.scheme.n_pilots = std::stoi(val);
            else if (key == "r_unc") cfg.plan.r_unc = std::stoi(val);
            else if (key == "r_cod") cfg.plan.r_cod = std::stoi(val);
            else if (key == "i_mp") cfg.I_MP = std::stoi(val);
            else if (key == "i_ldpc") cfg.I_LDPC = std::stoi(val);
            else if (key == "mp_damping") cfg.mp_damping = std::stod(val);
            else if (key == "mp_conv_tol") cfg.mp_conv_tol = std::stod(val);
            else if (key == "logit_clip") cfg.logit_clip = std::stod(val);
            else if (key == "snr_db") cfg.snr_grid = parse_list(val);
            else if (key == "alpha") {
                if (val == "auto") cfg.alpha_auto = true;
                else cfg.alpha = std::stod(val);
            }
            else if (key == "alpha_trials") cfg.alpha_trials = std::stoi(val);
            else if (key == "trials") cfg.trials = std::stoi(val);
            else if (key == "seed") cfg.seed = std::stoull(val);
            else if (key == "pcsi") cfg.pcsi = parse_bool(val);
            else if (key == "strict_unnormalized_pmf") cfg.strict_unnormalized_pmf = parse_bool(val);
            else if (key == "threads") cfg.threads = std::stoi(val);
            else if (key == "code_file") cfg.code_file = val;
            else if (key == "alpha_cache") cfg.alpha_cache = val;
            else throw ConfigError("unknown key: " + key);
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            throw ConfigError(path + ":" + std::to_string(lineno) + ": bad value for " + key +
                              " (" + e.what() + ")");
        }
    }
    return cfg;
}

void validate(const LinkConfig& cfg) {
    if (cfg.N < 1 || cfg.M < 1) throw ConfigError("grid dimensions must be positive");
    if (cfg.l_max < 0 || cfg.l_max >= cfg.M) throw ConfigError("l_max must satisfy 0 <= l_max < M");
    if (cfg.k_max < 0 || 2 * cfg.k_max >= cfg.N) throw ConfigError("k_max must satisfy 2*k_max < N");
    if (cfg.P < 1 || cfg.P > (cfg.l_max + 1) * (2 * cfg.k_max + 1))
        throw ConfigError("P must fit the (l_max+1)(2k_max+1) tap lattice");
    if (cfg.scheme.kind == SchemeKind::EP && cfg.scheme.n_pilots != 1)
        throw ConfigError("EP uses exactly one pilot");
    if (cfg.scheme.n_pilots < 1 ||
        cfg.scheme.n_pilots > max_feasible_pilots(cfg.N, cfg.M, cfg.l_max, cfg.k_max))
        throw ConfigError("n_pilots exceeds max feasible " +
                          std::to_string(max_feasible_pilots(cfg.N, cfg.M, cfg.l_max, cfg.k_max)));
    if (!cfg.plan.valid()) throw ConfigError("iteration plan needs r_unc, r_cod >= 0 and r_end >= 1");
    if (!cfg.alpha_auto && !(cfg.alpha > 0.0 && cfg.alpha < 1.0))
        throw ConfigError("alpha must lie in (0,1) or be auto");
    if (cfg.r_c <= 0.0 || cfg.r_c > 1.0) throw ConfigError("code_rate must lie in (0,1]");
    if (cfg.trials < 1 || cfg.alpha_trials < 1) throw ConfigError("trial counts must be >= 1");
    if (cfg.I_MP < 1 || cfg.I_LDPC < 1) throw ConfigError("iteration counts must be >= 1");
    if (cfg.threads < 1) throw ConfigError("threads must be >= 1");
    if (cfg.snr_grid.empty()) throw ConfigError("snr_db grid is empty");
    if (cfg.scheme.kind == SchemeKind::EP &&
        cfg.N_d() < 1)
        throw ConfigError("EP guard block leaves no data cells on this grid");
}

}  // namespace otfs
