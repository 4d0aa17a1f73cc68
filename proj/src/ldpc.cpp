#include "otfs/ldpc.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace otfs {

namespace {

int words_for(int bits) { return (bits + 63) / 64; }

bool get_bit(const std::vector<uint64_t>& row, int i) { return (row[i >> 6] >> (i & 63)) & 1; }

void flip_bit(std::vector<uint64_t>& row, int i) { row[i >> 6] ^= 1ull << (i & 63); }

void xor_rows(std::vector<uint64_t>& dst, const std::vector<uint64_t>& src) {
    for (size_t w = 0; w < dst.size(); ++w) dst[w] ^= src[w];
}

}  // namespace

CodeSpec CodeSpec::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open parity-check file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw ConfigError("empty parity-check file: " + path);
    std::istringstream head(line);
    CodeSpec code;
    if (!(head >> code.n_ >> code.m_) || code.n_ <= 0 || code.m_ <= 0 || code.m_ >= code.n_)
        throw ConfigError("bad parity-check header in " + path);

    code.row_cols_.assign(code.m_, {});
    std::vector<std::vector<uint64_t>> rows(code.m_, std::vector<uint64_t>(words_for(code.n_), 0));

    for (int c = 0; c < code.n_; ++c) {
        if (!std::getline(in, line))
            throw ConfigError(path + ": expected " + std::to_string(code.n_) + " column lines");
        std::istringstream ls(line);
        int check;
        int weight = 0;
        while (ls >> check) {
            if (check < 1 || check > code.m_)
                throw ConfigError(path + ": check index out of range in column " + std::to_string(c + 1));
            code.row_cols_[check - 1].push_back(c);
            flip_bit(rows[check - 1], c);
            ++weight;
        }
        if (weight < 2)
            throw ConfigError(path + ": column " + std::to_string(c + 1) + " has weight < 2");
    }

    code.build_encoder(std::move(rows));
    code.rebuild_tx_cols();
    return code;
}

void CodeSpec::build_encoder(std::vector<std::vector<uint64_t>> rows) {
    // Full reduced row echelon form over GF(2).
    std::vector<int> pivot_col;
    int rank = 0;
    for (int c = 0; c < n_ && rank < m_; ++c) {
        int pr = -1;
        for (int r = rank; r < m_; ++r)
            if (get_bit(rows[r], c)) {
                pr = r;
                break;
            }
        if (pr < 0) continue;
        std::swap(rows[rank], rows[pr]);
        for (int r = 0; r < m_; ++r)
            if (r != rank && get_bit(rows[r], c)) xor_rows(rows[r], rows[rank]);
        pivot_col.push_back(c);
        ++rank;
    }
    if (rank != m_)
        throw ConfigError("parity-check matrix is rank deficient: rank " + std::to_string(rank) +
                          " of " + std::to_string(m_));

    parity_cols_ = pivot_col;
    std::vector<char> is_pivot(n_, 0);
    for (int c : pivot_col) is_pivot[c] = 1;
    std::vector<int> info_index(n_, -1);
    for (int c = 0; c < n_; ++c)
        if (!is_pivot[c]) {
            info_index[c] = static_cast<int>(info_cols_.size());
            info_cols_.push_back(c);
        }

    const int kw = words_for(static_cast<int>(info_cols_.size()));
    parity_dep_.assign(m_, std::vector<uint64_t>(kw, 0));
    for (int r = 0; r < m_; ++r)
        for (int c = 0; c < n_; ++c)
            if (!is_pivot[c] && get_bit(rows[r], c)) flip_bit(parity_dep_[r], info_index[c]);
}

void CodeSpec::set_rate_matching(int shortening, int puncturing) {
    if (shortening < 0 || puncturing < 0 || shortening > k_mother() || puncturing > m_ ||
        n_ - shortening - puncturing < 1)
        throw ConfigError("invalid rate matching: shorten " + std::to_string(shortening) +
                          ", puncture " + std::to_string(puncturing));
    shortening_ = shortening;
    puncturing_ = puncturing;
    rebuild_tx_cols();
}

void CodeSpec::rebuild_tx_cols() {
    std::vector<char> removed(n_, 0);
    for (int i = 0; i < shortening_; ++i) removed[info_cols_[info_cols_.size() - 1 - i]] = 1;
    for (int i = 0; i < puncturing_; ++i) removed[parity_cols_[parity_cols_.size() - 1 - i]] = 1;
    tx_cols_.clear();
    for (int c = 0; c < n_; ++c)
        if (!removed[c]) tx_cols_.push_back(c);
}

bool CodeSpec::is_codeword(const std::vector<uint8_t>& mother_bits) const {
    for (const auto& cols : row_cols_) {
        int parity = 0;
        for (int c : cols) parity ^= mother_bits[c] & 1;
        if (parity) return false;
    }
    return true;
}

std::vector<uint8_t> encode(const CodeSpec& code, const std::vector<uint8_t>& info_bits) {
    if (static_cast<int>(info_bits.size()) != code.R_b())
        throw ConfigError("encode expects " + std::to_string(code.R_b()) + " info bits, got " +
                          std::to_string(info_bits.size()));

    // Shortened tail positions stay zero.
    const int k = code.k_mother();
    std::vector<uint64_t> info_mask(words_for(k), 0);
    for (int i = 0; i < code.R_b(); ++i)
        if (info_bits[i] & 1) flip_bit(info_mask, i);

    std::vector<uint8_t> mother(code.n_, 0);
    for (int i = 0; i < code.R_b(); ++i) mother[code.info_cols_[i]] = info_bits[i] & 1;
    for (int r = 0; r < code.m_; ++r) {
        uint64_t acc = 0;
        for (size_t w = 0; w < info_mask.size(); ++w) acc ^= code.parity_dep_[r][w] & info_mask[w];
        mother[code.parity_cols_[r]] = static_cast<uint8_t>(__builtin_popcountll(acc) & 1);
    }

    std::vector<uint8_t> tx(code.tx_cols_.size());
    for (size_t i = 0; i < code.tx_cols_.size(); ++i) tx[i] = mother[code.tx_cols_[i]];
    return tx;
}

DecodeResult decode(const CodeSpec& code, const std::vector<double>& llr_in, int max_iters,
                    double clip, OpCounts* ops) {
    if (static_cast<int>(llr_in.size()) != code.R_c())
        throw ConfigError("decode expects " + std::to_string(code.R_c()) + " LLRs, got " +
                          std::to_string(llr_in.size()));

    const int n = code.n_mother();
    const int m = code.checks();

    // Mother-domain priors: transmitted LLRs, +clip for shortened info,
    // 0 for punctured parity.
    std::vector<double> prior(n, 0.0);
    for (size_t i = 0; i < code.tx_cols().size(); ++i) prior[code.tx_cols()[i]] = llr_in[i];
    {
        std::vector<char> transmitted(n, 0);
        for (int c : code.tx_cols()) transmitted[c] = 1;
        for (int c : code.info_cols())
            if (!transmitted[c]) prior[c] = clip;
    }

    std::vector<double> posterior = prior;
    auto hard_ok = [&] {
        for (const auto& cols : code.row_cols()) {
            int parity = 0;
            for (int c : cols) parity ^= posterior[c] < 0.0;
            if (parity) return false;
        }
        return true;
    };
    auto confident = [&] {
        for (double v : posterior)
            if (v == 0.0) return false;
        return true;
    };

    DecodeResult res;
    auto finish = [&](bool conv, int iters) {
        res.converged = conv;
        res.iterations = iters;
        res.bits.resize(code.R_b());
        for (int i = 0; i < code.R_b(); ++i) res.bits[i] = posterior[code.info_cols()[i]] < 0.0;
        res.llr_out.resize(code.R_c());
        for (int i = 0; i < code.R_c(); ++i)
            res.llr_out[i] = std::max(-clip, std::min(clip, posterior[code.tx_cols()[i]]));
        return res;
    };

    if (hard_ok() && confident()) return finish(true, 0);

    // Flooding sum-product with per-row prefix/suffix tanh products.
    size_t edge_total = 0;
    for (const auto& cols : code.row_cols()) edge_total += cols.size();

    std::vector<std::vector<double>> R(m);  // check -> variable messages
    for (int r = 0; r < m; ++r) R[r].assign(code.row_cols()[r].size(), 0.0);

    int it = 0;
    bool conv = false;
    std::vector<double> t, pre, suf;
    for (it = 1; it <= max_iters; ++it) {
        for (int r = 0; r < m; ++r) {
            const auto& cols = code.row_cols()[r];
            const size_t deg = cols.size();
            t.resize(deg);
            pre.resize(deg + 1);
            suf.resize(deg + 1);
            for (size_t e = 0; e < deg; ++e) {
                double q = posterior[cols[e]] - R[r][e];
                q = std::max(-clip, std::min(clip, q));
                t[e] = std::tanh(0.5 * q);
            }
            pre[0] = 1.0;
            for (size_t e = 0; e < deg; ++e) pre[e + 1] = pre[e] * t[e];
            suf[deg] = 1.0;
            for (size_t e = deg; e-- > 0;) suf[e] = suf[e + 1] * t[e];
            for (size_t e = 0; e < deg; ++e) {
                double p = pre[e] * suf[e + 1];
                p = std::max(-0.999999999999999, std::min(0.999999999999999, p));
                double msg = 2.0 * std::atanh(p);
                R[r][e] = std::max(-clip, std::min(clip, msg));
            }
        }

        posterior = prior;
        for (int r = 0; r < m; ++r) {
            const auto& cols = code.row_cols()[r];
            for (size_t e = 0; e < cols.size(); ++e) posterior[cols[e]] += R[r][e];
        }

        if (hard_ok() && confident()) {
            conv = true;
            break;
        }
    }
    if (ops) ops->ldpc_decode += static_cast<uint64_t>(std::min(it, max_iters)) * edge_total * 6;
    return finish(conv, std::min(it, max_iters));
}

}  // namespace otfs
