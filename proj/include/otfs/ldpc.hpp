// ldpc.hpp - LDPC encoding and belief-propagation decoding
//
// Parity-check matrices come from plain text files (see data/codes/FORMAT.md).
// The loader row-reduces H over GF(2) once: pivot columns become parity bits,
// free columns carry information, and each parity bit is the XOR of the info
// bits on its reduced row. Rate matching shortens info bits (known zeros,
// decoded with a +clip prior) at the tail and punctures parity bits (LLR 0)
// at the tail, so the transmitted length can be fitted to a frame.

#pragma once

#include <cstdint>
#include <string>

#include "otfs/opcount.hpp"
#include "otfs/types.hpp"

namespace otfs {

class CodeSpec {
public:
    // Loads and validates a parity-check file: full row rank, every column
    // weight >= 2. Throws ConfigError on format or validation failure.
    static CodeSpec load(const std::string& path);

    int n_mother() const { return n_; }
    int checks() const { return m_; }
    int k_mother() const { return n_ - m_; }

    // Rate matching. shortening + puncturing must leave at least one
    // transmitted bit and shortening <= k_mother.
    void set_rate_matching(int shortening, int puncturing);
    int shortening() const { return shortening_; }
    int puncturing() const { return puncturing_; }

    int R_c() const { return n_ - shortening_ - puncturing_; }
    int R_b() const { return k_mother() - shortening_; }
    double rate() const { return static_cast<double>(R_b()) / R_c(); }

    const std::vector<std::vector<int>>& row_cols() const { return row_cols_; }
    const std::vector<int>& info_cols() const { return info_cols_; }
    const std::vector<int>& tx_cols() const { return tx_cols_; }

    bool is_codeword(const std::vector<uint8_t>& mother_bits) const;

private:
    int n_ = 0;  // mother code length (columns)
    int m_ = 0;  // checks (rows)
    std::vector<std::vector<int>> row_cols_;   // per check: column indices
    std::vector<int> info_cols_;               // free columns, ascending
    std::vector<int> parity_cols_;             // pivot columns, ascending
    std::vector<std::vector<uint64_t>> parity_dep_;  // per parity: bitset over info index
    int shortening_ = 0;
    int puncturing_ = 0;
    std::vector<int> tx_cols_;                 // transmitted columns, ascending

    void build_encoder(std::vector<std::vector<uint64_t>> rows);
    void rebuild_tx_cols();

    friend std::vector<uint8_t> encode(const CodeSpec&, const std::vector<uint8_t>&);
    friend struct DecodeAccess;
};

// info_bits (size R_b) -> transmitted bits (size R_c).
std::vector<uint8_t> encode(const CodeSpec& code, const std::vector<uint8_t>& info_bits);

struct DecodeResult {
    std::vector<uint8_t> bits;     // hard-decided info bits, size R_b
    std::vector<double> llr_out;   // posterior LLRs on the R_c transmitted bits
    bool converged = false;
    int iterations = 0;
};

// Sum-product BP, early exit once the hard decisions satisfy every check
// with nonzero confidence. llr_in uses the convention positive -> bit 0.
DecodeResult decode(const CodeSpec& code, const std::vector<double>& llr_in, int max_iters,
                    double clip = 30.0, OpCounts* ops = nullptr);

}  // namespace otfs
