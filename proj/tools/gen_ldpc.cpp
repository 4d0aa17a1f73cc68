// gen_ldpc.cpp - Deterministic generator for the shipped parity-check fixtures
//
// Builds a column-weight-3 code with girth >= 6 (no two columns share more
// than one check) by greedy degree-balanced placement, retrying with a new
// subseed until the matrix has full row rank. Regenerate any fixture with:
//
//   gen_ldpc <n> <m> <seed> <out.pchk>
//
// The shipped files under data/codes were produced with the commands listed
// in data/codes/FORMAT.md.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "otfs/rng.hpp"

using namespace otfs;

namespace {

constexpr int kColumnWeight = 3;

struct Construction {
    std::vector<std::vector<int>> col_rows;  // per column, sorted
};

bool try_build(int n, int m, uint64_t seed, Construction& out) {
    CounterRng rng(seed);
    std::vector<int> degree(m, 0);
    std::set<std::pair<int, int>> used_pairs;
    out.col_rows.assign(n, {});

    for (int c = 0; c < n; ++c) {
        // Candidate rows ordered by (degree, random tiebreak).
        std::vector<std::pair<uint64_t, int>> order(m);
        for (int r = 0; r < m; ++r)
            order[r] = {static_cast<uint64_t>(degree[r]) << 32 | (rng.next_u64() & 0xFFFFFFFF), r};
        std::sort(order.begin(), order.end());

        std::vector<int> picked;
        for (const auto& [key, r] : order) {
            bool ok = true;
            for (int p : picked)
                if (used_pairs.count({std::min(p, r), std::max(p, r)})) {
                    ok = false;
                    break;
                }
            if (!ok) continue;
            picked.push_back(r);
            if (static_cast<int>(picked.size()) == kColumnWeight) break;
        }
        if (static_cast<int>(picked.size()) < kColumnWeight) return false;

        std::sort(picked.begin(), picked.end());
        for (size_t i = 0; i < picked.size(); ++i) {
            ++degree[picked[i]];
            for (size_t j = i + 1; j < picked.size(); ++j)
                used_pairs.insert({picked[i], picked[j]});
        }
        out.col_rows[c] = picked;
    }
    return true;
}

int gf2_rank(const Construction& cons, int n, int m) {
    const int words = (n + 63) / 64;
    std::vector<std::vector<uint64_t>> rows(m, std::vector<uint64_t>(words, 0));
    for (int c = 0; c < n; ++c)
        for (int r : cons.col_rows[c]) rows[r][c >> 6] ^= 1ull << (c & 63);

    int rank = 0;
    for (int c = 0; c < n && rank < m; ++c) {
        int pivot = -1;
        for (int r = rank; r < m; ++r)
            if ((rows[r][c >> 6] >> (c & 63)) & 1) {
                pivot = r;
                break;
            }
        if (pivot < 0) continue;
        std::swap(rows[rank], rows[pivot]);
        for (int r = 0; r < m; ++r)
            if (r != rank && ((rows[r][c >> 6] >> (c & 63)) & 1))
                for (int w = 0; w < words; ++w) rows[r][w] ^= rows[rank][w];
        ++rank;
    }
    return rank;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 5) {
        std::cerr << "usage: gen_ldpc <n> <m> <seed> <out.pchk>\n";
        return 2;
    }
    const int n = std::stoi(argv[1]);
    const int m = std::stoi(argv[2]);
    const uint64_t seed = std::stoull(argv[3]);
    const std::string out_path = argv[4];

    if (n <= m || m < kColumnWeight) {
        std::cerr << "need n > m >= " << kColumnWeight << "\n";
        return 2;
    }

    Construction cons;
    const uint64_t kMaxAttempts = 10000;
    uint64_t sub = 0;
    for (sub = 0; sub < kMaxAttempts; ++sub) {
        if (!try_build(n, m, derive_key(seed, sub), cons)) continue;
        if (gf2_rank(cons, n, m) == m) break;
    }
    if (sub == kMaxAttempts) {
        std::cerr << "failed to build a full-rank girth-6 code for n=" << n << " m=" << m << "\n";
        return 1;
    }

    std::ofstream out(out_path, std::ios::binary);
    out << n << " " << m << "\n";
    for (int c = 0; c < n; ++c) {
        for (size_t i = 0; i < cons.col_rows[c].size(); ++i)
            out << (i ? " " : "") << cons.col_rows[c][i] + 1;
        out << "\n";
    }
    out << "\n";
    std::cout << out_path << ": n=" << n << " m=" << m << " k=" << (n - m)
              << " rate=" << static_cast<double>(n - m) / n << " (subseed " << sub << ")\n";
    return 0;
}
