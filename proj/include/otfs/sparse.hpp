// sparse.hpp - Coordinate-format sparse complex matrix
//
// Deterministic row-major entry ordering so op counts and serialized output
// are reproducible. Sized for delay-Doppler channel matrices: at most
// P nonzeros per row, so matvec is O(P * rows).

#pragma once

#include <algorithm>
#include <cstdint>

#include "otfs/types.hpp"

namespace otfs {

class SparseCMat {
public:
    struct Entry {
        int r;
        int c;
        Complex v;
    };

    SparseCMat() = default;
    SparseCMat(int rows, int cols) : rows_(rows), cols_(cols) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    size_t nnz() const { return entries_.size(); }
    const std::vector<Entry>& entries() const { return entries_; }

    void add(int r, int c, Complex v) {
        entries_.push_back({r, c, v});
        finalized_ = false;
    }

    // Sort row-major and build CSR row offsets. Duplicate (r,c) pairs are merged.
    void finalize() {
        std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) {
            return a.r != b.r ? a.r < b.r : a.c < b.c;
        });
        size_t w = 0;
        for (size_t i = 0; i < entries_.size(); ++i) {
            if (w > 0 && entries_[w - 1].r == entries_[i].r && entries_[w - 1].c == entries_[i].c) {
                entries_[w - 1].v += entries_[i].v;
            } else {
                entries_[w++] = entries_[i];
            }
        }
        entries_.resize(w);
        row_start_.assign(rows_ + 1, 0);
        for (const auto& e : entries_) row_start_[e.r + 1]++;
        for (int r = 0; r < rows_; ++r) row_start_[r + 1] += row_start_[r];
        finalized_ = true;
    }

    bool finalized() const { return finalized_; }

    // y = A * x
    void matvec(const CVec& x, CVec& y) const {
        y.assign(rows_, Complex(0.0, 0.0));
        for (const auto& e : entries_) y[e.r] += e.v * x[e.c];
    }

    CVec matvec(const CVec& x) const {
        CVec y;
        matvec(x, y);
        return y;
    }

    // Entries of one row (requires finalize()).
    std::pair<const Entry*, const Entry*> row(int r) const {
        return {entries_.data() + row_start_[r], entries_.data() + row_start_[r + 1]};
    }

    double frob_sq() const {
        double s = 0.0;
        for (const auto& e : entries_) s += std::norm(e.v);
        return s;
    }

    // ||A - B||_F^2 by merge-walk over sorted entries (both must be finalized).
    static double frob_diff_sq(const SparseCMat& a, const SparseCMat& b) {
        auto key = [](const Entry& e) { return (static_cast<int64_t>(e.r) << 32) | static_cast<uint32_t>(e.c); };
        double s = 0.0;
        size_t i = 0, j = 0;
        while (i < a.entries_.size() && j < b.entries_.size()) {
            int64_t ka = key(a.entries_[i]), kb = key(b.entries_[j]);
            if (ka == kb) {
                s += std::norm(a.entries_[i].v - b.entries_[j].v);
                ++i; ++j;
            } else if (ka < kb) {
                s += std::norm(a.entries_[i++].v);
            } else {
                s += std::norm(b.entries_[j++].v);
            }
        }
        for (; i < a.entries_.size(); ++i) s += std::norm(a.entries_[i].v);
        for (; j < b.entries_.size(); ++j) s += std::norm(b.entries_[j].v);
        return s;
    }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<Entry> entries_;
    std::vector<int> row_start_;
    bool finalized_ = false;
};

}  // namespace otfs
