#pragma once
#include <algorithm>
#include <cassert>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "fp.hpp"

// Sparse elimination kernels used by the homology layer. Bar differentials are
// boundary-like matrices (a handful of entries per column), so ranks are taken
// by column reduction with a structural peeling pre-pass, plus the standard
// chain-complex clearing: a reduced column of d_{i+1} with low row r certifies
// that column r of d_i is spanned by earlier columns and can be skipped.

namespace koszul::detail {

struct SparseEntry {
    uint32_t row;
    uint32_t val;
};

/// Column-major sparse matrix mod p. Columns sorted by row index.
struct SparseMat {
    uint32_t rows = 0;
    std::vector<std::vector<SparseEntry>> cols;

    size_t ncols() const { return cols.size(); }
    size_t nnz() const {
        size_t t = 0;
        for (auto& c : cols) t += c.size();
        return t;
    }
};

/// dst += lambda * src (sorted merge, drops zeros).
inline void axpy_merge(const PrimeField& f, std::vector<SparseEntry>& dst,
                       const std::vector<SparseEntry>& src, uint32_t lambda,
                       std::vector<SparseEntry>& scratch) {
    scratch.clear();
    scratch.reserve(dst.size() + src.size());
    size_t i = 0, j = 0;
    const uint64_t lam = lambda;
    while (i < dst.size() && j < src.size()) {
        if (dst[i].row < src[j].row) {
            scratch.push_back(dst[i++]);
        } else if (dst[i].row > src[j].row) {
            uint32_t v = static_cast<uint32_t>(lam * src[j].val % f.p());
            if (v) scratch.push_back({src[j].row, v});
            ++j;
        } else {
            uint32_t v = static_cast<uint32_t>((dst[i].val + lam * src[j].val) % f.p());
            if (v) scratch.push_back({dst[i].row, v});
            ++i;
            ++j;
        }
    }
    for (; i < dst.size(); ++i) scratch.push_back(dst[i]);
    for (; j < src.size(); ++j) {
        uint32_t v = static_cast<uint32_t>(lam * src[j].val % f.p());
        if (v) scratch.push_back({src[j].row, v});
    }
    dst.swap(scratch);
}

struct ReduceOutcome {
    size_t rank = 0;
    // Rows usable for clearing the next differential down the chain: lows of
    // reduced image columns (weight-1-column peels and reduction pivots).
    std::vector<uint32_t> clear_lows;
};

/// Rank by peeling + left-to-right low reduction. Destroys `m`.
/// `skip` (optional, per column) marks columns that are known linear
/// combinations of earlier ones and contribute nothing.
inline ReduceOutcome reduce_rank(const PrimeField& f, SparseMat& m,
                                 const std::vector<char>* skip = nullptr,
                                 bool peel = true) {
    ReduceOutcome out;
    const size_t ncols = m.cols.size();
    std::vector<char> col_alive(ncols, 1);
    if (skip) {
        assert(skip->size() == ncols);
        for (size_t c = 0; c < ncols; ++c)
            if ((*skip)[c]) col_alive[c] = 0;
    }
    for (size_t c = 0; c < ncols; ++c)
        if (col_alive[c] && m.cols[c].empty()) col_alive[c] = 0;

    if (peel) {
        // Structural phase: pivots on weight-1 rows and weight-1 columns are
        // free (no fill). Cascades typically collapse most of a bar matrix.
        std::vector<uint32_t> roww(m.rows, 0);
        std::vector<std::vector<uint32_t>> radj(m.rows);
        for (size_t c = 0; c < ncols; ++c) {
            if (!col_alive[c]) continue;
            for (auto& e : m.cols[c]) {
                ++roww[e.row];
                radj[e.row].push_back(static_cast<uint32_t>(c));
            }
        }
        std::vector<char> row_alive(m.rows, 1);
        std::vector<uint32_t> rq, cq;
        for (uint32_t r = 0; r < m.rows; ++r)
            if (roww[r] == 1) rq.push_back(r);
        for (size_t c = 0; c < ncols; ++c)
            if (col_alive[c] && m.cols[c].size() == 1) cq.push_back(static_cast<uint32_t>(c));

        auto col_contains = [&](uint32_t c, uint32_t r) {
            auto& v = m.cols[c];
            auto it = std::lower_bound(v.begin(), v.end(), r,
                                       [](const SparseEntry& e, uint32_t row) { return e.row < row; });
            return it != v.end() && it->row == r;
        };
        auto kill_col = [&](uint32_t c) {
            for (auto& e : m.cols[c]) {
                if (row_alive[e.row] && roww[e.row] > 0) {
                    if (--roww[e.row] == 1) rq.push_back(e.row);
                }
            }
            col_alive[c] = 0;
            m.cols[c].clear();
            m.cols[c].shrink_to_fit();
        };

        while (!rq.empty() || !cq.empty()) {
            if (!cq.empty()) {
                uint32_t c = cq.back();
                cq.pop_back();
                if (!col_alive[c] || m.cols[c].size() != 1) continue;
                uint32_t r = m.cols[c][0].row;
                if (!row_alive[r]) continue;
                // single-entry column: its low is r, valid for clearing
                ++out.rank;
                out.clear_lows.push_back(r);
                row_alive[r] = 0;
                col_alive[c] = 0;
                for (uint32_t c2 : radj[r]) {
                    if (!col_alive[c2] || c2 == c) continue;
                    auto& v = m.cols[c2];
                    auto it = std::lower_bound(
                        v.begin(), v.end(), r,
                        [](const SparseEntry& e, uint32_t row) { return e.row < row; });
                    if (it != v.end() && it->row == r) {
                        v.erase(it);
                        if (v.empty())
                            col_alive[c2] = 0;
                        else if (v.size() == 1)
                            cq.push_back(c2);
                    }
                }
                roww[r] = 0;
                continue;
            }
            uint32_t r = rq.back();
            rq.pop_back();
            if (!row_alive[r] || roww[r] != 1) continue;
            uint32_t c = UINT32_MAX;
            for (uint32_t c2 : radj[r]) {
                if (col_alive[c2] && col_contains(c2, r)) {
                    c = c2;
                    break;
                }
            }
            if (c == UINT32_MAX) {  // stale count
                roww[r] = 0;
                continue;
            }
            ++out.rank;  // pivot (r, c); r appears nowhere else
            row_alive[r] = 0;
            roww[r] = 0;
            kill_col(c);
        }
    }

    // Low-based left-to-right reduction of the residue.
    std::unordered_map<uint32_t, uint32_t> pivot_of_low;  // low row -> column
    pivot_of_low.reserve(1024);
    std::vector<SparseEntry> scratch;
    for (size_t c = 0; c < ncols; ++c) {
        if (!col_alive[c]) continue;
        auto& cur = m.cols[c];
        while (!cur.empty()) {
            uint32_t low = cur.back().row;
            auto it = pivot_of_low.find(low);
            if (it == pivot_of_low.end()) {
                uint32_t inv = f.inv(cur.back().val);
                if (inv != 1)
                    for (auto& e : cur) e.val = f.mul(e.val, inv);
                pivot_of_low.emplace(low, static_cast<uint32_t>(c));
                ++out.rank;
                out.clear_lows.push_back(low);
                break;
            }
            axpy_merge(f, cur, m.cols[it->second], f.neg(cur.back().val), scratch);
        }
    }
    return out;
}

inline size_t sparse_rank(const PrimeField& f, SparseMat m) {
    return reduce_rank(f, m).rank;
}

/// Verify d_small ∘ d_big = 0 where d_big: C_{i+1} -> C_i, d_small: C_i -> C_{i-1}.
inline bool composes_to_zero(const PrimeField& f, const SparseMat& d_small,
                             const SparseMat& d_big) {
    std::unordered_map<uint32_t, uint32_t> acc;
    for (auto& col : d_big.cols) {
        acc.clear();
        for (auto& e : col) {
            for (auto& e2 : d_small.cols[e.row]) {
                uint32_t& slot = acc[e2.row];
                slot = static_cast<uint32_t>(
                    (slot + static_cast<uint64_t>(e.val) * e2.val) % f.p());
            }
        }
        for (auto& [row, v] : acc)
            if (v % f.p() != 0) return false;
    }
    return true;
}

/// Ranks of all differentials of a chain d_i: C_i -> C_{i-1}, i = 1..top,
/// reduced top-down so each reduction clears known-dependent columns below.
/// ds[0] is ignored; ds[i] is d_i. Destroys the matrices.
inline std::vector<size_t> chain_ranks(const PrimeField& f, std::vector<SparseMat>& ds,
                                       bool check_d2 = true) {
    const size_t top = ds.empty() ? 0 : ds.size() - 1;
    std::vector<size_t> ranks(top + 2, 0);
    if (check_d2) {
        for (size_t i = 1; i + 1 <= top; ++i) {
            if (ds[i].ncols() == 0 || ds[i + 1].ncols() == 0) continue;
            if (!composes_to_zero(f, ds[i], ds[i + 1]))
                throw error("bar differential: d∘d != 0 (sign convention bug)");
        }
    }
    std::vector<char> skip;
    bool have_skip = false;
    for (size_t i = top; i >= 1; --i) {
        assert(!have_skip || skip.size() == ds[i].ncols());
        ReduceOutcome oc = reduce_rank(f, ds[i], have_skip ? &skip : nullptr);
        ranks[i] = oc.rank;
        if (i > 1) {
            skip.assign(ds[i - 1].ncols(), 0);
            for (uint32_t low : oc.clear_lows) {
                assert(low < skip.size());
                skip[low] = 1;
            }
            have_skip = true;
        }
    }
    return ranks;
}

}  // namespace koszul::detail
