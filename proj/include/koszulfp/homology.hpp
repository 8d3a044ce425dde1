#pragma once
#include <atomic>
#include <map>
#include <thread>
#include <vector>

#include "monomial.hpp"
#include "sparse.hpp"

namespace koszul {

/// Internal degree up to which homology of (A, M) is certified complete.
inline int certified_bound(const GradedModule& M) {
    return std::min(static_cast<int>(M.algebra()->trunc()), M.hi());
}

namespace detail {

/// Basis bookkeeping for (M ⊗ A_+^{⊗i})_j: one block per composition
/// j = j0 + j1 + ... + ji with j0 >= lo(M), js >= 1. Blocks ordered by
/// (j0, parts) lexicographically; inside a block indices are mixed-radix,
/// module index major.
struct BarBlock {
    int j0;
    std::vector<size_t> parts;
    size_t offset;
    size_t size;
};

struct BarLevel {
    std::vector<BarBlock> blocks;
    std::map<std::pair<int, std::vector<size_t>>, size_t> index;  // block lookup
    size_t total = 0;
};

inline BarLevel bar_level(const GradedModule& M, size_t i, int j) {
    const TruncatedGradedAlgebra& A = *M.algebra();
    BarLevel lv;
    // j0 ascending outer, parts lexicographic inner
    for (int j0 = M.lo(); j0 <= j - static_cast<int>(i); ++j0) {
        if (M.dim(j0) == 0) continue;
        int rem_total = j - j0;
        std::vector<size_t> ps(i, 0);
        auto go = [&](auto&& self, size_t pos, int rem) -> void {
            if (pos == i) {
                if (rem != 0) return;
                size_t size = M.dim(j0);
                for (size_t t = 0; t < i; ++t) size *= A.dim(ps[t]);
                if (!size) return;
                lv.index.emplace(std::make_pair(j0, ps), lv.blocks.size());
                lv.blocks.push_back({j0, ps, lv.total, size});
                lv.total += size;
                return;
            }
            int slots_after = static_cast<int>(i - pos - 1);
            for (size_t v = 1; static_cast<int>(v) + slots_after <= rem; ++v) {
                if (v > A.trunc()) break;
                if (A.dim(v) == 0) continue;
                ps[pos] = v;
                self(self, pos + 1, rem - static_cast<int>(v));
            }
        };
        if (i == 0) {
            if (rem_total == 0 && M.dim(j0) > 0) {
                lv.index.emplace(std::make_pair(j0, std::vector<size_t>{}), lv.blocks.size());
                lv.blocks.push_back({j0, {}, lv.total, M.dim(j0)});
                lv.total += M.dim(j0);
            }
        } else {
            go(go, 0, rem_total);
        }
    }
    return lv;
}

/// Sparse column cache of a dense matrix.
struct SparseCols {
    std::vector<std::vector<SparseEntry>> cols;
};

inline SparseCols sparsify(const FpMatrix& m) {
    SparseCols s;
    s.cols.resize(m.cols());
    for (size_t c = 0; c < m.cols(); ++c)
        for (size_t r = 0; r < m.rows(); ++r)
            if (uint32_t v = m.at(r, c)) s.cols[c].push_back({static_cast<uint32_t>(r), v});
    return s;
}

/// The bar differential d_i: (M ⊗ A_+^{⊗i})_j -> (M ⊗ A_+^{⊗(i-1)})_j,
/// d(m⊗a_1⊗...⊗a_i) = m·a_1 ⊗ a_2... + Σ_{s=1}^{i-1} (-1)^s m ⊗ ...(a_s a_{s+1})... .
inline SparseMat bar_differential(const GradedModule& M, size_t i,
                                  const BarLevel& dom, const BarLevel& cod) {
    const TruncatedGradedAlgebra& A = *M.algebra();
    const PrimeField& f = M.field();
    SparseMat d;
    d.rows = static_cast<uint32_t>(cod.total);
    d.cols.resize(dom.total);
    if (i == 0) return d;

    std::map<std::pair<int, size_t>, SparseCols> act_cache;
    std::map<std::pair<size_t, size_t>, SparseCols> mult_cache;
    auto act_cols = [&](int j0, size_t a) -> const SparseCols& {
        auto it = act_cache.find({j0, a});
        if (it == act_cache.end())
            it = act_cache.emplace(std::make_pair(j0, a), sparsify(M.act(j0, a))).first;
        return it->second;
    };
    auto mult_cols = [&](size_t a, size_t b) -> const SparseCols& {
        auto it = mult_cache.find({a, b});
        if (it == mult_cache.end())
            it = mult_cache.emplace(std::make_pair(a, b), sparsify(A.mult(a, b))).first;
        return it->second;
    };

    std::vector<size_t> sizes(i + 1), digits(i + 1);
    for (const BarBlock& blk : dom.blocks) {
        sizes[0] = M.dim(blk.j0);
        for (size_t t = 0; t < i; ++t) sizes[t + 1] = A.dim(blk.parts[t]);

        // face targets: block pointer + strides of the target's mixed radix
        struct FaceInfo {
            const BarBlock* tblk;
            const SparseCols* expansion;
            std::vector<size_t> strides;  // strides for kept digits (i slots)
            size_t merge_stride;          // stride of the expanded digit
            bool negative;
        };
        std::vector<FaceInfo> faces;
        for (size_t s = 0; s < i; ++s) {
            FaceInfo fi;
            fi.negative = (s % 2) == 1;
            std::pair<int, std::vector<size_t>> key;
            if (s == 0) {
                key.first = blk.j0 + static_cast<int>(blk.parts[0]);
                key.second.assign(blk.parts.begin() + 1, blk.parts.end());
                fi.expansion = &act_cols(blk.j0, blk.parts[0]);
            } else {
                key.first = blk.j0;
                key.second = blk.parts;
                key.second[s - 1] += key.second[s];
                key.second.erase(key.second.begin() + s);
                fi.expansion = &mult_cols(blk.parts[s - 1], blk.parts[s]);
            }
            auto it = cod.index.find(key);
            if (it == cod.index.end()) {
                fi.tblk = nullptr;  // target component is zero
            } else {
                fi.tblk = &cod.blocks[it->second];
                std::vector<size_t> tsizes(i);
                tsizes[0] = M.dim(fi.tblk->j0);
                for (size_t t = 0; t + 1 < i; ++t) tsizes[t + 1] = A.dim(fi.tblk->parts[t]);
                fi.strides.resize(i);
                size_t acc = 1;
                for (size_t t = i; t-- > 0;) {
                    fi.strides[t] = acc;
                    acc *= tsizes[t];
                }
                fi.merge_stride = fi.strides[s];
            }
            faces.push_back(std::move(fi));
        }

        std::fill(digits.begin(), digits.end(), 0);
        for (size_t flat = 0; flat < blk.size; ++flat) {
            auto& col = d.cols[blk.offset + flat];
            for (size_t s = 0; s < i; ++s) {
                const FaceInfo& fi = faces[s];
                if (!fi.tblk) continue;
                size_t exp_col;
                if (s == 0)
                    exp_col = digits[0] * sizes[1] + digits[1];
                else
                    exp_col = digits[s] * sizes[s + 1] + digits[s + 1];
                const auto& expansion = fi.expansion->cols[exp_col];
                if (expansion.empty()) continue;
                // kept digit at domain position t sits at target position
                // t (t < s) or t-1 (t > s+1); position s holds the expansion
                size_t base = fi.tblk->offset;
                for (size_t t = 0; t <= i; ++t) {
                    if (t == s || t == s + 1) continue;
                    base += digits[t] * fi.strides[t < s ? t : t - 1];
                }
                for (const SparseEntry& e : expansion) {
                    uint32_t val = fi.negative ? f.neg(e.val) : e.val;
                    col.push_back({static_cast<uint32_t>(base + e.row * fi.merge_stride), val});
                }
            }
            std::sort(col.begin(), col.end(),
                      [](const SparseEntry& a, const SparseEntry& b) { return a.row < b.row; });
            // odometer increment
            for (size_t t = i + 1; t-- > 0;) {
                if (++digits[t] < sizes[t]) break;
                digits[t] = 0;
            }
        }
    }
    return d;
}

}  // namespace detail

/// Dim of (M ⊗ (A_+)^{⊗i})_j = ⊕ M_{j0}⊗A_{j1}⊗...⊗A_{ji}, the compositions
/// j0+...+ji = j with j1..ji >= 1.
inline size_t bar_space_dim(const GradedModule& M, size_t i, int j) {
    if (j > certified_bound(M))
        throw truncation_insufficient("bar space beyond certified truncation");
    return detail::bar_level(M, i, j).total;
}

namespace detail {

/// Ranks of d_1..d_{i_top} of the degree-j bar chain. Positions above the
/// chain length are zero.
inline std::vector<size_t> bar_chain_ranks(const GradedModule& M, size_t i_top, int j,
                                           std::vector<size_t>* level_dims = nullptr) {
    const PrimeField& f = M.field();
    std::vector<BarLevel> levels;
    levels.reserve(i_top + 1);
    for (size_t i = 0; i <= i_top; ++i) levels.push_back(bar_level(M, i, j));
    if (level_dims) {
        level_dims->clear();
        for (auto& lv : levels) level_dims->push_back(lv.total);
    }
    std::vector<SparseMat> ds(i_top + 1);
    for (size_t i = 1; i <= i_top; ++i)
        ds[i] = bar_differential(M, i, levels[i], levels[i - 1]);
    return chain_ranks(f, ds, true);
}

}  // namespace detail

/// dim H_{i,j}(A, M) computed from the normalized bar complex.
inline size_t homology_dim(const GradedModule& M, size_t i, int j) {
    if (j + 1 > certified_bound(M))
        throw truncation_insufficient("homology beyond certified truncation: j+1 > bound");
    if (j < static_cast<int>(i) + M.lo()) return 0;  // concentration law
    std::vector<size_t> dims;
    std::vector<size_t> ranks = detail::bar_chain_ranks(M, i + 1, j, &dims);
    return dims[i] - ranks[i] - ranks[i + 1];
}

/// Identical dimensions as homology_dim: everything here is locally finite,
/// so H^{ij}(A,M) is the dual of H_{ij}(A,M).
inline size_t cohomology_dim(const GradedModule& M, size_t i, int j) {
    return homology_dim(M, i, j);
}

/// Computed dimensions over a bidegree rectangle plus its certification data.
struct HomologyTable {
    size_t i_max = 0;
    int j_min = 0;
    int j_max = 0;
    size_t trunc_used = 0;
    std::map<std::pair<size_t, int>, size_t> nonzero;

    size_t dim(size_t i, int j) const {
        if (i > i_max || j > j_max || j < j_min)
            throw truncation_insufficient("cell outside certified rectangle");
        auto it = nonzero.find({i, j});
        return it == nonzero.end() ? 0 : it->second;
    }
};

/// All cells H_{i,j} with i <= i_max, lo(M) <= j <= j_max. Cells are computed
/// per internal degree (independent chains); `jobs` > 1 evaluates degrees
/// concurrently with bitwise-identical results.
inline HomologyTable homology_table(const GradedModule& M, size_t i_max, int j_max,
                                    unsigned jobs = 1) {
    if (j_max + 1 > certified_bound(M))
        throw truncation_insufficient("homology table beyond certified truncation");
    HomologyTable table;
    table.i_max = i_max;
    table.j_min = M.lo();
    table.j_max = j_max;
    table.trunc_used = M.algebra()->trunc();
    if (table.j_min > j_max) return table;

    const size_t nj = static_cast<size_t>(j_max - table.j_min + 1);
    std::vector<std::vector<size_t>> cells(nj);  // per j, dims for i=0..i_max
    auto work = [&](size_t idx) {
        int j = table.j_min + static_cast<int>(idx);
        size_t i_top = std::min(i_max + 1, static_cast<size_t>(std::max(0, j - M.lo())));
        std::vector<size_t> dims;
        std::vector<size_t> ranks = detail::bar_chain_ranks(M, i_top, j, &dims);
        dims.resize(i_max + 2, 0);
        ranks.resize(i_max + 2, 0);
        std::vector<size_t> out(i_max + 1, 0);
        for (size_t i = 0; i <= i_max; ++i) out[i] = dims[i] - ranks[i] - ranks[i + 1];
        cells[idx] = std::move(out);
    };
    if (jobs <= 1 || nj <= 1) {
        for (size_t idx = 0; idx < nj; ++idx) work(idx);
    } else {
        std::vector<std::thread> pool;
        std::atomic<size_t> next{0};
        unsigned n_threads = std::min<unsigned>(jobs, static_cast<unsigned>(nj));
        for (unsigned t = 0; t < n_threads; ++t)
            pool.emplace_back([&] {
                for (size_t idx; (idx = next.fetch_add(1)) < nj;) work(idx);
            });
        for (auto& th : pool) th.join();
    }
    for (size_t idx = 0; idx < nj; ++idx)
        for (size_t i = 0; i <= i_max; ++i)
            if (cells[idx][i])
                table.nonzero.emplace(std::make_pair(i, table.j_min + static_cast<int>(idx)),
                                      cells[idx][i]);
    return table;
}

/// Structural test: is A the standard symmetric algebra on its degree-1 part
/// (monomial basis in ascending lex exponent order)?
inline bool is_standard_symmetric(const TruncatedGradedAlgebra& A) {
    size_t n = A.dim(1);
    for (size_t k = 0; k <= A.trunc(); ++k)
        if (A.dim(k) != comb::comp_count(k, n)) return false;
    for (size_t i = 0; i <= A.trunc(); ++i)
        for (size_t j = 0; i + j <= A.trunc(); ++j) {
            const FpMatrix& m = A.mult(i, j);
            for (size_t a = 0; a < A.dim(i); ++a) {
                std::vector<uint32_t> E = comb::exp_unrank(n, i, a);
                for (size_t b = 0; b < A.dim(j); ++b) {
                    std::vector<uint32_t> F = comb::exp_unrank(n, j, b);
                    std::vector<uint32_t> sum(n);
                    for (size_t t = 0; t < n; ++t) sum[t] = E[t] + F[t];
                    size_t want = comb::exp_rank(sum);
                    for (size_t r = 0; r < A.dim(i + j); ++r)
                        if (m.at(r, a * A.dim(j) + b) != (r == want ? 1u : 0u)) return false;
                }
            }
        }
    return true;
}

namespace detail {

/// Ranks of the Koszul-complex differentials N⊗Λ^t(V) -> N⊗Λ^{t-1}(V) at
/// internal degree j, for t = 1..t_top.
inline std::vector<size_t> koszul_chain_ranks(const GradedModule& N, size_t n, size_t t_top,
                                              int j, std::vector<size_t>* level_dims) {
    const PrimeField& f = N.field();
    std::vector<size_t> var_index(n);
    for (size_t v = 0; v < n; ++v) var_index[v] = sym_var_index(n, v);

    auto level_dim = [&](size_t t) -> size_t {
        int nd = j - static_cast<int>(t);
        if (nd < N.lo() || nd > N.hi()) return 0;
        return N.dim(nd) * comb::binom(n, t);
    };
    if (level_dims) {
        level_dims->clear();
        for (size_t t = 0; t <= t_top; ++t) level_dims->push_back(level_dim(t));
    }
    std::vector<SparseMat> ds(t_top + 1);
    for (size_t t = 1; t <= t_top; ++t) {
        SparseMat d;
        d.rows = static_cast<uint32_t>(level_dim(t - 1));
        d.cols.resize(level_dim(t));
        int nd = j - static_cast<int>(t);
        if (d.cols.empty() || (nd < N.lo())) {
            ds[t] = std::move(d);
            continue;
        }
        size_t lam_t = comb::binom(n, t), lam_t1 = comb::binom(n, t - 1);
        if (d.rows == 0) {
            ds[t] = std::move(d);
            continue;
        }
        SparseCols act = sparsify(N.act(nd, 1));
        for (size_t nu = 0; nu < N.dim(nd); ++nu) {
            for (size_t sr = 0; sr < lam_t; ++sr) {
                auto& col = d.cols[nu * lam_t + sr];
                std::vector<size_t> T = comb::subset_unrank(n, t, sr);
                for (size_t u = 0; u < t; ++u) {
                    std::vector<size_t> rest = T;
                    rest.erase(rest.begin() + u);
                    size_t rest_rank = comb::subset_rank(n, rest);
                    bool neg = (u % 2) == 1;
                    const auto& exp = act.cols[nu * N.algebra()->dim(1) + var_index[T[u]]];
                    for (const SparseEntry& e : exp) {
                        uint32_t val = neg ? f.neg(e.val) : e.val;
                        col.push_back(
                            {static_cast<uint32_t>(e.row * lam_t1 + rest_rank), val});
                    }
                }
                std::sort(col.begin(), col.end(), [](const SparseEntry& a, const SparseEntry& b) {
                    return a.row < b.row;
                });
                // merge duplicates (different u can hit the same row only with
                // distinct rest subsets, but stay safe)
                std::vector<SparseEntry> merged;
                for (const SparseEntry& e : col) {
                    if (!merged.empty() && merged.back().row == e.row)
                        merged.back().val = f.add(merged.back().val, e.val);
                    else
                        merged.push_back(e);
                }
                merged.erase(std::remove_if(merged.begin(), merged.end(),
                                            [](const SparseEntry& e) { return e.val == 0; }),
                             merged.end());
                col = std::move(merged);
            }
        }
        ds[t] = std::move(d);
    }
    return chain_ranks(f, ds, true);
}

}  // namespace detail

/// Tor over a standard symmetric algebra via the Koszul complex N ⊗ Λ^•(V):
/// must agree with homology_dim(S, N, i, j). Independent of the bar path.
inline size_t koszul_complex_tor(const GradedModule& N, size_t i, int j,
                                 bool skip_symmetric_check = false) {
    const TruncatedGradedAlgebra& S = *N.algebra();
    if (!skip_symmetric_check && !is_standard_symmetric(S))
        throw algebra_not_symmetric("koszul_complex_tor needs the standard symmetric algebra");
    if (j + 1 > certified_bound(N))
        throw truncation_insufficient("koszul complex beyond certified truncation");
    size_t n = S.dim(1);
    std::vector<size_t> dims;
    std::vector<size_t> ranks = detail::koszul_chain_ranks(N, n, i + 1, j, &dims);
    dims.resize(i + 2, 0);
    ranks.resize(i + 2, 0);
    return dims[i] - ranks[i] - ranks[i + 1];
}

}  // namespace koszul
