#pragma once
#include <algorithm>
#include <cstdint>
#include <memory>
#include <vector>

#include "graded.hpp"

namespace koszul {

namespace comb {

inline uint64_t binom(uint64_t n, uint64_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    uint64_t r = 1;
    for (uint64_t i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
    return r;
}

/// Number of exponent vectors of length `slots` summing to `deg`.
inline uint64_t comp_count(uint64_t deg, uint64_t slots) {
    if (slots == 0) return deg == 0 ? 1 : 0;
    return binom(deg + slots - 1, slots - 1);
}

/// Lexicographic rank of a strictly increasing k-subset of {0..n-1}.
inline size_t subset_rank(size_t n, const std::vector<size_t>& s) {
    size_t k = s.size(), r = 0;
    size_t prev = 0;
    for (size_t idx = 0; idx < k; ++idx) {
        for (size_t v = prev; v < s[idx]; ++v) r += binom(n - 1 - v, k - 1 - idx);
        prev = s[idx] + 1;
    }
    return r;
}

inline std::vector<size_t> subset_unrank(size_t n, size_t k, size_t rank) {
    std::vector<size_t> s;
    size_t v = 0;
    for (size_t idx = 0; idx < k; ++idx) {
        for (;; ++v) {
            size_t block = binom(n - 1 - v, k - 1 - idx);
            if (rank < block) break;
            rank -= block;
        }
        s.push_back(v++);
    }
    return s;
}

/// Lexicographic (ascending) rank of an exponent vector.
inline size_t exp_rank(const std::vector<uint32_t>& e) {
    size_t n = e.size(), r = 0;
    uint64_t rem = 0;
    for (uint32_t x : e) rem += x;
    for (size_t i = 0; i + 1 < n; ++i) {
        for (uint32_t v = 0; v < e[i]; ++v) r += comp_count(rem - v, n - i - 1);
        rem -= e[i];
    }
    return r;
}

inline std::vector<uint32_t> exp_unrank(size_t n, size_t deg, size_t rank) {
    std::vector<uint32_t> e(n, 0);
    uint64_t rem = deg;
    for (size_t i = 0; i + 1 < n; ++i) {
        uint32_t v = 0;
        for (;; ++v) {
            uint64_t block = comp_count(rem - v, n - i - 1);
            if (rank < block) break;
            rank -= block;
        }
        e[i] = v;
        rem -= v;
    }
    if (n > 0) e[n - 1] = static_cast<uint32_t>(rem);
    return e;
}

/// Sign of merging two disjoint sorted index sets: (-1)^{#{(s,t) in S x T : s > t}}.
inline int merge_sign(const std::vector<size_t>& s, const std::vector<size_t>& t) {
    size_t inv = 0;
    for (size_t x : s)
        for (size_t y : t)
            if (x > y) ++inv;
    return inv % 2 ? -1 : 1;
}

}  // namespace comb

/// Exterior algebra on n generators, truncated at D. Basis of degree k:
/// k-subsets of {0..n-1}, lexicographic. Imposes v∧v = 0 for every v, which
/// in characteristic 2 is stronger than graded-commutativity.
inline AlgebraPtr exterior_algebra(size_t n, PrimeField p, size_t D) {
    std::vector<size_t> dims(D + 1, 0);
    for (size_t k = 0; k <= D; ++k) dims[k] = comb::binom(n, k);
    std::vector<std::vector<FpMatrix>> mult(D + 1);
    for (size_t i = 0; i <= D; ++i) {
        for (size_t j = 0; i + j <= D; ++j) {
            FpMatrix m(p, dims[i + j], dims[i] * dims[j]);
            for (size_t a = 0; a < dims[i]; ++a) {
                std::vector<size_t> S = comb::subset_unrank(n, i, a);
                for (size_t b = 0; b < dims[j]; ++b) {
                    std::vector<size_t> T = comb::subset_unrank(n, j, b);
                    std::vector<size_t> u;
                    u.reserve(i + j);
                    std::merge(S.begin(), S.end(), T.begin(), T.end(), std::back_inserter(u));
                    if (std::adjacent_find(u.begin(), u.end()) != u.end()) continue;
                    int sgn = comb::merge_sign(S, T);
                    m.at(comb::subset_rank(n, u), a * dims[j] + b) =
                        sgn == 1 ? 1 : p.neg(1);
                }
            }
            mult[i].push_back(std::move(m));
        }
    }
    return std::make_shared<TruncatedGradedAlgebra>(p, std::move(dims), std::move(mult));
}

/// Symmetric algebra on n generators, truncated at D. Basis of degree k:
/// exponent vectors, ascending lexicographic.
inline AlgebraPtr symmetric_algebra(size_t n, PrimeField p, size_t D) {
    std::vector<size_t> dims(D + 1, 0);
    for (size_t k = 0; k <= D; ++k) dims[k] = comb::comp_count(k, n);
    std::vector<std::vector<FpMatrix>> mult(D + 1);
    for (size_t i = 0; i <= D; ++i) {
        for (size_t j = 0; i + j <= D; ++j) {
            FpMatrix m(p, dims[i + j], dims[i] * dims[j]);
            for (size_t a = 0; a < dims[i]; ++a) {
                std::vector<uint32_t> E = comb::exp_unrank(n, i, a);
                for (size_t b = 0; b < dims[j]; ++b) {
                    std::vector<uint32_t> F = comb::exp_unrank(n, j, b);
                    std::vector<uint32_t> sum(n);
                    for (size_t t = 0; t < n; ++t) sum[t] = E[t] + F[t];
                    m.at(comb::exp_rank(sum), a * dims[j] + b) = 1;
                }
            }
            mult[i].push_back(std::move(m));
        }
    }
    return std::make_shared<TruncatedGradedAlgebra>(p, std::move(dims), std::move(mult));
}

/// Index of the degree-1 monomial x_v in the symmetric basis order.
inline size_t sym_var_index(size_t n, size_t v) {
    std::vector<uint32_t> e(n, 0);
    e[v] = 1;
    return comb::exp_rank(e);
}

/// L_k over the exterior algebra: (L_k)_i = Λ^i(V) for i >= k, zero below,
/// with the multiplication action.
inline GradedModule truncation_module(const AlgebraPtr& ext, size_t k) {
    size_t D = ext->trunc();
    if (k > D) throw truncation_insufficient("truncation_module: k beyond truncation");
    std::vector<size_t> dims;
    for (size_t d = k; d <= D; ++d) dims.push_back(ext->dim(d));
    std::map<std::pair<int, size_t>, FpMatrix> act;
    for (size_t j = k; j <= D; ++j)
        for (size_t i = 0; i + j <= D; ++i)
            act.emplace(std::pair<int, size_t>(static_cast<int>(j), i), ext->mult(j, i));
    return GradedModule(ext, static_cast<int>(k), std::move(dims), std::move(act), false);
}

inline GradedModule truncation_module(size_t n, PrimeField p, size_t D, size_t k) {
    return truncation_module(exterior_algebra(n, p, D), k);
}

/// The free module S(-1) ⊗ V over the symmetric algebra on n generators:
/// component in degree j is S^{j-1} ⊗ V (basis s*n + v), action on the S factor.
inline std::shared_ptr<const GradedModule> syzygy_ambient_module(const AlgebraPtr& sym,
                                                                 size_t n) {
    const PrimeField f = sym->field();
    size_t D = sym->trunc();
    std::vector<size_t> dims;
    for (size_t j = 1; j <= D; ++j) dims.push_back(sym->dim(j - 1) * n);
    std::map<std::pair<int, size_t>, FpMatrix> act;
    for (size_t j = 1; j <= D; ++j) {
        for (size_t i = 0; i + j <= D; ++i) {
            const FpMatrix& mm = sym->mult(j - 1, i);
            size_t di = sym->dim(i);
            FpMatrix am(f, sym->dim(j - 1 + i) * n, sym->dim(j - 1) * n * di);
            for (size_t s = 0; s < sym->dim(j - 1); ++s)
                for (size_t v = 0; v < n; ++v)
                    for (size_t t = 0; t < di; ++t)
                        for (size_t r = 0; r < sym->dim(j - 1 + i); ++r) {
                            uint32_t e = mm.at(r, s * di + t);
                            if (e) am.at(r * n + v, (s * n + v) * di + t) = e;
                        }
            act.emplace(std::pair<int, size_t>(static_cast<int>(j), i), std::move(am));
        }
    }
    return std::make_shared<GradedModule>(sym, 1, std::move(dims), std::move(act), false);
}

/// J = ker(S^{•-1}(V)⊗V -> S^{•}(V)) as a graded submodule of S(-1)⊗V.
/// J_i = 0 for i <= 1; the defining multiplication map is surjective in every
/// degree, so dim J_i = n*dim S^{i-1} - dim S^i.
inline GradedSubmodule syzygy_submodule_J(const AlgebraPtr& sym, size_t n) {
    const PrimeField f = sym->field();
    size_t D = sym->trunc();
    auto ambient = syzygy_ambient_module(sym, n);
    std::vector<Subspace> comps;
    for (size_t j = 1; j <= D; ++j) {
        // multiplication matrix S^{j-1} ⊗ V -> S^j
        FpMatrix m(f, sym->dim(j), sym->dim(j - 1) * n);
        for (size_t s = 0; s < sym->dim(j - 1); ++s) {
            std::vector<uint32_t> E = comb::exp_unrank(n, j - 1, s);
            for (size_t v = 0; v < n; ++v) {
                std::vector<uint32_t> sum = E;
                ++sum[v];
                m.at(comb::exp_rank(sum), s * n + v) = 1;
            }
        }
        comps.push_back(kernel_basis(m));
    }
    return GradedSubmodule(std::move(ambient), std::move(comps));
}

inline GradedModule syzygy_module_J(size_t n, PrimeField p, size_t D) {
    return syzygy_submodule_J(symmetric_algebra(n, p, D), n).as_module(false);
}

}  // namespace koszul
