#pragma once
#include <memory>
#include <vector>

#include "monomial.hpp"

namespace koszul {

/// {V, R}: quadratic algebra presentation, R a subspace of V⊗V (ambient n^2,
/// tensor index a*n+b).
struct QuadraticAlgebraPresentation {
    size_t v_dim;
    Subspace relations;

    QuadraticAlgebraPresentation(size_t n, Subspace r) : v_dim(n), relations(std::move(r)) {
        if (relations.ambient_dim() != n * n)
            throw dimension_mismatch("algebra relations must live in V⊗V");
    }
};

/// <H, K>_{V,R}: quadratic module presentation, K a subspace of H⊗V
/// (ambient h*n, index h*n+v).
struct QuadraticModulePresentation {
    size_t h_dim;
    Subspace relations;
    QuadraticAlgebraPresentation over;

    QuadraticModulePresentation(size_t h, Subspace k, QuadraticAlgebraPresentation alg)
        : h_dim(h), relations(std::move(k)), over(std::move(alg)) {
        if (relations.ambient_dim() != h * over.v_dim)
            throw dimension_mismatch("module relations must live in H⊗V");
    }
};

namespace detail {

inline size_t checked_pow(size_t base, size_t exp, size_t limit) {
    size_t r = 1;
    for (size_t i = 0; i < exp; ++i) {
        if (base != 0 && r > limit / base) throw budget_exceeded("tensor power too large");
        r *= base;
    }
    return r;
}

/// Degree-k pieces U_k of the two-sided ideal (R) in the tensor algebra:
/// U_1 = 0, U_2 = R, U_k = V⊗U_{k-1} + U_{k-1}⊗V.
inline std::vector<Subspace> ideal_pieces(const PrimeField& f, size_t n, const Subspace& R,
                                          size_t D, size_t budget_cells) {
    std::vector<Subspace> U;
    U.emplace_back(f, 1);  // degree 0
    if (D >= 1) U.emplace_back(f, n);
    if (D >= 2) U.push_back(R);
    for (size_t k = 3; k <= D; ++k) {
        size_t amb = checked_pow(n, k, budget_cells);
        size_t prev_amb = amb / std::max<size_t>(n, 1);
        const FpMatrix& pb = U[k - 1].basis();
        size_t rows = 2 * n * pb.rows();
        if (rows * amb > budget_cells)
            throw budget_exceeded("quadratic realization exceeds memory budget");
        FpMatrix span(f, rows, amb);
        size_t r = 0;
        for (size_t v = 0; v < n; ++v) {
            for (size_t s = 0; s < pb.rows(); ++s) {
                for (size_t t = 0; t < prev_amb; ++t) {
                    uint32_t x = pb.at(s, t);
                    if (!x) continue;
                    span.at(r, v * prev_amb + t) = x;              // e_v ⊗ u
                    span.at(r + 1, t * n + v) = x;                 // u ⊗ e_v
                }
                r += 2;
            }
        }
        U.push_back(Subspace::from_span(span));
    }
    return U;
}

inline std::vector<size_t> free_columns(const Subspace& s) {
    std::vector<char> is_piv(s.ambient_dim(), 0);
    const FpMatrix& b = s.basis();
    for (size_t r = 0; r < b.rows(); ++r) {
        size_t c = 0;
        while (c < b.cols() && b.at(r, c) == 0) ++c;
        is_piv[c] = 1;
    }
    std::vector<size_t> free;
    for (size_t c = 0; c < s.ambient_dim(); ++c)
        if (!is_piv[c]) free.push_back(c);
    return free;
}

/// Reduce v modulo the RREF basis of s in place.
inline void reduce_mod(const Subspace& s, std::vector<uint32_t>& v) {
    const FpMatrix& b = s.basis();
    const PrimeField& f = s.field();
    for (size_t r = 0; r < b.rows(); ++r) {
        size_t c = 0;
        while (c < b.cols() && b.at(r, c) == 0) ++c;
        uint32_t x = v[c];
        if (!x) continue;
        uint64_t fm = f.p() - x;
        for (size_t k = c; k < b.cols(); ++k)
            v[k] = static_cast<uint32_t>((v[k] + fm * b.at(r, k)) % f.p());
    }
}

}  // namespace detail

/// Realize {V,R} as a truncated graded algebra by explicit spans inside V^{⊗k}.
/// Exponential in D; guarded by `budget_cells`.
inline AlgebraPtr realize_algebra(const QuadraticAlgebraPresentation& pres, size_t D,
                                  size_t budget_cells = 30'000'000) {
    const PrimeField f = pres.relations.field();
    const size_t n = pres.v_dim;
    std::vector<Subspace> U = detail::ideal_pieces(f, n, pres.relations, D, budget_cells);
    std::vector<std::vector<size_t>> free(D + 1);
    std::vector<size_t> dims(D + 1);
    for (size_t k = 0; k <= D; ++k) {
        free[k] = detail::free_columns(U[k]);
        dims[k] = free[k].size();
    }
    std::vector<std::vector<FpMatrix>> mult(D + 1);
    for (size_t i = 0; i <= D; ++i) {
        for (size_t j = 0; i + j <= D; ++j) {
            size_t amb_j = detail::checked_pow(n, j, budget_cells);
            size_t amb = detail::checked_pow(n, i + j, budget_cells);
            FpMatrix m(f, dims[i + j], dims[i] * dims[j]);
            std::vector<uint32_t> w(amb);
            for (size_t a = 0; a < dims[i]; ++a)
                for (size_t b = 0; b < dims[j]; ++b) {
                    std::fill(w.begin(), w.end(), 0);
                    w[free[i][a] * amb_j + free[j][b]] = 1;  // concatenated word
                    detail::reduce_mod(U[i + j], w);
                    for (size_t r = 0; r < dims[i + j]; ++r)
                        m.at(r, a * dims[j] + b) = w[free[i + j][r]];
                }
            mult[i].push_back(std::move(m));
        }
    }
    return std::make_shared<TruncatedGradedAlgebra>(f, std::move(dims), std::move(mult));
}

struct RealizedModule {
    GradedModule module;
    AlgebraPtr algebra;
    std::vector<Subspace> kernels;            // W_k inside H ⊗ V^{⊗k}
    std::vector<std::vector<size_t>> free;    // quotient representative columns
};

/// Realize <H,K> over the realization of its algebra. Degree-k component is
/// H⊗V^{⊗k} / (K⊗V^{⊗(k-1)} + H⊗U_k).
inline RealizedModule realize_module_full(const QuadraticModulePresentation& pres, size_t D,
                                          size_t budget_cells = 30'000'000) {
    const PrimeField f = pres.relations.field();
    const size_t n = pres.over.v_dim;
    const size_t h = pres.h_dim;
    AlgebraPtr A = realize_algebra(pres.over, D, budget_cells);
    std::vector<Subspace> U =
        detail::ideal_pieces(f, n, pres.over.relations, D, budget_cells);

    std::vector<Subspace> W;
    W.emplace_back(f, h);  // degree 0: no relations
    for (size_t k = 1; k <= D; ++k) {
        size_t ambv = detail::checked_pow(n, k, budget_cells);
        size_t amb = h * ambv;
        if (amb > budget_cells) throw budget_exceeded("module realization exceeds budget");
        std::vector<std::vector<uint32_t>> span;
        if (k == 1) {
            for (size_t r = 0; r < pres.relations.dim(); ++r)
                span.push_back(pres.relations.basis().row_vec(r));
        } else {
            const FpMatrix& wb = W[k - 1].basis();
            for (size_t s = 0; s < wb.rows(); ++s)
                for (size_t v = 0; v < n; ++v) {
                    std::vector<uint32_t> row(amb, 0);
                    for (size_t t = 0; t < wb.cols(); ++t) {
                        uint32_t x = wb.at(s, t);
                        if (x) row[t * n + v] = x;  // (h ⊗ word) ⊗ e_v
                    }
                    span.push_back(std::move(row));
                }
            const FpMatrix& ub = U[k].basis();
            for (size_t s = 0; s < ub.rows(); ++s)
                for (size_t q = 0; q < h; ++q) {
                    std::vector<uint32_t> row(amb, 0);
                    for (size_t t = 0; t < ub.cols(); ++t) {
                        uint32_t x = ub.at(s, t);
                        if (x) row[q * ambv + t] = x;  // e_q ⊗ u
                    }
                    span.push_back(std::move(row));
                }
        }
        FpMatrix sp(f, span.size(), amb);
        for (size_t r = 0; r < span.size(); ++r)
            for (size_t c = 0; c < amb; ++c) sp.at(r, c) = span[r][c];
        W.push_back(Subspace::from_span(sp));
    }

    std::vector<std::vector<size_t>> free(D + 1);
    std::vector<size_t> dims(D + 1);
    for (size_t k = 0; k <= D; ++k) {
        free[k] = detail::free_columns(W[k]);
        dims[k] = free[k].size();
    }
    std::vector<std::vector<size_t>> afree(D + 1);
    std::vector<Subspace> Ucopy = U;
    for (size_t k = 0; k <= D; ++k) afree[k] = detail::free_columns(U[k]);

    std::map<std::pair<int, size_t>, FpMatrix> act;
    for (size_t j = 0; j <= D; ++j) {
        size_t ambv_j = detail::checked_pow(n, j, budget_cells);
        for (size_t i = 0; i + j <= D; ++i) {
            size_t ambv_i = detail::checked_pow(n, i, budget_cells);
            size_t amb_t = h * ambv_j * ambv_i;
            FpMatrix am(f, dims[i + j], dims[j] * A->dim(i));
            std::vector<uint32_t> w(amb_t);
            for (size_t q = 0; q < dims[j]; ++q)
                for (size_t a = 0; a < A->dim(i); ++a) {
                    std::fill(w.begin(), w.end(), 0);
                    w[free[j][q] * ambv_i + afree[i][a]] = 1;
                    detail::reduce_mod(W[i + j], w);
                    for (size_t r = 0; r < dims[i + j]; ++r)
                        am.at(r, q * A->dim(i) + a) = w[free[i + j][r]];
                }
            act.emplace(std::pair<int, size_t>(static_cast<int>(j), i), std::move(am));
        }
    }
    GradedModule mod(A, 0, std::move(dims), std::move(act));
    return RealizedModule{std::move(mod), A, std::move(W), std::move(free)};
}

inline GradedModule realize_module(const QuadraticModulePresentation& pres, size_t D,
                                   size_t budget_cells = 30'000'000) {
    return realize_module_full(pres, D, budget_cells).module;
}

/// {V,R}^! = {V*, R^⊥} with the pairing (v⊗w, f⊗g) -> f(v)g(w); in monomial
/// coordinates R^⊥ is the kernel of the relation basis matrix.
inline QuadraticAlgebraPresentation quadratic_dual_algebra(
    const QuadraticAlgebraPresentation& pres) {
    return QuadraticAlgebraPresentation(pres.v_dim,
                                        kernel_basis(pres.relations.basis()));
}

/// <H,K>^! = <H*, K^⊥> over the dual algebra.
inline QuadraticModulePresentation quadratic_dual_module(
    const QuadraticModulePresentation& pres) {
    return QuadraticModulePresentation(pres.h_dim, kernel_basis(pres.relations.basis()),
                                       quadratic_dual_algebra(pres.over));
}

/// qA = {A_1, ker(A_1⊗A_1 -> A_2)}. Requires A generated in degree 1 up to its
/// truncation (multiplication A_1 ⊗ A_{k-1} -> A_k surjective).
inline QuadraticAlgebraPresentation quadratic_part_algebra(const TruncatedGradedAlgebra& A) {
    for (size_t k = 2; k <= A.trunc(); ++k)
        if (A.mult(1, k - 1).rank() != A.dim(k))
            throw not_degree_one_generated("algebra is not generated in degree 1 at degree " +
                                           std::to_string(k));
    return QuadraticAlgebraPresentation(A.dim(1), kernel_basis(A.mult(1, 1)));
}

/// q_A M = <M_0, ker(M_0⊗A_1 -> M_1)> over qA.
inline QuadraticModulePresentation quadratic_part_module(const GradedModule& M) {
    for (int d = M.lo(); d < 0; ++d)
        if (M.dim(d) != 0)
            throw lowest_degree_nonzero("quadratic part needs lowest degree 0");
    if (M.lo() > 0)
        throw lowest_degree_nonzero("quadratic part needs a degree-0 component");
    QuadraticAlgebraPresentation qa = quadratic_part_algebra(*M.algebra());
    return QuadraticModulePresentation(M.dim(0), kernel_basis(M.act(0, 1)), std::move(qa));
}

struct ExteriorIdeal {
    GradedSubmodule ideal;   // submodule of the free rank-1 module over Λ
    AlgebraPtr quotient;     // B = Λ / I
};

/// Ideal of Λ(V) generated by R2 ⊆ Λ²(V): I_k = Λ^{k-2} ∧ R2, plus the
/// quotient algebra on the canonical complement basis.
inline ExteriorIdeal ideal_in_exterior(const AlgebraPtr& ext, const Subspace& R2) {
    const PrimeField f = ext->field();
    const size_t D = ext->trunc();
    if (D < 2) throw truncation_insufficient("ideal_in_exterior needs D >= 2");
    if (R2.ambient_dim() != ext->dim(2))
        throw dimension_mismatch("R2 must be a subspace of Λ²(V)");
    auto lam = std::make_shared<GradedModule>(free_module(ext));

    std::vector<Subspace> comps;
    comps.emplace_back(f, ext->dim(0));
    comps.emplace_back(f, ext->dim(1));
    comps.push_back(R2);
    for (size_t k = 3; k <= D; ++k) {
        const FpMatrix& pb = comps[k - 1].basis();
        std::vector<std::vector<uint32_t>> span;
        for (size_t s = 0; s < pb.rows(); ++s) {
            std::vector<uint32_t> u = pb.row_vec(s);
            for (size_t v = 0; v < ext->dim(1); ++v) {
                std::vector<uint32_t> e(ext->dim(1), 0);
                e[v] = 1;
                span.push_back(ext->product(k - 1, u, 1, e));
            }
        }
        FpMatrix sp(f, span.size(), ext->dim(k));
        for (size_t r = 0; r < span.size(); ++r)
            for (size_t c = 0; c < ext->dim(k); ++c) sp.at(r, c) = span[r][c];
        comps.push_back(Subspace::from_span(sp));
    }
    GradedSubmodule ideal(lam, std::move(comps));

    // quotient algebra on the free-column representatives
    std::vector<std::vector<size_t>> free(D + 1);
    std::vector<size_t> dims(D + 1);
    for (size_t k = 0; k <= D; ++k) {
        free[k] = detail::free_columns(ideal.component(static_cast<int>(k)));
        dims[k] = free[k].size();
    }
    std::vector<std::vector<FpMatrix>> mult(D + 1);
    for (size_t i = 0; i <= D; ++i)
        for (size_t j = 0; i + j <= D; ++j) {
            FpMatrix m(f, dims[i + j], dims[i] * dims[j]);
            for (size_t a = 0; a < dims[i]; ++a)
                for (size_t b = 0; b < dims[j]; ++b) {
                    std::vector<uint32_t> u(ext->dim(i), 0), v(ext->dim(j), 0);
                    u[free[i][a]] = 1;
                    v[free[j][b]] = 1;
                    std::vector<uint32_t> w = ext->product(i, u, j, v);
                    detail::reduce_mod(ideal.component(static_cast<int>(i + j)), w);
                    for (size_t r = 0; r < dims[i + j]; ++r)
                        m.at(r, a * dims[j] + b) = w[free[i + j][r]];
                }
            mult[i].push_back(std::move(m));
        }
    auto B = std::make_shared<TruncatedGradedAlgebra>(f, std::move(dims), std::move(mult));
    return ExteriorIdeal{std::move(ideal), std::move(B)};
}

inline ExteriorIdeal ideal_in_exterior(size_t n, PrimeField p, const Subspace& R2, size_t D) {
    return ideal_in_exterior(exterior_algebra(n, p, D), R2);
}

/// Spanning set of the exterior relations {v⊗v : v ∈ V} inside V⊗V,
/// characteristic-correct: x⊗x for basis x plus x⊗y + y⊗x for pairs.
inline Subspace exterior_relation_space(size_t n, PrimeField p) {
    std::vector<std::vector<uint32_t>> rows;
    for (size_t a = 0; a < n; ++a) {
        std::vector<uint32_t> r(n * n, 0);
        r[a * n + a] = 1;
        rows.push_back(std::move(r));
    }
    for (size_t a = 0; a < n; ++a)
        for (size_t b = a + 1; b < n; ++b) {
            std::vector<uint32_t> r(n * n, 0);
            r[a * n + b] = 1;
            r[b * n + a] = 1;
            rows.push_back(std::move(r));
        }
    return Subspace::from_span(FpMatrix::from_rows(p, n * n, rows));
}

/// Antisymmetrizers {x⊗y − y⊗x : x,y basis} (the symmetric-algebra relations).
inline Subspace symmetric_relation_space(size_t n, PrimeField p) {
    std::vector<std::vector<uint32_t>> rows;
    for (size_t a = 0; a < n; ++a)
        for (size_t b = a + 1; b < n; ++b) {
            std::vector<uint32_t> r(n * n, 0);
            r[a * n + b] = 1;
            r[b * n + a] = p.neg(1);
            rows.push_back(std::move(r));
        }
    return Subspace::from_span(FpMatrix::from_rows(p, n * n, rows));
}

}  // namespace koszul
