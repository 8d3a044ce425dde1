#pragma once
#include <optional>
#include <tuple>

#include "homology.hpp"
#include "quadratic.hpp"

namespace koszul {

struct Cell {
    size_t i;
    int j;
    size_t dim;
    bool operator==(const Cell&) const = default;
};

/// Outcome of the homological quadraticity test, with the first offending
/// cell when the answer is no.
struct QuadraticCheck {
    bool quadratic = true;
    std::optional<Cell> witness;
};

/// M is quadratic iff H_{0,j}(A,M) = 0 for j != 0 and H_{1,j}(A,M) = 0 for
/// j != 1, scanned up to internal degree D.
inline QuadraticCheck is_quadratic_module(const GradedModule& M, int D) {
    for (int d = M.lo(); d < 0; ++d)
        if (M.dim(d)) throw lowest_degree_nonzero("quadraticity test needs lowest degree 0");
    if (D + 1 > certified_bound(M))
        throw truncation_insufficient("quadraticity test beyond certified truncation");
    QuadraticCheck out;
    for (int j = 1; j <= D; ++j)
        for (size_t i = 0; i <= 1; ++i) {
            if (static_cast<int>(i) == j) continue;
            size_t d = homology_dim(M, i, j);
            if (d) {
                out.quadratic = false;
                out.witness = Cell{i, j, d};
                return out;
            }
        }
    return out;
}

/// A is quadratic iff H_{1,j}(A,k) = 0 for j != 1 and H_{2,j}(A,k) = 0 for
/// j != 2, scanned up to internal degree D.
inline QuadraticCheck is_quadratic_algebra(const AlgebraPtr& A, int D) {
    GradedModule k = trivial_module(A);
    if (D + 1 > certified_bound(k))
        throw truncation_insufficient("quadraticity test beyond certified truncation");
    QuadraticCheck out;
    for (int j = 1; j <= D; ++j)
        for (size_t i = 1; i <= 2; ++i) {
            if (static_cast<int>(i) == j) continue;
            size_t d = homology_dim(k, i, j);
            if (d) {
                out.quadratic = false;
                out.witness = Cell{i, j, d};
                return out;
            }
        }
    return out;
}

enum class KoszulVerdict { KoszulUpTo, DefectsFound };

struct KoszulReport {
    size_t i_max = 0;
    int j_max = 0;  // verified rectangle (may be smaller than requested with early_stop)
    std::vector<Cell> defects;
    KoszulVerdict verdict() const {
        return defects.empty() ? KoszulVerdict::KoszulUpTo : KoszulVerdict::DefectsFound;
    }
};

/// Scan H_{i,j}(A,M) off the diagonal over the rectangle i <= i_max,
/// j <= j_max. `early_stop` abandons the scan after the first internal degree
/// that shows a defect (the reported j_max shrinks accordingly).
inline KoszulReport koszul_check(const GradedModule& M, size_t i_max, int j_max,
                                 unsigned jobs = 1, bool early_stop = false) {
    if (j_max + 1 > certified_bound(M))
        throw truncation_insufficient("koszul_check beyond certified truncation");
    KoszulReport rep;
    rep.i_max = i_max;
    rep.j_max = j_max;
    if (!early_stop) {
        HomologyTable t = homology_table(M, i_max, j_max, jobs);
        for (auto& [cell, dim] : t.nonzero)
            if (static_cast<int>(cell.first) != cell.second)
                rep.defects.push_back(Cell{cell.first, cell.second, dim});
        return rep;
    }
    for (int j = M.lo(); j <= j_max; ++j) {
        size_t i_top = std::min(i_max + 1, static_cast<size_t>(std::max(0, j - M.lo())));
        std::vector<size_t> dims;
        std::vector<size_t> ranks = detail::bar_chain_ranks(M, i_top, j, &dims);
        dims.resize(i_max + 2, 0);
        ranks.resize(i_max + 2, 0);
        for (size_t i = 0; i <= i_max; ++i) {
            if (static_cast<int>(i) == j) continue;
            size_t d = dims[i] - ranks[i] - ranks[i + 1];
            if (d) rep.defects.push_back(Cell{i, j, d});
        }
        if (!rep.defects.empty()) {
            rep.j_max = j;
            break;
        }
    }
    return rep;
}

/// N_2 = Λ¹·N_1 + Λ²·N_0 (the degree-2 part is generated below), a rank test
/// equal to H_{0,2}(Λ,N) = 0.
inline bool cup_surjectivity_check(const GradedModule& N) {
    for (int d = N.lo(); d < 0; ++d)
        if (N.dim(d)) throw lowest_degree_nonzero("cup surjectivity needs lowest degree 0");
    if (N.dim(2) == 0) return true;
    const PrimeField& f = N.field();
    std::vector<std::vector<uint32_t>> span;
    for (size_t i = 1; i <= 2; ++i) {
        if (2 - static_cast<int>(i) < N.lo()) continue;  // empty source component
        const FpMatrix& a = N.act(2 - static_cast<int>(i), i);
        for (size_t c = 0; c < a.cols(); ++c) {
            std::vector<uint32_t> col(a.rows());
            for (size_t r = 0; r < a.rows(); ++r) col[r] = a.at(r, c);
            span.push_back(std::move(col));
        }
    }
    FpMatrix sp(f, span.size(), N.dim(2));
    for (size_t r = 0; r < span.size(); ++r)
        for (size_t c = 0; c < N.dim(2); ++c) sp.at(r, c) = span[r][c];
    return sp.rank() == N.dim(2);
}

/// The three computed dimensions of the five-term exact sequence
///   0 -> H_{1,2}(Λ,N) -> H_{2,4}(Λ,B) -> ker d -> H_{0,2}(Λ,N) -> 0
/// plus the forced dim ker d and the H_{1,4}(Λ,B) sanity dimension (nonzero
/// means B is not a quotient by an ideal generated in degree 2).
struct FiveTermDims {
    size_t h12N = 0;
    size_t h24B = 0;
    size_t h02N = 0;
    size_t derived_ker_d = 0;
    size_t h14B = 0;
    bool h14_warning() const { return h14B != 0; }
};

inline FiveTermDims five_term_dims(const GradedModule& B_module, const GradedModule& N) {
    if (!same_algebra(B_module, N))
        throw field_mismatch("five_term_dims: modules over different algebras");
    FiveTermDims out;
    out.h12N = homology_dim(N, 1, 2);
    out.h02N = homology_dim(N, 0, 2);
    out.h24B = homology_dim(B_module, 2, 4);
    out.h14B = homology_dim(B_module, 1, 4);
    if (out.h24B + out.h02N < out.h12N)
        throw error("five_term_dims: dimensions violate exactness; inputs are not of the "
                    "required shape");
    out.derived_ker_d = out.h24B + out.h02N - out.h12N;
    return out;
}

enum class VanishingRoute { Direct, DualViaJ, Both };

/// Report of the degree-2-generated-ideal criterion: quadraticity of I(2)
/// plus vanishing of the third off-diagonal H_{i,i+3}(Λ,I), checked either
/// directly on the bar complex or through the quadratic-dual module J/<W*>
/// over the symmetric algebra (Tor_2 concentrated in internal degree 4).
struct ThirdLineReport {
    bool quadratic_ok = false;
    std::optional<Cell> quadratic_witness;
    int checked_up_to = 0;  // internal degree bound for the vanishing scans
    bool ran_direct = false;
    bool ran_dual = false;
    std::vector<Cell> direct_failures;  // cells (i, i+3)
    std::vector<Cell> dual_failures;    // cells (2, j), 4 < j, of Tor over S
    bool cross_check_agrees = true;

    bool direct_passes() const { return quadratic_ok && direct_failures.empty(); }
    bool dual_passes() const { return quadratic_ok && dual_failures.empty(); }
    bool passes() const {
        if (!quadratic_ok) return false;
        if (ran_direct && !direct_failures.empty()) return false;
        if (ran_dual && !dual_failures.empty()) return false;
        return true;
    }
};

/// Shared per-(n,p,D) state for the ideal criterion: the exterior algebra,
/// the symmetric algebra on the dual side, the syzygy module J, and the
/// Λ²(V)–J₂ duality pairing.
struct ThirdLineContext {
    size_t n;
    PrimeField p;
    size_t D;
    AlgebraPtr ext;                              // truncated at D+3
    AlgebraPtr sym;                              // truncated at D+1
    std::shared_ptr<GradedSubmodule> J;          // inside S(-1)⊗V*
    std::shared_ptr<const GradedModule> J_mod;   // abstract J
    FpMatrix lambda2_pairing;                    // Λ² x (S^1⊗V*) duality

    ThirdLineContext(size_t n_, PrimeField p_, size_t D_)
        : n(n_),
          p(p_),
          D(D_),
          ext(exterior_algebra(n_, p_, D_ + 3)),
          sym(symmetric_algebra(n_, p_, D_ + 1)),
          J(std::make_shared<GradedSubmodule>(syzygy_submodule_J(sym, n_))),
          J_mod(std::make_shared<GradedModule>(J->as_module(false))),
          lambda2_pairing(p_, comb::binom(n_, 2), n_ * n_) {
        // <e_a∧e_b, x_c⊗x_d> = δ_ac δ_bd on representatives; perfect in every
        // characteristic (the f(v)g(w)−f(w)g(v) form degenerates mod 2)
        for (size_t r = 0; r < comb::binom(n, 2); ++r) {
            auto ab = comb::subset_unrank(n, 2, r);
            lambda2_pairing.at(r, sym_var_index(n, ab[0]) * n + ab[1]) = 1;
        }
    }
};

inline ThirdLineReport third_line_check(const ThirdLineContext& ctx, const Subspace& R2,
                                        VanishingRoute route) {
    const int D = static_cast<int>(ctx.D);
    ThirdLineReport rep;
    rep.checked_up_to = D;

    ExteriorIdeal ei = ideal_in_exterior(ctx.ext, R2);
    GradedModule I = ei.ideal.as_module(false);
    GradedModule I2 = shift(I, 2);

    QuadraticCheck qc = is_quadratic_module(I2, D);
    rep.quadratic_ok = qc.quadratic;
    rep.quadratic_witness = qc.witness;
    if (!rep.quadratic_ok) return rep;  // structured precondition failure, not fatal

    if (route == VanishingRoute::Direct || route == VanishingRoute::Both) {
        rep.ran_direct = true;
        for (size_t i = 0; static_cast<int>(i) + 3 <= D; ++i) {
            size_t d = homology_dim(I, i, static_cast<int>(i) + 3);
            if (d) rep.direct_failures.push_back(Cell{i, static_cast<int>(i) + 3, d});
        }
    }
    if (route == VanishingRoute::DualViaJ || route == VanishingRoute::Both) {
        rep.ran_dual = true;
        // W* = annihilator of I_2 inside J_2 under the duality pairing
        Subspace ann_i2 = annihilator(ei.ideal.component(2), ctx.lambda2_pairing);
        Subspace wstar = ann_i2.intersect(ctx.J->component(2));
        std::vector<std::pair<int, std::vector<uint32_t>>> gens;
        for (size_t r = 0; r < wstar.dim(); ++r)
            gens.push_back({2, ctx.J->component(2).coordinates(wstar.basis().row_vec(r))});
        GradedSubmodule wsub = submodule_from_generators(ctx.J_mod, gens);
        GradedModule Q = quotient_module(ctx.J_mod, wsub);
        for (int j = 5; j <= D; ++j) {
            size_t d = koszul_complex_tor(Q, 2, j, /*skip_symmetric_check=*/true);
            if (d) rep.dual_failures.push_back(Cell{2, j, d});
        }
    }
    if (rep.ran_direct && rep.ran_dual)
        rep.cross_check_agrees = rep.direct_failures.empty() == rep.dual_failures.empty();
    return rep;
}

inline ThirdLineReport third_line_check(size_t n, PrimeField p, const Subspace& R2, size_t D,
                                        VanishingRoute route) {
    return third_line_check(ThirdLineContext(n, p, D), R2, route);
}

/// Dual-map report for an inclusion of quadratic modules f: M ↪ N: the dual
/// f^! must be an epimorphism with kernel generated in degree 0. Reports both
/// candidate dimensions for the degree-0 kernel (coker f in degrees 0 and 1).
struct DualMonoReport {
    bool surjective = true;
    bool kernel_generated_in_degree0 = true;
    size_t ker_deg0_dim = 0;
    size_t coker_f0_dim = 0;
    size_t coker_f1_dim = 0;
    std::vector<size_t> ker_dims;  // per degree 0..D
};

inline DualMonoReport dual_mono_check(const GradedSubmodule& sub, size_t D,
                                      size_t budget_cells = 30'000'000) {
    const GradedModule& N = sub.parent();
    const PrimeField& fld = N.field();
    GradedModule M = sub.as_module(false);

    int qd = std::min<int>(static_cast<int>(D), certified_bound(N) - 1);
    if (!is_quadratic_module(N, qd).quadratic || !is_quadratic_module(M, qd).quadratic)
        throw error("dual_mono_check: inputs must be quadratic modules");

    QuadraticModulePresentation presN = quadratic_part_module(N);
    QuadraticModulePresentation presM = quadratic_part_module(M);
    RealizedModule dualN = realize_module_full(quadratic_dual_module(presN), D, budget_cells);
    RealizedModule dualM = realize_module_full(quadratic_dual_module(presM), D, budget_cells);

    // f_0^*: N_0^* -> M_0^* is the inclusion basis matrix itself
    const FpMatrix& phi0 = sub.component(0).basis();  // dim M_0 x dim N_0
    const size_t n = presN.over.v_dim;

    DualMonoReport rep;
    rep.coker_f0_dim = N.dim(0) - M.dim(0);
    rep.coker_f1_dim = N.dim(1) - M.dim(1);
    rep.ker_dims.assign(D + 1, 0);

    std::vector<std::vector<uint32_t>> ker0_vectors;
    for (size_t k = 0; k <= D; ++k) {
        size_t ambv = detail::checked_pow(n, k, budget_cells);
        // induced map on quotient bases: apply phi0 ⊗ id to representatives
        size_t dn = dualN.module.dim(static_cast<int>(k));
        size_t dm = dualM.module.dim(static_cast<int>(k));
        FpMatrix g(fld, dm, dn);
        for (size_t q = 0; q < dn; ++q) {
            size_t rep_col = dualN.free[k][q];
            size_t h = rep_col / ambv, word = rep_col % ambv;
            std::vector<uint32_t> w(M.dim(0) * ambv, 0);
            for (size_t h2 = 0; h2 < M.dim(0); ++h2) {
                uint32_t c = phi0.at(h2, h);
                if (c) w[h2 * ambv + word] = c;
            }
            detail::reduce_mod(dualM.kernels[k], w);
            for (size_t r = 0; r < dm; ++r) g.at(r, q) = w[dualM.free[k][r]];
        }
        // well-definedness: phi0 ⊗ id must map W_{N,k} into W_{M,k}
        const FpMatrix& wn = dualN.kernels[k].basis();
        for (size_t r = 0; r < wn.rows(); ++r) {
            std::vector<uint32_t> w(M.dim(0) * ambv, 0);
            for (size_t h = 0; h < N.dim(0); ++h)
                for (size_t word = 0; word < ambv; ++word) {
                    uint32_t x = wn.at(r, h * ambv + word);
                    if (!x) continue;
                    for (size_t h2 = 0; h2 < M.dim(0); ++h2) {
                        uint32_t c = phi0.at(h2, h);
                        if (c)
                            w[h2 * ambv + word] =
                                fld.add(w[h2 * ambv + word], fld.mul(c, x));
                    }
                }
            if (!dualM.kernels[k].contains(w))
                throw input_not_monomorphism(
                    "dual map not well-defined: input is not a monomorphism of quadratic "
                    "modules");
        }
        size_t rk = g.rank();
        if (rk != dm) rep.surjective = false;
        rep.ker_dims[k] = dn - rk;
        if (k == 0) {
            rep.ker_deg0_dim = dn - rk;
            FpMatrix kb = g.kernel_basis_matrix();
            for (size_t r = 0; r < kb.rows(); ++r) ker0_vectors.push_back(kb.row_vec(r));
        }
    }

    // kernel generated in degree 0?
    auto dn_mod = std::make_shared<GradedModule>(dualN.module);
    std::vector<std::pair<int, std::vector<uint32_t>>> gens;
    for (auto& v : ker0_vectors) gens.push_back({0, v});
    GradedSubmodule span0 = submodule_from_generators(dn_mod, gens);
    for (size_t k = 0; k <= D; ++k)
        if (span0.dim(static_cast<int>(k)) != rep.ker_dims[k])
            rep.kernel_generated_in_degree0 = false;
    return rep;
}

}  // namespace koszul
