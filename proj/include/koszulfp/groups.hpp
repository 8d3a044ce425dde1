#pragma once
#include <cctype>
#include <memory>
#include <string>

#include "criteria.hpp"

namespace koszul {

/// Elementary-type expressions: Zp, free groups F(n), Demushkin groups D(d),
/// free products (e1 * e2), and semidirect products (A(m) x e) with a free
/// abelian group of rank m. Orientations are not represented: none of the
/// F_p-cohomology dimensions computed here depend on them.
struct GroupExpr {
    enum class Kind { Zp, Free, Demushkin, FreeProduct, Semidirect };
    Kind kind = Kind::Zp;
    size_t rank = 0;  // Free: n >= 0; Demushkin: d; Semidirect: abelian rank m >= 1
    std::vector<GroupExpr> children;

    static GroupExpr zp() { return {Kind::Zp, 0, {}}; }
    static GroupExpr free(size_t n) { return {Kind::Free, n, {}}; }
    static GroupExpr demushkin(size_t d) { return {Kind::Demushkin, d, {}}; }
    static GroupExpr free_product(GroupExpr a, GroupExpr b) {
        return {Kind::FreeProduct, 0, {std::move(a), std::move(b)}};
    }
    static GroupExpr semidirect(size_t m, GroupExpr e) {
        return {Kind::Semidirect, m, {std::move(e)}};
    }

    size_t h1_dim() const {
        switch (kind) {
            case Kind::Zp: return 1;
            case Kind::Free: return rank;
            case Kind::Demushkin: return rank;
            case Kind::FreeProduct: return children[0].h1_dim() + children[1].h1_dim();
            case Kind::Semidirect: return rank + children[0].h1_dim();
        }
        return 0;
    }

    std::string to_string() const {
        switch (kind) {
            case Kind::Zp: return "Zp";
            case Kind::Free: return "F(" + std::to_string(rank) + ")";
            case Kind::Demushkin: return "D(" + std::to_string(rank) + ")";
            case Kind::FreeProduct:
                return "(" + children[0].to_string() + " * " + children[1].to_string() + ")";
            case Kind::Semidirect:
                return "(A(" + std::to_string(rank) + ") x " + children[0].to_string() + ")";
        }
        return "";
    }
};

namespace detail {

struct GroupParser {
    const std::string& s;
    size_t pos = 0;

    void ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool eat(char c) {
        ws();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    [[noreturn]] void fail(const std::string& what) {
        throw error("group expression parse error at position " + std::to_string(pos) + ": " +
                    what);
    }
    size_t number() {
        ws();
        size_t start = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        if (start == pos) fail("expected a number");
        return std::stoull(s.substr(start, pos - start));
    }
    size_t parenthesized_number() {
        if (!eat('(')) fail("expected '('");
        size_t v = number();
        if (!eat(')')) fail("expected ')'");
        return v;
    }

    GroupExpr expr() {
        ws();
        if (eat('(')) {
            ws();
            if (pos < s.size() && s[pos] == 'A') {
                ++pos;
                size_t m = parenthesized_number();
                if (m < 1) fail("abelian rank must be >= 1");
                ws();
                if (pos >= s.size() || s[pos] != 'x') fail("expected 'x' after A(m)");
                ++pos;
                GroupExpr inner = expr();
                if (!eat(')')) fail("expected ')'");
                return GroupExpr::semidirect(m, std::move(inner));
            }
            GroupExpr left = expr();
            ws();
            if (pos >= s.size() || s[pos] != '*') fail("expected '*' in free product");
            ++pos;
            GroupExpr right = expr();
            if (!eat(')')) fail("expected ')'");
            return GroupExpr::free_product(std::move(left), std::move(right));
        }
        if (s.compare(pos, 2, "Zp") == 0) {
            pos += 2;
            return GroupExpr::zp();
        }
        if (pos < s.size() && s[pos] == 'F') {
            ++pos;
            return GroupExpr::free(parenthesized_number());
        }
        if (pos < s.size() && s[pos] == 'D') {
            ++pos;
            return GroupExpr::demushkin(parenthesized_number());
        }
        fail("expected Zp, F(n), D(d), (e * e) or (A(m) x e)");
    }
};

}  // namespace detail

inline GroupExpr parse_group_expr(const std::string& text) {
    detail::GroupParser p{text};
    GroupExpr e = p.expr();
    p.ws();
    if (p.pos != text.size()) p.fail("trailing input");
    return e;
}

/// Gram matrix of the Demushkin cup-product pairing in the chain basis:
/// G[i][i+1] = 1, G[i+1][i] = -1, zero elsewhere. Non-degenerate iff d even.
inline FpMatrix demushkin_gram(size_t d, PrimeField p) {
    FpMatrix g(p, d, d);
    for (size_t i = 0; i + 1 < d; ++i) {
        g.at(i, i + 1) = 1;
        g.at(i + 1, i) = p.neg(1);
    }
    return g;
}

/// H•(G, F_p) as a truncated graded algebra for an elementary-type expression.
inline AlgebraPtr cohomology_algebra(const GroupExpr& e, PrimeField p, size_t D) {
    switch (e.kind) {
        case GroupExpr::Kind::Zp:
            return exterior_algebra(1, p, D);
        case GroupExpr::Kind::Free: {
            size_t n = e.rank;
            std::vector<size_t> dims(D + 1, 0);
            dims[0] = 1;
            if (D >= 1) dims[1] = n;
            std::vector<std::vector<FpMatrix>> mult(D + 1);
            for (size_t i = 0; i <= D; ++i)
                for (size_t j = 0; i + j <= D; ++j) {
                    FpMatrix m(p, dims[i + j], dims[i] * dims[j]);
                    if (i == 0 || j == 0)
                        for (size_t t = 0; t < dims[i + j]; ++t) m.at(t, t) = 1;
                    mult[i].push_back(std::move(m));  // products of positives vanish
                }
            return std::make_shared<TruncatedGradedAlgebra>(p, std::move(dims),
                                                            std::move(mult));
        }
        case GroupExpr::Kind::Demushkin: {
            size_t d = e.rank;
            if (d < 2 || d % 2 != 0)
                throw odd_demushkin_rank("Demushkin rank must be even and >= 2");
            auto ext = exterior_algebra(d, p, D);
            // I_2 = kernel of the Gram functional on Λ²
            FpMatrix functional(p, 1, ext->dim(2));
            for (size_t r = 0; r < ext->dim(2); ++r) {
                auto ab = comb::subset_unrank(d, 2, r);
                if (ab[1] == ab[0] + 1) functional.at(0, r) = 1;  // χ_i ∪ χ_{i+1} = 1
            }
            Subspace i2 = kernel_basis(functional);
            return ideal_in_exterior(ext, i2).quotient;
        }
        case GroupExpr::Kind::FreeProduct: {
            AlgebraPtr b1 = cohomology_algebra(e.children[0], p, D);
            AlgebraPtr b2 = cohomology_algebra(e.children[1], p, D);
            // degree 0 = k, positive degrees = direct sum, cross products zero
            std::vector<size_t> dims(D + 1, 0);
            dims[0] = 1;
            for (size_t k = 1; k <= D; ++k) dims[k] = b1->dim(k) + b2->dim(k);
            std::vector<std::vector<FpMatrix>> mult(D + 1);
            for (size_t i = 0; i <= D; ++i)
                for (size_t j = 0; i + j <= D; ++j) {
                    FpMatrix m(p, dims[i + j], dims[i] * dims[j]);
                    if (i == 0 || j == 0) {
                        for (size_t t = 0; t < dims[i + j]; ++t) m.at(t, t) = 1;
                    } else {
                        const FpMatrix& m1 = b1->mult(i, j);
                        const FpMatrix& m2 = b2->mult(i, j);
                        for (size_t a = 0; a < b1->dim(i); ++a)
                            for (size_t b = 0; b < b1->dim(j); ++b)
                                for (size_t r = 0; r < b1->dim(i + j); ++r)
                                    m.at(r, a * dims[j] + b) = m1.at(r, a * b1->dim(j) + b);
                        for (size_t a = 0; a < b2->dim(i); ++a)
                            for (size_t b = 0; b < b2->dim(j); ++b)
                                for (size_t r = 0; r < b2->dim(i + j); ++r)
                                    m.at(b1->dim(i + j) + r,
                                         (b1->dim(i) + a) * dims[j] + (b1->dim(j) + b)) =
                                        m2.at(r, a * b2->dim(j) + b);
                    }
                    mult[i].push_back(std::move(m));
                }
            return std::make_shared<TruncatedGradedAlgebra>(p, std::move(dims),
                                                            std::move(mult));
        }
        case GroupExpr::Kind::Semidirect: {
            AlgebraPtr b0 = cohomology_algebra(e.children[0], p, D);
            return signed_tensor_algebra(b0, exterior_algebra(e.rank, p, D));
        }
    }
    throw error("unreachable group kind");
}

/// The inflation map ψ: Λ(H¹(G)) -> H•(G) (the unique algebra map extending
/// the identity in degree 1) and its kernel as a graded submodule of Λ.
struct InflationData {
    AlgebraPtr lambda;            // monomial exterior algebra on H¹
    AlgebraPtr cohomology;        // B = H•(G)
    std::vector<FpMatrix> psi;    // psi[k]: dim B_k x dim Λ_k
    GradedSubmodule kernel;       // ker ψ, components inside Λ^k
};

inline InflationData psi_and_kernel_for(const AlgebraPtr& B, PrimeField p, size_t D) {
    size_t n = B->dim(1);
    for (size_t k = 2; k <= D; ++k)
        if (B->mult(1, k - 1).rank() != B->dim(k))
            throw not_degree_one_generated("cohomology algebra not generated in degree 1");
    AlgebraPtr lambda = exterior_algebra(n, p, D);
    std::vector<FpMatrix> psi;
    for (size_t k = 0; k <= D; ++k) {
        FpMatrix m(p, B->dim(k), lambda->dim(k));
        if (k == 0) {
            if (B->dim(0)) m.at(0, 0) = 1;
        } else {
            for (size_t c = 0; c < lambda->dim(k); ++c) {
                auto S = comb::subset_unrank(n, k, c);
                std::vector<uint32_t> acc(B->dim(1), 0);
                acc[S[0]] = 1;
                std::vector<uint32_t> cur = acc;
                for (size_t t = 1; t < k; ++t) {
                    std::vector<uint32_t> gen(B->dim(1), 0);
                    gen[S[t]] = 1;
                    cur = B->product(t, cur, 1, gen);
                }
                for (size_t r = 0; r < B->dim(k); ++r) m.at(r, c) = cur[r];
            }
        }
        psi.push_back(std::move(m));
    }
    auto lam_free = std::make_shared<GradedModule>(free_module(lambda));
    std::vector<Subspace> comps;
    for (size_t k = 0; k <= D; ++k) comps.push_back(kernel_basis(psi[k]));
    GradedSubmodule kernel(lam_free, std::move(comps));
    return InflationData{std::move(lambda), B, std::move(psi), std::move(kernel)};
}

inline InflationData psi_and_kernel(const GroupExpr& e, PrimeField p, size_t D) {
    return psi_and_kernel_for(cohomology_algebra(e, p, D), p, D);
}

/// Matrix of α_{i+1}: S^{i+1}(V*) -> S^{i+2}(V*)⊗V*,
/// f ↦ Σ_{t=1}^{d-1} (x_t f)⊗x_{t+1} − (x_{t+1} f)⊗x_t, in the canonical
/// bases (tensor index s*d + w). Injectivity for all i makes the Demushkin
/// kernel module Koszul.
inline FpMatrix demushkin_alpha(size_t d, PrimeField p, size_t i) {
    if (d < 2 || d % 2 != 0)
        throw odd_demushkin_rank("Demushkin rank must be even and >= 2");
    size_t dom = comb::comp_count(i + 1, d);
    size_t s_dim = comb::comp_count(i + 2, d);
    FpMatrix m(p, s_dim * d, dom);
    for (size_t c = 0; c < dom; ++c) {
        std::vector<uint32_t> E = comb::exp_unrank(d, i + 1, c);
        for (size_t t = 0; t + 1 < d; ++t) {
            std::vector<uint32_t> e1 = E, e2 = E;
            ++e1[t];      // x_t * f, tensored with x_{t+1}
            ++e2[t + 1];  // x_{t+1} * f, tensored with x_t
            size_t r1 = comb::exp_rank(e1) * d + (t + 1);
            size_t r2 = comb::exp_rank(e2) * d + t;
            m.at(r1, c) = p.add(m.at(r1, c), 1);
            m.at(r2, c) = p.sub(m.at(r2, c), 1);
        }
    }
    return m;
}

/// Koszulity scan of (ker ψ)(2) over Λ(H¹(G)) on the rectangle (D, D).
/// Everything is built with enough truncation headroom that the requested
/// rectangle is fully certified.
inline KoszulReport verify_kernel_koszulity(const GroupExpr& e, PrimeField p, size_t D,
                                            unsigned jobs = 1, bool early_stop = false) {
    InflationData inf = psi_and_kernel(e, p, D + 3);
    GradedModule shifted = shift(inf.kernel.as_module(false), 2);
    return koszul_check(shifted, D, static_cast<int>(D), jobs, early_stop);
}

/// The two modules entering the five-term computation for the direct product
/// F(n) x F(m) of free pro-p groups (the G' != free test case), both over the
/// monomial exterior algebra on H¹ = F_p^{n+m}:
///   b_module = H(F_n) ⊗⁻¹ H(F_m) through ψ,
///   n_module = H•(G^ab, H¹(G')) assembled from the factor pieces
///              L_2(2) ⊗⁻¹ Λ and Λ ⊗⁻¹ L_2(2).
struct FreeProductFiveTermData {
    AlgebraPtr lambda;
    GradedModule b_module;
    GradedModule n_module;
};

inline FreeProductFiveTermData free_product_five_term_data(size_t n, size_t m, PrimeField p,
                                                           size_t D) {
    AlgebraPtr b = signed_tensor_algebra(cohomology_algebra(GroupExpr::free(n), p, D),
                                         cohomology_algebra(GroupExpr::free(m), p, D));
    InflationData inf = psi_and_kernel_for(b, p, D);
    GradedModule b_mod = algebra_as_module_via(inf.lambda, b, inf.psi);

    AlgebraPtr lam1 = exterior_algebra(n, p, D);
    AlgebraPtr lam2 = exterior_algebra(m, p, D);
    AlgebraPtr t = signed_tensor_algebra(lam1, lam2);
    GradedModule s1 = signed_tensor_module(t, shift(truncation_module(lam1, 2), 2),
                                           free_module(lam2));
    GradedModule s2 = signed_tensor_module(t, free_module(lam1),
                                           shift(truncation_module(lam2, 2), 2));
    GradedModule n_tensor = direct_sum(s1, s2);

    // transport along the block bijection Λ(V1⊕V2) -> Λ(V1)⊗⁻¹Λ(V2)
    size_t total = n + m;
    std::vector<FpMatrix> phi;
    for (size_t k = 0; k <= std::min(D, t->trunc()); ++k) {
        FpMatrix f(p, t->dim(k), inf.lambda->dim(k));
        for (size_t c = 0; c < inf.lambda->dim(k); ++c) {
            auto S = comb::subset_unrank(total, k, c);
            std::vector<size_t> s1v, s2v;
            for (size_t v : S) (v < n ? s1v : s2v).push_back(v < n ? v : v - n);
            size_t i = s1v.size(), j = k - i;
            size_t off = 0;
            for (size_t u = 0; u < i; ++u)
                off += comb::binom(n, u) * comb::binom(m, k - u);
            f.at(off + comb::subset_rank(n, s1v) * comb::binom(m, j) +
                     comb::subset_rank(m, s2v),
                 c) = 1;
        }
        phi.push_back(std::move(f));
    }
    GradedModule n_mod = pullback_module(inf.lambda, n_tensor, phi);
    return FreeProductFiveTermData{inf.lambda, std::move(b_mod), std::move(n_mod)};
}

inline FiveTermDims free_product_five_term(size_t n, size_t m, PrimeField p, size_t D) {
    FreeProductFiveTermData data = free_product_five_term_data(n, m, p, D);
    return five_term_dims(data.b_module, data.n_module);
}

}  // namespace koszul
