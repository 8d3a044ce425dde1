#include <gtest/gtest.h>

#include <map>

#include "koszulfp/monomial.hpp"

using namespace koszul;

namespace {

// Independent exterior-monomial arithmetic for oracles: monomials as bitmasks.
int mask_wedge_sign(uint32_t a, uint32_t b) {
    if (a & b) return 0;
    int inv = 0;
    for (int s = 31; s >= 0; --s)
        if (a & (1u << s)) inv += __builtin_popcount(b & ((1u << s) - 1));
    return inv % 2 ? -1 : 1;
}

using MaskVec = std::map<uint32_t, uint32_t>;  // monomial mask -> coeff

MaskVec mask_wedge(const PrimeField& f, const MaskVec& x, const MaskVec& y) {
    MaskVec out;
    for (auto& [ma, ca] : x)
        for (auto& [mb, cb] : y) {
            int s = mask_wedge_sign(ma, mb);
            if (!s) continue;
            uint32_t c = f.mul(ca, cb);
            if (s < 0) c = f.neg(c);
            uint32_t& slot = out[ma | mb];
            slot = f.add(slot, c);
            if (!slot) out.erase(ma | mb);
        }
    return out;
}

// dims of the ideal generated by g (degree-2 element) in Λ(F_p^n), oracle path
std::vector<size_t> ideal_dims_oracle(const PrimeField& f, size_t n, const MaskVec& g,
                                      size_t D) {
    std::vector<size_t> dims(D + 1, 0);
    for (size_t k = 2; k <= std::min(D, n); ++k) {
        // span of (all degree k-2 monomials) ∧ g inside Λ^k
        std::vector<uint32_t> monoms;  // degree k masks, and degree k-2 masks
        std::vector<uint32_t> low;
        for (uint32_t m = 0; m < (1u << n); ++m) {
            if (__builtin_popcount(m) == static_cast<int>(k)) monoms.push_back(m);
            if (__builtin_popcount(m) == static_cast<int>(k - 2)) low.push_back(m);
        }
        std::map<uint32_t, size_t> col_of;
        for (size_t t = 0; t < monoms.size(); ++t) col_of[monoms[t]] = t;
        FpMatrix span(f, low.size(), monoms.size());
        for (size_t r = 0; r < low.size(); ++r) {
            MaskVec w = mask_wedge(f, MaskVec{{low[r], 1u}}, g);
            for (auto& [m, c] : w) span.at(r, col_of[m]) = c;
        }
        dims[k] = span.rank();
    }
    return dims;
}

}  // namespace

TEST(Algebra, RejectsNonAssociativeTensors) {
    PrimeField f(3);
    auto good = exterior_algebra(3, f, 3);
    // redirect e0*e1 to e12: then (e0e1)e2 = 0 but e0(e1e2) = e012
    std::vector<std::vector<FpMatrix>> mult;
    for (size_t i = 0; i <= 3; ++i) {
        mult.emplace_back();
        for (size_t j = 0; i + j <= 3; ++j) mult[i].push_back(good->mult(i, j));
    }
    mult[1][1].at(0, 1) = 0;
    mult[1][1].at(2, 1) = 1;
    EXPECT_THROW(TruncatedGradedAlgebra(f, good->dims(), std::move(mult)), error);
}

TEST(Algebra, RejectsDisconnected) {
    PrimeField f(3);
    EXPECT_THROW(TruncatedGradedAlgebra(f, {2, 1}, {{FpMatrix(f, 2, 4), FpMatrix(f, 1, 2)},
                                                    {FpMatrix(f, 1, 2)}}),
                 error);
}

TEST(Shift, ZeroShiftIsIdentity) {
    auto ext = exterior_algebra(3, PrimeField(2), 4);
    GradedModule m = truncation_module(ext, 1);
    GradedModule s = shift(m, 0);
    EXPECT_EQ(s.lo(), m.lo());
    EXPECT_EQ(s.dims(), m.dims());
}

TEST(Shift, ComponentReindexing) {
    auto ext = exterior_algebra(4, PrimeField(3), 5);
    GradedModule m = truncation_module(ext, 2);
    for (int k = -2; k <= 3; ++k) {
        GradedModule s = shift(m, k);
        for (int d = s.lo(); d <= s.hi(); ++d) EXPECT_EQ(s.dim(d), m.dim(d + k));
    }
}

TEST(SignedTensor, RankOneExteriorSquare) {
    PrimeField f(5);
    auto l1 = exterior_algebra(1, f, 3);
    auto t = signed_tensor_algebra(l1, l1);
    EXPECT_EQ(t->dims(), (std::vector<size_t>{1, 2, 1, 0}));
}

TEST(SignedTensor, UnitLaw) {
    PrimeField f(3);
    auto a = exterior_algebra(3, f, 4);
    auto k = exterior_algebra(0, f, 4);  // the trivial algebra
    auto t = signed_tensor_algebra(a, k);
    EXPECT_EQ(t->dims(), a->dims());
    // structure constants must agree too: both are Λ(F_3^3)
    for (size_t i = 0; i + 1 <= 4; ++i)
        for (size_t j = 0; i + j <= 4; ++j) EXPECT_EQ(t->mult(i, j), a->mult(i, j));
}

TEST(SignedTensor, ConvolutionOfHilbertFunctions) {
    PrimeField f(2);
    auto a = exterior_algebra(2, f, 4);
    auto t = signed_tensor_algebra(a, a);
    EXPECT_EQ(t->dims(), (std::vector<size_t>{1, 4, 6, 4, 1}));
    // cross-check against Λ(F_2^4) and against an explicit convolution
    auto big = exterior_algebra(4, f, 4);
    EXPECT_EQ(t->dims(), big->dims());
    for (size_t n = 0; n <= 4; ++n) {
        size_t conv = 0;
        for (size_t i = 0; i <= n; ++i) conv += a->dim(i) * a->dim(n - i);
        EXPECT_EQ(t->dim(n), conv);
    }
}

TEST(SignedTensor, MatchesExteriorAlgebraStructure) {
    // Λ(V⊕W) ≅ Λ(V)⊗⁻¹Λ(W): the block bijection e_S -> (e_{S∩V}, e_{S∩W})
    // carries products to products with no extra signs
    for (uint32_t p : {2u, 3u}) {
        PrimeField f(p);
        size_t n1 = 2, n2 = 2, n = n1 + n2, D = 4;
        auto t = signed_tensor_algebra(exterior_algebra(n1, f, D), exterior_algebra(n2, f, D));
        auto lam = exterior_algebra(n, f, D);
        // index map: Λ^k monomial -> tensor index
        auto to_tensor = [&](size_t k, size_t rank) {
            auto S = comb::subset_unrank(n, k, rank);
            std::vector<size_t> s1, s2;
            for (size_t v : S) (v < n1 ? s1 : s2).push_back(v >= n1 ? v - n1 : v);
            size_t i = s1.size(), j = k - i;
            size_t off = 0;
            for (size_t u = 0; u < i; ++u) off += comb::binom(n1, u) * comb::binom(n2, k - u);
            return off + comb::subset_rank(n1, s1) * comb::binom(n2, j) +
                   comb::subset_rank(n2, s2);
        };
        for (size_t i = 0; i <= D; ++i)
            for (size_t j = 0; i + j <= D; ++j)
                for (size_t a = 0; a < lam->dim(i); ++a)
                    for (size_t b = 0; b < lam->dim(j); ++b) {
                        std::vector<uint32_t> u(lam->dim(i), 0), v(lam->dim(j), 0);
                        u[a] = 1;
                        v[b] = 1;
                        auto prod = lam->product(i, u, j, v);
                        std::vector<uint32_t> ut(t->dim(i), 0), vt(t->dim(j), 0);
                        ut[to_tensor(i, a)] = 1;
                        vt[to_tensor(j, b)] = 1;
                        auto prod_t = t->product(i, ut, j, vt);
                        // transport prod to tensor coordinates and compare
                        std::vector<uint32_t> expect(t->dim(i + j), 0);
                        for (size_t r = 0; r < prod.size(); ++r)
                            if (prod[r]) expect[to_tensor(i + j, r)] = prod[r];
                        EXPECT_EQ(prod_t, expect);
                    }
    }
}

TEST(SignedTensor, AssociativeUpToBlockPermutation) {
    PrimeField f(3);
    auto a = exterior_algebra(1, f, 3);
    auto left = signed_tensor_algebra(signed_tensor_algebra(a, a), a);
    auto right = signed_tensor_algebra(a, signed_tensor_algebra(a, a));
    EXPECT_EQ(left->dims(), right->dims());
    // Λ(F_3^3) has the same Hilbert function
    EXPECT_EQ(left->dims(), exterior_algebra(3, f, 3)->dims());
}

TEST(SignedTensorModule, UnitLaw) {
    PrimeField f(5);
    auto a = exterior_algebra(2, f, 4);
    auto k = exterior_algebra(0, f, 4);
    auto t = signed_tensor_algebra(a, k);
    GradedModule m = truncation_module(a, 1);
    GradedModule triv = trivial_module(k);
    GradedModule prod = signed_tensor_module(t, m, triv);
    EXPECT_EQ(prod.lo(), m.lo());
    EXPECT_EQ(prod.dims(), m.dims());
}

TEST(Submodule, FullDegreeZeroBasisGeneratesFreeModule) {
    auto ext = exterior_algebra(3, PrimeField(2), 4);
    auto free = std::make_shared<GradedModule>(free_module(ext));
    GradedSubmodule s = submodule_from_generators(free, {{0, {1}}});
    EXPECT_EQ(s.dims(), ext->dims());
}

TEST(Submodule, EmptyGeneratorsGiveZero) {
    auto ext = exterior_algebra(3, PrimeField(2), 4);
    auto free = std::make_shared<GradedModule>(free_module(ext));
    GradedSubmodule s = submodule_from_generators(free, {});
    for (int d = 0; d <= 4; ++d) EXPECT_EQ(s.dim(d), 0u);
}

TEST(Submodule, MalformedGeneratorThrows) {
    auto ext = exterior_algebra(3, PrimeField(2), 4);
    auto free = std::make_shared<GradedModule>(free_module(ext));
    EXPECT_THROW(submodule_from_generators(free, {{1, {1}}}), dimension_mismatch);
    EXPECT_THROW(submodule_from_generators(free, {{9, {1}}}), dimension_mismatch);
}

TEST(Submodule, SymplecticPairIdealDims) {
    // g = e0∧e1 + e2∧e3 in Λ(F_2^4); oracle dims by exhaustive wedge enumeration
    PrimeField f(2);
    size_t n = 4, D = 4;
    MaskVec g{{0b0011u, 1u}, {0b1100u, 1u}};
    std::vector<size_t> oracle = ideal_dims_oracle(f, n, g, D);
    EXPECT_EQ(oracle, (std::vector<size_t>{0, 0, 1, 4, 1}));

    auto ext = exterior_algebra(n, f, D);
    auto free = std::make_shared<GradedModule>(free_module(ext));
    // e01 has subset rank 0, e23 has subset rank 5
    std::vector<uint32_t> gen(ext->dim(2), 0);
    gen[comb::subset_rank(4, {0, 1})] = 1;
    gen[comb::subset_rank(4, {2, 3})] = 1;
    GradedSubmodule s = submodule_from_generators(free, {{2, gen}});
    EXPECT_EQ(s.dims(), oracle);
    EXPECT_NO_THROW(s.verify_closed());
}

TEST(Quotient, ModuleByItselfAndByZero) {
    auto ext = exterior_algebra(2, PrimeField(3), 3);
    auto free = std::make_shared<GradedModule>(free_module(ext));
    GradedSubmodule all = submodule_from_generators(free, {{0, {1}}});
    GradedModule q1 = quotient_module(free, all);
    EXPECT_TRUE(q1.is_zero());
    GradedSubmodule none = submodule_from_generators(free, {});
    GradedModule q2 = quotient_module(free, none);
    EXPECT_EQ(q2.dims(), free->dims());
}

TEST(Quotient, SymplecticPairComplementDims) {
    PrimeField f(2);
    auto ext = exterior_algebra(4, f, 4);
    auto free = std::make_shared<GradedModule>(free_module(ext));
    std::vector<uint32_t> gen(ext->dim(2), 0);
    gen[comb::subset_rank(4, {0, 1})] = 1;
    gen[comb::subset_rank(4, {2, 3})] = 1;
    GradedSubmodule s = submodule_from_generators(free, {{2, gen}});
    GradedModule q = quotient_module(free, s);
    EXPECT_EQ(q.dims(), (std::vector<size_t>{1, 4, 5, 0, 0}));
}

TEST(Quotient, NonClosedSubspacesRejected) {
    PrimeField f(2);
    auto ext = exterior_algebra(2, f, 3);
    auto free = std::make_shared<GradedModule>(free_module(ext));
    // a line in degree 1 that is not action-closed
    std::vector<Subspace> comps;
    comps.emplace_back(f, 1);
    comps.push_back(Subspace::from_span(FpMatrix::from_rows(f, 2, {{1, 0}})));
    comps.emplace_back(f, 1);
    comps.emplace_back(f, 0);
    GradedSubmodule s(free, comps);
    EXPECT_THROW(quotient_module(free, s), containment_violation);
}

TEST(DirectSum, DimsAdd) {
    auto ext = exterior_algebra(2, PrimeField(3), 3);
    GradedModule a = truncation_module(ext, 1);
    GradedModule b = trivial_module(ext);
    GradedModule s = direct_sum(a, b);
    for (int d = 0; d <= 3; ++d) EXPECT_EQ(s.dim(d), a.dim(d) + b.dim(d));
}

TEST(SignedTensor, FieldMismatchRejected) {
    auto a = exterior_algebra(2, PrimeField(2), 3);
    auto b = exterior_algebra(2, PrimeField(3), 3);
    EXPECT_THROW(signed_tensor_algebra(a, b), field_mismatch);
    GradedModule ma = trivial_module(a), mb = trivial_module(b);
    EXPECT_THROW(signed_tensor_module(a, ma, mb), field_mismatch);
}

TEST(Hilbert, AlgebraAndModule) {
    auto lam = exterior_algebra(3, PrimeField(5), 3);
    EXPECT_EQ(hilbert_function(*lam), (std::vector<size_t>{1, 3, 3, 1}));
    auto s = symmetric_algebra(2, PrimeField(5), 4);
    EXPECT_EQ(hilbert_function(*s), (std::vector<size_t>{1, 2, 3, 4, 5}));
    EXPECT_EQ(hilbert_function(truncation_module(lam, 1)), (std::vector<size_t>{3, 3, 1}));
}
