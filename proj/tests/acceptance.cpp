#include <gtest/gtest.h>

#include <chrono>
#include <cstdio>
#include <random>

#include "koszulfp/cli.hpp"

using namespace koszul;

namespace {

class Timer {
  public:
    Timer() : start_(std::chrono::steady_clock::now()) {}
    double elapsed() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

  private:
    std::chrono::steady_clock::time_point start_;
};

void report(int criterion, const char* what, double secs) {
    bool ok = !::testing::Test::HasFailure();
    std::printf("[criterion %d] %s — %s (%.2f s)\n", criterion, ok ? "PASS" : "FAIL", what,
                secs);
    std::fflush(stdout);
}

GradedModule group_cohomology_module(const GroupExpr& e, PrimeField p, size_t D) {
    InflationData inf = psi_and_kernel(e, p, D);
    return algebra_as_module_via(inf.lambda, inf.cohomology, inf.psi);
}

Subspace random_r2(PrimeField p, size_t n, size_t r, std::mt19937_64& rng) {
    for (;;) {
        FpMatrix m(p, r, comb::binom(n, 2));
        for (size_t i = 0; i < r; ++i)
            for (size_t c = 0; c < m.cols(); ++c)
                m.at(i, c) = static_cast<uint32_t>(rng() % p.p());
        Subspace s = Subspace::from_span(m);
        if (s.dim() == r) return s;
    }
}

}  // namespace

// H_{i,j}(Λ(F_p²), H•(F₂)) equals the closed formula: dim 1 at (0,0),
// dim i at (i, i+1) for 1 <= i <= 5, zero elsewhere; p in {2,3,5}.
TEST(Acceptance, Criterion1_FreeRankTwoOracle) {
    Timer t;
    for (uint32_t p : {2u, 3u, 5u}) {
        GradedModule b = group_cohomology_module(GroupExpr::free(2), PrimeField(p), 8);
        HomologyTable table = homology_table(b, 6, 6, 2);
        for (size_t i = 0; i <= 6; ++i)
            for (int j = 0; j <= 6; ++j) {
                size_t expect = 0;
                if (i == 0 && j == 0) expect = 1;
                if (i >= 1 && i <= 5 && j == static_cast<int>(i) + 1) expect = i;
                ASSERT_EQ(table.dim(i, j), expect) << "p=" << p << " (" << i << "," << j << ")";
            }
    }
    double secs = t.elapsed();
    EXPECT_LT(secs, 10.0);
    report(1, "H(Λ(F_p²), H(F₂)) matches the closed formula for p=2,3,5", secs);
}

// H_{2,4}(Λ(F_p⁴), H•(F₂×F₂)) = 1 and the five-term dimensions give
// dim ker d = 1 with H_{1,2}(N) = H_{0,2}(N) = 0.
TEST(Acceptance, Criterion2_ProductOfFreeGroups) {
    Timer t;
    for (uint32_t pp : {2u, 3u, 5u}) {
        PrimeField p(pp);
        AlgebraPtr b = signed_tensor_algebra(cohomology_algebra(GroupExpr::free(2), p, 6),
                                             cohomology_algebra(GroupExpr::free(2), p, 6));
        InflationData inf = psi_and_kernel_for(b, p, 6);
        GradedModule b_mod = algebra_as_module_via(inf.lambda, b, inf.psi);
        ASSERT_EQ(homology_dim(b_mod, 2, 4), 1u) << "p=" << pp;
        FiveTermDims ft = free_product_five_term(2, 2, p, 6);
        ASSERT_EQ(ft.h12N, 0u);
        ASSERT_EQ(ft.h02N, 0u);
        ASSERT_EQ(ft.h24B, 1u);
        ASSERT_EQ(ft.derived_ker_d, 1u);
        ASSERT_FALSE(ft.h14_warning());
    }
    double secs = t.elapsed();
    EXPECT_LT(secs, 60.0);
    report(2, "H_{2,4} = 1 and five-term dims force dim ker d = 1 for p=2,3,5", secs);
}

// The non-quadratic ideal of Λ(F_2⁴): witness (1,2) and the free-rank-one
// prediction failing exactly at degree 4 (dims 4 and 1).
TEST(Acceptance, Criterion3_NonQuadraticIdealFixture) {
    Timer t;
    PrimeField p(2);
    auto ext = exterior_algebra(4, p, 7);
    std::vector<uint32_t> gen(ext->dim(2), 0);
    gen[comb::subset_rank(4, {0, 1})] = 1;
    gen[comb::subset_rank(4, {2, 3})] = 1;
    ExteriorIdeal ei =
        ideal_in_exterior(ext, Subspace::from_span(FpMatrix::from_rows(p, ext->dim(2), {gen})));
    ASSERT_EQ(ei.ideal.dim(3), 4u);  // matches the free prediction in degree 3
    ASSERT_EQ(ei.ideal.dim(4), 1u);  // and breaks it in degree 4 (free would be 6)
    GradedModule i2 = shift(ei.ideal.as_module(false), 2);
    QuadraticCheck qc = is_quadratic_module(i2, 4);
    ASSERT_FALSE(qc.quadratic);
    ASSERT_TRUE(qc.witness.has_value());
    ASSERT_EQ(qc.witness->i, 1u);
    ASSERT_EQ(qc.witness->j, 2);
    double secs = t.elapsed();
    EXPECT_LT(secs, 5.0);
    report(3, "ideal (e01+e23): not quadratic, witness (1,2), dims I_3=4, I_4=1", secs);
}

// Koszulity of Λ(F_p^n) and S(F_p^n) for n <= 4 on the rectangle (6,6):
// off-diagonal zero, diagonal C(n+i-1,i) resp. C(n,i).
TEST(Acceptance, Criterion4_ExteriorAndSymmetricKoszul) {
    Timer t;
    PrimeField p(2);
    for (size_t n = 1; n <= 4; ++n) {
        HomologyTable lam = homology_table(trivial_module(exterior_algebra(n, p, 7)), 6, 6, 2);
        HomologyTable sym = homology_table(trivial_module(symmetric_algebra(n, p, 7)), 6, 6, 2);
        for (size_t i = 0; i <= 6; ++i)
            for (int j = 0; j <= 6; ++j) {
                size_t want_lam = static_cast<int>(i) == j ? comb::binom(n + i - 1, i) : 0;
                size_t want_sym = static_cast<int>(i) == j ? comb::binom(n, i) : 0;
                ASSERT_EQ(lam.dim(i, j), want_lam) << "Λ n=" << n << " " << i << "," << j;
                ASSERT_EQ(sym.dim(i, j), want_sym) << "S n=" << n << " " << i << "," << j;
            }
    }
    // spot check at an odd prime
    HomologyTable lam5 = homology_table(trivial_module(exterior_algebra(2, PrimeField(5), 7)),
                                        6, 6, 2);
    for (size_t i = 0; i <= 6; ++i) ASSERT_EQ(lam5.dim(i, static_cast<int>(i)), i + 1);
    double secs = t.elapsed();
    EXPECT_LT(secs, 60.0);
    report(4, "Λ(F_p^n), S(F_p^n) Koszul on (6,6) with the predicted diagonals, n ≤ 4", secs);
}

// Demushkin groups d in {2,4}: α_{i+1} injective for i <= 5 and the kernel
// of ψ, shifted by 2, scans Koszul up to (6,6).
TEST(Acceptance, Criterion5_Demushkin) {
    Timer t;
    for (uint32_t pp : {2u, 3u, 5u})
        for (size_t d : {2u, 4u})
            for (size_t i = 0; i <= 5; ++i) {
                FpMatrix a = demushkin_alpha(d, PrimeField(pp), i);
                ASSERT_EQ(a.rank(), a.cols()) << "p=" << pp << " d=" << d << " i=" << i;
            }
    for (size_t d : {2u, 4u}) {
        KoszulReport rep = verify_kernel_koszulity(GroupExpr::demushkin(d), PrimeField(2), 6, 2);
        ASSERT_EQ(rep.verdict(), KoszulVerdict::KoszulUpTo) << "d=" << d;
        ASSERT_EQ(rep.i_max, 6u);
        ASSERT_EQ(rep.j_max, 6);
    }
    double secs = t.elapsed();
    EXPECT_LT(secs, 120.0);
    report(5, "α injective (i ≤ 5, d ∈ {2,4}) and (ker ψ)(2) Koszul up to (6,6)", secs);
}

// Elementary-type closure: ten nested expressions up to H¹-dimension 6,
// all passing the kernel-Koszulity scan at D = 5.
TEST(Acceptance, Criterion6_ElementaryTypeClosure) {
    Timer t;
    const char* exprs[] = {
        "Zp",
        "F(3)",
        "D(2)",
        "D(4)",
        "(Zp * Zp)",
        "(D(2) * F(1))",
        "(A(2) x D(2))",
        "(A(1) x (D(2) * F(1)))",
        "((D(2) * Zp) * F(1))",
        "(D(4) * F(2))",
    };
    PrimeField p(2);
    for (const char* s : exprs) {
        GroupExpr e = parse_group_expr(s);
        ASSERT_LE(e.h1_dim(), 6u);
        KoszulReport rep = verify_kernel_koszulity(e, p, 5, 2);
        ASSERT_EQ(rep.verdict(), KoszulVerdict::KoszulUpTo) << s;
    }
    double secs = t.elapsed();
    EXPECT_LT(secs, 600.0);
    report(6, "(ker ψ)(2) Koszul at D=5 for 10 nested elementary-type groups", secs);
}

// Route equivalence: direct bar-complex vanishing versus the dual J/<W*>
// computation agree on 50 seeded random ideals, p = 2, n <= 4, D = 6.
TEST(Acceptance, Criterion7_RouteEquivalence) {
    Timer t;
    std::mt19937_64 rng(20240101);
    PrimeField p(2);
    std::map<size_t, std::unique_ptr<ThirdLineContext>> ctxs;
    for (size_t n : {2u, 3u, 4u}) ctxs[n] = std::make_unique<ThirdLineContext>(n, p, 6);
    int agreements = 0;
    for (int sample = 0; sample < 50; ++sample) {
        size_t n = 2 + rng() % 3;
        size_t r = rng() % (comb::binom(n, 2) + 1);
        Subspace r2 = random_r2(p, n, r, rng);
        ThirdLineReport rep = third_line_check(*ctxs[n], r2, VanishingRoute::Both);
        if (rep.quadratic_ok) {
            ASSERT_TRUE(rep.ran_direct && rep.ran_dual);
            ASSERT_TRUE(rep.cross_check_agrees)
                << "sample " << sample << " n=" << n << " r=" << r;
            ASSERT_EQ(rep.direct_failures.empty(), rep.dual_failures.empty());
        }
        ++agreements;
    }
    ASSERT_EQ(agreements, 50);
    double secs = t.elapsed();
    EXPECT_LT(secs, 900.0);
    report(7, "direct and dual routes agree on 50 random ideals (p=2, n ≤ 4, D=6)", secs);
}

// Property suites, >= 200 randomized exact assertions each.
TEST(Acceptance, Criterion8_PropertySuites) {
    Timer t;
    std::mt19937_64 rng(8888);
    PrimeField p2(2), p3(3);

    // pool of small modules over exterior algebras
    auto random_module = [&](std::mt19937_64& r) {
        size_t n = 1 + r() % 3;
        PrimeField p(r() % 2 ? 2 : 3);
        auto ext = exterior_algebra(n, p, 6);
        switch (r() % 4) {
            case 0: return trivial_module(ext);
            case 1: return free_module(ext);
            case 2: return truncation_module(ext, r() % 3);
            default: {
                auto free = std::make_shared<GradedModule>(free_module(ext));
                std::vector<uint32_t> gen(ext->dim(2));
                for (auto& x : gen) x = r() % p.p();
                return submodule_from_generators(free, {{2, gen}}).as_module(false);
            }
        }
    };

    // (a) vanishing law: below j = i + lowest degree the bar spaces themselves
    // are empty, hence H_{i,j} = 0
    for (int c = 0; c < 200; ++c) {
        GradedModule m = random_module(rng);
        size_t i = rng() % 4;
        int bound = certified_bound(m) - 1;
        int j_low = m.lo() + static_cast<int>(i);
        if (j_low > bound) continue;
        int j = j_low - 1 - static_cast<int>(rng() % 2);
        ASSERT_EQ(bar_space_dim(m, i, j), 0u) << "case " << c;
        ASSERT_EQ(homology_dim(m, i, j), 0u) << "case " << c;
    }

    // (b) shift law on 200 random cells
    for (int c = 0; c < 200; ++c) {
        GradedModule m = random_module(rng);
        int k = static_cast<int>(rng() % 5) - 2;
        GradedModule s = shift(m, k);
        int j_hi = std::min(certified_bound(s), certified_bound(m) - k) - 1;
        if (j_hi < s.lo()) continue;
        size_t i = rng() % 4;
        int j = s.lo() + static_cast<int>(rng() % (j_hi - s.lo() + 1));
        ASSERT_EQ(homology_dim(s, i, j), homology_dim(m, i, j + k)) << "case " << c;
    }

    // (c) Künneth on random tensor cells
    {
        auto a = exterior_algebra(1, p2, 6);
        auto b = exterior_algebra(2, p2, 6);
        auto tp = signed_tensor_algebra(a, b);
        std::vector<GradedModule> ms{trivial_module(a), free_module(a),
                                     truncation_module(a, 1)};
        std::vector<GradedModule> ns{trivial_module(b), free_module(b),
                                     truncation_module(b, 2)};
        int cases = 0;
        for (auto& m : ms)
            for (auto& n : ns) {
                GradedModule prod = signed_tensor_module(tp, m, n);
                HomologyTable tm = homology_table(m, 4, 5);
                HomologyTable tn = homology_table(n, 4, 5);
                int j_hi = std::min(5, certified_bound(prod) - 1);
                HomologyTable tprod = homology_table(prod, 4, j_hi);
                for (size_t deg = 0; deg <= 4; ++deg)
                    for (int j = prod.lo(); j <= j_hi; ++j) {
                        size_t expect = 0;
                        for (size_t i = 0; i <= deg; ++i)
                            for (int j1 = m.lo(); j1 <= j - n.lo(); ++j1)
                                if (j1 <= 5 && j - j1 <= 5)
                                    expect += tm.dim(i, j1) * tn.dim(deg - i, j - j1);
                        ASSERT_EQ(tprod.dim(deg, j), expect) << deg << "," << j;
                        ++cases;
                    }
            }
        ASSERT_GE(cases, 200);
    }

    // (d) d∘d = 0 on 200 assembled differential pairs
    for (int c = 0; c < 200; ++c) {
        GradedModule m = random_module(rng);
        size_t i = 1 + rng() % 3;
        int bound = certified_bound(m);
        if (m.lo() > bound) continue;
        int j = m.lo() + static_cast<int>(rng() % 5);
        if (j > bound) j = bound;
        detail::BarLevel l2 = detail::bar_level(m, i + 1, j);
        detail::BarLevel l1 = detail::bar_level(m, i, j);
        detail::BarLevel l0 = detail::bar_level(m, i - 1, j);
        detail::SparseMat da = detail::bar_differential(m, i + 1, l2, l1);
        detail::SparseMat db = detail::bar_differential(m, i, l1, l0);
        ASSERT_TRUE(detail::composes_to_zero(m.field(), db, da)) << "case " << c;
    }

    // (e) Koszul-complex Tor equals bar-complex Tor over symmetric algebras
    {
        auto s = symmetric_algebra(2, p3, 7);
        auto free = std::make_shared<GradedModule>(free_module(s));
        int cases = 0;
        for (int iter = 0; iter < 8; ++iter) {
            std::vector<std::pair<int, std::vector<uint32_t>>> gens;
            int deg = 1 + static_cast<int>(rng() % 2);
            std::vector<uint32_t> g(s->dim(deg));
            for (auto& x : g) x = rng() % 3;
            gens.push_back({deg, g});
            GradedModule n = quotient_module(free, submodule_from_generators(free, gens));
            for (size_t i = 0; i <= 3; ++i)
                for (int j = 0; j <= 6; ++j, ++cases)
                    ASSERT_EQ(koszul_complex_tor(n, i, j), homology_dim(n, i, j))
                        << i << "," << j;
        }
        ASSERT_GE(cases, 200);
    }

    // (f) ideal/quotient dimension complementarity in Λ(V)
    {
        int cases = 0;
        for (int iter = 0; iter < 60; ++iter) {
            size_t n = 2 + rng() % 3;
            PrimeField p(rng() % 2 ? 2 : 3);
            auto ext = exterior_algebra(n, p, n);
            Subspace r2 = random_r2(p, n, rng() % (comb::binom(n, 2) + 1), rng);
            ExteriorIdeal ei = ideal_in_exterior(ext, r2);
            for (size_t k = 0; k <= n; ++k, ++cases)
                ASSERT_EQ(ei.ideal.dim(static_cast<int>(k)) + ei.quotient->dim(k),
                          comb::binom(n, k));
        }
        ASSERT_GE(cases, 200);
    }

    double secs = t.elapsed();
    report(8, "six property suites (vanishing, shift, Künneth, d²=0, dual route, "
              "complementarity), ≥200 cases each", secs);
}

// Search harness null result: p = 2, n = 4, r in {1,2,3}, D = 7, 500 samples
// per r. A pass-B-but-not-Koszul ideal would be a finding, not a failure.
TEST(Acceptance, Criterion9_SearchNullResult) {
    Timer t;
    size_t total_hits = 0, total = 0;
    for (size_t r : {1u, 2u, 3u}) {
        cli::JobSpec job;
        job.command = "search";
        job.input = cli::json{{"search", {{"n", 4}, {"r", r}}}};
        job.p = 2;
        job.truncation = 7;
        job.seed = 42;
        job.count = 500;
        job.jobs = 2;
        job.epoch = 0;
        cli::RunResult res = cli::run(job);
        ASSERT_EQ(res.exit_code, 0) << res.output.dump();
        ASSERT_EQ(res.output.at("records").size(), 500u);
        size_t hits = res.output.at("summary").at("pass_b_but_not_koszul").get<size_t>();
        size_t passb = res.output.at("summary").at("pass_criterion_b").get<size_t>();
        std::printf("  search r=%zu: %zu/500 pass the hypotheses, %zu pass B but fail "
                    "Koszulity\n",
                    r, passb, hits);
        total_hits += hits;
        total += 500;
    }
    if (total_hits > 0)
        std::printf("  FINDING: %zu ideals pass the criterion-B hypotheses but show a Koszul "
                    "defect up to D=7\n",
                    total_hits);
    ASSERT_EQ(total, 1500u);
    double secs = t.elapsed();
    EXPECT_LT(secs, 7200.0);
    report(9, "null-result search, 500 samples per r in {1,2,3} (hits reported above)", secs);
}
