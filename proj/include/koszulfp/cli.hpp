#pragma once
#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "groups.hpp"
#include "json.hpp"
#include "rng.hpp"

namespace koszul::cli {

using nlohmann::json;

// ---------------------------------------------------------------------------
// job description

struct JobSpec {
    std::string command;  // homology | quadratic-check | koszul-check | dual |
                          // criterion-b | five-term | group | theorem-c | search
    json input;           // parsed input document
    uint32_t p = 2;
    size_t truncation = 6;
    uint64_t seed = 0;
    size_t count = 10;
    unsigned jobs = 1;
    VanishingRoute route = VanishingRoute::Both;
    std::string cache_dir;
    std::optional<int> i_max;
    std::optional<int> j_max;
    std::optional<uint64_t> epoch;  // pinned record timestamp (reproducible output)
};

struct RunResult {
    json output;
    int exit_code = 0;  // 0 computed; 2 input error; 3 resource budget exceeded
};

// ---------------------------------------------------------------------------
// input parsing

namespace detail {

inline Subspace parse_ideal_r2(const json& ideal, PrimeField p, size_t& n_out) {
    if (!ideal.contains("n") || !ideal.contains("generators"))
        throw error("ideal needs fields n and generators");
    size_t n = ideal.at("n").get<size_t>();
    n_out = n;
    size_t lam2 = comb::binom(n, 2);
    std::vector<std::vector<uint32_t>> rows;
    for (const json& gen : ideal.at("generators")) {
        std::vector<uint32_t> v(lam2, 0);
        for (const json& term : gen.at("terms")) {
            std::vector<size_t> m = term.at("m").get<std::vector<size_t>>();
            if (m.size() != 2 || m[0] >= m[1] || m[1] >= n)
                throw error("ideal generator monomials must be sorted pairs below n");
            int64_t c = term.value("c", 1);
            v[comb::subset_rank(n, m)] = p.add(v[comb::subset_rank(n, m)], p.reduce(c));
        }
        rows.push_back(std::move(v));
    }
    FpMatrix span(p, rows.size(), lam2);
    for (size_t r = 0; r < rows.size(); ++r)
        for (size_t c = 0; c < lam2; ++c) span.at(r, c) = rows[r][c];
    return Subspace::from_span(span);
}

inline QuadraticAlgebraPresentation parse_presentation(const json& pres, PrimeField p) {
    size_t n = pres.at("n").get<size_t>();
    std::vector<std::vector<uint32_t>> rows;
    for (const json& rel : pres.value("relations", json::array())) {
        std::vector<uint32_t> v(n * n, 0);
        for (const json& term : rel.at("terms")) {
            std::vector<size_t> t = term.at("t").get<std::vector<size_t>>();
            if (t.size() != 2 || t[0] >= n || t[1] >= n)
                throw error("relation tensor index out of range");
            int64_t c = term.value("c", 1);
            size_t idx = t[0] * n + t[1];
            v[idx] = p.add(v[idx], p.reduce(c));
        }
        rows.push_back(std::move(v));
    }
    FpMatrix span(p, rows.size(), n * n);
    for (size_t r = 0; r < rows.size(); ++r)
        for (size_t c = 0; c < n * n; ++c) span.at(r, c) = rows[r][c];
    return QuadraticAlgebraPresentation(n, Subspace::from_span(span));
}

inline AlgebraPtr parse_algebra(const json& doc, PrimeField p, size_t D) {
    const json& a = doc.at("algebra");
    if (a.contains("exterior")) return exterior_algebra(a["exterior"].at("n"), p, D);
    if (a.contains("symmetric")) return symmetric_algebra(a["symmetric"].at("n"), p, D);
    throw error("algebra must be {\"exterior\":{\"n\":..}} or {\"symmetric\":{\"n\":..}}");
}

inline GradedModule parse_custom_module(const json& m, AlgebraPtr alg) {
    const PrimeField f = alg->field();
    int lo = m.value("lowest", 0);
    std::vector<size_t> dims = m.at("dims").get<std::vector<size_t>>();
    int hi = lo + static_cast<int>(dims.size()) - 1;
    std::map<std::pair<int, size_t>, FpMatrix> act;
    for (const json& entry : m.at("action")) {
        int j = entry.at("j").get<int>();
        size_t i = entry.at("i").get<size_t>();
        if (j < lo || j + static_cast<int>(i) > hi) throw error("action entry out of range");
        size_t rows = dims[j + i - lo], cols = dims[j - lo] * alg->dim(i);
        std::vector<int64_t> flat = entry.at("matrix").get<std::vector<int64_t>>();
        if (flat.size() != rows * cols)
            throw error("action matrix has wrong size (want row-major rows*cols)");
        FpMatrix mat(f, rows, cols);
        for (size_t r = 0; r < rows; ++r)
            for (size_t c = 0; c < cols; ++c) mat.at(r, c) = f.reduce(flat[r * cols + c]);
        act.emplace(std::pair<int, size_t>(j, i), std::move(mat));
    }
    // identity actions in degree 0 are implied when omitted
    for (int j = lo; j <= hi; ++j)
        if (!act.count({j, 0}))
            act.emplace(std::pair<int, size_t>(j, 0), FpMatrix::identity(f, dims[j - lo]));
    return GradedModule(std::move(alg), lo, std::move(dims), std::move(act));
}

// (algebra, module) for homology-style commands; handles the ideal and group
// payloads as documented in the README
struct ModuleJob {
    GradedModule module;
    std::string description;
};

inline ModuleJob parse_module_job(const JobSpec& job, size_t trunc) {
    const PrimeField p(job.p);
    const json& doc = job.input;
    if (doc.contains("group")) {
        GroupExpr e = parse_group_expr(doc.at("group").get<std::string>());
        InflationData inf = psi_and_kernel(e, p, trunc);
        return {algebra_as_module_via(inf.lambda, inf.cohomology, inf.psi),
                "H(" + e.to_string() + ") over the exterior algebra on H^1"};
    }
    if (doc.contains("ideal")) {
        size_t n = 0;
        Subspace r2 = parse_ideal_r2(doc.at("ideal"), p, n);
        ExteriorIdeal ei = ideal_in_exterior(exterior_algebra(n, p, trunc), r2);
        return {shift(ei.ideal.as_module(false), 2), "I(2) for the given ideal"};
    }
    AlgebraPtr alg = parse_algebra(doc, p, trunc);
    if (!doc.contains("module") || doc.at("module") == "trivial")
        return {trivial_module(alg), "trivial module"};
    if (doc.at("module") == "free") return {free_module(alg), "free module"};
    return {parse_custom_module(doc.at("module"), alg), "custom module"};
}

// ---------------------------------------------------------------------------
// report serialization

inline json cell_json(const Cell& c) {
    return json{{"i", c.i}, {"j", c.j}, {"dim", c.dim}};
}

inline json koszul_json(const KoszulReport& rep) {
    json defects = json::array();
    for (const Cell& c : rep.defects) defects.push_back(cell_json(c));
    return json{{"verdict", rep.verdict() == KoszulVerdict::KoszulUpTo ? "KoszulUpTo"
                                                                       : "DefectsFound"},
                {"verified_up_to", {{"i_max", rep.i_max}, {"j_max", rep.j_max}}},
                {"defects", defects}};
}

inline json quadratic_json(const QuadraticCheck& qc) {
    json out{{"quadratic", qc.quadratic}};
    if (qc.witness) out["witness"] = cell_json(*qc.witness);
    return out;
}

inline json third_line_json(const ThirdLineReport& rep) {
    json out{{"quadratic_ok", rep.quadratic_ok},
             {"checked_up_to", rep.checked_up_to},
             {"passes", rep.passes()}};
    if (rep.quadratic_witness) out["quadratic_witness"] = cell_json(*rep.quadratic_witness);
    if (!rep.quadratic_ok) out["verdict"] = "NotQuadraticPrecondition";
    if (rep.ran_direct) {
        json cells = json::array();
        for (const Cell& c : rep.direct_failures) cells.push_back(cell_json(c));
        out["direct_failures"] = cells;
    }
    if (rep.ran_dual) {
        json cells = json::array();
        for (const Cell& c : rep.dual_failures) cells.push_back(cell_json(c));
        out["dual_failures"] = cells;
    }
    if (rep.ran_direct && rep.ran_dual) out["cross_check_agrees"] = rep.cross_check_agrees;
    return out;
}

// ---------------------------------------------------------------------------
// homology cell cache (content addressed; purely an optimization)

inline uint64_t fnv1a_accum(uint64_t h, uint64_t x) {
    for (int b = 0; b < 8; ++b) {
        h ^= (x >> (8 * b)) & 0xFF;
        h *= 0x100000001B3ull;
    }
    return h;
}

inline uint64_t module_content_hash(const GradedModule& m) {
    uint64_t h = 0xCBF29CE484222325ull;
    h = fnv1a_accum(h, m.field().p());
    h = fnv1a_accum(h, static_cast<uint64_t>(m.lo()));
    const TruncatedGradedAlgebra& a = *m.algebra();
    h = fnv1a_accum(h, a.trunc());
    for (size_t d : a.dims()) h = fnv1a_accum(h, d);
    for (size_t i = 0; i <= a.trunc(); ++i)
        for (size_t j = 0; i + j <= a.trunc(); ++j) {
            const FpMatrix& mm = a.mult(i, j);
            for (size_t r = 0; r < mm.rows(); ++r)
                for (size_t c = 0; c < mm.cols(); ++c) h = fnv1a_accum(h, mm.at(r, c));
        }
    for (size_t d : m.dims()) h = fnv1a_accum(h, d);
    for (int j = m.lo(); j <= m.hi(); ++j)
        for (size_t i = 0; j + static_cast<int>(i) <= m.hi() && i <= a.trunc(); ++i) {
            const FpMatrix& am = m.act(j, i);
            for (size_t r = 0; r < am.rows(); ++r)
                for (size_t c = 0; c < am.cols(); ++c) h = fnv1a_accum(h, am.at(r, c));
        }
    return h;
}

class CellCache {
  public:
    explicit CellCache(std::string dir) : dir_(std::move(dir)) {
        if (!dir_.empty()) std::filesystem::create_directories(dir_);
    }
    bool enabled() const { return !dir_.empty(); }

    std::optional<size_t> lookup(uint64_t module_hash, size_t i, int j) const {
        if (!enabled()) return std::nullopt;
        std::ifstream in(path(module_hash, i, j));
        if (!in) return std::nullopt;
        size_t dim;
        if (!(in >> dim)) return std::nullopt;
        return dim;
    }
    void store(uint64_t module_hash, size_t i, int j, size_t dim) const {
        if (!enabled()) return;
        std::ofstream out(path(module_hash, i, j));
        out << dim << "\n";
    }

  private:
    std::string path(uint64_t module_hash, size_t i, int j) const {
        uint64_t h = module_hash;
        h = fnv1a_accum(h, i);
        h = fnv1a_accum(h, static_cast<uint64_t>(static_cast<int64_t>(j)));
        std::ostringstream os;
        os << std::hex << h;
        return dir_ + "/" + os.str() + ".cell";
    }
    std::string dir_;
};

}  // namespace detail

// ---------------------------------------------------------------------------
// command implementations

namespace detail {

inline json run_homology(const JobSpec& job) {
    size_t D = job.truncation;
    ModuleJob mj = parse_module_job(job, D);
    size_t i_max = static_cast<size_t>(job.i_max.value_or(static_cast<int>(D) - 1));
    int j_max = job.j_max.value_or(static_cast<int>(D) - 1);

    CellCache cache(job.cache_dir);
    json table = json::array();
    if (cache.enabled()) {
        uint64_t h = module_content_hash(mj.module);
        for (size_t i = 0; i <= i_max; ++i)
            for (int j = mj.module.lo(); j <= j_max; ++j) {
                std::optional<size_t> dim = cache.lookup(h, i, j);
                if (!dim) {
                    dim = homology_dim(mj.module, i, j);
                    cache.store(h, i, j, *dim);
                }
                if (*dim) table.push_back(json{{"i", i}, {"j", j}, {"dim", *dim}});
            }
    } else {
        HomologyTable t = homology_table(mj.module, i_max, j_max, job.jobs);
        for (auto& [cell, dim] : t.nonzero)
            table.push_back(json{{"i", cell.first}, {"j", cell.second}, {"dim", dim}});
    }
    return json{{"command", "homology"},
                {"p", job.p},
                {"truncation", D},
                {"module", mj.description},
                {"table", table},
                {"certified", {{"i_max", i_max}, {"j_max", j_max}}}};
}

inline json run_quadratic_check(const JobSpec& job) {
    size_t D = job.truncation;
    const PrimeField p(job.p);
    json out{{"command", "quadratic-check"}, {"p", job.p}, {"truncation", D}};
    if (job.input.contains("algebra") && !job.input.contains("module")) {
        AlgebraPtr alg = parse_algebra(job.input, p, D);
        out["subject"] = "algebra";
        out["result"] = quadratic_json(is_quadratic_algebra(alg, static_cast<int>(D) - 1));
    } else {
        ModuleJob mj = parse_module_job(job, D);
        out["subject"] = mj.description;
        out["result"] =
            quadratic_json(is_quadratic_module(mj.module, static_cast<int>(D) - 1));
    }
    return out;
}

inline json run_koszul_check(const JobSpec& job) {
    size_t D = job.truncation;
    ModuleJob mj = parse_module_job(job, D);
    size_t i_max = static_cast<size_t>(job.i_max.value_or(static_cast<int>(D) - 1));
    int j_max = job.j_max.value_or(static_cast<int>(D) - 1);
    KoszulReport rep = koszul_check(mj.module, i_max, j_max, job.jobs);
    json out = koszul_json(rep);
    out["command"] = "koszul-check";
    out["p"] = job.p;
    out["truncation"] = D;
    out["module"] = mj.description;
    out["verdict"] = rep.verdict() == KoszulVerdict::KoszulUpTo ? "KoszulUpTo"
                                                                : "DefectsFound";
    return out;
}

inline json run_dual(const JobSpec& job) {
    const PrimeField p(job.p);
    size_t D = job.truncation;
    if (!job.input.contains("presentation"))
        throw error("dual needs a quadratic presentation document");
    QuadraticAlgebraPresentation pres = parse_presentation(job.input.at("presentation"), p);
    QuadraticAlgebraPresentation dual = quadratic_dual_algebra(pres);
    json rel = json::array();
    for (size_t r = 0; r < dual.relations.dim(); ++r) {
        json terms = json::array();
        for (size_t c = 0; c < dual.relations.ambient_dim(); ++c) {
            uint32_t v = dual.relations.basis().at(r, c);
            if (v)
                terms.push_back(json{{"c", v}, {"t", {c / dual.v_dim, c % dual.v_dim}}});
        }
        rel.push_back(json{{"terms", terms}});
    }
    return json{{"command", "dual"},
                {"p", job.p},
                {"truncation", D},
                {"dual", {{"n", dual.v_dim}, {"relations", rel}}},
                {"dims", realize_algebra(pres, D)->dims()},
                {"dual_dims", realize_algebra(dual, D)->dims()}};
}

inline json run_criterion_b(const JobSpec& job) {
    const PrimeField p(job.p);
    size_t D = job.truncation;
    size_t n = 0;
    Subspace r2 = parse_ideal_r2(job.input.at("ideal"), p, n);
    ThirdLineContext ctx(n, p, D);
    ThirdLineReport rep = third_line_check(ctx, r2, job.route);
    json out = third_line_json(rep);
    out["command"] = "criterion-b";
    out["p"] = job.p;
    out["truncation"] = D;
    out["n"] = n;
    return out;
}

inline json run_five_term(const JobSpec& job) {
    const PrimeField p(job.p);
    size_t D = std::max<size_t>(job.truncation, 5);
    size_t n, m;
    if (job.input.contains("product")) {
        auto pr = job.input.at("product").get<std::vector<size_t>>();
        if (pr.size() != 2) throw error("product must be [n, m]");
        n = pr[0];
        m = pr[1];
    } else if (job.input.contains("group")) {
        // the direct-product fixture syntax (F(n) x F(m))
        std::string s = job.input.at("group").get<std::string>();
        size_t fx = s.find("F(");
        size_t x = s.find(" x ");
        size_t fy = s.find("F(", x == std::string::npos ? 0 : x);
        if (fx == std::string::npos || x == std::string::npos || fy == std::string::npos)
            throw error("five-term group must have the form (F(n) x F(m))");
        n = std::stoull(s.substr(fx + 2));
        m = std::stoull(s.substr(fy + 2));
    } else {
        throw error("five-term needs {\"product\":[n,m]} or {\"group\":\"(F(n) x F(m))\"}");
    }
    FiveTermDims ft = free_product_five_term(n, m, p, D);
    return json{{"command", "five-term"},
                {"p", job.p},
                {"truncation", D},
                {"group", "(F(" + std::to_string(n) + ") x F(" + std::to_string(m) + "))"},
                {"h12N", ft.h12N},
                {"h24B", ft.h24B},
                {"h02N", ft.h02N},
                {"derived_ker_d", ft.derived_ker_d},
                {"h14B", ft.h14B},
                {"warning_h14_nonzero", ft.h14_warning()}};
}

inline json run_group(const JobSpec& job) {
    const PrimeField p(job.p);
    size_t D = job.truncation;
    GroupExpr e = parse_group_expr(job.input.at("group").get<std::string>());
    InflationData inf = psi_and_kernel(e, p, D);
    json psi_ranks = json::array();
    for (size_t k = 0; k <= D; ++k) psi_ranks.push_back(inf.psi[k].rank());
    return json{{"command", "group"},
                {"p", job.p},
                {"truncation", D},
                {"group", e.to_string()},
                {"h1_dim", e.h1_dim()},
                {"cohomology_dims", inf.cohomology->dims()},
                {"psi_ranks", psi_ranks},
                {"kernel_dims", inf.kernel.dims()}};
}

inline json run_theorem_c(const JobSpec& job) {
    const PrimeField p(job.p);
    size_t D = job.truncation;
    GroupExpr e = parse_group_expr(job.input.at("group").get<std::string>());
    KoszulReport rep = verify_kernel_koszulity(e, p, D, job.jobs);
    json out = koszul_json(rep);
    out["command"] = "theorem-c";
    out["p"] = job.p;
    out["truncation"] = D;
    out["group"] = e.to_string();
    return out;
}

struct SearchRecordOut {
    json doc;
};

inline json run_search(const JobSpec& job) {
    const PrimeField p(job.p);
    size_t D = job.truncation;
    if (!job.input.contains("search")) throw error("search needs {\"search\":{\"n\":..,\"r\":..}}");
    size_t n = job.input.at("search").at("n").get<size_t>();
    size_t r = job.input.at("search").at("r").get<size_t>();
    if (r > comb::binom(n, 2)) throw error("r exceeds dim Λ²(V)");
    uint64_t stamp = job.epoch.value_or(
        static_cast<uint64_t>(std::chrono::duration_cast<std::chrono::seconds>(
                                  std::chrono::system_clock::now().time_since_epoch())
                                  .count()));

    ThirdLineContext ctx(n, p, D);
    std::vector<json> records(job.count);
    auto work = [&](size_t idx) {
        CounterRng rng(job.seed, idx);
        Subspace r2 = random_subspace(p, comb::binom(n, 2), r, rng);
        ThirdLineReport rep = third_line_check(ctx, r2, job.route);
        // Koszulity of I(2) up to D: full scan when the hypotheses pass,
        // first-defect scan otherwise (failures are already certain)
        ExteriorIdeal ei = ideal_in_exterior(ctx.ext, r2);
        GradedModule i2 = shift(ei.ideal.as_module(false), 2);
        KoszulReport kos = koszul_check(i2, D, static_cast<int>(D), 1, !rep.passes());
        json basis = json::array();
        for (size_t row = 0; row < r2.dim(); ++row) {
            json terms = json::array();
            for (size_t c = 0; c < r2.ambient_dim(); ++c)
                if (uint32_t v = r2.basis().at(row, c)) {
                    auto ab = comb::subset_unrank(n, 2, c);
                    terms.push_back(json{{"c", v}, {"m", {ab[0], ab[1]}}});
                }
            basis.push_back(json{{"terms", terms}});
        }
        records[idx] = json{{"index", idx},
                            {"r2_basis", basis},
                            {"criterion_b", third_line_json(rep)},
                            {"koszul", koszul_json(kos)},
                            {"timestamp", stamp}};
    };
    if (job.jobs <= 1) {
        for (size_t idx = 0; idx < job.count; ++idx) work(idx);
    } else {
        std::atomic<size_t> next{0};
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < job.jobs; ++t)
            pool.emplace_back([&] {
                for (size_t idx; (idx = next.fetch_add(1)) < job.count;) work(idx);
            });
        for (auto& th : pool) th.join();
    }

    size_t quadratic_failures = 0, pass_b = 0, koszul_up_to = 0, b_not_koszul = 0;
    for (const json& rec : records) {
        bool qok = rec.at("criterion_b").at("quadratic_ok").get<bool>();
        bool bpass = rec.at("criterion_b").at("passes").get<bool>();
        bool kos = rec.at("koszul").at("verdict").get<std::string>() == "KoszulUpTo";
        if (!qok) ++quadratic_failures;
        if (bpass) ++pass_b;
        if (kos) ++koszul_up_to;
        if (bpass && !kos) ++b_not_koszul;
    }
    return json{{"command", "search"},
                {"p", job.p},
                {"truncation", D},
                {"n", n},
                {"r", r},
                {"seed", job.seed},
                {"count", job.count},
                {"records", records},
                {"summary",
                 {{"count", job.count},
                  {"quadratic_failures", quadratic_failures},
                  {"pass_criterion_b", pass_b},
                  {"koszul_up_to_D", koszul_up_to},
                  {"pass_b_but_not_koszul", b_not_koszul}}}};
}

}  // namespace detail

/// Dispatch a job; exceptions are mapped to exit codes (0 computed, including
/// "defects found"; 2 input error; 3 resource/truncation budget).
inline RunResult run(const JobSpec& job) {
    RunResult res;
    try {
        if (job.command == "homology")
            res.output = detail::run_homology(job);
        else if (job.command == "quadratic-check")
            res.output = detail::run_quadratic_check(job);
        else if (job.command == "koszul-check")
            res.output = detail::run_koszul_check(job);
        else if (job.command == "dual")
            res.output = detail::run_dual(job);
        else if (job.command == "criterion-b")
            res.output = detail::run_criterion_b(job);
        else if (job.command == "five-term")
            res.output = detail::run_five_term(job);
        else if (job.command == "group")
            res.output = detail::run_group(job);
        else if (job.command == "theorem-c")
            res.output = detail::run_theorem_c(job);
        else if (job.command == "search")
            res.output = detail::run_search(job);
        else {
            res.output = json{{"error", "unknown command: " + job.command}};
            res.exit_code = 2;
        }
    } catch (const budget_exceeded& e) {
        res.output = json{{"error", e.what()}, {"kind", "BudgetExceeded"}};
        res.exit_code = 3;
    } catch (const truncation_insufficient& e) {
        res.output = json{{"error", e.what()}, {"kind", "TruncationInsufficient"}};
        res.exit_code = 3;
    } catch (const json::exception& e) {
        res.output = json{{"error", e.what()}, {"kind", "InputError"}};
        res.exit_code = 2;
    } catch (const error& e) {
        res.output = json{{"error", e.what()}, {"kind", "InputError"}};
        res.exit_code = 2;
    }
    return res;
}

inline JobSpec job_from_input(const std::string& command, const json& doc) {
    JobSpec job;
    job.command = command;
    job.input = doc;
    if (doc.contains("p")) job.p = doc.at("p").get<uint32_t>();
    if (doc.contains("truncation")) job.truncation = doc.at("truncation").get<size_t>();
    if (doc.contains("seed")) job.seed = doc.at("seed").get<uint64_t>();
    if (doc.contains("count")) job.count = doc.at("count").get<size_t>();
    if (doc.contains("i_max")) job.i_max = doc.at("i_max").get<int>();
    if (doc.contains("j_max")) job.j_max = doc.at("j_max").get<int>();
    if (doc.contains("route")) {
        std::string r = doc.at("route").get<std::string>();
        if (r == "direct")
            job.route = VanishingRoute::Direct;
        else if (r == "dual")
            job.route = VanishingRoute::DualViaJ;
        else if (r == "both")
            job.route = VanishingRoute::Both;
        else
            throw error("route must be direct, dual or both");
    }
    if (job.truncation < 2) throw error("truncation must be at least 2");
    return job;
}

}  // namespace koszul::cli
