#pragma once
#include <map>
#include <memory>
#include <numeric>
#include <vector>

#include "fp.hpp"

namespace koszul {

/// Connected graded algebra over F_p, known up to a truncation degree D:
/// per-degree dimensions d_0..d_D (d_0 = 1) and explicit multiplication
/// tensors A_i ⊗ A_j -> A_{i+j} for i+j <= D. The tensor for (i,j) is a
/// d_{i+j} x (d_i*d_j) matrix; column a*d_j + b is the product of basis
/// elements a of A_i and b of A_j. Immutable after construction; invariants
/// (unit, associativity) are verified by the constructor.
class TruncatedGradedAlgebra {
  public:
    TruncatedGradedAlgebra(PrimeField f, std::vector<size_t> dims,
                           std::vector<std::vector<FpMatrix>> mult, bool validate = true)
        : field_(f), dims_(std::move(dims)), mult_(std::move(mult)) {
        if (dims_.empty() || dims_[0] != 1)
            throw error("graded algebra must be connected (d_0 = 1)");
        if (mult_.size() != dims_.size())
            throw dimension_mismatch("mult tensor table has wrong size");
        for (size_t i = 0; i < dims_.size(); ++i)
            if (mult_[i].size() != dims_.size() - i)
                throw dimension_mismatch("mult tensor table has wrong shape");
        if (validate) check_invariants();
    }

    const PrimeField& field() const { return field_; }
    size_t trunc() const { return dims_.size() - 1; }
    size_t dim(size_t deg) const { return deg < dims_.size() ? dims_[deg] : 0; }
    const std::vector<size_t>& dims() const { return dims_; }

    const FpMatrix& mult(size_t i, size_t j) const {
        if (i + j > trunc()) throw truncation_insufficient("product beyond truncation");
        return mult_[i][j];
    }

    /// Product of coordinate vectors u in A_i, v in A_j.
    std::vector<uint32_t> product(size_t i, const std::vector<uint32_t>& u, size_t j,
                                  const std::vector<uint32_t>& v) const {
        const FpMatrix& m = mult(i, j);
        std::vector<uint32_t> out(dim(i + j), 0);
        for (size_t a = 0; a < dim(i); ++a) {
            if (!u[a]) continue;
            for (size_t b = 0; b < dim(j); ++b) {
                uint64_t c = static_cast<uint64_t>(u[a]) * v[b] % field_.p();
                if (!c) continue;
                size_t col = a * dim(j) + b;
                for (size_t r = 0; r < out.size(); ++r) {
                    uint32_t e = m.at(r, col);
                    if (e) out[r] = static_cast<uint32_t>((out[r] + c * e) % field_.p());
                }
            }
        }
        return out;
    }

    bool operator==(const TruncatedGradedAlgebra& o) const {
        return field_ == o.field_ && dims_ == o.dims_ && mult_ == o.mult_;
    }

  private:
    void check_invariants() const {
        size_t D = trunc();
        for (size_t j = 0; j <= D; ++j) {
            if (mult_[0][j].rows() != dims_[j] || mult_[0][j].cols() != dims_[j] ||
                !(mult_[0][j] == FpMatrix::identity(field_, dims_[j])))
                throw error("degree-0 basis element is not a left unit");
            if (!(mult_[j][0] == FpMatrix::identity(field_, dims_[j])))
                throw error("degree-0 basis element is not a right unit");
        }
        for (size_t i = 0; i <= D; ++i)
            for (size_t j = 0; i + j <= D; ++j)
                if (mult_[i][j].rows() != dims_[i + j] ||
                    mult_[i][j].cols() != dims_[i] * dims_[j])
                    throw dimension_mismatch("mult tensor shape");
        // associativity on basis triples, all degrees with i+j+k <= D
        std::vector<uint32_t> lhs, rhs;
        for (size_t i = 1; i <= D; ++i) {
            for (size_t j = 1; i + j <= D; ++j) {
                for (size_t k = 1; i + j + k <= D; ++k) {
                    const FpMatrix& mij = mult_[i][j];
                    const FpMatrix& mjk = mult_[j][k];
                    const FpMatrix& m_ij_k = mult_[i + j][k];
                    const FpMatrix& m_i_jk = mult_[i][j + k];
                    size_t dt = dims_[i + j + k];
                    for (size_t a = 0; a < dims_[i]; ++a)
                        for (size_t b = 0; b < dims_[j]; ++b)
                            for (size_t c = 0; c < dims_[k]; ++c) {
                                lhs.assign(dt, 0);
                                rhs.assign(dt, 0);
                                size_t cab = a * dims_[j] + b;
                                for (size_t r = 0; r < dims_[i + j]; ++r) {
                                    uint64_t x = mij.at(r, cab);
                                    if (!x) continue;
                                    size_t col = r * dims_[k] + c;
                                    for (size_t t = 0; t < dt; ++t) {
                                        uint32_t e = m_ij_k.at(t, col);
                                        if (e)
                                            lhs[t] = static_cast<uint32_t>((lhs[t] + x * e) %
                                                                           field_.p());
                                    }
                                }
                                size_t cbc = b * dims_[k] + c;
                                for (size_t r = 0; r < dims_[j + k]; ++r) {
                                    uint64_t x = mjk.at(r, cbc);
                                    if (!x) continue;
                                    size_t col = a * dims_[j + k] + r;
                                    for (size_t t = 0; t < dt; ++t) {
                                        uint32_t e = m_i_jk.at(t, col);
                                        if (e)
                                            rhs[t] = static_cast<uint32_t>((rhs[t] + x * e) %
                                                                           field_.p());
                                    }
                                }
                                if (lhs != rhs) throw error("multiplication not associative");
                            }
                }
            }
        }
    }

    PrimeField field_;
    std::vector<size_t> dims_;
    std::vector<std::vector<FpMatrix>> mult_;
};

using AlgebraPtr = std::shared_ptr<const TruncatedGradedAlgebra>;

/// Graded right module over a truncated graded algebra. Components live in
/// degrees lo..hi (hi is the certification bound; dims above hi are unknown,
/// not zero). Action tensors M_j ⊗ A_i -> M_{j+i} follow the same column
/// convention as the algebra: column m*d_i + a.
class GradedModule {
  public:
    GradedModule(AlgebraPtr alg, int lo, std::vector<size_t> dims,
                 std::map<std::pair<int, size_t>, FpMatrix> act, bool validate = true)
        : alg_(std::move(alg)), lo_(lo), dims_(std::move(dims)), act_(std::move(act)) {
        if (dims_.empty()) {
            lo_ = 0;
            dims_ = {0};
        }
        if (validate) check_invariants();
    }

    const AlgebraPtr& algebra() const { return alg_; }
    const PrimeField& field() const { return alg_->field(); }
    int lo() const { return lo_; }
    int hi() const { return lo_ + static_cast<int>(dims_.size()) - 1; }

    size_t dim(int deg) const {
        if (deg < lo_) return 0;
        if (deg > hi()) throw truncation_insufficient("module degree beyond certification");
        return dims_[deg - lo_];
    }

    /// Dims vector starting at lo().
    const std::vector<size_t>& dims() const { return dims_; }

    const FpMatrix& act(int j, size_t i) const {
        auto it = act_.find({j, i});
        if (it == act_.end()) throw truncation_insufficient("module action beyond certification");
        return it->second;
    }

    /// m ⊗ a_idx -> vector in M_{j+i} for a coordinate vector m in M_j.
    std::vector<uint32_t> act_apply(int j, size_t i, const std::vector<uint32_t>& m,
                                    size_t a_idx) const {
        if (i == 0) return m;
        const FpMatrix& A = act(j, i);
        size_t di = alg_->dim(i);
        std::vector<uint32_t> out(dim(j + static_cast<int>(i)), 0);
        const PrimeField& f = field();
        for (size_t s = 0; s < m.size(); ++s) {
            uint64_t x = m[s];
            if (!x) continue;
            size_t col = s * di + a_idx;
            for (size_t r = 0; r < out.size(); ++r) {
                uint32_t e = A.at(r, col);
                if (e) out[r] = static_cast<uint32_t>((out[r] + x * e) % f.p());
            }
        }
        return out;
    }

    bool is_zero() const {
        for (size_t d : dims_)
            if (d) return false;
        return true;
    }

    bool operator==(const GradedModule& o) const {
        return lo_ == o.lo_ && dims_ == o.dims_ && act_ == o.act_ &&
               (alg_ == o.alg_ || *alg_ == *o.alg_);
    }

  private:
    void check_invariants() const {
        const size_t DA = alg_->trunc();
        for (int j = lo_; j <= hi(); ++j) {
            for (size_t i = 0; j + static_cast<int>(i) <= hi() && i <= DA; ++i) {
                const FpMatrix& A = act(j, i);
                if (A.rows() != dim(j + static_cast<int>(i)) ||
                    A.cols() != dim(j) * alg_->dim(i))
                    throw dimension_mismatch("action tensor shape");
                if (i == 0 && !(A == FpMatrix::identity(field(), dim(j))))
                    throw error("unit does not act as identity");
            }
        }
        // (m*a)*b = m*(ab) on basis triples
        const PrimeField& f = field();
        std::vector<uint32_t> lhs, rhs;
        for (int j = lo_; j <= hi(); ++j) {
            for (size_t i1 = 1; j + static_cast<int>(i1) <= hi() && i1 <= DA; ++i1) {
                for (size_t i2 = 1;
                     j + static_cast<int>(i1 + i2) <= hi() && i1 + i2 <= DA; ++i2) {
                    const FpMatrix& a1 = act(j, i1);
                    const FpMatrix& a2 = act(j + static_cast<int>(i1), i2);
                    const FpMatrix& a12 = act(j, i1 + i2);
                    const FpMatrix& mm = alg_->mult(i1, i2);
                    size_t d1 = alg_->dim(i1), d2 = alg_->dim(i2), d12 = alg_->dim(i1 + i2);
                    size_t dmj1 = dim(j + static_cast<int>(i1));
                    size_t dt = dim(j + static_cast<int>(i1 + i2));
                    for (size_t m = 0; m < dim(j); ++m)
                        for (size_t a = 0; a < d1; ++a)
                            for (size_t b = 0; b < d2; ++b) {
                                lhs.assign(dt, 0);
                                rhs.assign(dt, 0);
                                size_t cma = m * d1 + a;
                                for (size_t r = 0; r < dmj1; ++r) {
                                    uint64_t x = a1.at(r, cma);
                                    if (!x) continue;
                                    size_t col = r * d2 + b;
                                    for (size_t t = 0; t < dt; ++t) {
                                        uint32_t e = a2.at(t, col);
                                        if (e)
                                            lhs[t] = static_cast<uint32_t>((lhs[t] + x * e) %
                                                                           f.p());
                                    }
                                }
                                size_t cab = a * d2 + b;
                                for (size_t r = 0; r < d12; ++r) {
                                    uint64_t x = mm.at(r, cab);
                                    if (!x) continue;
                                    size_t col = m * d12 + r;
                                    for (size_t t = 0; t < dt; ++t) {
                                        uint32_t e = a12.at(t, col);
                                        if (e)
                                            rhs[t] = static_cast<uint32_t>((rhs[t] + x * e) %
                                                                           f.p());
                                    }
                                }
                                if (lhs != rhs) throw error("module action not associative");
                            }
                }
            }
        }
    }

    AlgebraPtr alg_;
    int lo_;
    std::vector<size_t> dims_;
    std::map<std::pair<int, size_t>, FpMatrix> act_;
};

inline bool same_algebra(const GradedModule& a, const GradedModule& b) {
    return a.algebra() == b.algebra() || *a.algebra() == *b.algebra();
}

/// The algebra as a right module over itself.
inline GradedModule free_module(AlgebraPtr alg) {
    size_t D = alg->trunc();
    std::vector<size_t> dims(alg->dims());
    std::map<std::pair<int, size_t>, FpMatrix> act;
    for (size_t j = 0; j <= D; ++j)
        for (size_t i = 0; i + j <= D; ++i)
            act.emplace(std::pair<int, size_t>(static_cast<int>(j), i), alg->mult(j, i));
    return GradedModule(std::move(alg), 0, std::move(dims), std::move(act), false);
}

/// The trivial module k (augmentation action).
inline GradedModule trivial_module(AlgebraPtr alg) {
    size_t D = alg->trunc();
    const PrimeField f = alg->field();
    std::vector<size_t> dims(D + 1, 0);
    dims[0] = 1;
    std::map<std::pair<int, size_t>, FpMatrix> act;
    for (int j = 0; j <= static_cast<int>(D); ++j)
        for (size_t i = 0; j + static_cast<int>(i) <= static_cast<int>(D); ++i) {
            size_t rows = (j + static_cast<int>(i) == 0) ? 1 : 0;
            size_t cols = (j == 0 ? 1 : 0) * alg->dim(i);
            FpMatrix m(f, rows, cols);
            if (i == 0 && j == 0) m.at(0, 0) = 1;
            act.emplace(std::pair<int, size_t>(j, i), std::move(m));
        }
    return GradedModule(std::move(alg), 0, std::move(dims), std::move(act), false);
}

inline GradedModule zero_module(AlgebraPtr alg) {
    size_t D = alg->trunc();
    const PrimeField f = alg->field();
    std::vector<size_t> dims(D + 1, 0);
    std::map<std::pair<int, size_t>, FpMatrix> act;
    for (int j = 0; j <= static_cast<int>(D); ++j)
        for (size_t i = 0; j + static_cast<int>(i) <= static_cast<int>(D); ++i)
            act.emplace(std::pair<int, size_t>(j, i), FpMatrix(f, 0, 0));
    return GradedModule(std::move(alg), 0, std::move(dims), std::move(act), false);
}

/// k-shift: shift(M,k) has component M_{i+k} in degree i.
inline GradedModule shift(const GradedModule& m, int k) {
    std::map<std::pair<int, size_t>, FpMatrix> act;
    for (int j = m.lo(); j <= m.hi(); ++j)
        for (size_t i = 0; j + static_cast<int>(i) <= m.hi() && i <= m.algebra()->trunc(); ++i)
            act.emplace(std::pair<int, size_t>(j - k, i), m.act(j, i));
    return GradedModule(m.algebra(), m.lo() - k,
                        std::vector<size_t>(m.dims()), std::move(act), false);
}

namespace detail {
inline void accumulate_scaled_column(const PrimeField& f, std::vector<uint32_t>& out,
                                     const FpMatrix& m, size_t col, uint64_t scale) {
    for (size_t r = 0; r < m.rows(); ++r) {
        uint32_t e = m.at(r, col);
        if (e) out[r] = static_cast<uint32_t>((out[r] + scale * e) % f.p());
    }
}
}  // namespace detail

/// Signed tensor product of algebras: (a1⊗b1)(a2⊗b2) = (-1)^{deg b1 deg a2} a1a2⊗b1b2.
/// Basis of degree n ordered by A-degree block ascending, A-index major inside.
inline AlgebraPtr signed_tensor_algebra(const AlgebraPtr& A, const AlgebraPtr& B) {
    if (A->field() != B->field()) throw field_mismatch("signed tensor: field mismatch");
    const PrimeField f = A->field();
    const size_t D = std::min(A->trunc(), B->trunc());

    auto block_offset = [&](size_t n, size_t i) {  // offset of block A_i ⊗ B_{n-i}
        size_t off = 0;
        for (size_t t = 0; t < i; ++t) off += A->dim(t) * B->dim(n - t);
        return off;
    };
    std::vector<size_t> dims(D + 1, 0);
    for (size_t n = 0; n <= D; ++n)
        for (size_t i = 0; i <= n; ++i) dims[n] += A->dim(i) * B->dim(n - i);

    std::vector<std::vector<FpMatrix>> mult(D + 1);
    for (size_t m = 0; m <= D; ++m) {
        mult[m].reserve(D - m + 1);
        for (size_t n = 0; m + n <= D; ++n) {
            FpMatrix mm(f, dims[m + n], dims[m] * dims[n]);
            for (size_t i1 = 0; i1 <= m; ++i1) {
                size_t j1 = m - i1;
                size_t off1 = block_offset(m, i1);
                for (size_t i2 = 0; i2 <= n; ++i2) {
                    size_t j2 = n - i2;
                    size_t off2 = block_offset(n, i2);
                    size_t offt = block_offset(m + n, i1 + i2);
                    bool negative = (j1 % 2) && (i2 % 2);
                    const FpMatrix& ma = A->mult(i1, i2);
                    const FpMatrix& mb = B->mult(j1, j2);
                    size_t dbj2 = B->dim(j2), dbt = B->dim(j1 + j2);
                    for (size_t a1 = 0; a1 < A->dim(i1); ++a1)
                        for (size_t b1 = 0; b1 < B->dim(j1); ++b1)
                            for (size_t a2 = 0; a2 < A->dim(i2); ++a2)
                                for (size_t b2 = 0; b2 < B->dim(j2); ++b2) {
                                    size_t col = (off1 + a1 * B->dim(j1) + b1) * dims[n] +
                                                 (off2 + a2 * dbj2 + b2);
                                    size_t ca = a1 * A->dim(i2) + a2;
                                    size_t cb = b1 * dbj2 + b2;
                                    for (size_t ra = 0; ra < A->dim(i1 + i2); ++ra) {
                                        uint64_t x = ma.at(ra, ca);
                                        if (!x) continue;
                                        for (size_t rb = 0; rb < dbt; ++rb) {
                                            uint32_t y = mb.at(rb, cb);
                                            if (!y) continue;
                                            uint32_t v = static_cast<uint32_t>(x * y % f.p());
                                            if (negative) v = f.neg(v);
                                            size_t row = offt + ra * dbt + rb;
                                            mm.at(row, col) = f.add(mm.at(row, col), v);
                                        }
                                    }
                                }
                }
            }
            mult[m].push_back(std::move(mm));
        }
    }
    return std::make_shared<TruncatedGradedAlgebra>(f, std::move(dims), std::move(mult));
}

/// Signed tensor of modules over the signed tensor of their algebras:
/// (x⊗y)·(a⊗b) = (-1)^{deg y deg a} xa ⊗ yb. `tensor_alg` must be
/// signed_tensor_algebra(M.algebra(), N.algebra()).
inline GradedModule signed_tensor_module(AlgebraPtr tensor_alg, const GradedModule& M,
                                         const GradedModule& N) {
    if (M.field() != N.field()) throw field_mismatch("signed tensor: field mismatch");
    const PrimeField f = M.field();
    const AlgebraPtr& A = M.algebra();
    const AlgebraPtr& B = N.algebra();
    const int lo = M.lo() + N.lo();
    const int hi = std::min(M.hi() + N.lo(), N.hi() + M.lo());
    if (hi < lo) throw truncation_insufficient("signed tensor: empty certified range");

    auto mblock_offset = [&](int n, int i) {  // block M_i ⊗ N_{n-i}
        size_t off = 0;
        for (int t = M.lo(); t < i; ++t) off += M.dim(t) * N.dim(n - t);
        return off;
    };
    auto ablock_offset = [&](size_t n, size_t i) {
        size_t off = 0;
        for (size_t t = 0; t < i; ++t) off += A->dim(t) * B->dim(n - t);
        return off;
    };
    std::vector<size_t> dims(hi - lo + 1, 0);
    for (int n = lo; n <= hi; ++n)
        for (int i = M.lo(); i <= n - N.lo(); ++i)
            dims[n - lo] += M.dim(i) * N.dim(n - i);

    std::map<std::pair<int, size_t>, FpMatrix> act;
    for (int n = lo; n <= hi; ++n) {
        for (size_t m = 0; n + static_cast<int>(m) <= hi && m <= tensor_alg->trunc(); ++m) {
            FpMatrix am(f, dims[n + m - lo], dims[n - lo] * tensor_alg->dim(m));
            for (int i1 = M.lo(); i1 <= n - N.lo(); ++i1) {
                int j1 = n - i1;
                size_t off1 = mblock_offset(n, i1);
                for (size_t i2 = 0; i2 <= m; ++i2) {
                    size_t j2 = m - i2;
                    size_t off2 = ablock_offset(m, i2);
                    size_t offt = mblock_offset(n + static_cast<int>(m),
                                                i1 + static_cast<int>(i2));
                    bool negative = (((j1 % 2) + 2) % 2) && (i2 % 2);
                    const FpMatrix& ma = M.act(i1, i2);
                    const FpMatrix& nb = N.act(j1, j2);
                    size_t dbj2 = B->dim(j2);
                    size_t dnt = N.dim(j1 + static_cast<int>(j2));
                    for (size_t x = 0; x < M.dim(i1); ++x)
                        for (size_t y = 0; y < N.dim(j1); ++y)
                            for (size_t a = 0; a < A->dim(i2); ++a)
                                for (size_t b = 0; b < dbj2; ++b) {
                                    size_t col =
                                        (off1 + x * N.dim(j1) + y) * tensor_alg->dim(m) +
                                        (off2 + a * dbj2 + b);
                                    size_t cxa = x * A->dim(i2) + a;
                                    size_t cyb = y * dbj2 + b;
                                    for (size_t rx = 0; rx < M.dim(i1 + static_cast<int>(i2));
                                         ++rx) {
                                        uint64_t u = ma.at(rx, cxa);
                                        if (!u) continue;
                                        for (size_t ry = 0; ry < dnt; ++ry) {
                                            uint32_t w = nb.at(ry, cyb);
                                            if (!w) continue;
                                            uint32_t v = static_cast<uint32_t>(u * w % f.p());
                                            if (negative) v = f.neg(v);
                                            size_t row = offt + rx * dnt + ry;
                                            am.at(row, col) = f.add(am.at(row, col), v);
                                        }
                                    }
                                }
                }
            }
            act.emplace(std::pair<int, size_t>(n, m), std::move(am));
        }
    }
    return GradedModule(tensor_alg, lo, std::move(dims), std::move(act));
}

/// Componentwise direct sum of modules over the same algebra (M-part first).
inline GradedModule direct_sum(const GradedModule& M, const GradedModule& N) {
    if (!same_algebra(M, N)) throw field_mismatch("direct_sum: modules over different algebras");
    const PrimeField f = M.field();
    const AlgebraPtr& alg = M.algebra();
    int lo = std::min(M.lo(), N.lo());
    int hi = std::min(M.hi(), N.hi());
    std::vector<size_t> dims;
    for (int d = lo; d <= hi; ++d) dims.push_back(M.dim(d) + N.dim(d));
    std::map<std::pair<int, size_t>, FpMatrix> act;
    for (int j = lo; j <= hi; ++j) {
        for (size_t i = 0; j + static_cast<int>(i) <= hi && i <= alg->trunc(); ++i) {
            size_t di = alg->dim(i);
            size_t mj = M.dim(j), nj = N.dim(j);
            size_t mt = M.dim(j + static_cast<int>(i)), nt = N.dim(j + static_cast<int>(i));
            FpMatrix am(f, mt + nt, (mj + nj) * di);
            if (mj && mt) {
                const FpMatrix& a = M.act(j, i);
                for (size_t m = 0; m < mj; ++m)
                    for (size_t x = 0; x < di; ++x)
                        for (size_t r = 0; r < mt; ++r)
                            am.at(r, m * di + x) = a.at(r, m * di + x);
            }
            if (nj && nt) {
                const FpMatrix& a = N.act(j, i);
                for (size_t m = 0; m < nj; ++m)
                    for (size_t x = 0; x < di; ++x)
                        for (size_t r = 0; r < nt; ++r)
                            am.at(mt + r, (mj + m) * di + x) = a.at(r, m * di + x);
            }
            act.emplace(std::pair<int, size_t>(j, i), std::move(am));
        }
    }
    return GradedModule(alg, lo, std::move(dims), std::move(act), false);
}

/// B as a right A-module through a degreewise algebra map phi: A -> B
/// (phi[i] is a dim B_i x dim A_i matrix): b·a := b * phi(a).
inline GradedModule algebra_as_module_via(AlgebraPtr A, const AlgebraPtr& B,
                                          const std::vector<FpMatrix>& phi) {
    const PrimeField f = A->field();
    size_t D = std::min(A->trunc(), B->trunc());
    std::vector<size_t> dims;
    for (size_t d = 0; d <= D; ++d) dims.push_back(B->dim(d));
    std::map<std::pair<int, size_t>, FpMatrix> act;
    for (size_t j = 0; j <= D; ++j) {
        for (size_t i = 0; i + j <= D; ++i) {
            const FpMatrix& mm = B->mult(j, i);
            FpMatrix am(f, B->dim(i + j), B->dim(j) * A->dim(i));
            for (size_t b = 0; b < B->dim(j); ++b)
                for (size_t a = 0; a < A->dim(i); ++a)
                    for (size_t r2 = 0; r2 < B->dim(i); ++r2) {
                        uint64_t x = phi[i].at(r2, a);
                        if (!x) continue;
                        size_t mcol = b * B->dim(i) + r2;
                        for (size_t r = 0; r < B->dim(i + j); ++r) {
                            uint32_t e = mm.at(r, mcol);
                            if (e)
                                am.at(r, b * A->dim(i) + a) = static_cast<uint32_t>(
                                    (am.at(r, b * A->dim(i) + a) + x * e) % f.p());
                        }
                    }
            act.emplace(std::pair<int, size_t>(static_cast<int>(j), i), std::move(am));
        }
    }
    return GradedModule(std::move(A), 0, std::move(dims), std::move(act));
}

/// Pullback of a module along a degreewise algebra isomorphism phi: A' -> A
/// (phi[i]: dim A_i x dim A'_i): same components, action precomposed with phi.
inline GradedModule pullback_module(AlgebraPtr Aprime, const GradedModule& M,
                                    const std::vector<FpMatrix>& phi) {
    const PrimeField f = M.field();
    std::map<std::pair<int, size_t>, FpMatrix> act;
    for (int j = M.lo(); j <= M.hi(); ++j) {
        for (size_t i = 0; j + static_cast<int>(i) <= M.hi() && i <= Aprime->trunc(); ++i) {
            const FpMatrix& a = M.act(j, i);
            size_t dA = M.algebra()->dim(i), dAp = Aprime->dim(i);
            FpMatrix am(f, M.dim(j + static_cast<int>(i)), M.dim(j) * dAp);
            for (size_t m = 0; m < M.dim(j); ++m)
                for (size_t x = 0; x < dAp; ++x)
                    for (size_t t = 0; t < dA; ++t) {
                        uint64_t c = phi[i].at(t, x);
                        if (!c) continue;
                        for (size_t r = 0; r < am.rows(); ++r) {
                            uint32_t e = a.at(r, m * dA + t);
                            if (e)
                                am.at(r, m * dAp + x) = static_cast<uint32_t>(
                                    (am.at(r, m * dAp + x) + c * e) % f.p());
                        }
                    }
            act.emplace(std::pair<int, size_t>(j, i), std::move(am));
        }
    }
    return GradedModule(std::move(Aprime), M.lo(), std::vector<size_t>(M.dims()),
                        std::move(act));
}

inline std::vector<size_t> hilbert_function(const TruncatedGradedAlgebra& a) {
    return a.dims();
}
inline std::vector<size_t> hilbert_function(const GradedModule& m) { return m.dims(); }

/// A graded submodule: per-degree subspaces of a parent module's components.
/// Keeps the embedding, so quotients and containment checks stay available.
class GradedSubmodule {
  public:
    GradedSubmodule(std::shared_ptr<const GradedModule> parent, std::vector<Subspace> comps)
        : parent_(std::move(parent)), comps_(std::move(comps)) {
        if (comps_.size() != parent_->dims().size())
            throw dimension_mismatch("submodule components must cover parent degrees");
        for (int d = parent_->lo(); d <= parent_->hi(); ++d)
            if (comps_[d - parent_->lo()].ambient_dim() != parent_->dim(d))
                throw dimension_mismatch("submodule component ambient dim");
    }

    const GradedModule& parent() const { return *parent_; }
    std::shared_ptr<const GradedModule> parent_ptr() const { return parent_; }
    int lo() const { return parent_->lo(); }
    int hi() const { return parent_->hi(); }
    const Subspace& component(int deg) const { return comps_[deg - parent_->lo()]; }
    size_t dim(int deg) const {
        if (deg < lo()) return 0;
        return component(deg).dim();
    }
    std::vector<size_t> dims() const {
        std::vector<size_t> d;
        for (auto& c : comps_) d.push_back(c.dim());
        return d;
    }

    /// Check closure under the parent action (throws containment_violation).
    void verify_closed() const {
        const AlgebraPtr& alg = parent_->algebra();
        for (int j = lo(); j <= hi(); ++j) {
            for (size_t i = 1; j + static_cast<int>(i) <= hi() && i <= alg->trunc(); ++i) {
                const Subspace& target = component(j + static_cast<int>(i));
                for (size_t r = 0; r < dim(j); ++r) {
                    std::vector<uint32_t> u = component(j).basis().row_vec(r);
                    for (size_t a = 0; a < alg->dim(i); ++a)
                        if (!target.contains(parent_->act_apply(j, i, u, a)))
                            throw containment_violation("submodule not closed under action");
                }
            }
        }
    }

    /// Abstract module on the chosen canonical bases, action re-expressed in
    /// those coordinates.
    GradedModule as_module(bool validate = true) const {
        const PrimeField f = parent_->field();
        const AlgebraPtr& alg = parent_->algebra();
        std::vector<size_t> dims_ = dims();
        std::map<std::pair<int, size_t>, FpMatrix> act;
        for (int j = lo(); j <= hi(); ++j) {
            for (size_t i = 0; j + static_cast<int>(i) <= hi() && i <= alg->trunc(); ++i) {
                size_t di = alg->dim(i);
                const Subspace& tgt = component(j + static_cast<int>(i));
                FpMatrix am(f, tgt.dim(), dim(j) * di);
                for (size_t s = 0; s < dim(j); ++s) {
                    std::vector<uint32_t> u = component(j).basis().row_vec(s);
                    for (size_t a = 0; a < di; ++a) {
                        std::vector<uint32_t> w = parent_->act_apply(j, i, u, a);
                        std::vector<uint32_t> coords = tgt.coordinates(w);
                        for (size_t r = 0; r < coords.size(); ++r)
                            am.at(r, s * di + a) = coords[r];
                    }
                }
                act.emplace(std::pair<int, size_t>(j, i), std::move(am));
            }
        }
        return GradedModule(alg, lo(), std::move(dims_), std::move(act), validate);
    }

  private:
    std::shared_ptr<const GradedModule> parent_;
    std::vector<Subspace> comps_;
};

/// Smallest action-closed graded subspace of `parent` containing the given
/// (degree, vector) generators, computed degree by degree up to the parent's
/// certification bound.
inline GradedSubmodule submodule_from_generators(
    std::shared_ptr<const GradedModule> parent,
    const std::vector<std::pair<int, std::vector<uint32_t>>>& gens) {
    const PrimeField f = parent->field();
    const AlgebraPtr& alg = parent->algebra();
    std::map<int, std::vector<std::vector<uint32_t>>> by_deg;
    for (auto& [d, v] : gens) {
        if (d < parent->lo() || d > parent->hi() || v.size() != parent->dim(d))
            throw dimension_mismatch("generator vector does not live in the stated component");
        by_deg[d].push_back(v);
    }
    std::vector<Subspace> comps;
    std::vector<FpMatrix> bases;  // parallel, avoids re-canonicalizing
    for (int d = parent->lo(); d <= parent->hi(); ++d) {
        std::vector<std::vector<uint32_t>> span;
        if (auto it = by_deg.find(d); it != by_deg.end()) span = it->second;
        for (int d2 = parent->lo(); d2 < d; ++d2) {
            size_t i = static_cast<size_t>(d - d2);
            if (i > alg->trunc()) continue;
            const Subspace& s2 = comps[d2 - parent->lo()];
            for (size_t r = 0; r < s2.dim(); ++r) {
                std::vector<uint32_t> u = s2.basis().row_vec(r);
                for (size_t a = 0; a < alg->dim(i); ++a)
                    span.push_back(parent->act_apply(d2, i, u, a));
            }
        }
        FpMatrix sp(f, span.size(), parent->dim(d));
        for (size_t r = 0; r < span.size(); ++r)
            for (size_t c = 0; c < parent->dim(d); ++c) sp.at(r, c) = span[r][c];
        comps.push_back(Subspace::from_span(sp));
    }
    return GradedSubmodule(std::move(parent), std::move(comps));
}

/// Degreewise quotient parent/sub with the induced action. Quotient bases are
/// the images of the standard basis vectors at non-pivot columns of the
/// submodule's RREF bases (canonical).
inline GradedModule quotient_module(std::shared_ptr<const GradedModule> parent,
                                    const GradedSubmodule& sub, bool verify = true) {
    if (&sub.parent() != parent.get() && !(sub.parent() == *parent))
        throw containment_violation("quotient_module: submodule of a different module");
    if (verify) sub.verify_closed();
    const PrimeField f = parent->field();
    const AlgebraPtr& alg = parent->algebra();
    int lo = parent->lo(), hi = parent->hi();

    // non-pivot columns per degree
    std::vector<std::vector<size_t>> free_cols(hi - lo + 1);
    for (int d = lo; d <= hi; ++d) {
        const FpMatrix& b = sub.component(d).basis();
        std::vector<char> is_piv(parent->dim(d), 0);
        for (size_t r = 0; r < b.rows(); ++r) {
            size_t c = 0;
            while (c < b.cols() && b.at(r, c) == 0) ++c;
            is_piv[c] = 1;
        }
        for (size_t c = 0; c < parent->dim(d); ++c)
            if (!is_piv[c]) free_cols[d - lo].push_back(c);
    }
    std::vector<size_t> dims;
    for (int d = lo; d <= hi; ++d) dims.push_back(free_cols[d - lo].size());

    std::map<std::pair<int, size_t>, FpMatrix> act;
    for (int j = lo; j <= hi; ++j) {
        for (size_t i = 0; j + static_cast<int>(i) <= hi && i <= alg->trunc(); ++i) {
            int t = j + static_cast<int>(i);
            size_t di = alg->dim(i);
            FpMatrix am(f, dims[t - lo], dims[j - lo] * di);
            for (size_t q = 0; q < dims[j - lo]; ++q) {
                std::vector<uint32_t> rep(parent->dim(j), 0);
                rep[free_cols[j - lo][q]] = 1;
                for (size_t a = 0; a < di; ++a) {
                    std::vector<uint32_t> w = parent->act_apply(j, i, rep, a);
                    // reduce modulo the submodule, read off free coordinates
                    const FpMatrix& sb = sub.component(t).basis();
                    for (size_t r = 0; r < sb.rows(); ++r) {
                        size_t c = 0;
                        while (c < sb.cols() && sb.at(r, c) == 0) ++c;
                        uint32_t x = w[c];
                        if (!x) continue;
                        uint64_t fm = f.p() - x;
                        for (size_t k = c; k < sb.cols(); ++k)
                            w[k] = static_cast<uint32_t>((w[k] + fm * sb.at(r, k)) % f.p());
                    }
                    for (size_t r = 0; r < dims[t - lo]; ++r)
                        am.at(r, q * di + a) = w[free_cols[t - lo][r]];
                }
            }
            act.emplace(std::pair<int, size_t>(j, i), std::move(am));
        }
    }
    return GradedModule(alg, lo, std::move(dims), std::move(act));
}

}  // namespace koszul
