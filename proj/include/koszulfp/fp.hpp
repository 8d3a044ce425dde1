#pragma once
#include <cstdint>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace koszul {

/// Prime field F_p for a prime 2 <= p < 2^16. Residues are uint32_t in [0,p);
/// products of two residues fit in a uint64_t without overflow.
class PrimeField {
  public:
    explicit PrimeField(uint32_t p) : p_(p) {
        if (p < 2 || p >= (1u << 16) || !is_prime(p))
            throw error("PrimeField: " + std::to_string(p) + " is not a prime < 2^16");
    }

    uint32_t p() const { return p_; }

    uint32_t reduce(int64_t x) const {
        int64_t r = x % static_cast<int64_t>(p_);
        return static_cast<uint32_t>(r < 0 ? r + p_ : r);
    }
    uint32_t add(uint32_t a, uint32_t b) const {
        uint32_t s = a + b;
        return s >= p_ ? s - p_ : s;
    }
    uint32_t sub(uint32_t a, uint32_t b) const { return a >= b ? a - b : a + p_ - b; }
    uint32_t neg(uint32_t a) const { return a == 0 ? 0 : p_ - a; }
    uint32_t mul(uint32_t a, uint32_t b) const {
        return static_cast<uint32_t>((static_cast<uint64_t>(a) * b) % p_);
    }
    uint32_t inv(uint32_t a) const {
        if (a == 0) throw error("PrimeField::inv of zero");
        // extended Euclid on (a, p)
        int64_t t = 0, new_t = 1, r = p_, new_r = a;
        while (new_r != 0) {
            int64_t q = r / new_r;
            t = std::exchange(new_t, t - q * new_t);
            r = std::exchange(new_r, r - q * new_r);
        }
        return reduce(t);
    }

    bool operator==(const PrimeField& o) const { return p_ == o.p_; }
    bool operator!=(const PrimeField& o) const { return p_ != o.p_; }

    static bool is_prime(uint32_t n) {
        if (n < 2) return false;
        for (uint32_t d = 2; d * d <= n; ++d)
            if (n % d == 0) return false;
        return true;
    }

  private:
    uint32_t p_;
};

/// Dense matrix over F_p, row-major. Immutable use is the norm: operations
/// return fresh matrices; canonical forms (RREF) make results comparable by
/// plain equality.
class FpMatrix {
  public:
    FpMatrix(PrimeField f, size_t rows, size_t cols)
        : field_(f), rows_(rows), cols_(cols), a_(rows * cols, 0) {}

    static FpMatrix identity(PrimeField f, size_t n) {
        FpMatrix m(f, n, n);
        for (size_t i = 0; i < n; ++i) m.at(i, i) = 1;
        return m;
    }

    static FpMatrix from_rows(PrimeField f, size_t cols,
                              const std::vector<std::vector<uint32_t>>& rows) {
        FpMatrix m(f, rows.size(), cols);
        for (size_t r = 0; r < rows.size(); ++r) {
            if (rows[r].size() != cols) throw dimension_mismatch("from_rows: ragged input");
            for (size_t c = 0; c < cols; ++c) m.at(r, c) = f.reduce(rows[r][c]);
        }
        return m;
    }

    const PrimeField& field() const { return field_; }
    size_t rows() const { return rows_; }
    size_t cols() const { return cols_; }

    uint32_t& at(size_t r, size_t c) { return a_[r * cols_ + c]; }
    uint32_t at(size_t r, size_t c) const { return a_[r * cols_ + c]; }
    const uint32_t* row(size_t r) const { return a_.data() + r * cols_; }
    uint32_t* row(size_t r) { return a_.data() + r * cols_; }

    bool operator==(const FpMatrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && field_ == o.field_ && a_ == o.a_;
    }

    bool is_zero() const {
        for (uint32_t x : a_)
            if (x) return false;
        return true;
    }

    FpMatrix transpose() const {
        FpMatrix t(field_, cols_, rows_);
        for (size_t r = 0; r < rows_; ++r)
            for (size_t c = 0; c < cols_; ++c) t.at(c, r) = at(r, c);
        return t;
    }

    FpMatrix mul(const FpMatrix& o) const {
        if (cols_ != o.rows_) throw dimension_mismatch("FpMatrix::mul shape");
        FpMatrix out(field_, rows_, o.cols_);
        for (size_t r = 0; r < rows_; ++r) {
            for (size_t k = 0; k < cols_; ++k) {
                uint64_t x = at(r, k);
                if (!x) continue;
                uint32_t* dst = out.row(r);
                const uint32_t* src = o.row(k);
                for (size_t c = 0; c < o.cols_; ++c)
                    dst[c] = static_cast<uint32_t>((dst[c] + x * src[c]) % field_.p());
            }
        }
        return out;
    }

    std::vector<uint32_t> mul_vec(const std::vector<uint32_t>& v) const {
        if (v.size() != cols_) throw dimension_mismatch("FpMatrix::mul_vec shape");
        std::vector<uint32_t> out(rows_, 0);
        for (size_t r = 0; r < rows_; ++r) {
            uint64_t acc = 0;
            const uint32_t* src = row(r);
            for (size_t c = 0; c < cols_; ++c) acc += static_cast<uint64_t>(src[c]) * v[c];
            out[r] = static_cast<uint32_t>(acc % field_.p());
        }
        return out;
    }

    /// Stack rows of `o` below this matrix.
    FpMatrix vstack(const FpMatrix& o) const {
        if (cols_ != o.cols_) throw dimension_mismatch("vstack: column count");
        FpMatrix out(field_, rows_ + o.rows_, cols_);
        std::copy(a_.begin(), a_.end(), out.a_.begin());
        std::copy(o.a_.begin(), o.a_.end(), out.a_.begin() + a_.size());
        return out;
    }

    std::vector<uint32_t> row_vec(size_t r) const {
        return std::vector<uint32_t>(row(r), row(r) + cols_);
    }

    /// In-place reduced row echelon form. Returns the pivot columns (ascending).
    std::vector<size_t> rref_in_place() {
        std::vector<size_t> pivots;
        size_t r = 0;
        for (size_t c = 0; c < cols_ && r < rows_; ++c) {
            size_t sel = r;
            while (sel < rows_ && at(sel, c) == 0) ++sel;
            if (sel == rows_) continue;
            if (sel != r)
                for (size_t k = c; k < cols_; ++k) std::swap(at(r, k), at(sel, k));
            uint32_t piv_inv = field_.inv(at(r, c));
            if (piv_inv != 1)
                for (size_t k = c; k < cols_; ++k) at(r, k) = field_.mul(at(r, k), piv_inv);
            for (size_t i = 0; i < rows_; ++i) {
                if (i == r) continue;
                uint32_t f = at(i, c);
                if (!f) continue;
                uint64_t fm = field_.p() - f;  // add (p-f)*pivot row
                for (size_t k = c; k < cols_; ++k)
                    at(i, k) = static_cast<uint32_t>((at(i, k) + fm * at(r, k)) % field_.p());
            }
            pivots.push_back(c);
            ++r;
        }
        return pivots;
    }

    /// Canonical RREF copy with zero rows dropped.
    FpMatrix rref() const {
        FpMatrix m = *this;
        std::vector<size_t> piv = m.rref_in_place();
        FpMatrix out(field_, piv.size(), cols_);
        for (size_t r = 0; r < piv.size(); ++r)
            std::copy(m.row(r), m.row(r) + cols_, out.row(r));
        return out;
    }

    size_t rank() const {
        FpMatrix m = *this;
        return m.rref_in_place().size();
    }

    /// Canonical basis of {x : this*x = 0}, returned as rows (RREF, deterministic).
    FpMatrix kernel_basis_matrix() const {
        FpMatrix m = *this;
        std::vector<size_t> piv = m.rref_in_place();
        std::vector<char> is_piv(cols_, 0);
        for (size_t c : piv) is_piv[c] = 1;
        FpMatrix ker(field_, cols_ - piv.size(), cols_);
        size_t kr = 0;
        for (size_t c = 0; c < cols_; ++c) {
            if (is_piv[c]) continue;
            ker.at(kr, c) = 1;
            for (size_t r = 0; r < piv.size(); ++r) ker.at(kr, piv[r]) = field_.neg(m.at(r, c));
            ++kr;
        }
        ker.rref_in_place();  // canonicalize
        return ker;
    }

  private:
    PrimeField field_;
    size_t rows_, cols_;
    std::vector<uint32_t> a_;
};

inline size_t rank(const FpMatrix& m) { return m.rank(); }

/// A subspace of F_p^ambient, held as a canonical RREF basis (rows).
class Subspace {
  public:
    Subspace(PrimeField f, size_t ambient_dim)
        : ambient_(ambient_dim), basis_(f, 0, ambient_dim) {}

    /// Canonicalize the row span of `span` (rows need not be independent).
    static Subspace from_span(const FpMatrix& span) {
        Subspace s(span.field(), span.cols());
        s.basis_ = span.rref();
        return s;
    }

    static Subspace full(PrimeField f, size_t n) {
        return from_span(FpMatrix::identity(f, n));
    }

    const PrimeField& field() const { return basis_.field(); }
    size_t ambient_dim() const { return ambient_; }
    size_t dim() const { return basis_.rows(); }
    const FpMatrix& basis() const { return basis_; }

    bool operator==(const Subspace& o) const {
        return ambient_ == o.ambient_ && basis_ == o.basis_;
    }

    bool contains(const std::vector<uint32_t>& v) const {
        return reduce(v).second;
    }

    bool contains(const Subspace& o) const {
        if (o.ambient_ != ambient_) throw dimension_mismatch("Subspace::contains ambient");
        for (size_t r = 0; r < o.basis_.rows(); ++r)
            if (!contains(o.basis_.row_vec(r))) return false;
        return true;
    }

    /// Coordinates of v in the RREF basis if v lies in the span.
    /// Returns {coords, true} on success, {residue-dependent junk, false} otherwise.
    std::pair<std::vector<uint32_t>, bool> reduce(std::vector<uint32_t> v) const {
        if (v.size() != ambient_) throw dimension_mismatch("Subspace::reduce ambient");
        const PrimeField& f = field();
        std::vector<uint32_t> coords(basis_.rows(), 0);
        for (size_t r = 0; r < basis_.rows(); ++r) {
            size_t c = 0;
            while (c < ambient_ && basis_.at(r, c) == 0) ++c;
            // RREF rows have pivot value 1 at column c
            uint32_t x = v[c];
            if (!x) continue;
            coords[r] = x;
            uint64_t fm = f.p() - x;
            const uint32_t* br = basis_.row(r);
            for (size_t k = c; k < ambient_; ++k)
                v[k] = static_cast<uint32_t>((v[k] + fm * br[k]) % f.p());
        }
        for (uint32_t x : v)
            if (x) return {std::move(coords), false};
        return {std::move(coords), true};
    }

    std::vector<uint32_t> coordinates(const std::vector<uint32_t>& v) const {
        auto [coords, ok] = reduce(v);
        if (!ok) throw containment_violation("vector not in subspace");
        return coords;
    }

    Subspace sum(const Subspace& o) const {
        if (o.ambient_ != ambient_) throw dimension_mismatch("Subspace::sum ambient");
        return from_span(basis_.vstack(o.basis_));
    }

    Subspace intersect(const Subspace& o) const {
        if (o.ambient_ != ambient_) throw dimension_mismatch("Subspace::intersect ambient");
        // x = B1^T a = B2^T b  <=>  (a,b) in ker [B1^T | -B2^T]
        const PrimeField& f = field();
        size_t d1 = dim(), d2 = o.dim();
        FpMatrix sys(f, ambient_, d1 + d2);
        for (size_t r = 0; r < ambient_; ++r) {
            for (size_t c = 0; c < d1; ++c) sys.at(r, c) = basis_.at(c, r);
            for (size_t c = 0; c < d2; ++c) sys.at(r, d1 + c) = f.neg(o.basis_.at(c, r));
        }
        FpMatrix ker = sys.kernel_basis_matrix();
        FpMatrix span(f, ker.rows(), ambient_);
        for (size_t r = 0; r < ker.rows(); ++r) {
            for (size_t c = 0; c < d1; ++c) {
                uint32_t x = ker.at(r, c);
                if (!x) continue;
                uint64_t fx = x;
                for (size_t k = 0; k < ambient_; ++k)
                    span.at(r, k) =
                        static_cast<uint32_t>((span.at(r, k) + fx * basis_.at(c, k)) % f.p());
            }
        }
        return from_span(span);
    }

  private:
    size_t ambient_;
    FpMatrix basis_;
};

/// {f : <v,f> = 0 for all v in s} with respect to the bilinear pairing
/// <v,f> = v^T * pairing * f. `pairing` must be ambient_dim(s) x m.
inline Subspace annihilator(const Subspace& s, const FpMatrix& pairing) {
    if (pairing.rows() != s.ambient_dim())
        throw dimension_mismatch("annihilator: pairing row count != ambient dim");
    if (pairing.field() != s.field()) throw field_mismatch("annihilator: field mismatch");
    return Subspace::from_span(s.basis().mul(pairing).kernel_basis_matrix());
}

inline size_t quotient_dim(const Subspace& big, const Subspace& small) {
    if (!big.contains(small)) throw containment_violation("quotient_dim: small not in big");
    return big.dim() - small.dim();
}

inline Subspace kernel_basis(const FpMatrix& m) {
    return Subspace::from_span(m.kernel_basis_matrix());
}

}  // namespace koszul
