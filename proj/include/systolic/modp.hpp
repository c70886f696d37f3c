#pragma once

// Linear algebra over the prime field Z_p.
//
// Dense matrices back the small systems (cohomology bases, test oracles);
// the sparse column reduction handles boundary matrices of refined complexes.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "systolic/errors.hpp"

namespace systolic::modp {

using Scalar = std::uint32_t;
using Vector = std::vector<Scalar>;

inline bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    if (n % 2 == 0) return n == 2;
    for (std::uint64_t d = 3; d * d <= n; d += 2)
        if (n % d == 0) return false;
    return true;
}

/// A prime modulus below 2^31; products of two residues fit in 64 bits.
class Prime {
public:
    explicit Prime(std::uint64_t p) : p_(p) {
        if (p >= (1ull << 31) || !is_prime(p))
            throw InvalidModulus("modulus " + std::to_string(p) + " is not a prime below 2^31");
    }
    std::uint64_t value() const noexcept { return p_; }
    operator std::uint64_t() const noexcept { return p_; }

    Scalar reduce(std::int64_t x) const noexcept {
        auto m = static_cast<std::int64_t>(p_);
        x %= m;
        if (x < 0) x += m;
        return static_cast<Scalar>(x);
    }
    Scalar add(Scalar a, Scalar b) const noexcept { return static_cast<Scalar>((std::uint64_t{a} + b) % p_); }
    Scalar sub(Scalar a, Scalar b) const noexcept { return static_cast<Scalar>((std::uint64_t{a} + p_ - b) % p_); }
    Scalar mul(Scalar a, Scalar b) const noexcept { return static_cast<Scalar>((std::uint64_t{a} * b) % p_); }
    Scalar neg(Scalar a) const noexcept { return a == 0 ? 0 : static_cast<Scalar>(p_ - a); }
    Scalar inv(Scalar a) const {
        if (a % p_ == 0) throw InvalidModulus("zero has no inverse");
        // Fermat: a^(p-2)
        std::uint64_t result = 1, base = a % p_, e = p_ - 2;
        while (e) {
            if (e & 1) result = result * base % p_;
            base = base * base % p_;
            e >>= 1;
        }
        return static_cast<Scalar>(result);
    }

    friend bool operator==(const Prime& a, const Prime& b) { return a.p_ == b.p_; }

private:
    std::uint64_t p_;
};

/// Large prime used to compute ranks over the rationals.
inline constexpr std::uint64_t kRationalProxyPrime = 2147483647ull;

class MatrixModP {
public:
    MatrixModP(Prime p, std::size_t rows, std::size_t cols)
        : p_(p), rows_(rows), cols_(cols), data_(rows * cols, 0) {}

    /// Builds from integer entries, reducing each mod p.
    static MatrixModP from_rows(Prime p, const std::vector<std::vector<std::int64_t>>& rows) {
        std::size_t r = rows.size(), c = r ? rows[0].size() : 0;
        MatrixModP m(p, r, c);
        for (std::size_t i = 0; i < r; ++i) {
            if (rows[i].size() != c) throw DimensionMismatch("ragged row in matrix literal");
            for (std::size_t j = 0; j < c; ++j) m.set(i, j, p.reduce(rows[i][j]));
        }
        return m;
    }
    static MatrixModP identity(Prime p, std::size_t n) {
        MatrixModP m(p, n, n);
        for (std::size_t i = 0; i < n; ++i) m.set(i, i, 1);
        return m;
    }

    const Prime& prime() const noexcept { return p_; }
    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    Scalar at(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    void set(std::size_t i, std::size_t j, Scalar v) { data_[i * cols_ + j] = static_cast<Scalar>(v % p_.value()); }

    Vector multiply(const Vector& x) const {
        if (x.size() != cols_) throw DimensionMismatch("matrix-vector size mismatch");
        Vector y(rows_, 0);
        for (std::size_t i = 0; i < rows_; ++i) {
            std::uint64_t acc = 0;
            for (std::size_t j = 0; j < cols_; ++j) acc = (acc + std::uint64_t{at(i, j)} * x[j]) % p_.value();
            y[i] = static_cast<Scalar>(acc);
        }
        return y;
    }

private:
    Prime p_;
    std::size_t rows_, cols_;
    std::vector<Scalar> data_;
};

namespace detail {

/// Reduced row echelon form in place; returns the pivot column of each pivot row.
inline std::vector<std::size_t> rref(MatrixModP& m, std::size_t ncols_to_pivot) {
    const Prime& p = m.prime();
    std::vector<std::size_t> pivots;
    std::size_t row = 0;
    for (std::size_t col = 0; col < ncols_to_pivot && row < m.rows(); ++col) {
        std::size_t sel = row;
        while (sel < m.rows() && m.at(sel, col) == 0) ++sel;
        if (sel == m.rows()) continue;
        if (sel != row)
            for (std::size_t j = 0; j < m.cols(); ++j) {
                Scalar t = m.at(row, j);
                m.set(row, j, m.at(sel, j));
                m.set(sel, j, t);
            }
        Scalar inv = p.inv(m.at(row, col));
        for (std::size_t j = 0; j < m.cols(); ++j) m.set(row, j, p.mul(m.at(row, j), inv));
        for (std::size_t i = 0; i < m.rows(); ++i) {
            if (i == row) continue;
            Scalar f = m.at(i, col);
            if (f == 0) continue;
            for (std::size_t j = col; j < m.cols(); ++j)
                m.set(i, j, p.sub(m.at(i, j), p.mul(f, m.at(row, j))));
        }
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}

}  // namespace detail

inline std::size_t rank(const MatrixModP& m) {
    MatrixModP work = m;
    return detail::rref(work, work.cols()).size();
}

/// Some x with m·x = rhs, or nullopt when rhs is outside the column space.
inline std::optional<Vector> solve(const MatrixModP& m, const Vector& rhs) {
    if (rhs.size() != m.rows()) throw DimensionMismatch("right-hand side length differs from row count");
    MatrixModP aug(m.prime(), m.rows(), m.cols() + 1);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) aug.set(i, j, m.at(i, j));
        aug.set(i, m.cols(), rhs[i]);
    }
    auto pivots = detail::rref(aug, m.cols());
    for (std::size_t i = pivots.size(); i < aug.rows(); ++i)
        if (aug.at(i, m.cols()) != 0) return std::nullopt;
    Vector x(m.cols(), 0);
    for (std::size_t k = 0; k < pivots.size(); ++k) x[pivots[k]] = aug.at(k, m.cols());
    return x;
}

/// Basis of ker(m); its size is cols − rank.
inline std::vector<Vector> kernel_basis(const MatrixModP& m) {
    MatrixModP work = m;
    auto pivots = detail::rref(work, work.cols());
    const Prime& p = m.prime();
    std::vector<bool> is_pivot(m.cols(), false);
    for (auto c : pivots) is_pivot[c] = true;
    std::vector<Vector> basis;
    for (std::size_t free = 0; free < m.cols(); ++free) {
        if (is_pivot[free]) continue;
        Vector v(m.cols(), 0);
        v[free] = 1;
        for (std::size_t k = 0; k < pivots.size(); ++k) v[pivots[k]] = p.neg(work.at(k, free));
        basis.push_back(std::move(v));
    }
    return basis;
}

// ---------------------------------------------------------------------------
// Sparse column reduction

/// Sparse column: (row, value) pairs sorted by row, values nonzero.
using SparseColumn = std::vector<std::pair<std::uint32_t, Scalar>>;

namespace detail {

/// a ← a + f·b
inline SparseColumn axpy(const Prime& p, const SparseColumn& a, Scalar f, const SparseColumn& b) {
    SparseColumn out;
    out.reserve(a.size() + b.size());
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
            out.push_back(a[i++]);
        } else if (i == a.size() || b[j].first < a[i].first) {
            out.emplace_back(b[j].first, p.mul(f, b[j].second));
            ++j;
        } else {
            Scalar v = p.add(a[i].second, p.mul(f, b[j].second));
            if (v != 0) out.emplace_back(a[i].first, v);
            ++i;
            ++j;
        }
    }
    return out;
}

}  // namespace detail

struct ColumnReduction {
    std::size_t rank = 0;
    /// Kernel basis vectors (as sparse columns over the column index space); filled when requested.
    std::vector<SparseColumn> kernel;
};

/// Standard left-to-right column reduction on lowest pivots. With `track_kernel`
/// the column operations are recorded so zero columns yield a kernel basis.
inline ColumnReduction reduce_columns(const Prime& p, std::vector<SparseColumn> cols, bool track_kernel) {
    ColumnReduction out;
    std::unordered_map<std::uint32_t, std::size_t> pivot_owner;
    std::vector<SparseColumn> ops;
    if (track_kernel) {
        ops.resize(cols.size());
        for (std::size_t j = 0; j < cols.size(); ++j) ops[j] = {{static_cast<std::uint32_t>(j), 1}};
    }
    for (std::size_t j = 0; j < cols.size(); ++j) {
        auto& col = cols[j];
        while (!col.empty()) {
            auto low = col.back().first;
            auto it = pivot_owner.find(low);
            if (it == pivot_owner.end()) break;
            const auto& other = cols[it->second];
            Scalar f = p.neg(p.mul(col.back().second, p.inv(other.back().second)));
            col = detail::axpy(p, col, f, other);
            if (track_kernel) ops[j] = detail::axpy(p, ops[j], f, ops[it->second]);
        }
        if (col.empty()) {
            if (track_kernel) out.kernel.push_back(ops[j]);
        } else {
            pivot_owner.emplace(col.back().first, j);
            ++out.rank;
        }
    }
    return out;
}

}  // namespace systolic::modp
