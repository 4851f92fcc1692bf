#pragma once

#include <optional>
#include <vector>

#include "percat/scalar.hpp"

namespace percat {

using Vec = std::vector<Scalar>;

inline Vec zero_vec(Field f, std::size_t n) { return Vec(n, Scalar::zero(f)); }

inline Vec vec_add(const Vec& a, const Vec& b) {
    assert(a.size() == b.size());
    Vec r = a;
    for (std::size_t i = 0; i < b.size(); ++i) r[i] += b[i];
    return r;
}

inline Vec vec_sub(const Vec& a, const Vec& b) {
    assert(a.size() == b.size());
    Vec r = a;
    for (std::size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
    return r;
}

inline Vec vec_scale(const Scalar& c, const Vec& a) {
    Vec r = a;
    for (auto& x : r) x *= c;
    return r;
}

inline bool vec_is_zero(const Vec& a) {
    for (const auto& x : a)
        if (!x.is_zero()) return false;
    return true;
}

// Dense matrix over the session field. Rows are Vecs; a 0xN or Nx0 matrix is
// legal everywhere.
class Matrix {
public:
    Matrix() : field_(Field::rationals()), cols_(0) {}
    Matrix(Field f, std::size_t rows, std::size_t cols)
        : field_(f), cols_(cols), rows_(rows, zero_vec(f, cols)) {}

    static Matrix identity(Field f, std::size_t n) {
        Matrix m(f, n, n);
        for (std::size_t i = 0; i < n; ++i) m.at(i, i) = Scalar::one(f);
        return m;
    }
    static Matrix from_rows(Field f, std::size_t cols, std::vector<Vec> rows) {
        Matrix m;
        m.field_ = f;
        m.cols_ = cols;
        m.rows_ = std::move(rows);
        for (const auto& r : m.rows_) {
            assert(r.size() == cols);
            (void)r;
        }
        return m;
    }

    Field field() const { return field_; }
    std::size_t rows() const { return rows_.size(); }
    std::size_t cols() const { return cols_; }
    Scalar& at(std::size_t i, std::size_t j) { return rows_[i][j]; }
    const Scalar& at(std::size_t i, std::size_t j) const { return rows_[i][j]; }
    const Vec& row(std::size_t i) const { return rows_[i]; }
    void append_row(Vec r) {
        assert(r.size() == cols_);
        rows_.push_back(std::move(r));
    }

    Matrix mul(const Matrix& o) const {
        assert(cols_ == o.rows());
        Matrix r(field_, rows(), o.cols());
        for (std::size_t i = 0; i < rows(); ++i)
            for (std::size_t k = 0; k < cols_; ++k) {
                if (rows_[i][k].is_zero()) continue;
                for (std::size_t j = 0; j < o.cols(); ++j)
                    r.at(i, j) += rows_[i][k] * o.at(k, j);
            }
        return r;
    }

    Vec apply(const Vec& x) const {
        assert(x.size() == cols_);
        Vec r = zero_vec(field_, rows());
        for (std::size_t i = 0; i < rows(); ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                if (!rows_[i][j].is_zero()) r[i] += rows_[i][j] * x[j];
        return r;
    }

private:
    Field field_;
    std::size_t cols_;
    std::vector<Vec> rows_;
};

// Row-reduced echelon form. Pivot columns are chosen left to right, so the
// result is canonical for a fixed row span; pivots[k] is the column of the
// k-th pivot row.
struct Rref {
    Matrix mat;
    std::vector<std::size_t> pivots;

    std::size_t rank() const { return pivots.size(); }

    bool is_pivot_col(std::size_t j) const {
        for (auto p : pivots)
            if (p == j) return true;
        return false;
    }

    // Reduce v modulo the row span (v must have mat.cols() entries).
    Vec reduce(const Vec& v) const {
        Vec r = v;
        for (std::size_t k = 0; k < pivots.size(); ++k) {
            const Scalar& c = r[pivots[k]];
            if (!c.is_zero()) r = vec_sub(r, vec_scale(c, mat.row(k)));
        }
        return r;
    }

    bool contains(const Vec& v) const { return vec_is_zero(reduce(v)); }

    // Coefficients expressing v over the rref rows, if v lies in the span.
    std::optional<Vec> express(const Vec& v) const {
        Vec r = v;
        Vec coef = zero_vec(mat.field(), pivots.size());
        for (std::size_t k = 0; k < pivots.size(); ++k) {
            const Scalar c = r[pivots[k]];
            if (!c.is_zero()) {
                r = vec_sub(r, vec_scale(c, mat.row(k)));
                coef[k] = c;
            }
        }
        if (!vec_is_zero(r)) return std::nullopt;
        return coef;
    }
};

inline Rref rref(const Matrix& m) {
    Matrix a = m;
    std::vector<std::size_t> pivots;
    std::size_t prow = 0;
    for (std::size_t col = 0; col < a.cols() && prow < a.rows(); ++col) {
        std::size_t sel = prow;
        while (sel < a.rows() && a.at(sel, col).is_zero()) ++sel;
        if (sel == a.rows()) continue;
        if (sel != prow)
            for (std::size_t j = 0; j < a.cols(); ++j)
                std::swap(a.at(sel, j), a.at(prow, j));
        Scalar inv = a.at(prow, col).inverse();
        for (std::size_t j = 0; j < a.cols(); ++j) a.at(prow, j) *= inv;
        for (std::size_t i = 0; i < a.rows(); ++i) {
            if (i == prow) continue;
            Scalar c = a.at(i, col);
            if (c.is_zero()) continue;
            for (std::size_t j = 0; j < a.cols(); ++j)
                a.at(i, j) -= c * a.at(prow, j);
        }
        pivots.push_back(col);
        ++prow;
    }
    // drop zero rows
    Matrix out(m.field(), 0, m.cols());
    for (std::size_t k = 0; k < pivots.size(); ++k) out.append_row(a.row(k));
    return Rref{std::move(out), std::move(pivots)};
}

inline std::size_t rank(const Matrix& m) { return rref(m).rank(); }

// Solve A x = b; returns the canonical particular solution (free variables 0).
inline std::optional<Vec> solve(const Matrix& a, const Vec& b) {
    assert(b.size() == a.rows());
    Matrix aug(a.field(), a.rows(), a.cols() + 1);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) aug.at(i, j) = a.at(i, j);
        aug.at(i, a.cols()) = b[i];
    }
    Rref r = rref(aug);
    Vec x = zero_vec(a.field(), a.cols());
    for (std::size_t k = 0; k < r.pivots.size(); ++k) {
        if (r.pivots[k] == a.cols()) return std::nullopt; // inconsistent
        x[r.pivots[k]] = r.mat.at(k, a.cols());
    }
    return x;
}

// Basis of the null space {x : A x = 0}, one vector per free column, in
// column order (canonical).
inline std::vector<Vec> nullspace(const Matrix& a) {
    Rref r = rref(a);
    std::vector<Vec> basis;
    for (std::size_t j = 0; j < a.cols(); ++j) {
        if (r.is_pivot_col(j)) continue;
        Vec v = zero_vec(a.field(), a.cols());
        v[j] = Scalar::one(a.field());
        for (std::size_t k = 0; k < r.pivots.size(); ++k)
            v[r.pivots[k]] = -r.mat.at(k, j);
        basis.push_back(std::move(v));
    }
    return basis;
}

} // namespace percat
