// fmm: bilinear scheme data model, matrix-multiplication tensor, addition counting.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fmm/rational.hpp"

namespace fmm {

/// Shape of the multiplication <n,m,p>: (n x m) times (m x p).
struct Dims {
    int n = 0, m = 0, p = 0;

    bool operator==(const Dims&) const = default;
    std::string to_string() const;
};

/// Dense matrix of exact rationals, row-major.
class CoeffMatrix {
public:
    CoeffMatrix() = default;
    CoeffMatrix(int rows, int cols) : rows_(rows), cols_(cols), data_(size_t(rows) * cols) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    Rational& operator()(int r, int c) { return data_[size_t(r) * cols_ + c]; }
    const Rational& operator()(int r, int c) const { return data_[size_t(r) * cols_ + c]; }

    int nnz_in_row(int r) const;
    int nnz_in_col(int c) const;
    bool operator==(const CoeffMatrix&) const = default;

private:
    int rows_ = 0, cols_ = 0;
    std::vector<Rational> data_;
};

/// A rank-R bilinear algorithm for C = A*B:
///   M_r = (sum_a U[a][r] A_a) * (sum_b V[b][r] B_b),   C_c = sum_r W[c][r] M_r
/// with row-major entry indexing A_{m*i+j}, B_{p*k+l}, C_{p*s+t}.
class BilinearScheme {
public:
    /// Validates shapes and rejects all-zero columns in U, V or W
    /// (a rank-R scheme must use all R products).
    BilinearScheme(Dims dims, CoeffMatrix u, CoeffMatrix v, CoeffMatrix w,
                   std::string name = "");

    const Dims& dims() const { return dims_; }
    int rank() const { return u_.cols(); }
    const CoeffMatrix& u() const { return u_; }
    const CoeffMatrix& v() const { return v_; }
    const CoeffMatrix& w() const { return w_; }
    const std::string& name() const { return name_; }

    /// True when every coefficient has denominator 1.
    bool is_integral() const;

    bool same_data(const BilinearScheme& o) const {
        return dims_ == o.dims_ && u_ == o.u_ && v_ == o.v_ && w_ == o.w_;
    }

private:
    Dims dims_;
    CoeffMatrix u_, v_, w_;
    std::string name_;
};

/// The 0/1 target tensor: T[a][b][c] = 1 exactly when the product A_a*B_b
/// contributes to C_c, i.e. with a = m*i+j, b = p*k+l, c = p*s+t:
/// j = k, i = s, l = t. Entries are computed from the index arithmetic.
class MatMulTensor {
public:
    explicit MatMulTensor(Dims dims) : dims_(dims) {}

    const Dims& dims() const { return dims_; }
    bool entry(int a, int b, int c) const {
        const int i = a / dims_.m, j = a % dims_.m;
        const int k = b / dims_.p, l = b % dims_.p;
        const int s = c / dims_.p, t = c % dims_.p;
        return j == k && i == s && l == t;
    }
    long ones() const;  // always n*m*p

private:
    Dims dims_;
};

/// Builds the <n,m,p> target tensor. Dims must be positive.
MatMulTensor matmul_tensor(Dims dims);

/// Additions split by side, plus multiplication and scalar-multiplication
/// tallies. adds_total is derived, keeping the sum invariant by construction.
struct OpCountReport {
    std::int64_t adds_a = 0;
    std::int64_t adds_b = 0;
    std::int64_t adds_c = 0;
    std::int64_t muls = 0;
    std::int64_t scales = 0;  // multiplications by scalars other than +-1

    std::int64_t adds_total() const { return adds_a + adds_b + adds_c; }
    bool operator==(const OpCountReport&) const = default;
};

/// Addition count of the scheme read literally: each linear form with k
/// nonzero terms costs k-1 additions. Coefficients other than +-1 are
/// tallied as scalar multiplications and do not change addition counts.
OpCountReport naive_addition_count(const BilinearScheme& scheme);

}  // namespace fmm
