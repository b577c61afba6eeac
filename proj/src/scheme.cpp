#include "fmm/scheme.hpp"

#include "fmm/errors.hpp"

namespace fmm {

std::string Dims::to_string() const {
    return std::to_string(n) + "x" + std::to_string(m) + "x" + std::to_string(p);
}

int CoeffMatrix::nnz_in_row(int r) const {
    int k = 0;
    for (int c = 0; c < cols_; ++c)
        if (!(*this)(r, c).is_zero()) ++k;
    return k;
}

int CoeffMatrix::nnz_in_col(int c) const {
    int k = 0;
    for (int r = 0; r < rows_; ++r)
        if (!(*this)(r, c).is_zero()) ++k;
    return k;
}

BilinearScheme::BilinearScheme(Dims dims, CoeffMatrix u, CoeffMatrix v, CoeffMatrix w,
                               std::string name)
    : dims_(dims), u_(std::move(u)), v_(std::move(v)), w_(std::move(w)), name_(std::move(name)) {
    if (dims_.n < 1 || dims_.m < 1 || dims_.p < 1)
        throw ArgError("scheme dims must be positive, got " + dims_.to_string());
    const int R = u_.cols();
    if (R < 1) throw ArgError("scheme rank must be positive");
    if (v_.cols() != R || w_.cols() != R)
        throw ArgError("U, V, W must share column count; got " + std::to_string(u_.cols()) +
                       "/" + std::to_string(v_.cols()) + "/" + std::to_string(w_.cols()));
    if (u_.rows() != dims_.n * dims_.m || v_.rows() != dims_.m * dims_.p ||
        w_.rows() != dims_.n * dims_.p)
        throw ArgError("U/V/W row counts do not match dims " + dims_.to_string());
    for (int r = 0; r < R; ++r) {
        if (u_.nnz_in_col(r) == 0 || v_.nnz_in_col(r) == 0 || w_.nnz_in_col(r) == 0)
            throw ArgError("all-zero column " + std::to_string(r) +
                           " would inflate the claimed rank");
    }
}

bool BilinearScheme::is_integral() const {
    for (const CoeffMatrix* m : {&u_, &v_, &w_})
        for (int r = 0; r < m->rows(); ++r)
            for (int c = 0; c < m->cols(); ++c)
                if (!(*m)(r, c).is_integer()) return false;
    return true;
}

long MatMulTensor::ones() const {
    return long(dims_.n) * dims_.m * dims_.p;
}

MatMulTensor matmul_tensor(Dims dims) {
    if (dims.n < 1 || dims.m < 1 || dims.p < 1)
        throw ArgError("tensor dims must be positive, got " + dims.to_string());
    return MatMulTensor(dims);
}

OpCountReport naive_addition_count(const BilinearScheme& scheme) {
    OpCountReport rep;
    const int R = scheme.rank();
    for (int r = 0; r < R; ++r) {
        rep.adds_a += scheme.u().nnz_in_col(r) - 1;
        rep.adds_b += scheme.v().nnz_in_col(r) - 1;
    }
    for (int c = 0; c < scheme.w().rows(); ++c) {
        int k = scheme.w().nnz_in_row(c);
        if (k > 0) rep.adds_c += k - 1;
    }
    rep.muls = R;
    for (const CoeffMatrix* m : {&scheme.u(), &scheme.v(), &scheme.w()})
        for (int r = 0; r < m->rows(); ++r)
            for (int c = 0; c < m->cols(); ++c) {
                const Rational& x = (*m)(r, c);
                if (!x.is_zero() && !x.is_unit()) ++rep.scales;
            }
    return rep;
}

}  // namespace fmm
