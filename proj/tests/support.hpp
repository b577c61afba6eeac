// Shared test helpers: reference oracles and a generator of random valid
// schemes built from validity-preserving transformations.
#pragma once

#include <random>
#include <vector>

#include "fmm/engine.hpp"
#include "fmm/rational.hpp"
#include "fmm/scheme.hpp"

namespace fmm::test {

// Plain triple-loop product, independent of the engine's ring machinery.
template <typename T>
Matrix<T> naive_mul_ref(const Matrix<T>& a, const Matrix<T>& b) {
    Matrix<T> c(a.rows(), b.cols(), T{});
    for (int i = 0; i < a.rows(); ++i)
        for (int k = 0; k < a.cols(); ++k)
            for (int j = 0; j < b.cols(); ++j) c(i, j) = c(i, j) + a(i, k) * b(k, j);
    return c;
}

// Exhaustive Brent-equation check written from scratch (the oracle the
// verifier must agree with).
inline bool brent_oracle(const BilinearScheme& s) {
    const Dims d = s.dims();
    for (int a = 0; a < d.n * d.m; ++a)
        for (int b = 0; b < d.m * d.p; ++b)
            for (int c = 0; c < d.n * d.p; ++c) {
                Rational sum;
                for (int r = 0; r < s.rank(); ++r)
                    sum += s.u()(a, r) * s.v()(b, r) * s.w()(c, r);
                const int i = a / d.m, j = a % d.m;
                const int k = b / d.p, l = b % d.p;
                const int st = c / d.p, t = c % d.p;
                const int want = (j == k && i == st && l == t) ? 1 : 0;
                if (sum != Rational(want)) return false;
            }
    return true;
}

// Rank n*m*p scheme reading the product definition literally; valid for
// every dims.
inline BilinearScheme trivial_scheme(Dims d) {
    const int R = d.n * d.m * d.p;
    CoeffMatrix u(d.n * d.m, R), v(d.m * d.p, R), w(d.n * d.p, R);
    int r = 0;
    for (int i = 0; i < d.n; ++i)
        for (int j = 0; j < d.m; ++j)
            for (int l = 0; l < d.p; ++l) {
                u(i * d.m + j, r) = Rational(1);
                v(j * d.p + l, r) = Rational(1);
                w(i * d.p + l, r) = Rational(1);
                ++r;
            }
    return BilinearScheme(d, u, v, w, "trivial");
}

// --- exact linear algebra over rationals (tiny sizes) ---

using RatMat = std::vector<std::vector<Rational>>;

inline RatMat rat_identity(int n) {
    RatMat m(static_cast<size_t>(n), std::vector<Rational>(static_cast<size_t>(n)));
    for (int i = 0; i < n; ++i) m[size_t(i)][size_t(i)] = Rational(1);
    return m;
}

inline RatMat rat_mul(const RatMat& a, const RatMat& b) {
    const int n = int(a.size()), m = int(b[0].size()), k = int(b.size());
    RatMat c(static_cast<size_t>(n), std::vector<Rational>(static_cast<size_t>(m)));
    for (int i = 0; i < n; ++i)
        for (int t = 0; t < k; ++t)
            for (int j = 0; j < m; ++j) c[size_t(i)][size_t(j)] += a[size_t(i)][size_t(t)] * b[size_t(t)][size_t(j)];
    return c;
}

// Gauss-Jordan inverse; inputs are invertible by construction.
inline RatMat rat_inverse(RatMat a) {
    const int n = int(a.size());
    RatMat inv = rat_identity(n);
    for (int col = 0; col < n; ++col) {
        int pivot = -1;
        for (int r = col; r < n; ++r)
            if (!a[size_t(r)][size_t(col)].is_zero()) {
                pivot = r;
                break;
            }
        std::swap(a[size_t(col)], a[size_t(pivot)]);
        std::swap(inv[size_t(col)], inv[size_t(pivot)]);
        const Rational piv = a[size_t(col)][size_t(col)];
        for (int c = 0; c < n; ++c) {
            a[size_t(col)][size_t(c)] /= piv;
            inv[size_t(col)][size_t(c)] /= piv;
        }
        for (int r = 0; r < n; ++r) {
            if (r == col || a[size_t(r)][size_t(col)].is_zero()) continue;
            const Rational f = a[size_t(r)][size_t(col)];
            for (int c = 0; c < n; ++c) {
                a[size_t(r)][size_t(c)] -= f * a[size_t(col)][size_t(c)];
                inv[size_t(r)][size_t(c)] -= f * inv[size_t(col)][size_t(c)];
            }
        }
    }
    return inv;
}

// Random invertible matrix: unit-triangular L and T with small entries,
// X = L*T, det = +-1.
inline RatMat rat_random_invertible(int n, std::mt19937_64& rng) {
    RatMat lower = rat_identity(n), upper = rat_identity(n);
    auto small = [&rng]() { return Rational(long(rng() % 5) - 2); };
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i > j) lower[size_t(i)][size_t(j)] = small();
            if (i < j) upper[size_t(i)][size_t(j)] = small();
        }
    return rat_mul(lower, upper);
}

// Sandwich transform: the multiplication tensor is invariant under
// A -> X A Y, B -> Y^-1 B Z, C -> X C Z, so rewriting the linear forms
// through (X, Y, Z) yields another valid scheme with the same rank.
inline BilinearScheme sandwich_transform(const BilinearScheme& s, const RatMat& x,
                                         const RatMat& y, const RatMat& z) {
    const Dims d = s.dims();
    const int R = s.rank();
    const RatMat yinv = rat_inverse(y), xinv = rat_inverse(x), zinv = rat_inverse(z);
    CoeffMatrix u(d.n * d.m, R), v(d.m * d.p, R), w(d.n * d.p, R);
    for (int r = 0; r < R; ++r) {
        for (int i = 0; i < d.n; ++i)
            for (int j = 0; j < d.m; ++j) {
                Rational sum;
                for (int i2 = 0; i2 < d.n; ++i2)
                    for (int j2 = 0; j2 < d.m; ++j2)
                        sum += s.u()(i2 * d.m + j2, r) * x[size_t(i2)][size_t(i)] *
                               y[size_t(j)][size_t(j2)];
                u(i * d.m + j, r) = sum;
            }
        for (int k = 0; k < d.m; ++k)
            for (int l = 0; l < d.p; ++l) {
                Rational sum;
                for (int k2 = 0; k2 < d.m; ++k2)
                    for (int l2 = 0; l2 < d.p; ++l2)
                        sum += s.v()(k2 * d.p + l2, r) * yinv[size_t(k2)][size_t(k)] *
                               z[size_t(l)][size_t(l2)];
                v(k * d.p + l, r) = sum;
            }
        for (int st = 0; st < d.n; ++st)
            for (int t = 0; t < d.p; ++t) {
                Rational sum;
                for (int s2 = 0; s2 < d.n; ++s2)
                    for (int t2 = 0; t2 < d.p; ++t2)
                        sum += xinv[size_t(st)][size_t(s2)] * zinv[size_t(t2)][size_t(t)] *
                               s.w()(s2 * d.p + t2, r);
                w(st * d.p + t, r) = sum;
            }
    }
    return BilinearScheme(d, u, v, w, s.name() + "+sandwich");
}

// Scales product r by (alpha, beta, 1/(alpha*beta)); validity preserved.
inline BilinearScheme scale_product(const BilinearScheme& s, int r, const Rational& alpha,
                                    const Rational& beta) {
    CoeffMatrix u = s.u(), v = s.v(), w = s.w();
    const Rational gamma = (alpha * beta).inverse();
    for (int a = 0; a < u.rows(); ++a) u(a, r) *= alpha;
    for (int b = 0; b < v.rows(); ++b) v(b, r) *= beta;
    for (int c = 0; c < w.rows(); ++c) w(c, r) *= gamma;
    return BilinearScheme(s.dims(), u, v, w, s.name());
}

// Splits product r into two sharing U/V columns, with W split w = w1 + w2;
// the rank grows by one, validity is preserved.
inline BilinearScheme split_product(const BilinearScheme& s, int r, std::mt19937_64& rng) {
    const int R = s.rank();
    CoeffMatrix u(s.u().rows(), R + 1), v(s.v().rows(), R + 1), w(s.w().rows(), R + 1);
    for (int c = 0; c < R; ++c) {
        for (int a = 0; a < u.rows(); ++a) u(a, c) = s.u()(a, c);
        for (int b = 0; b < v.rows(); ++b) v(b, c) = s.v()(b, c);
        for (int o = 0; o < w.rows(); ++o) w(o, c) = s.w()(o, c);
    }
    for (int a = 0; a < u.rows(); ++a) u(a, R) = s.u()(a, r);
    for (int b = 0; b < v.rows(); ++b) v(b, R) = s.v()(b, r);
    // w_new(., r) + w(., R) must reproduce the old column, both nonzero
    const Rational t(long(rng() % 3) + 1);
    for (int o = 0; o < w.rows(); ++o) {
        const Rational old = s.w()(o, r);
        w(o, r) = old.is_zero() ? t : old * Rational(2);
        w(o, R) = old - w(o, r);
    }
    return BilinearScheme(s.dims(), u, v, w, s.name() + "+split");
}

/// Deterministic random valid scheme: a small base scheme pushed through
/// sandwich transforms, product scalings and the occasional split.
inline BilinearScheme random_valid_scheme(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    static const Dims kDims[] = {{1, 1, 1}, {2, 2, 2}, {1, 2, 2}, {2, 1, 2},
                                 {2, 2, 1}, {3, 2, 2}, {2, 2, 3}, {1, 3, 2}};
    const Dims d = kDims[rng() % 8];
    BilinearScheme s = trivial_scheme(d);
    s = sandwich_transform(s, rat_random_invertible(d.n, rng), rat_random_invertible(d.m, rng),
                           rat_random_invertible(d.p, rng));
    if (rng() % 2 == 0) s = split_product(s, int(rng() % std::uint64_t(s.rank())), rng);
    for (int i = 0; i < 3; ++i) {
        long num = long(rng() % 5) - 2;
        if (num == 0) num = 2;
        const Rational alpha(num, 1 + rng() % 3);
        const Rational beta(1 + long(rng() % 4), 1 + rng() % 2);
        s = scale_product(s, int(rng() % std::uint64_t(s.rank())), alpha, beta);
    }
    return s;
}

/// Random single-entry mutation of a scheme's raw matrices. May produce an
/// all-zero column (rejected by the scheme constructor); callers redraw.
struct Mutation {
    int matrix;  // 0 = U, 1 = V, 2 = W
    int row, col;
    int op;  // 0 = sign flip, 1 = zero out, 2 = +1, 3 = -1
};

inline Mutation draw_mutation(const BilinearScheme& s, std::mt19937_64& rng) {
    Mutation m;
    m.matrix = int(rng() % 3);
    const CoeffMatrix& mat = m.matrix == 0 ? s.u() : m.matrix == 1 ? s.v() : s.w();
    m.row = int(rng() % std::uint64_t(mat.rows()));
    m.col = int(rng() % std::uint64_t(mat.cols()));
    m.op = int(rng() % 4);
    return m;
}

inline std::optional<BilinearScheme> apply_mutation(const BilinearScheme& s, const Mutation& m) {
    CoeffMatrix u = s.u(), v = s.v(), w = s.w();
    CoeffMatrix& mat = m.matrix == 0 ? u : m.matrix == 1 ? v : w;
    Rational& x = mat(m.row, m.col);
    switch (m.op) {
        case 0:
            if (x.is_zero()) return std::nullopt;  // sign flip needs a nonzero
            x = -x;
            break;
        case 1:
            if (x.is_zero()) return std::nullopt;
            x = Rational(0);
            break;
        case 2: x += Rational(1); break;
        default: x -= Rational(1); break;
    }
    try {
        return BilinearScheme(s.dims(), u, v, w, s.name() + "+mutated");
    } catch (const ArgError&) {
        return std::nullopt;  // created an all-zero column
    }
}

}  // namespace fmm::test
