// fmm: program execution over pluggable scalar rings, recursive application
// to large matrices, exact operation accounting.
#pragma once

#include <chrono>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "fmm/rational.hpp"
#include "fmm/slp.hpp"

namespace fmm {

/// Exact operation counters, incremented by the instrumented ring
/// operations themselves. Negations and copies are free.
struct OpMeter {
    std::uint64_t adds = 0;    // additions and subtractions
    std::uint64_t muls = 0;    // ring multiplications
    std::uint64_t scales = 0;  // multiplications by scalars other than +-1
};

// A ring supplies: Value, zero(), add, sub, neg, mul, scale (by an exact
// rational; throws when the result is not representable), eq. Every ring
// instance may carry an OpMeter* to account its own operations.

class RationalRing {
public:
    using Value = Rational;
    explicit RationalRing(OpMeter* meter = nullptr) : meter_(meter) {}
    Value zero() const { return Rational(0); }
    Value add(const Value& a, const Value& b) const { bump_add(); return a + b; }
    Value sub(const Value& a, const Value& b) const { bump_add(); return a - b; }
    Value neg(const Value& a) const { return -a; }
    Value mul(const Value& a, const Value& b) const { if (meter_) ++meter_->muls; return a * b; }
    Value scale(const Value& a, const Rational& c) const {
        if (c.is_one()) return a;
        if (c == Rational(-1)) return -a;
        if (meter_) ++meter_->scales;
        return a * c;
    }
    bool eq(const Value& a, const Value& b) const { return a == b; }

private:
    void bump_add() const { if (meter_) ++meter_->adds; }
    OpMeter* meter_;
};

/// 64-bit integers with overflow detection; overflow raises OverflowError
/// instead of wrapping.
class Int64Ring {
public:
    using Value = std::int64_t;
    explicit Int64Ring(OpMeter* meter = nullptr) : meter_(meter) {}
    Value zero() const { return 0; }
    Value add(Value a, Value b) const;
    Value sub(Value a, Value b) const;
    Value neg(Value a) const;
    Value mul(Value a, Value b) const;
    Value scale(Value a, const Rational& c) const;
    bool eq(Value a, Value b) const { return a == b; }

private:
    OpMeter* meter_;
};

/// Prime field F_p for p < 2^63; rational scalars map through den^-1 mod p.
class PrimeFieldRing {
public:
    using Value = std::uint64_t;
    explicit PrimeFieldRing(std::uint64_t p, OpMeter* meter = nullptr);
    std::uint64_t modulus() const { return p_; }
    Value zero() const { return 0; }
    Value add(Value a, Value b) const;
    Value sub(Value a, Value b) const;
    Value neg(Value a) const;
    Value mul(Value a, Value b) const;
    Value scale(Value a, const Rational& c) const;
    bool eq(Value a, Value b) const { return a == b; }

private:
    std::uint64_t p_;
    OpMeter* meter_;
};

/// Approximate ring; everything else in the library is exact, this one is
/// for timing and float-deviation experiments only.
class DoubleRing {
public:
    using Value = double;
    explicit DoubleRing(OpMeter* meter = nullptr) : meter_(meter) {}
    Value zero() const { return 0.0; }
    Value add(Value a, Value b) const { bump_add(); return a + b; }
    Value sub(Value a, Value b) const { bump_add(); return a - b; }
    Value neg(Value a) const { return -a; }
    Value mul(Value a, Value b) const { if (meter_) ++meter_->muls; return a * b; }
    Value scale(Value a, const Rational& c) const {
        if (c.is_one()) return a;
        if (c == Rational(-1)) return -a;
        if (meter_) ++meter_->scales;
        return a * c.to_double();
    }
    bool eq(Value a, Value b) const { return a == b; }

private:
    void bump_add() const { if (meter_) ++meter_->adds; }
    OpMeter* meter_;
};

/// Dense row-major matrix over a ring's value type.
template <typename T>
class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols, T fill = T{})
        : rows_(rows), cols_(cols), data_(size_t(rows) * size_t(cols), fill) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    T& operator()(int r, int c) { return data_[size_t(r) * size_t(cols_) + size_t(c)]; }
    const T& operator()(int r, int c) const { return data_[size_t(r) * size_t(cols_) + size_t(c)]; }
    bool operator==(const Matrix&) const = default;

private:
    int rows_ = 0, cols_ = 0;
    std::vector<T> data_;
};

/// Zero-pads to the given shape (reads outside the source as zero).
template <typename T>
Matrix<T> pad_matrix(const Matrix<T>& a, int rows, int cols);

/// Strips padding back off.
template <typename T>
Matrix<T> crop_matrix(const Matrix<T>& a, int rows, int cols);

/// Schoolbook product; also the recursion base case and the benchmark
/// baseline.
template <typename Ring>
Matrix<typename Ring::Value> naive_multiply(const Matrix<typename Ring::Value>& a,
                                            const Matrix<typename Ring::Value>& b,
                                            const Ring& ring);

/// Runs one application of the program with matrix-valued sources: A is
/// cut into n*m blocks, B into m*p blocks, Lin/Scale act element-wise and
/// every product multiplies its two operand blocks (naively at or below
/// `threshold`, recursively through the same program above it).
template <typename Ring>
Matrix<typename Ring::Value> eval_slp(const Slp& slp, const Matrix<typename Ring::Value>& a,
                                      const Matrix<typename Ring::Value>& b, const Ring& ring,
                                      int threshold = 1);

/// Square multiply via the program: pads to the next power of the base
/// dimension (the program must have n = m = p), recurses down to
/// `threshold`, strips the padding off the result.
template <typename Ring>
Matrix<typename Ring::Value> recursive_multiply(const Matrix<typename Ring::Value>& a,
                                                const Matrix<typename Ring::Value>& b,
                                                const Slp& slp, int threshold, const Ring& ring);

/// Closed form of the operation counts of full recursion: with q additions
/// and rank R on an s x s base, k levels cost muls = R^k and
/// adds = q*(R^k - (s^2)^k)/(R - s^2); for R = s^2 the degenerate form
/// adds = q*k*(s^2)^(k-1) applies.
struct OpCounts {
    std::uint64_t muls = 0;
    std::uint64_t adds = 0;
};
OpCounts count_formula(std::uint64_t slp_adds, std::uint64_t rank, std::uint64_t base, int levels);

struct BenchRow {
    int size = 0;
    int padded = 0;
    OpMeter meter;                 // counts of one recursive multiply
    std::int64_t time_ns = 0;      // median
    std::int64_t baseline_ns = 0;  // median naive time
};

/// Times recursive_multiply against the naive baseline, deterministic per
/// seed. make_ring(OpMeter*) builds the ring, gen(rng) draws one input
/// value. With check_exact the two products must agree bit-exactly, and
/// counters are cross-checked against count_formula when threshold = 1.
template <typename RingFactory, typename Gen>
std::vector<BenchRow> run_bench(const Slp& slp, const std::vector<int>& sizes, int threshold,
                                int repetitions, std::uint64_t seed, RingFactory make_ring,
                                Gen gen, bool check_exact);

/// run_bench over the checked 64-bit integers with entries in [-100, 100].
std::vector<BenchRow> bench(const Slp& slp, const std::vector<int>& sizes, int threshold,
                            int repetitions, std::uint64_t seed);

/// The report rows as delimiter-separated text: a header line, then
/// size,adds,muls,time_ns,baseline_ns.
std::string format_bench_rows(const std::vector<BenchRow>& rows);

// ---------------------------------------------------------------------
// template implementations

template <typename T>
Matrix<T> pad_matrix(const Matrix<T>& a, int rows, int cols) {
    if (rows < a.rows() || cols < a.cols()) throw ShapeError("padding cannot shrink");
    Matrix<T> out(rows, cols);
    for (int r = 0; r < a.rows(); ++r)
        for (int c = 0; c < a.cols(); ++c) out(r, c) = a(r, c);
    return out;
}

template <typename T>
Matrix<T> crop_matrix(const Matrix<T>& a, int rows, int cols) {
    if (rows > a.rows() || cols > a.cols()) throw ShapeError("crop cannot grow");
    Matrix<T> out(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) out(r, c) = a(r, c);
    return out;
}

template <typename Ring>
Matrix<typename Ring::Value> naive_multiply(const Matrix<typename Ring::Value>& a,
                                            const Matrix<typename Ring::Value>& b,
                                            const Ring& ring) {
    if (a.cols() != b.rows()) throw ShapeError("inner dimensions disagree");
    Matrix<typename Ring::Value> c(a.rows(), b.cols(), ring.zero());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < b.cols(); ++j) {
            typename Ring::Value acc = ring.mul(a(i, 0), b(0, j));
            for (int k = 1; k < a.cols(); ++k)
                acc = ring.add(acc, ring.mul(a(i, k), b(k, j)));
            c(i, j) = acc;
        }
    return c;
}

namespace detail {

template <typename Ring>
Matrix<typename Ring::Value> block_multiply(const Matrix<typename Ring::Value>& a,
                                            const Matrix<typename Ring::Value>& b,
                                            const Slp& slp, int threshold, const Ring& ring) {
    const bool splits = a.rows() % slp.dims.n == 0 && a.cols() % slp.dims.m == 0 &&
                        b.cols() % slp.dims.p == 0;
    if (a.rows() <= threshold || !splits) return naive_multiply(a, b, ring);
    return eval_slp(slp, a, b, ring, threshold);
}

}  // namespace detail

template <typename Ring>
Matrix<typename Ring::Value> eval_slp(const Slp& slp, const Matrix<typename Ring::Value>& a,
                                      const Matrix<typename Ring::Value>& b, const Ring& ring,
                                      int threshold) {
    using Value = typename Ring::Value;
    using Block = Matrix<Value>;
    const Dims d = slp.dims;
    if (a.rows() % d.n != 0 || a.cols() % d.m != 0 || b.rows() % d.m != 0 ||
        b.cols() % d.p != 0 || a.cols() != b.rows())
        throw ShapeError("input shapes do not split into " + d.to_string() + " blocks");
    const int br = a.rows() / d.n;   // block rows of A blocks
    const int bc = a.cols() / d.m;   // block cols of A blocks
    const int bc2 = b.cols() / d.p;  // block cols of B blocks

    auto cut = [](const Block& m, int i, int j, int h, int w) {
        Block out(h, w);
        for (int r = 0; r < h; ++r)
            for (int c = 0; c < w; ++c) out(r, c) = m(i * h + r, j * w + c);
        return out;
    };

    std::vector<Block> val(slp.num_values());
    for (int i = 0; i < d.n; ++i)
        for (int j = 0; j < d.m; ++j)
            val[size_t(slp.a_input(i * d.m + j))] = cut(a, i, j, br, bc);
    for (int i = 0; i < d.m; ++i)
        for (int j = 0; j < d.p; ++j)
            val[size_t(slp.b_input(i * d.p + j))] = cut(b, i, j, bc, bc2);

    auto lin_elem = [&](const Block& x, const Rational& cx, const Block& y, const Rational& cy) {
        Block out(x.rows(), x.cols());
        const bool nx = cx == Rational(-1), ny = cy == Rational(-1);
        for (int r = 0; r < x.rows(); ++r)
            for (int c = 0; c < x.cols(); ++c) {
                Value xs = nx ? x(r, c) : ring.scale(x(r, c), cx);
                Value ys = ny ? y(r, c) : ring.scale(y(r, c), cy);
                // one addition/subtraction per element; unary minus is free
                out(r, c) = nx ? (ny ? ring.neg(ring.add(xs, ys)) : ring.sub(ys, xs))
                               : (ny ? ring.sub(xs, ys) : ring.add(xs, ys));
            }
        return out;
    };

    for (const auto& ins : slp.instrs) {
        if (const auto* lin = std::get_if<Slp::Lin>(&ins)) {
            val[size_t(lin->dst)] = lin_elem(val[size_t(lin->src1)], lin->c1,
                                             val[size_t(lin->src2)], lin->c2);
        } else if (const auto* sc = std::get_if<Slp::Scale>(&ins)) {
            const Block& src = val[size_t(sc->src)];
            Block out(src.rows(), src.cols());
            for (int r = 0; r < src.rows(); ++r)
                for (int c = 0; c < src.cols(); ++c) out(r, c) = ring.scale(src(r, c), sc->c);
            val[size_t(sc->dst)] = std::move(out);
        } else {
            const auto& mul = std::get<Slp::Mul>(ins);
            val[size_t(mul.dst)] =
                detail::block_multiply(val[size_t(mul.a)], val[size_t(mul.b)], slp, threshold, ring);
        }
    }

    Block c(br * d.n, bc2 * d.p);
    for (int i = 0; i < d.n; ++i)
        for (int j = 0; j < d.p; ++j) {
            const Block& blk = val[size_t(slp.outputs[size_t(i * d.p + j)])];
            for (int r = 0; r < br; ++r)
                for (int cc = 0; cc < bc2; ++cc) c(i * br + r, j * bc2 + cc) = blk(r, cc);
        }
    return c;
}

template <typename Ring>
Matrix<typename Ring::Value> recursive_multiply(const Matrix<typename Ring::Value>& a,
                                                const Matrix<typename Ring::Value>& b,
                                                const Slp& slp, int threshold, const Ring& ring) {
    if (slp.dims.n != slp.dims.m || slp.dims.m != slp.dims.p)
        throw ShapeError("recursive application needs a square base program");
    if (a.rows() != a.cols() || b.rows() != b.cols() || a.cols() != b.rows())
        throw ShapeError("recursive multiply expects square inputs of equal size");
    if (threshold < 1) throw ArgError("threshold must be >= 1");
    const int s = slp.dims.n;
    const int size = a.rows();
    if (size == 0) return Matrix<typename Ring::Value>(0, 0);
    int padded = 1;
    while (padded < size) padded *= s;
    if (size <= threshold)
        return naive_multiply(a, b, ring);
    const auto pa = pad_matrix(a, padded, padded);
    const auto pb = pad_matrix(b, padded, padded);
    const auto pc = detail::block_multiply(pa, pb, slp, threshold, ring);
    return crop_matrix(pc, size, size);
}

namespace detail {

int bench_levels(int padded, int base);
std::int64_t bench_median(std::vector<std::int64_t> xs);

}  // namespace detail

template <typename RingFactory, typename Gen>
std::vector<BenchRow> run_bench(const Slp& slp, const std::vector<int>& sizes, int threshold,
                                int repetitions, std::uint64_t seed, RingFactory make_ring,
                                Gen gen, bool check_exact) {
    if (repetitions < 1) throw ArgError("repetitions must be >= 1");
    using Ring = decltype(make_ring(static_cast<OpMeter*>(nullptr)));
    using Value = typename Ring::Value;
    const OpCountReport slp_ops = slp_addition_count(slp);
    std::vector<BenchRow> rows;
    for (int size : sizes) {
        if (size < 1) throw ArgError("sizes must be positive");
        std::mt19937_64 rng(seed ^ (std::uint64_t(std::uint32_t(size)) << 32));
        Matrix<Value> a(size, size), b(size, size);
        for (int r = 0; r < size; ++r)
            for (int c = 0; c < size; ++c) {
                a(r, c) = gen(rng);
                b(r, c) = gen(rng);
            }
        BenchRow row;
        row.size = size;
        row.padded = 1;
        while (row.padded < size) row.padded *= slp.dims.n;

        std::vector<std::int64_t> times, base_times;
        Matrix<Value> fast, naive;
        for (int rep = 0; rep < repetitions; ++rep) {
            OpMeter fast_meter, base_meter;
            Ring fast_ring = make_ring(&fast_meter);
            Ring base_ring = make_ring(&base_meter);
            auto t0 = std::chrono::steady_clock::now();
            fast = recursive_multiply(a, b, slp, threshold, fast_ring);
            auto t1 = std::chrono::steady_clock::now();
            naive = naive_multiply(a, b, base_ring);
            auto t2 = std::chrono::steady_clock::now();
            times.push_back(std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count());
            base_times.push_back(
                std::chrono::duration_cast<std::chrono::nanoseconds>(t2 - t1).count());
            if (rep == 0) row.meter = fast_meter;
        }
        if (check_exact) {
            if (!(fast == naive)) throw Error("fast and naive products disagree in bench");
            if (threshold == 1 && size > 1) {
                const OpCounts expect = count_formula(
                    std::uint64_t(slp_ops.adds_total()), std::uint64_t(slp.mul_count()),
                    std::uint64_t(slp.dims.n), detail::bench_levels(row.padded, slp.dims.n));
                if (expect.muls != row.meter.muls || expect.adds != row.meter.adds)
                    throw Error("meter counts disagree with count_formula");
            }
        }
        row.time_ns = detail::bench_median(times);
        row.baseline_ns = detail::bench_median(base_times);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace fmm
