#include "fmm/engine.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include "fmm/errors.hpp"
#include "fmm/verify.hpp"

namespace fmm {

// ---------------------------------------------------------------------
// Int64Ring

std::int64_t Int64Ring::add(Value a, Value b) const {
    if (meter_) ++meter_->adds;
    Value r;
    if (__builtin_add_overflow(a, b, &r)) throw OverflowError("int64 addition overflow");
    return r;
}

std::int64_t Int64Ring::sub(Value a, Value b) const {
    if (meter_) ++meter_->adds;
    Value r;
    if (__builtin_sub_overflow(a, b, &r)) throw OverflowError("int64 subtraction overflow");
    return r;
}

std::int64_t Int64Ring::neg(Value a) const {
    Value r;
    if (__builtin_sub_overflow(std::int64_t(0), a, &r)) throw OverflowError("int64 negation overflow");
    return r;
}

std::int64_t Int64Ring::mul(Value a, Value b) const {
    if (meter_) ++meter_->muls;
    Value r;
    if (__builtin_mul_overflow(a, b, &r)) throw OverflowError("int64 multiplication overflow");
    return r;
}

std::int64_t Int64Ring::scale(Value a, const Rational& c) const {
    if (c.is_one()) return a;
    if (c == Rational(-1)) return neg(a);
    if (!c.num().fits_slong_p() || !c.den().fits_slong_p())
        throw OverflowError("scale coefficient exceeds the int64 range");
    if (meter_) ++meter_->scales;
    Value r;
    if (__builtin_mul_overflow(a, Value(c.num().get_si()), &r))
        throw OverflowError("int64 scale overflow");
    const Value den = Value(c.den().get_si());
    if (r % den != 0)
        throw ArgError("scale by " + c.to_string() + " is not representable over int64");
    return r / den;
}

// ---------------------------------------------------------------------
// PrimeFieldRing

PrimeFieldRing::PrimeFieldRing(std::uint64_t p, OpMeter* meter) : p_(p), meter_(meter) {
    if (!is_prime_u64(p)) throw ArgError("modulus " + std::to_string(p) + " is not prime");
    if (p > (std::uint64_t(1) << 63)) throw ArgError("modulus too large");
}

std::uint64_t PrimeFieldRing::add(Value a, Value b) const {
    if (meter_) ++meter_->adds;
    Value s = a + b;
    if (s >= p_) s -= p_;
    return s;
}

std::uint64_t PrimeFieldRing::sub(Value a, Value b) const {
    if (meter_) ++meter_->adds;
    return a >= b ? a - b : a + p_ - b;
}

std::uint64_t PrimeFieldRing::neg(Value a) const { return a == 0 ? 0 : p_ - a; }

std::uint64_t PrimeFieldRing::mul(Value a, Value b) const {
    if (meter_) ++meter_->muls;
    return std::uint64_t((unsigned __int128)a * b % p_);
}

std::uint64_t PrimeFieldRing::scale(Value a, const Rational& c) const {
    if (c.is_one()) return a;
    if (c == Rational(-1)) return neg(a);
    if (meter_) ++meter_->scales;
    mpz_class num = c.num() % p_;
    if (num < 0) num += p_;
    mpz_class den = c.den() % p_;
    if (den == 0) throw ArgError("scale denominator divisible by the modulus");
    std::uint64_t inv = 1, base = den.get_ui(), e = p_ - 2;
    while (e > 0) {
        if (e & 1) inv = std::uint64_t((unsigned __int128)inv * base % p_);
        base = std::uint64_t((unsigned __int128)base * base % p_);
        e >>= 1;
    }
    const std::uint64_t cm = std::uint64_t((unsigned __int128)num.get_ui() * inv % p_);
    return std::uint64_t((unsigned __int128)a * cm % p_);
}

// ---------------------------------------------------------------------

OpCounts count_formula(std::uint64_t slp_adds, std::uint64_t rank, std::uint64_t base,
                       int levels) {
    if (levels < 0) throw ArgError("levels must be >= 0");
    if (base < 1 || rank < 1) throw ArgError("rank and base must be positive");
    using u128 = unsigned __int128;
    const u128 limit = ~std::uint64_t(0);
    const std::uint64_t s2 = base * base;
    u128 rk = 1, sk = 1;
    for (int i = 0; i < levels; ++i) {
        rk *= rank;
        sk *= s2;
        if (rk > limit || sk > limit) throw OverflowError("count_formula overflow");
    }
    OpCounts out;
    out.muls = std::uint64_t(rk);
    u128 adds;
    if (rank == s2) {
        // degenerate recursion: q*k*(s^2)^(k-1)
        adds = levels == 0 ? u128(0) : u128(slp_adds) * std::uint64_t(levels) * (sk / s2);
    } else {
        adds = u128(slp_adds) * ((rk - sk) / (rank - s2));
    }
    if (adds > limit) throw OverflowError("count_formula overflow");
    out.adds = std::uint64_t(adds);
    return out;
}

namespace detail {

int bench_levels(int padded, int base) {
    int k = 0;
    for (int s = 1; s < padded; s *= base) ++k;
    return k;
}

std::int64_t bench_median(std::vector<std::int64_t> xs) {
    std::sort(xs.begin(), xs.end());
    return xs[xs.size() / 2];
}

}  // namespace detail

std::vector<BenchRow> bench(const Slp& slp, const std::vector<int>& sizes, int threshold,
                            int repetitions, std::uint64_t seed) {
    return run_bench(
        slp, sizes, threshold, repetitions, seed,
        [](OpMeter* m) { return Int64Ring(m); },
        [](std::mt19937_64& rng) { return std::int64_t(rng() % 201) - 100; },
        /*check_exact=*/true);
}

std::string format_bench_rows(const std::vector<BenchRow>& rows) {
    std::ostringstream os;
    os << "size,adds,muls,time_ns,baseline_ns\n";
    for (const BenchRow& r : rows)
        os << r.size << ',' << r.meter.adds << ',' << r.meter.muls << ',' << r.time_ns << ','
           << r.baseline_ns << '\n';
    return os.str();
}

}  // namespace fmm
