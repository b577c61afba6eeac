#include "fmm/verify.hpp"

#include <random>

#include "fmm/errors.hpp"

namespace fmm {

VerificationReport verify_scheme(const BilinearScheme& scheme) {
    const Dims d = scheme.dims();
    const MatMulTensor tensor = matmul_tensor(d);
    const int na = d.n * d.m, nb = d.m * d.p, nc = d.n * d.p;
    const int R = scheme.rank();
    VerificationReport rep;
    for (int a = 0; a < na; ++a) {
        for (int b = 0; b < nb; ++b) {
            // precompute U[a][r]*V[b][r] once per (a, b)
            std::vector<Rational> uv(static_cast<size_t>(R));
            for (int r = 0; r < R; ++r) uv[size_t(r)] = scheme.u()(a, r) * scheme.v()(b, r);
            for (int c = 0; c < nc; ++c) {
                Rational sum;
                for (int r = 0; r < R; ++r) {
                    if (!uv[size_t(r)].is_zero() && !scheme.w()(c, r).is_zero())
                        sum += uv[size_t(r)] * scheme.w()(c, r);
                }
                const int expected = tensor.entry(a, b, c) ? 1 : 0;
                ++rep.equations_checked;
                if (sum != Rational(expected)) rep.failures.push_back({a, b, c, sum, expected});
            }
        }
    }
    rep.verdict = rep.failures.empty() ? Verdict::Valid : Verdict::Invalid;
    return rep;
}

namespace {

// Symbolic value of a program node: coefficients over the A-entries, the
// B-entries, or the full A x B product grid.
struct SymbolicEval {
    const Slp& slp;
    int na, nb;
    std::vector<std::vector<Rational>> vec;       // A/B kinds
    std::vector<std::vector<Rational>> bilinear;  // M kind, na*nb row-major

    explicit SymbolicEval(const Slp& s)
        : slp(s), na(s.num_inputs_a()), nb(s.num_inputs_b()), vec(s.num_values()),
          bilinear(s.num_values()) {
        for (int i = 0; i < na; ++i) {
            vec[size_t(s.a_input(i))].assign(size_t(na), Rational(0));
            vec[size_t(s.a_input(i))][size_t(i)] = Rational(1);
        }
        for (int i = 0; i < nb; ++i) {
            vec[size_t(s.b_input(i))].assign(size_t(nb), Rational(0));
            vec[size_t(s.b_input(i))][size_t(i)] = Rational(1);
        }
        run();
    }

    void run() {
        for (const auto& ins : slp.instrs) {
            if (const auto* lin = std::get_if<Slp::Lin>(&ins)) {
                if (slp.kinds[size_t(lin->dst)] == Kind::M) {
                    auto& dst = bilinear[size_t(lin->dst)];
                    dst = bilinear[size_t(lin->src1)];
                    const auto& rhs = bilinear[size_t(lin->src2)];
                    for (size_t i = 0; i < dst.size(); ++i)
                        dst[i] = lin->c1 * dst[i] + lin->c2 * rhs[i];
                } else {
                    auto& dst = vec[size_t(lin->dst)];
                    dst = vec[size_t(lin->src1)];
                    const auto& rhs = vec[size_t(lin->src2)];
                    for (size_t i = 0; i < dst.size(); ++i)
                        dst[i] = lin->c1 * dst[i] + lin->c2 * rhs[i];
                }
            } else if (const auto* sc = std::get_if<Slp::Scale>(&ins)) {
                if (slp.kinds[size_t(sc->dst)] == Kind::M) {
                    auto& dst = bilinear[size_t(sc->dst)];
                    dst = bilinear[size_t(sc->src)];
                    for (auto& x : dst) x *= sc->c;
                } else {
                    auto& dst = vec[size_t(sc->dst)];
                    dst = vec[size_t(sc->src)];
                    for (auto& x : dst) x *= sc->c;
                }
            } else {
                const auto& mul = std::get<Slp::Mul>(ins);
                auto& dst = bilinear[size_t(mul.dst)];
                dst.assign(size_t(na) * size_t(nb), Rational(0));
                const auto& lhs = vec[size_t(mul.a)];
                const auto& rhs = vec[size_t(mul.b)];
                for (int a = 0; a < na; ++a) {
                    if (lhs[size_t(a)].is_zero()) continue;
                    for (int b = 0; b < nb; ++b)
                        dst[size_t(a) * size_t(nb) + size_t(b)] = lhs[size_t(a)] * rhs[size_t(b)];
                }
            }
        }
    }
};

}  // namespace

VerificationReport verify_slp(const Slp& slp) {
    validate(slp);
    for (ValueId out : slp.outputs)
        if (slp.kinds[size_t(out)] != Kind::M)
            throw KindError("malformed program: output is not a combination of products");
    const SymbolicEval eval(slp);
    const Dims d = slp.dims;
    const MatMulTensor tensor = matmul_tensor(d);
    VerificationReport rep;
    const int na = eval.na, nb = eval.nb;
    for (size_t c = 0; c < slp.outputs.size(); ++c) {
        const auto& grid = eval.bilinear[size_t(slp.outputs[c])];
        for (int a = 0; a < na; ++a) {
            for (int b = 0; b < nb; ++b) {
                const int expected = tensor.entry(a, b, int(c)) ? 1 : 0;
                const Rational& got = grid[size_t(a) * size_t(nb) + size_t(b)];
                ++rep.equations_checked;
                if (got != Rational(expected))
                    rep.failures.push_back({a, b, int(c), got, expected});
            }
        }
    }
    rep.verdict = rep.failures.empty() ? Verdict::Valid : Verdict::Invalid;
    return rep;
}

BilinearScheme extract_scheme(const Slp& slp) {
    validate(slp);
    const int R = slp.mul_count();
    if (R == 0) throw ExtractError("program has no products");
    const int na = slp.num_inputs_a(), nb = slp.num_inputs_b();
    const int nc = slp.dims.n * slp.dims.p;

    // linear form of every A/B value over the inputs; M values over products
    std::vector<std::vector<Rational>> form(slp.num_values());
    for (int i = 0; i < na; ++i) {
        form[size_t(slp.a_input(i))].assign(size_t(na), Rational(0));
        form[size_t(slp.a_input(i))][size_t(i)] = Rational(1);
    }
    for (int i = 0; i < nb; ++i) {
        form[size_t(slp.b_input(i))].assign(size_t(nb), Rational(0));
        form[size_t(slp.b_input(i))][size_t(i)] = Rational(1);
    }

    CoeffMatrix u(na, R), v(nb, R), w(nc, R);
    int next_product = 0;
    for (const auto& ins : slp.instrs) {
        if (const auto* lin = std::get_if<Slp::Lin>(&ins)) {
            auto dst = form[size_t(lin->src1)];
            const auto& rhs = form[size_t(lin->src2)];
            for (size_t i = 0; i < dst.size(); ++i) dst[i] = lin->c1 * dst[i] + lin->c2 * rhs[i];
            form[size_t(lin->dst)] = std::move(dst);
        } else if (const auto* sc = std::get_if<Slp::Scale>(&ins)) {
            auto dst = form[size_t(sc->src)];
            for (auto& x : dst) x *= sc->c;
            form[size_t(sc->dst)] = std::move(dst);
        } else {
            const auto& mul = std::get<Slp::Mul>(ins);
            const int r = next_product++;
            for (int a = 0; a < na; ++a) u(a, r) = form[size_t(mul.a)][size_t(a)];
            for (int b = 0; b < nb; ++b) v(b, r) = form[size_t(mul.b)][size_t(b)];
            form[size_t(mul.dst)].assign(size_t(R), Rational(0));
            form[size_t(mul.dst)][size_t(r)] = Rational(1);
        }
    }
    for (int c = 0; c < nc; ++c) {
        const ValueId out = slp.outputs[size_t(c)];
        if (slp.kinds[size_t(out)] != Kind::M)
            throw ExtractError("output C" + std::to_string(c) +
                               " is not a combination of products");
        for (int r = 0; r < R; ++r) w(c, r) = form[size_t(out)][size_t(r)];
    }
    try {
        return BilinearScheme(slp.dims, std::move(u), std::move(v), std::move(w));
    } catch (const ArgError& e) {
        throw ExtractError(std::string("program induces no rank-") + std::to_string(R) +
                           " scheme: " + e.what());
    }
}

// ---------------------------------------------------------------------
// Randomized check over a prime field

namespace {

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
    return std::uint64_t((unsigned __int128)a * b % p);
}

std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t p) {
    std::uint64_t r = 1 % p;
    a %= p;
    while (e > 0) {
        if (e & 1) r = mulmod(r, a, p);
        a = mulmod(a, a, p);
        e >>= 1;
    }
    return r;
}

std::uint64_t invmod(std::uint64_t a, std::uint64_t p) { return powmod(a, p - 2, p); }

std::uint64_t rational_mod(const Rational& q, std::uint64_t p) {
    mpz_class num = q.num() % p;
    if (num < 0) num += p;
    mpz_class den = q.den() % p;
    if (den == 0) throw ArgError("denominator divisible by the modulus");
    return mulmod(num.get_ui(), invmod(den.get_ui(), p), p);
}

std::uint64_t addmod(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
    std::uint64_t s = a + b;
    if (s >= p || s < a) s -= p;
    return s;
}

// C = A*B naively over F_p; all matrices row-major.
std::vector<std::uint64_t> naive_mod(const std::vector<std::uint64_t>& a,
                                     const std::vector<std::uint64_t>& b, Dims d,
                                     std::uint64_t p) {
    std::vector<std::uint64_t> c(size_t(d.n) * size_t(d.p), 0);
    for (int i = 0; i < d.n; ++i)
        for (int k = 0; k < d.m; ++k) {
            const std::uint64_t aik = a[size_t(i) * size_t(d.m) + size_t(k)];
            if (aik == 0) continue;
            for (int j = 0; j < d.p; ++j)
                c[size_t(i) * size_t(d.p) + size_t(j)] =
                    addmod(c[size_t(i) * size_t(d.p) + size_t(j)],
                           mulmod(aik, b[size_t(k) * size_t(d.p) + size_t(j)], p), p);
        }
    return c;
}

std::vector<std::uint64_t> eval_scheme_mod(const BilinearScheme& s,
                                           const std::vector<std::uint64_t>& a,
                                           const std::vector<std::uint64_t>& b,
                                           std::uint64_t p) {
    const int R = s.rank();
    std::vector<std::uint64_t> m(size_t(R), 0);
    for (int r = 0; r < R; ++r) {
        std::uint64_t lhs = 0, rhs = 0;
        for (int i = 0; i < s.u().rows(); ++i)
            if (!s.u()(i, r).is_zero())
                lhs = addmod(lhs, mulmod(rational_mod(s.u()(i, r), p), a[size_t(i)], p), p);
        for (int i = 0; i < s.v().rows(); ++i)
            if (!s.v()(i, r).is_zero())
                rhs = addmod(rhs, mulmod(rational_mod(s.v()(i, r), p), b[size_t(i)], p), p);
        m[size_t(r)] = mulmod(lhs, rhs, p);
    }
    std::vector<std::uint64_t> c(size_t(s.w().rows()), 0);
    for (int i = 0; i < s.w().rows(); ++i)
        for (int r = 0; r < R; ++r)
            if (!s.w()(i, r).is_zero())
                c[size_t(i)] = addmod(c[size_t(i)], mulmod(rational_mod(s.w()(i, r), p),
                                                           m[size_t(r)], p), p);
    return c;
}

std::vector<std::uint64_t> eval_slp_mod(const Slp& slp, const std::vector<std::uint64_t>& a,
                                        const std::vector<std::uint64_t>& b, std::uint64_t p) {
    std::vector<std::uint64_t> val(slp.num_values(), 0);
    for (int i = 0; i < slp.num_inputs_a(); ++i) val[size_t(slp.a_input(i))] = a[size_t(i)];
    for (int i = 0; i < slp.num_inputs_b(); ++i) val[size_t(slp.b_input(i))] = b[size_t(i)];
    for (const auto& ins : slp.instrs) {
        if (const auto* lin = std::get_if<Slp::Lin>(&ins)) {
            val[size_t(lin->dst)] =
                addmod(mulmod(rational_mod(lin->c1, p), val[size_t(lin->src1)], p),
                       mulmod(rational_mod(lin->c2, p), val[size_t(lin->src2)], p), p);
        } else if (const auto* sc = std::get_if<Slp::Scale>(&ins)) {
            val[size_t(sc->dst)] = mulmod(rational_mod(sc->c, p), val[size_t(sc->src)], p);
        } else {
            const auto& mul = std::get<Slp::Mul>(ins);
            val[size_t(mul.dst)] = mulmod(val[size_t(mul.a)], val[size_t(mul.b)], p);
        }
    }
    std::vector<std::uint64_t> c(slp.outputs.size());
    for (size_t i = 0; i < slp.outputs.size(); ++i) c[i] = val[size_t(slp.outputs[i])];
    return c;
}

template <typename EvalFn>
RandomCheckResult random_check_impl(Dims d, std::uint64_t modulus, int trials,
                                    std::uint64_t seed, EvalFn&& eval) {
    if (!is_prime_u64(modulus)) throw ArgError("modulus " + std::to_string(modulus) + " is not prime");
    if (modulus <= 2) throw ArgError("modulus must exceed 2");
    if (trials < 1) throw ArgError("trials must be >= 1");
    std::mt19937_64 rng(seed);
    auto draw = [&](size_t count) {
        std::vector<std::uint64_t> v(count);
        for (auto& x : v) x = rng() % modulus;
        return v;
    };
    RandomCheckResult res;
    for (int t = 0; t < trials; ++t) {
        const auto a = draw(size_t(d.n) * size_t(d.m));
        const auto b = draw(size_t(d.m) * size_t(d.p));
        const auto got = eval(a, b);
        const auto want = naive_mod(a, b, d, modulus);
        for (size_t i = 0; i < want.size(); ++i) {
            if (got[i] != want[i]) {
                res.pass = false;
                res.trial = t;
                res.a = a;
                res.b = b;
                res.row = int(i) / d.p;
                res.col = int(i) % d.p;
                res.got = got[i];
                res.want = want[i];
                return res;
            }
        }
    }
    return res;
}

}  // namespace

bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t q : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        if (n % q == 0) return n == q;
    }
    std::uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    // deterministic Miller-Rabin witness set for 64-bit inputs
    for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        std::uint64_t x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool witness = true;
        for (int i = 1; i < s; ++i) {
            x = mulmod(x, x, n);
            if (x == n - 1) {
                witness = false;
                break;
            }
        }
        if (witness) return false;
    }
    return true;
}

RandomCheckResult random_check(const BilinearScheme& scheme, std::uint64_t modulus, int trials,
                               std::uint64_t seed) {
    return random_check_impl(scheme.dims(), modulus, trials, seed,
                             [&](const auto& a, const auto& b) {
                                 return eval_scheme_mod(scheme, a, b, modulus);
                             });
}

RandomCheckResult random_check(const Slp& slp, std::uint64_t modulus, int trials,
                               std::uint64_t seed) {
    for (ValueId out : slp.outputs)
        if (slp.kinds[size_t(out)] != Kind::M)
            throw KindError("malformed program: output is not a combination of products");
    return random_check_impl(slp.dims, modulus, trials, seed,
                             [&](const auto& a, const auto& b) {
                                 return eval_slp_mod(slp, a, b, modulus);
                             });
}

}  // namespace fmm
