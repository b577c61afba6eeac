// fmm: exact scheme/program verification against the multiplication tensor.
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fmm/scheme.hpp"
#include "fmm/slp.hpp"

namespace fmm {

enum class Verdict : std::uint8_t { Valid, Invalid };

struct BrentFailure {
    int a, b, c;
    Rational computed;
    int expected;  // 0 or 1
};

struct VerificationReport {
    Verdict verdict = Verdict::Invalid;
    std::vector<BrentFailure> failures;  // every failing triple, not just the first
    long equations_checked = 0;

    bool valid() const { return verdict == Verdict::Valid; }
};

/// Checks all (n*m)*(m*p)*(n*p) Brent equations
///   sum_r U[a][r]*V[b][r]*W[c][r] = T[a][b][c]
/// exactly over the rationals. Invalidity is a verdict, never an error.
VerificationReport verify_scheme(const BilinearScheme& scheme);

/// Evaluates the program symbolically (A/B values as coefficient vectors,
/// M values as (n*m)x(m*p) bilinear coefficient matrices) and checks each
/// output C_c carries coefficient T[a][b][c] on A_a*B_b. Independent of
/// extract_scheme + verify_scheme, which must agree with it.
VerificationReport verify_slp(const Slp& slp);

/// Reads the induced scheme off a program: U/V columns from the product
/// operands' linear forms, W rows from the outputs' coefficients on each
/// product. Throws ExtractError when no scheme is induced (an output that
/// is not a combination of products, a dead or cancelled-out product).
BilinearScheme extract_scheme(const Slp& slp);

struct RandomCheckResult {
    bool pass = true;
    // witness of the first failing trial
    int trial = -1;
    std::vector<std::uint64_t> a, b;  // row-major inputs mod p
    int row = -1, col = -1;
    std::uint64_t got = 0, want = 0;
};

/// Schwartz-Zippel style spot check: draws A, B uniformly over F_p and
/// compares the scheme evaluation against naive multiplication, `trials`
/// times, deterministically for a given seed. The modulus must be prime.
RandomCheckResult random_check(const BilinearScheme& scheme, std::uint64_t modulus, int trials,
                               std::uint64_t seed);
RandomCheckResult random_check(const Slp& slp, std::uint64_t modulus, int trials,
                               std::uint64_t seed);

bool is_prime_u64(std::uint64_t n);

}  // namespace fmm
