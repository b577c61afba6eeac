#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fmm/builtins.hpp"
#include "fmm/scheme.hpp"
#include "fmm/slp.hpp"
#include "support.hpp"

using namespace fmm;

TEST_CASE("matmul tensor entries") {
    const MatMulTensor t1 = matmul_tensor({1, 1, 1});
    CHECK(t1.entry(0, 0, 0));
    CHECK(t1.ones() == 1);

    const MatMulTensor t2 = matmul_tensor({2, 2, 2});
    int ones = 0;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (int c = 0; c < 4; ++c) ones += t2.entry(a, b, c) ? 1 : 0;
    CHECK(ones == 8);

    const MatMulTensor t3 = matmul_tensor({3, 3, 3});
    ones = 0;
    for (int a = 0; a < 9; ++a)
        for (int b = 0; b < 9; ++b)
            for (int c = 0; c < 9; ++c) ones += t3.entry(a, b, c) ? 1 : 0;
    CHECK(ones == 27);
    CHECK(t3.entry(1, 3, 0));  // A_1 * B_3 feeds C_0

    CHECK_THROWS_AS(matmul_tensor({0, 1, 1}), ArgError);
}

TEST_CASE("tensor one-count equals n*m*p across shapes") {
    for (Dims d : {Dims{1, 2, 3}, Dims{2, 2, 2}, Dims{3, 1, 2}, Dims{2, 3, 2}, Dims{4, 2, 1}}) {
        const MatMulTensor t = matmul_tensor(d);
        long ones = 0;
        for (int a = 0; a < d.n * d.m; ++a)
            for (int b = 0; b < d.m * d.p; ++b)
                for (int c = 0; c < d.n * d.p; ++c) ones += t.entry(a, b, c) ? 1 : 0;
        CHECK(ones == long(d.n) * d.m * d.p);
        CHECK(t.ones() == ones);
    }
}

TEST_CASE("scheme construction rejects bad shapes") {
    CoeffMatrix u(1, 1), v(1, 1), w(1, 1);
    u(0, 0) = v(0, 0) = w(0, 0) = Rational(1);
    CHECK_NOTHROW(BilinearScheme({1, 1, 1}, u, v, w));

    CoeffMatrix v_wide(1, 2);
    v_wide(0, 0) = v_wide(0, 1) = Rational(1);
    CHECK_THROWS_AS(BilinearScheme({1, 1, 1}, u, v_wide, w), ArgError);  // rank mismatch

    CoeffMatrix u_tall(2, 1);
    u_tall(0, 0) = Rational(1);
    u_tall(1, 0) = Rational(1);
    CHECK_THROWS_AS(BilinearScheme({1, 1, 1}, u_tall, v, w), ArgError);  // row count

    CoeffMatrix w_zero(1, 1);  // all-zero column inflates the claimed rank
    CHECK_THROWS_AS(BilinearScheme({1, 1, 1}, u, v, w_zero), ArgError);
}

TEST_CASE("naive addition counts of the bundled schemes") {
    const OpCountReport naive = naive_addition_count(builtin_scheme("stapleton59-naive"));
    CHECK(naive.adds_total() == 110);
    CHECK(naive.adds_a == 31);
    CHECK(naive.adds_b == 33);
    CHECK(naive.adds_c == 46);
    CHECK(naive.muls == 23);
    CHECK(naive.scales == 0);

    const OpCountReport file = naive_addition_count(builtin_scheme("stapleton59-file"));
    CHECK(file.adds_total() == 110);  // sign flips do not change sparsity
    CHECK(file.muls == 23);

    const OpCountReport strassen = naive_addition_count(builtin_scheme("strassen"));
    CHECK(strassen.adds_total() == 18);
    CHECK(strassen.adds_a == 5);
    CHECK(strassen.adds_b == 5);
    CHECK(strassen.adds_c == 8);
    CHECK(strassen.muls == 7);
}

TEST_CASE("naive count tallies non-unit coefficients as scales") {
    BilinearScheme s = test::trivial_scheme({1, 1, 1});
    s = test::scale_product(s, 0, Rational(2), Rational(3));
    const OpCountReport r = naive_addition_count(s);
    CHECK(r.adds_total() == 0);
    CHECK(r.scales == 3);  // 2, 3 and 1/6
}

TEST_CASE("naive schedule of a scheme") {
    const Slp naive = scheme_to_naive_slp(builtin_scheme("stapleton59-naive"));
    const OpCountReport r = slp_addition_count(naive);
    CHECK(r.adds_total() == 110);
    CHECK(r.muls == 23);

    const Slp rank1 = scheme_to_naive_slp(test::trivial_scheme({1, 1, 1}));
    const OpCountReport r1 = slp_addition_count(rank1);
    CHECK(r1.adds_total() == 0);
    CHECK(r1.muls == 1);
    CHECK(rank1.instrs.size() == 1);  // single product, outputs alias it

    const Slp strassen = scheme_to_naive_slp(builtin_scheme("strassen"));
    const OpCountReport rs = slp_addition_count(strassen);
    CHECK(rs.adds_total() == 18);
    CHECK(rs.muls == 7);
}

TEST_CASE("schedule count equals naive count for random schemes") {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        const BilinearScheme s = test::random_valid_scheme(seed);
        const OpCountReport a = naive_addition_count(s);
        const OpCountReport b = slp_addition_count(scheme_to_naive_slp(s));
        CAPTURE(seed);
        CHECK(a.adds_total() == b.adds_total());
        CHECK(a.muls == b.muls);
    }
}

TEST_CASE("59-addition schedule counts") {
    const Slp slp = builtin_slp("stapleton59-slp");
    const OpCountReport r = slp_addition_count(slp);
    CHECK(r.adds_total() == 59);
    CHECK(r.adds_a == 15);
    CHECK(r.adds_b == 15);
    CHECK(r.adds_c == 29);
    CHECK(r.muls == 23);
    CHECK(r.scales == 0);
}

TEST_CASE("empty program with aliased outputs counts zero") {
    SlpBuilder b({1, 1, 1});
    b.set_output(0, b.a_input(0));
    const Slp slp = b.finish();
    const OpCountReport r = slp_addition_count(slp);
    CHECK(r.adds_total() == 0);
    CHECK(r.muls == 0);
    CHECK(r.scales == 0);
}

TEST_CASE("builder enforces the SSA and kind rules") {
    SlpBuilder b({2, 2, 2});
    const ValueId t0 = b.fold_terms({{Rational(1), b.a_input(0)}, {Rational(1), b.a_input(3)}}, "t0");
    CHECK_THROWS_AS(
        b.fold_terms({{Rational(1), b.a_input(1)}, {Rational(1), b.a_input(2)}}, "t0"),
        SsaError);  // duplicate definition
    CHECK_THROWS_AS(
        b.fold_terms({{Rational(1), b.a_input(0)}, {Rational(1), b.b_input(0)}}, "x0"),
        KindError);  // mixed kinds in a combination
    CHECK_THROWS_AS(b.add_mul(b.b_input(0), b.b_input(1), "M0"), KindError);
    const ValueId m0 = b.add_mul(t0, b.b_input(0), "M0");
    CHECK_THROWS_AS(b.add_mul(m0, b.b_input(0), "M1"), KindError);  // product of products
    CHECK_THROWS_AS(b.fold_terms({{Rational(0), t0}, {Rational(1), t0}}, "x1"), ArgError);
    for (int c = 0; c < 4; ++c) b.set_output(c, m0);
    CHECK_NOTHROW(b.finish());
}

TEST_CASE("validate flags broken programs") {
    // use before definition
    Slp slp;
    slp.dims = {1, 1, 1};
    slp.kinds = {Kind::A, Kind::B, Kind::M};
    slp.names = {"A0", "B0", "M0"};
    slp.instrs.push_back(Slp::Mul{2, 0, 1});
    slp.outputs = {2};
    CHECK_NOTHROW(validate(slp));

    Slp bad = slp;
    bad.instrs[0] = Slp::Mul{2, 0, 3};  // source 3 does not exist yet
    CHECK_THROWS_AS(validate(bad), SsaError);

    bad = slp;
    bad.instrs[0] = Slp::Mul{2, 1, 0};  // (B, A) operand order
    CHECK_THROWS_AS(validate(bad), KindError);

    bad = slp;
    bad.outputs = {};
    CHECK_THROWS_AS(validate(bad), ArgError);

    bad = slp;
    bad.kinds[2] = Kind::A;
    CHECK_THROWS_AS(validate(bad), KindError);
}

TEST_CASE("builder output table must be complete") {
    SlpBuilder b({1, 1, 1});
    CHECK_THROWS_AS(b.finish(), SsaError);  // C0 never defined
}

TEST_CASE("single-pass validation holds for the bundled programs") {
    CHECK_NOTHROW(validate(builtin_slp("stapleton59-slp")));
    CHECK_NOTHROW(validate(scheme_to_naive_slp(builtin_scheme("stapleton59-naive"))));
    CHECK_NOTHROW(validate(scheme_to_naive_slp(builtin_scheme("strassen"))));
}
