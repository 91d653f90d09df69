#include <random>

#include "doctest.h"
#include "pcf/quad.hpp"

using namespace pcf;

TEST_CASE("sqrt existence") {
    Prime p5 = Prime::checked(5);
    CHECK(sqrt_exists(Int(79), p5));
    CHECK_FALSE(sqrt_exists(Int(2), p5));
    CHECK(sqrt_exists(Int(-975), p5));  // v_5 = 2, unit -39 ≡ 1 (mod 5)
    CHECK_FALSE(sqrt_exists(Int(0), p5));
    CHECK_FALSE(sqrt_exists(Int(5), p5));  // odd valuation
    // unit squares coprime to p are always residues
    for (long k : {1L, 2L, 3L, 4L, 6L, 11L}) CHECK(sqrt_exists(Int(k * k), Prime::checked(7)));
}

TEST_CASE("hensel roots match the paper expansions") {
    Prime p7 = Prime::checked(7);
    HenselRoot r30(Int(30), p7, 2);
    CHECK(r30.leading_digit() == 3);
    PAdicApprox d30 = r30.digits(0, 1);
    CHECK(d30.digits() == std::vector<long>{3, -3});  // sqrt(30) = 3 - 3p + ...

    Prime p5 = Prime::checked(5);
    HenselRoot r79(Int(79), p5, 4);
    CHECK(r79.digits(0, 3).digits() == std::vector<long>{2, 0, 2, 1});  // 2+2p^2+p^3+...

    CHECK_THROWS_AS(HenselRoot(Int(2), p5), std::domain_error);
    CHECK_THROWS_AS(HenselRoot(Int(0), p5), std::domain_error);
}

TEST_CASE("hensel root defining property and branch") {
    std::mt19937_64 rng(5);
    for (long pv : {3L, 5L, 13L}) {
        Prime p = Prime::checked(pv);
        for (int i = 0; i < 40; ++i) {
            long D = 2 + static_cast<long>(rng() % 5000);
            if (mpz_perfect_square_p(Int(D).get_mpz_t()) || !sqrt_exists(Int(D), p)) continue;
            HenselRoot root(Int(D), p, 8);
            long k = 1 + static_cast<long>(rng() % 200);
            Int r = root.root_mod(k);
            Int mod;
            mpz_ui_pow_ui(mod.get_mpz_t(), pv, k);
            Int lhs = r * r % mod;
            Int rhs = root.unit_part() % mod;
            if (rhs < 0) rhs += mod;
            CHECK(lhs == rhs);
            CHECK(root.leading_digit() >= 1);
            CHECK(root.leading_digit() <= (pv - 1) / 2);
            // the two branches are negatives of each other
            Int sum = (root.root_mod(k) + root.root_mod(k, RootBranch::minus)) % mod;
            CHECK(sum == 0);
        }
    }
}

TEST_CASE("sub_rational and inverse are exact") {
    QuadInt x(3, 1, 1, 30);
    CHECK(x.sub_rational(Rat(-1)) == QuadInt(4, 1, 1, 30));
    CHECK(x.sub_rational(Rat(0)) == x);
    QuadInt y(2, 1, 75, 79);
    CHECK(y.sub_rational(Rat(-7, 25)) == QuadInt(23, 1, 75, 79));

    CHECK(QuadInt(0, 1, 1, 30).inverse() == QuadInt(0, 1, 30, 30));  // 1/sqrt(30) = sqrt(30)/30
    CHECK(QuadInt::from_rational(Rat(1)).inverse() == QuadInt::from_rational(Rat(1)));
    CHECK_THROWS_AS(QuadInt().inverse(), std::domain_error);

    std::mt19937_64 rng(17);
    for (int i = 0; i < 300; ++i) {
        long a = static_cast<long>(rng() % 41) - 20;
        long b = static_cast<long>(rng() % 9) - 4;
        long c = 1 + static_cast<long>(rng() % 20);
        long D = b == 0 ? 0 : 30;
        QuadInt q(a, b, c, D);
        if (q.is_zero()) continue;
        CHECK(q * q.inverse() == QuadInt::from_rational(Rat(1)));
        CHECK(q.inverse().inverse() == q);
    }
}

TEST_CASE("conjugation") {
    QuadInt x(3, 1, 1, 30);
    CHECK(x.conjugate() == QuadInt(3, -1, 1, 30));
    CHECK(x.conjugate().conjugate() == x);
    QuadInt r = QuadInt::from_rational(Rat(22, 7));
    CHECK(r.conjugate() == r);

    std::mt19937_64 rng(23);
    for (int i = 0; i < 200; ++i) {
        long a = static_cast<long>(rng() % 21) - 10;
        long c = 1 + static_cast<long>(rng() % 9);
        QuadInt q(a, 1 + static_cast<long>(rng() % 3), c, 79);
        Rat sub(static_cast<long>(rng() % 15) - 7, 1 + static_cast<long>(rng() % 24));
        sub.canonicalize();
        QuadInt lhs = q.sub_rational(sub);
        if (lhs.is_zero()) continue;
        CHECK(lhs.inverse().conjugate() == q.conjugate().sub_rational(sub).inverse());
    }
}

TEST_CASE("valuations of quadratic irrationals") {
    Prime p7 = Prime::checked(7);
    HenselRoot r30(Int(30), p7);
    CHECK(vp_quad(QuadInt(3, 1, 1, 30), p7, &r30) == 0);
    CHECK(vp_quad(QuadInt(3, -1, 1, 30), p7, &r30) == 1);  // norm -21 has v_7 = 1

    Prime p5 = Prime::checked(5);
    HenselRoot r79(Int(79), p5);
    CHECK(vp_quad(QuadInt(2, 1, 75, 79), p5, &r79) == -2);
    CHECK(vp_quad(QuadInt(2, -1, 75, 79), p5, &r79) == 0);

    CHECK(vp_quad(QuadInt(), p5).is_infinite());
    CHECK(vp_quad(QuadInt::from_rational(Rat(75)), p5) == 2);
    CHECK(vp_quad(QuadInt(0, 1, 1, -975), p5) == 1);  // v_5(D) = 2
}

TEST_CASE("valuation is additive") {
    std::mt19937_64 rng(29);
    Prime p5 = Prime::checked(5);
    HenselRoot root(Int(79), p5);
    for (int i = 0; i < 300; ++i) {
        long a1 = static_cast<long>(rng() % 61) - 30;
        long a2 = static_cast<long>(rng() % 61) - 30;
        long b1 = static_cast<long>(rng() % 7) - 3;
        long b2 = static_cast<long>(rng() % 7) - 3;
        long c1 = 1 + static_cast<long>(rng() % 50);
        long c2 = 1 + static_cast<long>(rng() % 50);
        QuadInt x(a1, b1, c1, b1 ? 79 : 0), y(a2, b2, c2, b2 ? 79 : 0);
        if (x.is_zero() || y.is_zero()) continue;
        PadicVal vx = vp_quad(x, p5, &root), vy = vp_quad(y, p5, &root);
        CHECK(vp_quad(x * y, p5, &root) == PadicVal::of(vx.value() + vy.value()));
        CHECK(vp_quad(x.inverse(), p5, &root) == PadicVal::of(-vx.value()));
    }
}

TEST_CASE("digits of embedded values") {
    Prime p7 = Prime::checked(7);
    HenselRoot r30(Int(30), p7);
    QuadInt s30 = QuadInt::sqrt_of(Int(30));
    CHECK(digits_of_quad(s30, p7, &r30, 0, 1).digits() == std::vector<long>{3, -3});

    Prime p5 = Prime::checked(5);
    PAdicApprox d = digits_of_quad(QuadInt::from_rational(Rat(1, 5)), p5, nullptr, -1, 0);
    CHECK(d.valuation() == -1);
    CHECK(d.digits() == std::vector<long>{1, 0});

    // digit stability under precision extension
    QuadInt x(2, 1, 75, 79);
    HenselRoot r79(Int(79), p5, 8);
    PAdicApprox before = digits_of_quad(x, p5, &r79, -2, 20);
    r79.ensure(2048);
    PAdicApprox after = digits_of_quad(x, p5, &r79, -2, 20);
    CHECK(before.digits() == after.digits());
    CHECK(before.valuation() == after.valuation());
}

TEST_CASE("canonical form uniqueness and validation") {
    CHECK(QuadInt(2, 2, 4, 30) == QuadInt(1, 1, 2, 30));
    CHECK(QuadInt(1, 1, -2, 30) == QuadInt(-1, -1, 2, 30));
    CHECK(QuadInt(3, 0, 1, 30) == QuadInt::from_rational(Rat(3)));  // D dropped for rationals
    CHECK_THROWS_AS(QuadInt(1, 1, 0, 30), std::invalid_argument);
    CHECK_THROWS_AS(QuadInt(1, 1, 1, 36), std::invalid_argument);  // perfect square D
    CHECK_THROWS_AS(QuadInt(1, 1, 1, 0), std::invalid_argument);
    CHECK(QuadInt(1, 1, 1, 30) != QuadInt(1, 1, 1, 30, RootBranch::minus));
}

TEST_CASE("serialization round trip") {
    QuadInt x(3, 1, 1, 30);
    CHECK(x.str() == "(3+1*sqrt(30))/1");
    CHECK(QuadInt::parse(x.str()) == x);

    QuadInt y(2, -1, 75, 79);
    CHECK(y.str() == "(2-1*sqrt(79))/75");
    CHECK(QuadInt::parse(y.str()) == y);

    QuadInt r = QuadInt::from_rational(Rat(22, 7));
    CHECK(r.str() == "22/7");
    CHECK(QuadInt::parse("22/7") == r);
    CHECK(QuadInt::parse("-5") == QuadInt::from_rational(Rat(-5)));
    CHECK(QuadInt::parse("(0+1*sqrt(-975))/1") == QuadInt::sqrt_of(Int(-975)));

    CHECK_FALSE(QuadInt::parse("abc").has_value());
    CHECK_FALSE(QuadInt::parse("1/0").has_value());
    CHECK_FALSE(QuadInt::parse("22/7 ").has_value());
    CHECK_FALSE(QuadInt::parse("(3+sqrt(30))/1").has_value());  // b is mandatory
    CHECK_THROWS_AS(QuadInt::parse("(1+1*sqrt(4))/1"), std::invalid_argument);

    CHECK(QuadInt::parse("(0+1*sqrt(-975))/1", RootBranch::minus)->branch() ==
          RootBranch::minus);
}
