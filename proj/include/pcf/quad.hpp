#pragma once

#include <optional>
#include <string_view>

#include "pcf/padic.hpp"

namespace pcf {

// Which p-adic square root of D is meant. The canonical branch has its leading
// balanced digit in {1, ..., (p-1)/2}.
enum class RootBranch { canonical, minus };

// Exact quadratic irrational (a + b*sqrt(D))/c in canonical form:
// c > 0, gcd(a, b, c) = 1, and D = 0 whenever b = 0.
class QuadInt {
public:
    QuadInt() : a_(0), b_(0), c_(1), D_(0), branch_(RootBranch::canonical) {}
    QuadInt(Int a, Int b, Int c, Int D, RootBranch branch = RootBranch::canonical);
    static QuadInt from_rational(const Rat& q);
    static QuadInt sqrt_of(Int D, RootBranch branch = RootBranch::canonical);

    const Int& a() const { return a_; }
    const Int& b() const { return b_; }
    const Int& c() const { return c_; }
    const Int& D() const { return D_; }
    RootBranch branch() const { return branch_; }

    bool is_zero() const { return a_ == 0 && b_ == 0; }
    bool is_rational() const { return b_ == 0; }
    Rat rational_value() const;

    QuadInt conjugate() const;
    QuadInt inverse() const;
    QuadInt sub_rational(const Rat& q) const;
    QuadInt add_rational(const Rat& q) const;
    QuadInt mul_rational(const Rat& q) const;

    friend QuadInt operator+(const QuadInt& x, const QuadInt& y);
    friend QuadInt operator-(const QuadInt& x, const QuadInt& y);
    friend QuadInt operator*(const QuadInt& x, const QuadInt& y);
    friend QuadInt operator/(const QuadInt& x, const QuadInt& y);

    friend bool operator==(const QuadInt& x, const QuadInt& y) {
        return x.a_ == y.a_ && x.b_ == y.b_ && x.c_ == y.c_ && x.D_ == y.D_ &&
               x.branch_ == y.branch_;
    }
    friend bool operator!=(const QuadInt& x, const QuadInt& y) { return !(x == y); }

    size_t hash() const;

    // "(a+b*sqrt(D))/c" for irrational values, "a/c" for rationals.
    std::string str() const;
    static std::optional<QuadInt> parse(std::string_view s,
                                        RootBranch branch = RootBranch::canonical);

private:
    Int a_, b_, c_, D_;
    RootBranch branch_;
    void canonicalize();
};

// True iff sqrt(D) exists in Q_p: v_p(D) even and the unit part a quadratic
// residue mod p. D = 0 yields false.
bool sqrt_exists(const Int& D, Prime p);

// Lazily extendable canonical-branch square root of D in Q_p.
// Writes D = p^(2e) * unit and maintains root^2 ≡ unit (mod p^precision).
class HenselRoot {
public:
    HenselRoot(const Int& D, Prime p, long precision = 64, long cap = 1L << 20);

    long prime() const { return p_; }
    const Int& radicand() const { return D_; }
    const Int& unit_part() const { return unit_; }
    long shift() const { return e_; }  // e with sqrt(D) = p^e * sqrt(unit)
    long precision() const { return prec_; }
    long cap() const { return cap_; }
    void set_cap(long cap) { cap_ = cap; }

    // Extends the cached root to at least `digits` digits (doubling policy).
    void ensure(long digits);

    // ±root mod p^digits, extending as needed.
    Int root_mod(long digits, RootBranch branch = RootBranch::canonical);

    // Leading balanced digit a0 of the canonical branch, in {1, ..., (p-1)/2}.
    long leading_digit() const;

    // Balanced digits of sqrt(D) itself at indices lo..hi.
    PAdicApprox digits(long lo, long hi, RootBranch branch = RootBranch::canonical);

private:
    long p_;
    Int D_;
    Int unit_;
    long e_;
    Int root_;  // canonical branch, mod p^prec_
    long prec_;
    Int pk_;    // p^prec_
    long cap_;
};

// Convenience factory matching the operation name.
inline HenselRoot hensel_sqrt(const Int& D, Prime p, long precision) {
    return HenselRoot(D, p, precision);
}

// Exact p-adic valuation of the embedded value. `root` may be null for
// rational x or when x has a zero rational part.
PadicVal vp_quad(const QuadInt& x, Prime p, HenselRoot* root = nullptr);

// v_p(A + B·sqrt(D)) for raw integer coefficients; no canonical form is
// required since common factors only shift the valuation.
PadicVal vp_root_combination(Int A, Int B, Prime p, HenselRoot& root, RootBranch branch);

// Exact balanced digits of the embedding of x at indices lo..hi. Emitted
// digits never change under later precision extension.
PAdicApprox digits_of_quad(const QuadInt& x, Prime p, HenselRoot* root, long lo, long hi);

}  // namespace pcf
