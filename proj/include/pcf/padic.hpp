#pragma once

#include <gmpxx.h>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pcf {

using Int = mpz_class;
using Rat = mpq_class;

// Builds a canonical rational from two integers (den != 0).
Rat make_rat(const Int& num, const Int& den);

// Thrown when a digit window does not reach the indices an operation needs.
struct PrecisionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when the configurable hard cap on root precision is exceeded.
struct PrecisionCapError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An odd prime, validated at construction.
struct Prime {
    long value;

    static Prime checked(long p);
    friend bool operator==(Prime a, Prime b) { return a.value == b.value; }
};

// p-adic valuation with the convention v_p(0) = +infinity.
class PadicVal {
public:
    static PadicVal infinity() { return PadicVal(true, 0); }
    static PadicVal of(long v) { return PadicVal(false, v); }

    bool is_infinite() const { return inf_; }
    long value() const {
        if (inf_) throw std::logic_error("PadicVal: value() on infinity");
        return v_;
    }

    friend PadicVal operator+(PadicVal a, PadicVal b) {
        if (a.inf_ || b.inf_) return infinity();
        return of(a.v_ + b.v_);
    }
    friend bool operator==(PadicVal a, PadicVal b) {
        return a.inf_ == b.inf_ && (a.inf_ || a.v_ == b.v_);
    }
    friend bool operator<(PadicVal a, PadicVal b) {
        if (a.inf_) return false;
        if (b.inf_) return true;
        return a.v_ < b.v_;
    }
    friend bool operator>(PadicVal a, PadicVal b) { return b < a; }
    friend bool operator<=(PadicVal a, PadicVal b) { return !(b < a); }
    friend bool operator>=(PadicVal a, PadicVal b) { return !(a < b); }
    bool operator==(long v) const { return !inf_ && v_ == v; }
    bool operator<(long v) const { return !inf_ && v_ < v; }
    bool operator<=(long v) const { return !inf_ && v_ <= v; }
    bool operator>(long v) const { return inf_ || v_ > v; }
    bool operator>=(long v) const { return inf_ || v_ >= v; }

    std::string str() const { return inf_ ? "inf" : std::to_string(v_); }

private:
    PadicVal(bool inf, long v) : inf_(inf), v_(v) {}
    bool inf_;
    long v_;
};

// v_p(n) for nonzero integers.
long vp_int(const Int& n, long p);

PadicVal vp_rational(const Rat& x, Prime p);

// Element of Z[1/p] in lowest terms: numerator / p^p_exponent.
// Zero has p_exponent 0; nonzero numerators with p_exponent > 0 are coprime to p.
class PartialQuotient {
public:
    explicit PartialQuotient(Prime p) : num_(0), pexp_(0), prime_(p.value) {}
    PartialQuotient(Prime p, Int num, long pexp);
    static PartialQuotient from_rational(Prime p, const Rat& q);

    const Int& numerator() const { return num_; }
    long p_exponent() const { return pexp_; }
    long prime() const { return prime_; }
    bool is_zero() const { return num_ == 0; }

    Rat value() const;
    PadicVal vp() const;
    int euclid_sign() const { return sgn(num_); }

    // J_p = Z[1/p] ∩ (-p/2, p/2);  K_p = Z[1/p] ∩ (-1/2, 1/2) with p_exponent >= 1.
    bool in_Jp() const;
    bool in_Kp() const;

    // "a0" when p_exponent = 0, else "a0/p^n" with the denominator written out.
    std::string str() const;

    friend bool operator==(const PartialQuotient& a, const PartialQuotient& b) {
        return a.prime_ == b.prime_ && a.pexp_ == b.pexp_ && a.num_ == b.num_;
    }
    friend bool operator!=(const PartialQuotient& a, const PartialQuotient& b) {
        return !(a == b);
    }

private:
    Int num_;
    long pexp_;
    long prime_;
};

// Window of balanced p-adic digits |d| <= (p-1)/2, little-endian from `valuation`.
// Digits below `valuation` are zero; digits up to `known_hi` are determined; when
// `exact` all digits above the window are zero as well (terminating expansion).
class PAdicApprox {
public:
    explicit PAdicApprox(Prime p)
        : prime_(p.value), valuation_(0), known_hi_(-1), exact_(true) {}

    static PAdicApprox from_digits(Prime p, long valuation, std::vector<long> digits,
                                   bool exact = false);
    // Window that is all zero on [.., known_hi] without the value being zero.
    static PAdicApprox zero_window(Prime p, long known_hi, bool exact);

    long prime() const { return prime_; }
    long valuation() const { return valuation_; }
    long precision() const { return static_cast<long>(digits_.size()); }
    const std::vector<long>& digits() const { return digits_; }
    long known_hi() const { return known_hi_; }
    bool exact() const { return exact_; }
    bool is_zero() const { return digits_.empty(); }

    // Digit at an arbitrary index; throws PrecisionError above the known window.
    long digit_at(long idx) const;

    // Exact rational value of the stored window.
    Rat truncation_value() const;

    // "p=7 v=-1 digits=[3,1,-2]"
    std::string str() const;

private:
    long prime_;
    long valuation_;
    std::vector<long> digits_;
    long known_hi_;
    bool exact_;
};

// Balanced digits of x at indices lo..hi, by exact modular arithmetic.
PAdicApprox balanced_digits(const Rat& x, Prime p, long lo, long hi);

// s(α) = Σ_{n<=0} a_n p^n  — the digits at indices up to and including 0.
PartialQuotient s_floor(const PAdicApprox& x);

// t(α) = Σ_{n<0} a_n p^n  — the strictly negative-index digits.
PartialQuotient t_floor(const PAdicApprox& x);

}  // namespace pcf
