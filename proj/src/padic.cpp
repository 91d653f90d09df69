#include "pcf/padic.hpp"

#include <sstream>

namespace pcf {

Rat make_rat(const Int& num, const Int& den) {
    if (den == 0) throw std::invalid_argument("make_rat: zero denominator");
    Rat q(num, den);
    q.canonicalize();
    return q;
}

Prime Prime::checked(long p) {
    if (p < 3 || p % 2 == 0)
        throw std::invalid_argument("prime: must be an odd prime >= 3");
    Int z(p);
    if (mpz_probab_prime_p(z.get_mpz_t(), 30) == 0)
        throw std::invalid_argument("prime: " + std::to_string(p) + " is not prime");
    return Prime{p};
}

long vp_int(const Int& n, long p) {
    if (n == 0) throw std::invalid_argument("vp_int: zero");
    Int rem, pz(p);
    return static_cast<long>(mpz_remove(rem.get_mpz_t(), n.get_mpz_t(), pz.get_mpz_t()));
}

PadicVal vp_rational(const Rat& x, Prime p) {
    if (x == 0) return PadicVal::infinity();
    return PadicVal::of(vp_int(x.get_num(), p.value) - vp_int(x.get_den(), p.value));
}

PartialQuotient::PartialQuotient(Prime p, Int num, long pexp)
    : num_(std::move(num)), pexp_(pexp), prime_(p.value) {
    if (pexp_ < 0) throw std::invalid_argument("PartialQuotient: negative p exponent");
    if (num_ == 0) {
        pexp_ = 0;
        return;
    }
    while (pexp_ > 0 && mpz_divisible_ui_p(num_.get_mpz_t(), prime_)) {
        mpz_divexact_ui(num_.get_mpz_t(), num_.get_mpz_t(), prime_);
        --pexp_;
    }
    if (mpz_divisible_ui_p(num_.get_mpz_t(), prime_))
        throw std::invalid_argument("PartialQuotient: numerator not coprime to p");
}

PartialQuotient PartialQuotient::from_rational(Prime p, const Rat& q) {
    if (q == 0) return PartialQuotient(p);
    Int den = q.get_den();
    long pexp = vp_int(den, p.value);
    Int pw;
    mpz_ui_pow_ui(pw.get_mpz_t(), p.value, pexp);
    if (den != pw)
        throw std::invalid_argument("PartialQuotient: denominator is not a power of p");
    return PartialQuotient(p, q.get_num(), pexp);
}

Rat PartialQuotient::value() const {
    Int den;
    mpz_ui_pow_ui(den.get_mpz_t(), prime_, pexp_);
    return make_rat(num_, den);
}

PadicVal PartialQuotient::vp() const {
    if (num_ == 0) return PadicVal::infinity();
    if (pexp_ > 0) return PadicVal::of(-pexp_);
    return PadicVal::of(vp_int(num_, prime_));
}

bool PartialQuotient::in_Jp() const {
    // 2|num| < p^(n+1)
    Int bound;
    mpz_ui_pow_ui(bound.get_mpz_t(), prime_, pexp_ + 1);
    return 2 * abs(num_) < bound;
}

bool PartialQuotient::in_Kp() const {
    if (pexp_ < 1) return false;
    Int bound;
    mpz_ui_pow_ui(bound.get_mpz_t(), prime_, pexp_);
    return 2 * abs(num_) < bound;
}

std::string PartialQuotient::str() const {
    if (pexp_ == 0) return num_.get_str();
    Int den;
    mpz_ui_pow_ui(den.get_mpz_t(), prime_, pexp_);
    return num_.get_str() + "/" + den.get_str();
}

PAdicApprox PAdicApprox::from_digits(Prime p, long valuation, std::vector<long> digits,
                                     bool exact) {
    PAdicApprox r(p);
    long half = (p.value - 1) / 2;
    for (long d : digits)
        if (d < -half || d > half)
            throw std::invalid_argument("PAdicApprox: digit out of balanced range");
    long hi = valuation + static_cast<long>(digits.size()) - 1;
    // trim leading zeros into the valuation
    size_t lead = 0;
    while (lead < digits.size() && digits[lead] == 0) ++lead;
    if (lead == digits.size()) {
        r.valuation_ = 0;
        r.known_hi_ = digits.empty() ? (exact ? -1 : valuation - 1) : hi;
        r.exact_ = exact;
        return r;
    }
    digits.erase(digits.begin(), digits.begin() + static_cast<long>(lead));
    r.valuation_ = valuation + static_cast<long>(lead);
    r.digits_ = std::move(digits);
    r.known_hi_ = hi;
    r.exact_ = exact;
    return r;
}

PAdicApprox PAdicApprox::zero_window(Prime p, long known_hi, bool exact) {
    PAdicApprox r(p);
    r.known_hi_ = known_hi;
    r.exact_ = exact;
    return r;
}

long PAdicApprox::digit_at(long idx) const {
    if (idx < valuation_ || digits_.empty()) {
        if (idx <= known_hi_ || exact_) return 0;
        throw PrecisionError("PAdicApprox: digit above known window");
    }
    long off = idx - valuation_;
    if (off < static_cast<long>(digits_.size())) return digits_[off];
    if (idx <= known_hi_ || exact_) return 0;
    throw PrecisionError("PAdicApprox: digit above known window");
}

Rat PAdicApprox::truncation_value() const {
    Rat acc(0);
    Rat pw;
    if (digits_.empty()) return acc;
    // p^valuation as exact rational
    Int num(1), den(1);
    if (valuation_ >= 0)
        mpz_ui_pow_ui(num.get_mpz_t(), prime_, valuation_);
    else
        mpz_ui_pow_ui(den.get_mpz_t(), prime_, -valuation_);
    pw = make_rat(num, den);
    for (long d : digits_) {
        acc += d * pw;
        pw *= prime_;
    }
    return acc;
}

std::string PAdicApprox::str() const {
    std::ostringstream os;
    os << "p=" << prime_ << " v=" << (digits_.empty() ? 0 : valuation_) << " digits=[";
    for (size_t i = 0; i < digits_.size(); ++i) {
        if (i) os << ",";
        os << digits_[i];
    }
    os << "]";
    return os.str();
}

PAdicApprox balanced_digits(const Rat& x, Prime p, long lo, long hi) {
    if (lo > hi) throw std::invalid_argument("balanced_digits: lo > hi");
    if (x == 0) return PAdicApprox::zero_window(p, hi, true);
    long v = vp_rational(x, p).value();
    if (v > hi) return PAdicApprox::zero_window(p, hi, false);

    // x = p^v * n'/d' with p coprime to n', d'; digits of the unit part mod p^M
    long M = hi - v + 1;
    Int n = x.get_num(), d = x.get_den(), tmp, pz(p.value);
    mpz_remove(tmp.get_mpz_t(), n.get_mpz_t(), pz.get_mpz_t());
    n = tmp;
    mpz_remove(tmp.get_mpz_t(), d.get_mpz_t(), pz.get_mpz_t());
    d = tmp;
    Int mod;
    mpz_ui_pow_ui(mod.get_mpz_t(), p.value, M);
    Int dinv;
    if (mpz_invert(dinv.get_mpz_t(), d.get_mpz_t(), mod.get_mpz_t()) == 0)
        throw std::logic_error("balanced_digits: denominator not invertible");
    Int u = n * dinv % mod;
    if (u < 0) u += mod;

    std::vector<long> digits(M);
    long half = (p.value - 1) / 2;
    for (long i = 0; i < M; ++i) {
        long di = static_cast<long>(mpz_fdiv_ui(u.get_mpz_t(), p.value));
        if (di > half) di -= p.value;
        digits[i] = di;
        u -= di;
        mpz_divexact_ui(u.get_mpz_t(), u.get_mpz_t(), p.value);
    }
    PAdicApprox r = PAdicApprox::from_digits(p, v, std::move(digits), false);
    bool exact = (r.truncation_value() == x);
    if (exact) r = PAdicApprox::from_digits(p, v, r.digits(), true);
    if (v < lo) {
        // requested window cuts low digits: keep only indices >= lo
        std::vector<long> cut(r.digits().begin() + (lo - v), r.digits().end());
        r = PAdicApprox::from_digits(p, lo, std::move(cut), exact);
    }
    return r;
}

namespace {

PartialQuotient floor_sum(const PAdicApprox& x, long hi_idx) {
    Prime p{x.prime()};
    if (x.is_zero()) {
        if (!x.exact() && x.known_hi() < hi_idx)
            throw PrecisionError("floor: window does not reach index 0");
        return PartialQuotient(p);
    }
    long v = x.valuation();
    if (v > hi_idx) return PartialQuotient(p);
    if (!x.exact() && x.known_hi() < hi_idx)
        throw PrecisionError("floor: window does not reach required index");
    // Σ_{i=v}^{hi} d_i p^i  =  (Σ d_i p^(i-v)) / p^(-v)
    Int num(0), pw(1);
    for (long i = v; i <= hi_idx; ++i) {
        num += x.digit_at(i) * pw;
        pw *= p.value;
    }
    return PartialQuotient(p, num, -v);
}

}  // namespace

PartialQuotient s_floor(const PAdicApprox& x) { return floor_sum(x, 0); }

PartialQuotient t_floor(const PAdicApprox& x) {
    if (!x.is_zero() && x.valuation() >= 0) return PartialQuotient(Prime{x.prime()});
    return floor_sum(x, -1);
}

}  // namespace pcf
