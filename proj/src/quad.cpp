#include "pcf/quad.hpp"

#include <cctype>

namespace pcf {

namespace {

size_t hash_mpz(const Int& z, size_t seed) {
    size_t h = seed ^ (static_cast<size_t>(mpz_sgn(z.get_mpz_t())) * 0x9e3779b97f4a7c15ULL);
    size_t n = mpz_size(z.get_mpz_t());
    for (size_t i = 0; i < n; ++i) {
        h ^= static_cast<size_t>(mpz_getlimbn(z.get_mpz_t(), i)) + 0x9e3779b97f4a7c15ULL +
             (h << 6) + (h >> 2);
    }
    return h;
}

Int pow_p(long p, long k) {
    Int r;
    mpz_ui_pow_ui(r.get_mpz_t(), p, k);
    return r;
}

// Square root mod an odd prime (Tonelli-Shanks), input must be a residue.
Int sqrt_mod_prime(Int a, const Int& p) {
    a %= p;
    if (a < 0) a += p;
    if (a == 0) return Int(0);
    if (mpz_fdiv_ui(p.get_mpz_t(), 4) == 3) {
        Int e = (p + 1) / 4, r;
        mpz_powm(r.get_mpz_t(), a.get_mpz_t(), e.get_mpz_t(), p.get_mpz_t());
        return r;
    }
    Int q = p - 1;
    long s = 0;
    while (mpz_even_p(q.get_mpz_t())) {
        q /= 2;
        ++s;
    }
    Int half = (p - 1) / 2, z(2), le;
    auto legendre_is_minus_one = [&](const Int& v) {
        Int t;
        mpz_powm(t.get_mpz_t(), v.get_mpz_t(), half.get_mpz_t(), p.get_mpz_t());
        return t == p - 1;
    };
    while (!legendre_is_minus_one(z)) ++z;
    Int c, t, r, e;
    mpz_powm(c.get_mpz_t(), z.get_mpz_t(), q.get_mpz_t(), p.get_mpz_t());
    mpz_powm(t.get_mpz_t(), a.get_mpz_t(), q.get_mpz_t(), p.get_mpz_t());
    e = (q + 1) / 2;
    mpz_powm(r.get_mpz_t(), a.get_mpz_t(), e.get_mpz_t(), p.get_mpz_t());
    long m = s;
    while (t != 1) {
        Int tt = t;
        long i = 0;
        while (tt != 1) {
            tt = tt * tt % p;
            ++i;
        }
        Int b = c;
        for (long j = 0; j < m - i - 1; ++j) b = b * b % p;
        r = r * b % p;
        c = b * b % p;
        t = t * c % p;
        m = i;
    }
    return r;
}

std::vector<long> balanced_digit_vec(Int u, long p, long count) {
    std::vector<long> digits(count);
    long half = (p - 1) / 2;
    for (long i = 0; i < count; ++i) {
        long d = static_cast<long>(mpz_fdiv_ui(u.get_mpz_t(), p));
        if (d > half) d -= p;
        digits[i] = d;
        u -= d;
        mpz_divexact_ui(u.get_mpz_t(), u.get_mpz_t(), p);
    }
    return digits;
}

}  // namespace

void QuadInt::canonicalize() {
    if (c_ == 0) throw std::invalid_argument("QuadInt: zero denominator");
    if (b_ == 0) {
        D_ = 0;
        branch_ = RootBranch::canonical;
    } else {
        if (D_ == 0 || mpz_perfect_square_p(D_.get_mpz_t()))
            throw std::invalid_argument("QuadInt: radicand must not be a perfect square");
    }
    if (c_ < 0) {
        a_ = -a_;
        b_ = -b_;
        c_ = -c_;
    }
    Int g;
    mpz_gcd(g.get_mpz_t(), a_.get_mpz_t(), b_.get_mpz_t());
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c_.get_mpz_t());
    if (g > 1) {
        mpz_divexact(a_.get_mpz_t(), a_.get_mpz_t(), g.get_mpz_t());
        mpz_divexact(b_.get_mpz_t(), b_.get_mpz_t(), g.get_mpz_t());
        mpz_divexact(c_.get_mpz_t(), c_.get_mpz_t(), g.get_mpz_t());
    }
}

QuadInt::QuadInt(Int a, Int b, Int c, Int D, RootBranch branch)
    : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), D_(std::move(D)), branch_(branch) {
    canonicalize();
}

QuadInt QuadInt::from_rational(const Rat& q) {
    return QuadInt(q.get_num(), 0, q.get_den(), 0);
}

QuadInt QuadInt::sqrt_of(Int D, RootBranch branch) {
    return QuadInt(0, 1, 1, std::move(D), branch);
}

Rat QuadInt::rational_value() const {
    if (b_ != 0) throw std::logic_error("QuadInt: rational_value of irrational");
    return make_rat(a_, c_);
}

QuadInt QuadInt::conjugate() const { return QuadInt(a_, -b_, c_, D_, branch_); }

QuadInt QuadInt::inverse() const {
    if (is_zero()) throw std::domain_error("QuadInt: inverse of zero");
    if (b_ == 0) return QuadInt(c_, 0, a_, 0, branch_);
    // c(a - b√D) / (a² - b²D)
    Int den = a_ * a_ - b_ * b_ * D_;
    return QuadInt(c_ * a_, -c_ * b_, den, D_, branch_);
}

QuadInt QuadInt::sub_rational(const Rat& q) const {
    const Int& n = q.get_num();
    const Int& d = q.get_den();
    return QuadInt(a_ * d - n * c_, b_ * d, c_ * d, D_, branch_);
}

QuadInt QuadInt::add_rational(const Rat& q) const {
    const Int& n = q.get_num();
    const Int& d = q.get_den();
    return QuadInt(a_ * d + n * c_, b_ * d, c_ * d, D_, branch_);
}

QuadInt QuadInt::mul_rational(const Rat& q) const {
    return QuadInt(a_ * q.get_num(), b_ * q.get_num(), c_ * q.get_den(), D_, branch_);
}

namespace {
// Radicand/branch to use when combining two values, at least one of which may
// be rational (D = 0).
void combine_fields(const QuadInt& x, const QuadInt& y, Int& D, RootBranch& br) {
    if (x.is_rational()) {
        D = y.D();
        br = y.branch();
        return;
    }
    if (y.is_rational()) {
        D = x.D();
        br = x.branch();
        return;
    }
    if (x.D() != y.D() || x.branch() != y.branch())
        throw std::logic_error("QuadInt: mixed radicands or branches");
    D = x.D();
    br = x.branch();
}
}  // namespace

QuadInt operator+(const QuadInt& x, const QuadInt& y) {
    Int D;
    RootBranch br;
    combine_fields(x, y, D, br);
    return QuadInt(x.a_ * y.c_ + y.a_ * x.c_, x.b_ * y.c_ + y.b_ * x.c_, x.c_ * y.c_, D, br);
}

QuadInt operator-(const QuadInt& x, const QuadInt& y) {
    Int D;
    RootBranch br;
    combine_fields(x, y, D, br);
    return QuadInt(x.a_ * y.c_ - y.a_ * x.c_, x.b_ * y.c_ - y.b_ * x.c_, x.c_ * y.c_, D, br);
}

QuadInt operator*(const QuadInt& x, const QuadInt& y) {
    Int D;
    RootBranch br;
    combine_fields(x, y, D, br);
    return QuadInt(x.a_ * y.a_ + x.b_ * y.b_ * D, x.a_ * y.b_ + x.b_ * y.a_, x.c_ * y.c_, D,
                   br);
}

QuadInt operator/(const QuadInt& x, const QuadInt& y) { return x * y.inverse(); }

size_t QuadInt::hash() const {
    size_t h = hash_mpz(a_, 0x243f6a8885a308d3ULL);
    h = hash_mpz(b_, h);
    h = hash_mpz(c_, h);
    h = hash_mpz(D_, h);
    return h ^ (branch_ == RootBranch::minus ? 0x5bf03635ULL : 0);
}

std::string QuadInt::str() const {
    if (b_ == 0) return a_.get_str() + "/" + c_.get_str();
    std::string s = "(" + a_.get_str();
    s += (b_ < 0) ? "-" : "+";
    s += Int(abs(b_)).get_str();
    s += "*sqrt(" + D_.get_str() + "))/" + c_.get_str();
    return s;
}

namespace {

bool parse_digits(std::string_view s, size_t& i, Int& out, bool allow_sign) {
    size_t start = i;
    bool neg = false;
    if (allow_sign && i < s.size() && s[i] == '-') {
        neg = true;
        ++i;
    }
    size_t d0 = i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (i == d0) {
        i = start;
        return false;
    }
    out = Int(std::string(s.substr(d0, i - d0)), 10);
    if (neg) out = -out;
    return true;
}

bool expect(std::string_view s, size_t& i, std::string_view tok) {
    if (s.substr(i, tok.size()) != tok) return false;
    i += tok.size();
    return true;
}

}  // namespace

std::optional<QuadInt> QuadInt::parse(std::string_view s, RootBranch branch) {
    size_t i = 0;
    if (!s.empty() && s[0] == '(') {
        Int a, babs, D, c;
        ++i;
        if (!parse_digits(s, i, a, true)) return std::nullopt;
        if (i >= s.size() || (s[i] != '+' && s[i] != '-')) return std::nullopt;
        bool bneg = s[i] == '-';
        ++i;
        if (!parse_digits(s, i, babs, false)) return std::nullopt;
        if (!expect(s, i, "*sqrt(")) return std::nullopt;
        if (!parse_digits(s, i, D, true)) return std::nullopt;
        if (!expect(s, i, "))/")) return std::nullopt;
        if (!parse_digits(s, i, c, false)) return std::nullopt;
        if (i != s.size() || c == 0) return std::nullopt;
        return QuadInt(a, bneg ? Int(-babs) : babs, c, D, branch);
    }
    Int n, d(1);
    if (!parse_digits(s, i, n, true)) return std::nullopt;
    if (i < s.size()) {
        if (s[i] != '/') return std::nullopt;
        ++i;
        if (!parse_digits(s, i, d, false)) return std::nullopt;
        if (i != s.size() || d == 0) return std::nullopt;
    }
    return QuadInt(n, 0, d, 0, branch);
}

bool sqrt_exists(const Int& D, Prime p) {
    if (D == 0) return false;
    long v = vp_int(D, p.value);
    if (v % 2 != 0) return false;
    Int unit = D / pow_p(p.value, v);
    Int pz(p.value), half((p.value - 1) / 2), t;
    Int u = unit % pz;
    if (u < 0) u += pz;
    mpz_powm(t.get_mpz_t(), u.get_mpz_t(), half.get_mpz_t(), pz.get_mpz_t());
    return t == 1;
}

HenselRoot::HenselRoot(const Int& D, Prime p, long precision, long cap)
    : p_(p.value), D_(D), cap_(cap) {
    if (D == 0) throw std::domain_error("HenselRoot: D = 0");
    if (!sqrt_exists(D, p))
        throw std::domain_error("HenselRoot: no square root of " + D.get_str() + " in Q_" +
                                std::to_string(p.value));
    long vD = vp_int(D, p.value);
    e_ = vD / 2;
    unit_ = D / pow_p(p_, vD);
    Int pz(p_);
    root_ = sqrt_mod_prime(unit_, pz);
    if (mpz_fdiv_ui(root_.get_mpz_t(), p_) > static_cast<unsigned long>((p_ - 1) / 2))
        root_ = pz - root_;
    prec_ = 1;
    pk_ = pz;
    ensure(precision < 1 ? 1 : precision);
}

void HenselRoot::ensure(long digits) {
    if (digits <= prec_) return;
    if (digits > cap_)
        throw PrecisionCapError("HenselRoot: requested " + std::to_string(digits) +
                                " digits, cap " + std::to_string(cap_));
    long target = prec_;
    while (target < digits) target *= 2;
    if (target > cap_) target = cap_;
    while (prec_ < target) {
        long next = std::min(2 * prec_, target);
        Int mod = pow_p(p_, next);
        Int um = unit_ % mod;
        if (um < 0) um += mod;
        Int rinv, inv2, two(2);
        mpz_invert(rinv.get_mpz_t(), root_.get_mpz_t(), mod.get_mpz_t());
        mpz_invert(inv2.get_mpz_t(), two.get_mpz_t(), mod.get_mpz_t());
        root_ = (root_ + um * rinv) % mod * inv2 % mod;
        prec_ = next;
        pk_ = mod;
    }
}

Int HenselRoot::root_mod(long digits, RootBranch branch) {
    ensure(digits);
    Int mod = pow_p(p_, digits);
    Int r = root_ % mod;
    if (branch == RootBranch::minus && r != 0) r = mod - r;
    return r;
}

long HenselRoot::leading_digit() const {
    long d = static_cast<long>(mpz_fdiv_ui(root_.get_mpz_t(), p_));
    if (d > (p_ - 1) / 2) d -= p_;
    return d;
}

PAdicApprox HenselRoot::digits(long lo, long hi, RootBranch branch) {
    if (lo > hi) throw std::invalid_argument("HenselRoot::digits: lo > hi");
    Prime p{p_};
    if (hi < e_) return PAdicApprox::zero_window(p, hi, false);
    long count = hi - e_ + 1;
    Int r = root_mod(count, branch);
    std::vector<long> digs = balanced_digit_vec(r, p_, count);
    PAdicApprox out = PAdicApprox::from_digits(p, e_, std::move(digs), false);
    if (lo > e_) {
        std::vector<long> cut(out.digits().begin() + (lo - out.valuation()),
                              out.digits().end());
        out = PAdicApprox::from_digits(p, lo, std::move(cut), false);
    }
    return out;
}

PadicVal vp_root_combination(Int A, Int B, Prime p, HenselRoot& root, RootBranch branch) {
    if (A == 0 && B == 0) return PadicVal::infinity();
    long e = root.shift();
    if (B == 0) return PadicVal::of(vp_int(A, p.value));
    if (A == 0) return PadicVal::of(vp_int(B, p.value) + e);

    // strip shared p powers first so the certification bound stays tight
    long s = std::min(vp_int(A, p.value), vp_int(B, p.value));
    if (s > 0) {
        Int ps = pow_p(p.value, s);
        mpz_divexact(A.get_mpz_t(), A.get_mpz_t(), ps.get_mpz_t());
        mpz_divexact(B.get_mpz_t(), B.get_mpz_t(), ps.get_mpz_t());
    }
    long va = vp_int(A, p.value);
    long vb = vp_int(B, p.value) + e;
    if (va != vb) return PadicVal::of(s + std::min(va, vb));

    // Cancellation possible: certify digits of A + B·p^e·√unit. Its valuation
    // is bounded by v_p(norm) - va, so p^K with K = vN - va + 1 pins it.
    Int norm = A * A - B * B * root.radicand();
    long vN = vp_int(norm, p.value);
    long K = vN - va + 1;
    Int r = root.root_mod(std::max(1L, K - e), branch);
    Int mod = pow_p(p.value, K);
    Int S = (A + B * pow_p(p.value, e) * r) % mod;
    if (S < 0) S += mod;
    return PadicVal::of(s + vp_int(S, p.value));
}

PadicVal vp_quad(const QuadInt& x, Prime p, HenselRoot* root) {
    if (x.is_zero()) return PadicVal::infinity();
    long vc = vp_int(x.c(), p.value);
    if (x.is_rational()) return PadicVal::of(vp_int(x.a(), p.value) - vc);
    long vD = vp_int(x.D(), p.value);
    if (vD % 2 != 0) throw std::domain_error("vp_quad: v_p(D) odd, no embedding");
    long e = vD / 2;
    if (x.a() == 0) return PadicVal::of(vp_int(x.b(), p.value) + e - vc);
    long va = vp_int(x.a(), p.value);
    long vb = vp_int(x.b(), p.value) + e;
    if (va != vb) return PadicVal::of(std::min(va, vb) - vc);
    if (root == nullptr || root->radicand() != x.D() || root->prime() != p.value)
        throw std::logic_error("vp_quad: missing or mismatched HenselRoot");
    PadicVal vnum = vp_root_combination(x.a(), x.b(), p, *root, x.branch());
    return PadicVal::of(vnum.value() - vc);
}

PAdicApprox digits_of_quad(const QuadInt& x, Prime p, HenselRoot* root, long lo, long hi) {
    if (lo > hi) throw std::invalid_argument("digits_of_quad: lo > hi");
    if (x.is_zero()) return PAdicApprox::zero_window(p, hi, true);
    long v = vp_quad(x, p, root).value();
    if (v > hi) return PAdicApprox::zero_window(p, hi, false);

    long gamma = vp_int(x.c(), p.value);
    long vS = v + gamma;  // valuation of the integer numerator
    long M = hi - v + 1;
    long K = vS + M;
    Int mod = pow_p(p.value, K);
    Int S;
    if (x.b() != 0) {
        if (root == nullptr || root->radicand() != x.D() || root->prime() != p.value)
            throw std::logic_error("digits_of_quad: missing or mismatched HenselRoot");
        long e = root->shift();
        Int r = root->root_mod(std::max(1L, K - e), x.branch());
        S = (x.a() + x.b() * pow_p(p.value, e) * r) % mod;
    } else {
        S = x.a() % mod;
    }
    if (S < 0) S += mod;
    Int pvs = pow_p(p.value, vS);
    if (!mpz_divisible_p(S.get_mpz_t(), pvs.get_mpz_t()))
        throw std::logic_error("digits_of_quad: numerator valuation mismatch");
    mpz_divexact(S.get_mpz_t(), S.get_mpz_t(), pvs.get_mpz_t());

    Int modM = pow_p(p.value, M);
    Int cp = x.c() / pow_p(p.value, gamma);
    Int cinv;
    if (mpz_invert(cinv.get_mpz_t(), cp.get_mpz_t(), modM.get_mpz_t()) == 0)
        throw std::logic_error("digits_of_quad: denominator not invertible");
    Int u = S % modM * cinv % modM;
    std::vector<long> digs = balanced_digit_vec(u, p.value, M);

    PAdicApprox out = PAdicApprox::from_digits(p, v, std::move(digs), false);
    if (x.is_rational() && !out.is_zero() &&
        out.truncation_value() == x.rational_value()) {
        out = PAdicApprox::from_digits(p, out.valuation(), out.digits(), true);
    }
    if (lo > v && !out.is_zero() && lo > out.valuation()) {
        std::vector<long> cut(out.digits().begin() + (lo - out.valuation()),
                              out.digits().end());
        out = PAdicApprox::from_digits(p, lo, std::move(cut), out.exact());
    }
    return out;
}

}  // namespace pcf
