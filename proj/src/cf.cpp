#include "pcf/cf.hpp"

#include <unordered_map>

#include "json.hpp"

namespace pcf {

std::string algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::browkin_i: return "browkin1";
        case Algorithm::browkin_ii: return "browkin2";
        case Algorithm::browkin_ii_star: return "browkin2star";
    }
    return "?";
}

std::optional<Algorithm> algorithm_from_name(std::string_view s) {
    if (s == "browkin1") return Algorithm::browkin_i;
    if (s == "browkin2") return Algorithm::browkin_ii;
    if (s == "browkin2star") return Algorithm::browkin_ii_star;
    return std::nullopt;
}

std::string status_name(ExpStatus s) {
    switch (s) {
        case ExpStatus::finite: return "FINITE";
        case ExpStatus::periodic: return "PERIODIC";
        case ExpStatus::capped: return "CAPPED";
    }
    return "?";
}

StepOutcome step(const QuadInt& x, long n, Algorithm kind, Prime p, HenselRoot* root) {
    bool use_s = kind == Algorithm::browkin_i ||
                 (kind == Algorithm::browkin_ii ? n % 2 == 0 : n % 2 == 1);
    PartialQuotient b(p);
    bool sign_fired = false;
    QuadInt rem;
    if (use_s) {
        PadicVal v = vp_quad(x, p, root);
        if (v.is_infinite() || v.value() >= 1) {
            b = PartialQuotient(p);  // no digits at indices <= 0
        } else {
            b = s_floor(digits_of_quad(x, p, root, v.value(), 0));
        }
        rem = x.sub_rational(b.value());
    } else {
        PadicVal v = vp_quad(x, p, root);
        PartialQuotient t(p);
        if (!v.is_infinite() && v.value() <= -1)
            t = t_floor(digits_of_quad(x, p, root, v.value(), -1));
        QuadInt rem0 = x.sub_rational(t.value());
        PadicVal vr = vp_quad(rem0, p, root);
        if (vr == 0) {
            b = t;
            rem = rem0;
        } else {
            // v_p(x - t(x)) ≠ 0: correct by the Euclidean sign to restore a
            // unit-valuation remainder.
            if (t.is_zero())
                throw std::logic_error("step: sign branch with t = 0");
            int s = t.euclid_sign();
            Int pn;
            mpz_ui_pow_ui(pn.get_mpz_t(), p.value, t.p_exponent());
            b = PartialQuotient(p, t.numerator() - s * pn, t.p_exponent());
            rem = rem0.add_rational(Rat(s));
            sign_fired = true;
        }
    }
    if (rem.is_zero()) return {b, true, QuadInt(), sign_fired};
    return {b, false, rem.inverse(), sign_fired};
}

namespace {

struct CqKey {
    Int a, b, c;
    int parity;
    friend bool operator==(const CqKey& x, const CqKey& y) {
        return x.parity == y.parity && x.a == y.a && x.b == y.b && x.c == y.c;
    }
};

struct CqKeyHash {
    size_t operator()(const CqKey& k) const {
        auto fold = [](const Int& z, size_t h) {
            h ^= static_cast<size_t>(mpz_sgn(z.get_mpz_t())) + 0x9e3779b97f4a7c15ULL;
            for (size_t i = 0; i < mpz_size(z.get_mpz_t()); ++i)
                h ^= static_cast<size_t>(mpz_getlimbn(z.get_mpz_t(), i)) +
                     0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
            return h;
        };
        size_t h = fold(k.a, 0x452821e638d01377ULL);
        h = fold(k.b, h);
        h = fold(k.c, h);
        return h ^ static_cast<size_t>(k.parity);
    }
};

int state_parity(Algorithm kind, long n) {
    return kind == Algorithm::browkin_i ? 0 : static_cast<int>(n % 2);
}

}  // namespace

Expansion expand(const QuadInt& x, Algorithm kind, Prime p, const ExpandOptions& opts) {
    if (opts.max_steps < 1) throw std::invalid_argument("expand: max_steps < 1");
    Expansion e;
    e.algorithm = kind;
    e.prime = p.value;
    e.input = x.str();

    std::optional<HenselRoot> root;
    HenselRoot* rootp = nullptr;
    if (!x.is_rational()) {
        root.emplace(x.D(), p, opts.root_precision, opts.precision_cap);
        rootp = &*root;
    }
    if (kind == Algorithm::browkin_ii_star && !(vp_quad(x, p, rootp) < 0))
        throw std::invalid_argument("expand: browkin2star requires v_p(input) < 0");

    std::unordered_map<CqKey, long, CqKeyHash> seen;
    std::vector<QuadInt> states;
    states.reserve(64);
    QuadInt cur = x;
    for (long n = 0; n < opts.max_steps; ++n) {
        CqKey key{cur.a(), cur.b(), cur.c(), state_parity(kind, n)};
        if (auto it = seen.find(key); it != seen.end()) {
            e.status = ExpStatus::periodic;
            e.h = it->second;
            e.k = n - it->second;
            e.witness = states[it->second];
            e.steps_used = n;
            return e;
        }
        seen.emplace(std::move(key), n);
        states.push_back(cur);

        StepOutcome out = step(cur, n, kind, p, rootp);
        e.quotients.push_back(out.b);
        if (out.sign_branch_fired) e.sign_branch_indices.push_back(n);
        if (out.terminated) {
            e.status = ExpStatus::finite;
            e.h = static_cast<long>(e.quotients.size());
            e.k = 0;
            e.steps_used = n + 1;
            return e;
        }
        cur = out.next;
    }
    e.status = ExpStatus::capped;
    e.h = static_cast<long>(e.quotients.size());
    e.k = 0;
    e.steps_used = opts.max_steps;
    return e;
}

std::string Expansion::to_json() const {
    nlohmann::json j;
    j["p"] = prime;
    j["algorithm"] = algorithm_name(algorithm);
    j["input"] = input;
    j["status"] = status_name(status);
    auto strs = [](std::span<const PartialQuotient> qs) {
        std::vector<std::string> v;
        v.reserve(qs.size());
        for (const auto& q : qs) v.push_back(q.str());
        return v;
    };
    if (status == ExpStatus::periodic) {
        j["preperiod"] = strs(preperiod());
        j["period"] = strs(period());
    } else {
        j["preperiod"] = strs(quotients);
        j["period"] = std::vector<std::string>{};
    }
    j["h"] = h;
    j["k"] = k;
    j["sign_branch_indices"] = sign_branch_indices;
    j["steps_used"] = steps_used;
    return j.dump();
}

Convergents Convergents::of(std::span<const PartialQuotient> bs) {
    Convergents c;
    c.A.reserve(bs.size());
    c.B.reserve(bs.size());
    Rat a2(0), a1(1), b2(1), b1(0);  // A_{-2}, A_{-1}, B_{-2}, B_{-1}
    for (const auto& b : bs) {
        Rat bv = b.value();
        Rat an = bv * a1 + a2;
        Rat bn = bv * b1 + b2;
        c.A.push_back(an);
        c.B.push_back(bn);
        a2 = a1;
        a1 = an;
        b2 = b1;
        b1 = bn;
    }
    return c;
}

namespace {

Rat fold_finite(std::span<const PartialQuotient> bs) {
    Rat val = bs.back().value();
    for (long i = static_cast<long>(bs.size()) - 2; i >= 0; --i) {
        if (val == 0)
            throw std::runtime_error("reconstruct: zero complete quotient mid-fold");
        val = bs[i].value() + Rat(1) / val;
    }
    return val;
}

bool rational_sqrt(const Rat& q, Rat& out) {
    if (q < 0) return false;
    const Int &n = q.get_num(), &d = q.get_den();
    if (!mpz_perfect_square_p(n.get_mpz_t()) || !mpz_perfect_square_p(d.get_mpz_t()))
        return false;
    Int rn, rd;
    mpz_sqrt(rn.get_mpz_t(), n.get_mpz_t());
    mpz_sqrt(rd.get_mpz_t(), d.get_mpz_t());
    out = make_rat(rn, rd);
    return true;
}

// Builds (u + v*sqrt(D))/1 from rational coefficients u, v by clearing
// denominators into the QuadInt normal form.
QuadInt quad_from_rat_coeffs(const Rat& u, const Rat& v, const Int& D, RootBranch br) {
    Int L;
    mpz_lcm(L.get_mpz_t(), u.get_den().get_mpz_t(), v.get_den().get_mpz_t());
    Rat ur = u * L, vr = v * L;
    return QuadInt(ur.get_num(), vr.get_num(), L, D, br);
}

}  // namespace

QuadInt reconstruct(const Expansion& e) {
    if (e.status == ExpStatus::capped)
        throw std::invalid_argument("reconstruct: capped expansion");
    if (e.status == ExpStatus::finite) return QuadInt::from_rational(fold_finite(e.quotients));

    if (!e.witness) throw std::invalid_argument("reconstruct: periodic run without witness");
    const QuadInt& w = *e.witness;
    if (w.is_rational())
        throw std::runtime_error("reconstruct: periodic expansion with rational witness");

    // Periodic tail β = [overline(b_h .. b_{h+k-1})] satisfies
    //   B'_{k-1} β² + (B'_{k-2} - A'_{k-1}) β - A'_{k-2} = 0.
    auto per = e.period();
    Convergents cp = Convergents::of(per);
    size_t k = per.size();
    Rat Ak1 = cp.A[k - 1], Bk1 = cp.B[k - 1];
    Rat Ak2 = k >= 2 ? cp.A[k - 2] : Rat(1);  // seeds A_{-1}=1, B_{-1}=0
    Rat Bk2 = k >= 2 ? cp.B[k - 2] : Rat(0);
    Rat qa = Bk1, qb = Bk2 - Ak1, qc = -Ak2;
    Rat disc = qb * qb - 4 * qa * qc;

    Rat s2 = disc / Rat(w.D());
    Rat s;
    if (!rational_sqrt(s2, s))
        throw std::runtime_error("reconstruct: discriminant is not D times a square");

    QuadInt beta;
    bool found = false;
    for (int sign : {1, -1}) {
        QuadInt cand = quad_from_rat_coeffs(-qb / (2 * qa), sign * s / (2 * qa), w.D(),
                                            w.branch());
        if (cand == w) {
            beta = cand;
            found = true;
            break;
        }
    }
    if (!found)
        throw std::runtime_error("reconstruct: neither quadratic root matches the witness");

    // α = (β A_{h-1} + A_{h-2}) / (β B_{h-1} + B_{h-2})
    Rat Ah1(1), Ah2(0), Bh1(0), Bh2(1);  // seeds for h = 0
    if (e.h >= 1) {
        Convergents cpre = Convergents::of(e.preperiod());
        Ah1 = cpre.A[e.h - 1];
        Bh1 = cpre.B[e.h - 1];
        if (e.h >= 2) {
            Ah2 = cpre.A[e.h - 2];
            Bh2 = cpre.B[e.h - 2];
        } else {
            Ah2 = 1;
            Bh2 = 0;
        }
    }
    QuadInt num = beta.mul_rational(Ah1).add_rational(Ah2);
    QuadInt den = beta.mul_rational(Bh1).add_rational(Bh2);
    return num / den;
}

}  // namespace pcf
