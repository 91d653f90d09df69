#include "pcf/oracle.hpp"

namespace pcf::oracle {

// Everything below works on a truncated digit window (valuation v, unit U,
// m valid digits): the value is p^v (U + O(p^m)). No QuadInt arithmetic.

namespace {

constexpr long kGuard = 8;

Int ppow(long p, long k) {
    Int r;
    mpz_ui_pow_ui(r.get_mpz_t(), p, k);
    return r;
}

long strip_p(Int& n, long p) {
    long v = 0;
    while (n % p == 0) {
        n /= p;
        ++v;
    }
    return v;
}

// Trailing p-digits of w (w nonzero, non-negative).
long trailing(Int w, long p) {
    long t = 0;
    while (mpz_divisible_ui_p(w.get_mpz_t(), p)) {
        mpz_divexact_ui(w.get_mpz_t(), w.get_mpz_t(), p);
        ++t;
    }
    return t;
}

// Digit-by-digit square root of `unit` mod p^digits, canonical branch
// (leading balanced digit positive). Brute-force base case, linear lift.
Int lift_sqrt(const Int& unit, long p, long digits) {
    Int pz(p);
    Int u0 = unit % pz;
    if (u0 < 0) u0 += pz;
    Int r(-1);
    for (long x = 1; x < p; ++x) {
        if (Int(Int(x) * x % pz) == u0) {
            r = x <= (p - 1) / 2 ? x : p - x;  // canonical branch
            break;
        }
    }
    if (r < 0) throw std::invalid_argument("oracle: unit is not a residue mod p");
    Int twor_inv;
    Int twor = 2 * r % pz;
    mpz_invert(twor_inv.get_mpz_t(), twor.get_mpz_t(), pz.get_mpz_t());
    Int pk(p);
    for (long k = 1; k < digits; ++k) {
        Int diff = unit - r * r;
        Int d = diff / pk % pz * twor_inv % pz;
        if (d < 0) d += pz;
        r += d * pk;
        pk *= p;
    }
    return r;
}

struct Window {
    long v;  // valuation
    Int U;   // unit, in [0, p^m)
    long m;  // valid digits
};

// Balanced residue of U mod p^j, in (-p^j/2, p^j/2).
Int balanced_residue(const Int& U, long p, long j) {
    Int pj = ppow(p, j);
    Int s;
    mpz_fdiv_r(s.get_mpz_t(), U.get_mpz_t(), pj.get_mpz_t());
    if (2 * s > pj) s -= pj;
    return s;
}

Rat scaled(const Int& s0, long p, long v) {
    if (v >= 0) {
        Rat q(s0 * ppow(p, v));
        return q;
    }
    Rat q(s0, ppow(p, -v));
    q.canonicalize();
    return q;
}

}  // namespace

OracleRun oracle_expand(const Int& a, const Int& b, const Int& c, const Int& D, Prime p,
                        Algorithm kind, long steps, long window, RootBranch branch) {
    OracleRun run;
    const long P = p.value;
    if (a == 0 && b == 0) {
        run.quotients.emplace_back(0);
        run.terminated = true;
        return run;
    }
    if (window < kGuard + 8) window = kGuard + 8;

    // assemble the initial window for (a + b p^e r) / c
    Int cc = c;
    long gamma = strip_p(cc, P);
    long e = 0;
    Int S;
    long mfull = window + gamma + 16;
    if (b != 0) {
        Int unit = D;
        long vD = strip_p(unit, P);
        if (vD % 2 != 0) throw std::invalid_argument("oracle: v_p(D) odd");
        e = vD / 2;
        mfull += e;
        Int r = lift_sqrt(unit, P, mfull);
        if (branch == RootBranch::minus && r != 0) r = ppow(P, mfull) - r;
        S = a + b * ppow(P, e) * r;
    } else {
        S = a;
    }
    Int modfull = ppow(P, mfull);
    mpz_fdiv_r(S.get_mpz_t(), S.get_mpz_t(), modfull.get_mpz_t());
    if (S == 0) {
        run.outcome = OracleRun::Outcome::fault;
        run.fault_step = 0;
        return run;
    }
    long vS = trailing(S, P);
    if (vS > mfull - kGuard) {
        run.outcome = OracleRun::Outcome::fault;
        run.fault_step = 0;
        return run;
    }
    Window w;
    w.m = mfull - vS;
    w.v = vS - gamma;
    Int pm = ppow(P, w.m);
    Int cinv;
    mpz_invert(cinv.get_mpz_t(), cc.get_mpz_t(), pm.get_mpz_t());
    w.U = S / ppow(P, vS) % pm * cinv % pm;
    if (w.U < 0) w.U += pm;

    for (long n = 0; n < steps; ++n) {
        bool use_s = kind == Algorithm::browkin_i ||
                     (kind == Algorithm::browkin_ii ? n % 2 == 0 : n % 2 == 1);
        Rat q;
        Int diff;  // U minus the quotient's window part, before normalization
        if (use_s) {
            if (w.v >= 1) {
                q = 0;
                diff = w.U;
            } else {
                long j = 1 - w.v;
                if (j > w.m - kGuard) {
                    run.outcome = OracleRun::Outcome::fault;
                    run.fault_step = n;
                    return run;
                }
                Int s0 = balanced_residue(w.U, P, j);
                q = scaled(s0, P, w.v);
                diff = w.U - s0;
            }
        } else {
            if (w.v >= 0) {
                // t = 0; only v(α) = 0 continues with b = 0, anything else is
                // outside the algorithms' reachable states
                if (w.v != 0) {
                    run.outcome = OracleRun::Outcome::fault;
                    run.fault_step = n;
                    return run;
                }
                q = 0;
                diff = w.U;
            } else {
                long j = -w.v;
                if (j > w.m - kGuard) {
                    run.outcome = OracleRun::Outcome::fault;
                    run.fault_step = n;
                    return run;
                }
                Int s0 = balanced_residue(w.U, P, j);
                Int rem = w.U - s0;
                Int pm2 = ppow(P, w.m);
                Int remm;
                mpz_fdiv_r(remm.get_mpz_t(), rem.get_mpz_t(), pm2.get_mpz_t());
                bool unit_rem = remm != 0 && trailing(remm, P) == j;
                if (unit_rem) {
                    q = scaled(s0, P, w.v);
                    diff = rem;
                } else {
                    // v_p(α - t) ≠ 0: sign correction keeps the remainder a unit
                    int sg = sgn(s0);
                    Int pj = ppow(P, j);
                    q = scaled(s0 - sg * pj, P, w.v);
                    diff = rem + sg * pj;
                }
            }
        }
        run.quotients.push_back(q);

        Int pm2 = ppow(P, w.m);
        Int dm;
        mpz_fdiv_r(dm.get_mpz_t(), diff.get_mpz_t(), pm2.get_mpz_t());
        if (dm == 0) {
            run.terminated = true;
            return run;
        }
        long j2 = trailing(dm, P);
        if (j2 > w.m - kGuard) {
            run.outcome = OracleRun::Outcome::fault;
            run.fault_step = n;
            return run;
        }
        // subtract, then invert: (v, U, m) -> (-(v+j2), (U'/p^j2)^{-1}, m-j2)
        w.v += j2;
        w.m -= j2;
        Int pmn = ppow(P, w.m);
        Int Un = dm / ppow(P, j2) % pmn;
        Int Uinv;
        mpz_invert(Uinv.get_mpz_t(), Un.get_mpz_t(), pmn.get_mpz_t());
        w.U = Uinv;
        w.v = -w.v;
    }
    return run;
}

OracleAgreement oracle_check(const QuadInt& x, Prime p, Algorithm kind, long steps,
                             long window0, int retries) {
    Expansion e = expand(x, kind, p, ExpandOptions{.max_steps = steps});
    auto engine_at = [&](long i) -> Rat {
        if (e.status == ExpStatus::periodic && i >= e.h + e.k)
            return e.quotients[e.h + (i - e.h) % e.k].value();
        return e.quotients[i].value();
    };
    long engine_len = static_cast<long>(e.quotients.size());

    for (int attempt = 0; attempt <= retries; ++attempt) {
        OracleRun run = oracle_expand(x.a(), x.b(), x.c(), x.D(), p, kind, steps,
                                      window0 << attempt, x.branch());
        if (run.outcome == OracleRun::Outcome::fault) continue;

        if (e.status == ExpStatus::finite) {
            if (!run.terminated ||
                static_cast<long>(run.quotients.size()) != engine_len)
                return OracleAgreement::disagree;
            for (long i = 0; i < engine_len; ++i)
                if (run.quotients[i] != engine_at(i)) return OracleAgreement::disagree;
            return OracleAgreement::agree;
        }
        if (run.terminated || static_cast<long>(run.quotients.size()) != steps)
            return OracleAgreement::disagree;
        for (long i = 0; i < steps; ++i)
            if (run.quotients[i] != engine_at(i)) return OracleAgreement::disagree;
        return OracleAgreement::agree;
    }
    return OracleAgreement::inconclusive;
}

}  // namespace pcf::oracle
