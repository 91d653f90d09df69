// Acceptance suite: prints one pass/fail line per criterion and exits
// nonzero if any of them fails. Checks are exact; runtime bounds are asserted
// where stated.

#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#include "pcf/oracle.hpp"
#include "pcf/theory.hpp"

using namespace pcf;

namespace {

int failures = 0;
std::vector<std::pair<QuadInt, Expansion>> collected_runs;  // criteria 1-4, for criterion 6

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double secs() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

void report(int idx, bool ok, double secs, const char* desc) {
    std::printf("[%s] criterion %d (%6.2f s): %s\n", ok ? "PASS" : "FAIL", idx, secs, desc);
    std::fflush(stdout);
    if (!ok) ++failures;
}

#define EXPECT(cond)                                                          \
    do {                                                                      \
        if (!(cond)) {                                                        \
            std::printf("       expectation failed at %s:%d: %s\n", __FILE__, \
                        __LINE__, #cond);                                     \
            ok = false;                                                       \
        }                                                                     \
    } while (0)

std::vector<std::string> strs(std::span<const PartialQuotient> qs) {
    std::vector<std::string> v;
    for (const auto& q : qs) v.push_back(q.str());
    return v;
}

void criterion1() {
    Timer timer;
    bool ok = true;
    Prime p7 = Prime::checked(7);
    QuadInt x(3, 1, 1, 30);
    Expansion e = expand(x, Algorithm::browkin_ii, p7);
    EXPECT(e.status == ExpStatus::periodic);
    EXPECT(e.h == 4);
    EXPECT(e.k == 10);
    EXPECT(strs(e.preperiod()) == (std::vector<std::string>{"-1", "3/7", "3", "2/7"}));
    EXPECT(strs(e.period()) == (std::vector<std::string>{"1", "2/7", "-2", "3/7", "1", "2/7",
                                                         "2", "1/7", "-1", "-5/7"}));
    EXPECT(e.sign_branch_indices == (std::vector<long>{13}));
    EXPECT(e.quotients[13].str() == "-5/7");
    collected_runs.emplace_back(x, e);
    double s = timer.secs();
    EXPECT(s < 1.0);
    report(1, ok, s, "sqrt(30)+3 in Q_7, browkin2: preperiod 4, period 10, sign branch at 13");
}

void criterion2() {
    Timer timer;
    bool ok = true;
    Prime p5 = Prime::checked(5);
    QuadInt x(2, 1, 75, 79);
    Expansion e = expand(x, Algorithm::browkin_ii_star, p5);
    EXPECT(e.status == ExpStatus::periodic);
    EXPECT(e.h == 15);
    EXPECT(e.k == 8);
    EXPECT(strs(e.preperiod()) ==
           (std::vector<std::string>{"-7/25", "1", "2/5", "2", "-2/5", "1", "1/5", "2",
                                     "-4/25", "2", "1/5", "1", "-2/5", "2", "2/5"}));
    EXPECT(strs(e.period()) == (std::vector<std::string>{"1", "-7/25", "-1", "1/5", "2",
                                                         "9/25", "-1", "-3/5"}));
    collected_runs.emplace_back(x, e);
    double s = timer.secs();
    EXPECT(s < 1.0);
    report(2, ok, s, "(2+sqrt(79))/75 in Q_5, browkin2star: preperiod 15, period 8");
}

void criterion3() {
    Timer timer;
    bool ok = true;
    long instances = 0;
    for (long pv : {3L, 5L, 7L, 11L, 13L}) {
        Prime p = Prime::checked(pv);
        for (long t = 2; t <= 12; ++t) {
            for (RootBranch br : {RootBranch::canonical, RootBranch::minus}) {
                auto inst = period4_family(p, t, br);
                if (!inst) continue;
                ++instances;
                FamilyVerification v = verify_family(*inst);
                if (!v.ok) {
                    std::printf("       family p=%ld t=%ld: %s\n", pv, t, v.detail.c_str());
                    ok = false;
                }
                QuadInt x = QuadInt::sqrt_of(inst->D, br);
                collected_runs.emplace_back(x, expand(x, Algorithm::browkin_ii, p));
            }
        }
    }
    auto d975 = period4_family(Prime::checked(5), 4);
    EXPECT(d975.has_value());
    EXPECT(d975->D == -975);
    EXPECT(instances == 26);  // 13 integral (p, t) pairs, both branches
    double s = timer.secs();
    EXPECT(s < 30.0);
    report(3, ok, s,
           "period-4 family verified verbatim for p in {3,5,7,11,13}, integral t <= 12, "
           "both branches");
}

void criterion4() {
    Timer timer;
    bool ok = true;
    std::mt19937_64 rng(20240814);
    long runs = 0;
    for (long pv : {3L, 5L, 7L}) {
        Prime p = Prime::checked(pv);
        for (int i = 0; i < 1000; ++i) {
            long num = static_cast<long>(rng() % 2000001) - 1000000;
            long den = 1 + static_cast<long>(rng() % 1000000);
            Rat q(num, den);
            q.canonicalize();
            QuadInt x = QuadInt::from_rational(q);
            for (Algorithm kind : {Algorithm::browkin_i, Algorithm::browkin_ii}) {
                Expansion e = expand(x, kind, p);
                ++runs;
                if (e.status != ExpStatus::finite) {
                    std::printf("       %s of %s in Q_%ld: %s\n",
                                algorithm_name(kind).c_str(), q.get_str().c_str(), pv,
                                status_name(e.status).c_str());
                    ok = false;
                    continue;
                }
                if (reconstruct(e).rational_value() != q) {
                    std::printf("       reconstruct mismatch for %s in Q_%ld\n",
                                q.get_str().c_str(), pv);
                    ok = false;
                }
                collected_runs.emplace_back(x, std::move(e));
            }
        }
    }
    EXPECT(runs == 6000);
    double s = timer.secs();
    EXPECT(s < 60.0);
    report(4, ok, s,
           "1000 seeded rationals per p in {3,5,7}: FINITE under browkin1 and browkin2, "
           "exact reconstruction");
}

void criterion5() {
    Timer timer;
    bool ok = true;
    std::mt19937_64 rng(20240815);
    const long primes[] = {3, 5, 7, 11, 13};
    auto sample_pq = [&](Prime p, long n_min, long n_max, bool kp_bound) {
        for (;;) {
            long n = n_min + static_cast<long>(rng() % (n_max - n_min + 1));
            Int bound;
            mpz_ui_pow_ui(bound.get_mpz_t(), p.value, kp_bound ? n : n + 1);
            long lim = bound.get_si() / 2;
            long num = static_cast<long>(rng() % (2 * lim + 1)) - lim;
            if (n > 0 && num % p.value == 0) continue;
            return PartialQuotient(p, num, n);
        }
    };
    long jp_bad = 0, kp_bad = 0, t_bad = 0;
    for (int i = 0; i < 10000; ++i) {
        Prime p = Prime::checked(primes[i % 5]);
        PartialQuotient a = sample_pq(p, 0, 5, false), b = sample_pq(p, 0, 5, false);
        if (a != b && !(vp_rational(a.value() - b.value(), p) <= 0)) ++jp_bad;
        PartialQuotient ka = sample_pq(p, 1, 5, true), kb = sample_pq(p, 1, 5, true);
        if (ka != kb && !(vp_rational(ka.value() - kb.value(), p) < 0)) ++kp_bad;
        long half = (p.value - 1) / 2;
        long v = -4 + static_cast<long>(rng() % 8);
        std::vector<long> digs(10);
        for (auto& d : digs) d = static_cast<long>(rng() % (2 * half + 1)) - half;
        if (digs[0] == 0) digs[0] = 1;
        Rat t = t_floor(PAdicApprox::from_digits(p, v, digs, false)).value();
        if (!(2 * abs(t.get_num()) < t.get_den())) ++t_bad;
    }
    EXPECT(jp_bad == 0);
    EXPECT(kp_bad == 0);
    EXPECT(t_bad == 0);
    report(5, ok, timer.secs(),
           "10000 J_p pairs v_p(a-b)<=0, 10000 K_p pairs v_p(a-b)<0, 10000 windows |t|<1/2");
}

void criterion6() {
    Timer timer;
    bool ok = true;
    long checked = 0;
    for (const auto& [x, e] : collected_runs) {
        ConvergentLawReport r = check_convergent_laws(x, e);
        if (!r.eq4_A_ok || !r.eq4_B_ok || !r.converging_ok) {
            std::printf("       convergent law failure on %s (index %ld)\n", e.input.c_str(),
                        r.first_bad_index);
            ok = false;
        }
        ++checked;
    }
    EXPECT(checked == static_cast<long>(collected_runs.size()));
    EXPECT(checked >= 6028);  // criteria 1-4
    char desc[128];
    std::snprintf(desc, sizeof desc,
                  "valuation identities and strict p-adic convergence on all %ld runs", checked);
    report(6, ok, timer.secs(), desc);
}

void criterion7() {
    Timer timer;
    bool ok = true;
    long periodic_rows = 0;
    for (long pv : {5L, 7L}) {
        Prime p = Prime::checked(pv);
        ScanResult res = conjecture_scan(p, 2, 2000, Algorithm::browkin_ii, 500, 0);
        if (!res.parity_all_pass) {
            std::printf("       parity violation in scan p=%ld\n", pv);
            ok = false;
        }
        for (const auto& row : res.rows) {
            if (row.status == ExpStatus::periodic) ++periodic_rows;
            if (row.status == ExpStatus::periodic && row.h == 0) {
                std::printf("       purely periodic sqrt(%ld) contradicts the Galois theorem\n",
                            row.D);
                ok = false;
            }
        }
    }
    EXPECT(periodic_rows > 100);

    // purely periodic runs found by sampling a + sqrt(D) satisfy the conditions
    long pure_found = 0;
    for (long pv : {5L, 7L}) {
        Prime p = Prime::checked(pv);
        for (long D = 2; D <= 200; ++D) {
            if (mpz_perfect_square_p(Int(D).get_mpz_t())) continue;
            if (!sqrt_exists(Int(D), p) || vp_int(Int(D), pv) != 0) continue;
            HenselRoot root(Int(D), p);
            for (long a = 1; a <= 30; ++a) {
                QuadInt x(a, 1, 1, D);
                Expansion e =
                    expand(x, Algorithm::browkin_ii, p, ExpandOptions{.max_steps = 2000});
                if (e.status != ExpStatus::periodic || e.h != 0) continue;
                ++pure_found;
                GaloisReport r = check_galois_necessary(x, e, &root);
                if (!(r.norm_alpha_is_one && r.norm_conj_lt_one && r.implication_holds)) {
                    std::printf("       pure periodic %s violates theorem conditions\n",
                                x.str().c_str());
                    ok = false;
                }
            }
        }
    }
    EXPECT(pure_found > 0);

    // converse-failure witness: conditions hold, expansion not purely periodic
    Prime p7 = Prime::checked(7);
    QuadInt w(3, 1, 1, 30);
    Expansion ew = expand(w, Algorithm::browkin_ii, p7);
    GaloisReport rw = check_galois_necessary(w, ew);
    EXPECT(rw.norm_alpha_is_one && rw.norm_conj_lt_one);
    EXPECT(!rw.pure_periodic && ew.h == 4);

    double s = timer.secs();
    EXPECT(s < 600.0);
    char desc[160];
    std::snprintf(desc, sizeof desc,
                  "scan p=5,7 D<=2000: parity law on %ld periodic rows; %ld purely periodic "
                  "samples meet the Galois conditions",
                  periodic_rows, pure_found);
    report(7, ok, s, desc);
}

void criterion8() {
    Timer timer;
    bool ok = true;
    std::mt19937_64 rng(20240816);
    const long primes[] = {3, 5, 7, 11, 13};
    long agree = 0, inconclusive = 0, disagree = 0, cases = 0;
    while (cases < 500) {
        Prime p = Prime::checked(primes[rng() % 5]);
        long D = 2 + static_cast<long>(rng() % 600);
        if (mpz_perfect_square_p(Int(D).get_mpz_t()) || !sqrt_exists(Int(D), p)) continue;
        long a = static_cast<long>(rng() % 101) - 50;
        long b = (rng() % 2 ? 1 : -1) * (1 + static_cast<long>(rng() % 6));
        long c = 1 + static_cast<long>(rng() % 60);
        QuadInt x(a, b, c, D);
        Algorithm kind = rng() % 2 ? Algorithm::browkin_i : Algorithm::browkin_ii;
        if (cases % 3 == 2) {
            // exercise browkin2star whenever the precondition happens to hold
            HenselRoot root(Int(D), p);
            if (vp_quad(x, p, &root) < 0) kind = Algorithm::browkin_ii_star;
        }
        ++cases;
        switch (oracle::oracle_check(x, p, kind, 50, 256, 4)) {
            case oracle::OracleAgreement::agree: ++agree; break;
            case oracle::OracleAgreement::inconclusive: ++inconclusive; break;
            case oracle::OracleAgreement::disagree:
                ++disagree;
                std::printf("       oracle disagrees on %s (p=%ld, %s)\n", x.str().c_str(),
                            p.value, algorithm_name(kind).c_str());
                ok = false;
                break;
        }
    }
    EXPECT(disagree == 0);
    EXPECT(inconclusive * 100 < 500);  // < 1%
    char desc[128];
    std::snprintf(desc, sizeof desc,
                  "oracle vs engine on 500 seeded inputs, 50 steps: %ld agree, %ld inconclusive",
                  agree, inconclusive);
    report(8, ok, timer.secs(), desc);
}

}  // namespace

int main() {
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    if (failures) {
        std::printf("%d criterion(s) failed\n", failures);
        return 1;
    }
    std::printf("all 8 criteria passed\n");
    return 0;
}
