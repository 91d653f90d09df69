#include <chrono>
#include <iostream>
#include <random>

#include "CLI11.hpp"
#include "json.hpp"
#include "pcf/oracle.hpp"
#include "pcf/theory.hpp"

namespace {

using namespace pcf;

RootBranch branch_from(const std::string& s) {
    if (s == "canonical") return RootBranch::canonical;
    if (s == "minus") return RootBranch::minus;
    throw std::invalid_argument("branch: expected canonical|minus, got '" + s + "'");
}

Algorithm algorithm_from(const std::string& s) {
    auto a = algorithm_from_name(s);
    if (!a)
        throw std::invalid_argument("algorithm: expected browkin1|browkin2|browkin2star, got '" +
                                    s + "'");
    return *a;
}

QuadInt input_from(const std::string& s, RootBranch branch) {
    try {
        auto x = QuadInt::parse(s, branch);
        if (!x) throw std::invalid_argument("input: cannot parse '" + s + "'");
        return *x;
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(std::string("input: ") + e.what());
    }
}

std::string join_quotients(std::span<const PartialQuotient> qs, const char* sep = " ") {
    std::string out;
    for (size_t i = 0; i < qs.size(); ++i) {
        if (i) out += sep;
        out += qs[i].str();
    }
    return out;
}

int cmd_expand(long prime, const std::string& alg, const std::string& input,
               const std::string& branch, long max_steps, long precision_cap,
               const std::string& format) {
    Prime p = Prime::checked(prime);
    Algorithm kind = algorithm_from(alg);
    QuadInt x = input_from(input, branch_from(branch));
    ExpandOptions opts;
    opts.max_steps = max_steps;
    opts.precision_cap = precision_cap;
    Expansion e = expand(x, kind, p, opts);

    if (format == "json") {
        std::cout << e.to_json() << "\n";
    } else if (format == "csv") {
        std::cout << "p,input,algorithm,status,h,k,steps_used,sign_branch_count\n"
                  << e.prime << "," << e.input << "," << algorithm_name(e.algorithm) << ","
                  << status_name(e.status) << "," << e.h << "," << e.k << "," << e.steps_used
                  << "," << e.sign_branch_indices.size() << "\n";
    } else {
        std::cout << "p=" << e.prime << " algorithm=" << algorithm_name(e.algorithm)
                  << " input=" << e.input << "\n";
        std::cout << "status=" << status_name(e.status) << " h=" << e.h << " k=" << e.k
                  << " steps_used=" << e.steps_used << "\n";
        if (e.status == ExpStatus::periodic) {
            std::cout << "preperiod: " << join_quotients(e.preperiod()) << "\n";
            std::cout << "period: " << join_quotients(e.period()) << "\n";
        } else {
            std::cout << "quotients: " << join_quotients(e.quotients) << "\n";
        }
        std::cout << "sign_branch_indices:";
        for (long i : e.sign_branch_indices) std::cout << " " << i;
        std::cout << "\n";
    }
    return e.status == ExpStatus::capped ? 2 : 0;
}

int cmd_family(long prime, long t_max, long max_steps, const std::string& format) {
    Prime p = Prime::checked(prime);
    bool all_ok = true;
    nlohmann::json jrows = nlohmann::json::array();
    std::string csv = "p,t,D,branch,verified\n";
    std::string text;
    ExpandOptions opts;
    opts.max_steps = max_steps;
    for (long t = 2; t <= t_max; ++t) {
        for (RootBranch br : {RootBranch::canonical, RootBranch::minus}) {
            auto inst = period4_family(p, t, br);
            if (!inst) continue;
            FamilyVerification v = verify_family(*inst, opts);
            all_ok = all_ok && v.ok;
            const char* bs = br == RootBranch::canonical ? "+" : "-";
            if (format == "json") {
                nlohmann::json r;
                r["p"] = prime;
                r["t"] = t;
                r["D"] = inst->D.get_str();
                r["branch"] = bs;
                r["verified"] = v.ok;
                r["expected_preperiod"] = join_quotients(inst->expected_preperiod, ",");
                r["expected_period"] = join_quotients(inst->expected_period, ",");
                if (!v.ok) r["diff"] = v.detail;
                jrows.push_back(r);
            } else if (format == "csv") {
                csv += std::to_string(prime) + "," + std::to_string(t) + "," +
                       inst->D.get_str() + "," + bs + "," + (v.ok ? "yes" : "no") + "\n";
            } else {
                text += "t=" + std::to_string(t) + " D=" + inst->D.get_str() + " branch=" + bs +
                        " period=[" + join_quotients(inst->expected_period, ",") +
                        "] verified=" + (v.ok ? "yes" : "no") +
                        (v.ok ? "" : "  " + v.detail) + "\n";
            }
        }
    }
    if (format == "json")
        std::cout << jrows.dump() << "\n";
    else if (format == "csv")
        std::cout << csv;
    else
        std::cout << text;
    return all_ok ? 0 : 2;
}

int cmd_scan(long prime, long d_min, long d_max, const std::string& alg, long max_steps,
             int jobs, bool dedup, const std::string& format) {
    Prime p = Prime::checked(prime);
    Algorithm kind = algorithm_from(alg);
    ScanResult res = conjecture_scan(p, d_min, d_max, kind, max_steps, jobs, dedup);
    if (format == "json") {
        nlohmann::json j;
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& r : res.rows) {
            nlohmann::json o;
            o["D"] = r.D;
            o["input"] = r.input;
            o["status"] = status_name(r.status);
            o["h"] = r.h;
            o["k"] = r.k;
            o["steps"] = r.steps;
            o["sign_branch_count"] = r.sign_branch_count;
            o["parity_ok"] = r.parity_ok;
            rows.push_back(o);
        }
        j["rows"] = rows;
        j["summary"] = nlohmann::json::parse(res.summary_json());
        std::cout << j.dump() << "\n";
    } else if (format == "text") {
        for (const auto& r : res.rows)
            std::cout << "D=" << r.D << " status=" << status_name(r.status) << " h=" << r.h
                      << " k=" << r.k << " steps=" << r.steps
                      << " sign_branches=" << r.sign_branch_count
                      << " parity_ok=" << (r.parity_ok ? "yes" : "no") << "\n";
        std::cerr << res.summary_json() << "\n";
    } else {
        std::cout << res.to_csv();
        std::cerr << res.summary_json() << "\n";
    }
    return 0;
}

struct SuiteResult {
    bool ok = true;
    void check(bool cond, const std::string& name, const std::string& detail = "") {
        std::cout << (cond ? "[PASS] " : "[FAIL] ") << name
                  << (cond || detail.empty() ? "" : ": " + detail) << "\n";
        ok = ok && cond;
    }
};

void verify_lemmas(SuiteResult& sr) {
    std::mt19937_64 rng(20240901);
    for (long pv : {3L, 5L, 7L, 11L, 13L}) {
        Prime p = Prime::checked(pv);
        auto sample_pq = [&](long n_min, long n_max, bool kp_bound) {
            for (;;) {
                long n = n_min + static_cast<long>(rng() % (n_max - n_min + 1));
                Int bound;
                mpz_ui_pow_ui(bound.get_mpz_t(), pv, kp_bound ? n : n + 1);
                long lim = bound.get_si() / 2;
                long num = static_cast<long>(rng() % (2 * lim + 1)) - lim;
                if (n > 0 && num % pv == 0) continue;
                return PartialQuotient(p, num, n);
            }
        };
        bool jp_ok = true, kp_ok = true, t_ok = true;
        for (int i = 0; i < 10000; ++i) {
            PartialQuotient a = sample_pq(0, 5, false), b = sample_pq(0, 5, false);
            if (a == b) continue;
            if (!(vp_rational(a.value() - b.value(), p) <= 0)) jp_ok = false;
            PartialQuotient ka = sample_pq(1, 5, true), kb = sample_pq(1, 5, true);
            if (ka != kb && !(vp_rational(ka.value() - kb.value(), p) < 0)) kp_ok = false;
            // random digit window: |t(x)| < 1/2 exactly
            long v = -3 + static_cast<long>(rng() % 7);
            std::vector<long> digs;
            long half = (pv - 1) / 2;
            for (int d = 0; d < 8; ++d)
                digs.push_back(static_cast<long>(rng() % (2 * half + 1)) - half);
            if (digs[0] == 0) digs[0] = 1;
            PAdicApprox x = PAdicApprox::from_digits(p, v, digs, false);
            Rat tv = t_floor(x).value();
            if (!(2 * abs(tv.get_num()) < tv.get_den())) t_ok = false;
        }
        sr.check(jp_ok, "lemma 2.2 J_" + std::to_string(pv) + ": v_p(a-b) <= 0");
        sr.check(kp_ok, "lemma 2.4 K_" + std::to_string(pv) + ": v_p(a-b) < 0");
        sr.check(t_ok, "lemma 2.3 Q_" + std::to_string(pv) + ": |t(x)| < 1/2");
    }
}

void verify_galois(SuiteResult& sr) {
    Prime p7 = Prime::checked(7);
    QuadInt ex38(3, 1, 1, 30);
    Expansion e38 = expand(ex38, Algorithm::browkin_ii, p7);
    GaloisReport r38 = check_galois_necessary(ex38, e38);
    sr.check(e38.status == ExpStatus::periodic && e38.h == 4 && e38.k == 10,
             "sqrt(30)+3 in Q_7: (h,k)=(4,10)");
    sr.check(r38.norm_alpha_is_one && r38.norm_conj_lt_one && !r38.pure_periodic,
             "sqrt(30)+3: conditions hold yet not purely periodic (converse fails)");
    sr.check(r38.implication_holds, "sqrt(30)+3: Galois implication");

    Prime p5 = Prime::checked(5);
    QuadInt ex310(2, 1, 75, 79);
    Expansion e310 = expand(ex310, Algorithm::browkin_ii_star, p5);
    GaloisReport r310 = check_galois_necessary(ex310, e310);
    sr.check(e310.status == ExpStatus::periodic && e310.h == 15 && e310.k == 8,
             "(2+sqrt(79))/75 in Q_5: (h,k)=(15,8)");
    sr.check(r310.valuation_neg && r310.conj_valuation_zero,
             "(2+sqrt(79))/75: v_p(x)<0 and v_p(conj)=0");
    sr.check(check_preperiod_parity(e310, ex310), "(2+sqrt(79))/75: odd preperiod allowed");

    // sample purely periodic browkin2 runs and check the necessary condition
    long found = 0;
    bool imp_ok = true;
    for (long D = 2; D <= 80 && found < 10; ++D) {
        if (!sqrt_exists(Int(D), p7) || vp_int(Int(D), 7) != 0) continue;
        Int z(D);
        if (mpz_perfect_square_p(z.get_mpz_t())) continue;
        for (long a = 1; a <= 20; ++a) {
            QuadInt x(a, 1, 1, D);
            Expansion e = expand(x, Algorithm::browkin_ii, p7, ExpandOptions{.max_steps = 3000});
            if (e.status != ExpStatus::periodic || e.h != 0) continue;
            ++found;
            GaloisReport r = check_galois_necessary(x, e);
            imp_ok = imp_ok && r.implication_holds && r.norm_alpha_is_one && r.norm_conj_lt_one;
        }
    }
    sr.check(found > 0 && imp_ok,
             "purely periodic samples satisfy |x|_p=1, |conj|_p<1 (" + std::to_string(found) +
                 " found)");
}

void verify_parity(SuiteResult& sr) {
    for (long pv : {5L, 7L}) {
        ScanResult res =
            conjecture_scan(Prime::checked(pv), 2, 1000, Algorithm::browkin_ii, 300, 0);
        sr.check(res.parity_all_pass,
                 "sqrt(D) scan p=" + std::to_string(pv) + ", D<=1000: preperiod 1 or even");
    }
}

void verify_family_suite(SuiteResult& sr) {
    for (long pv : {3L, 5L, 7L, 11L, 13L}) {
        Prime p = Prime::checked(pv);
        long instances = 0;
        bool ok = true;
        for (long t = 2; t <= 12; ++t) {
            for (RootBranch br : {RootBranch::canonical, RootBranch::minus}) {
                auto inst = period4_family(p, t, br);
                if (!inst) continue;
                ++instances;
                FamilyVerification v = verify_family(*inst);
                ok = ok && v.ok;
            }
        }
        sr.check(ok, "period-4 family p=" + std::to_string(pv) + " (" +
                         std::to_string(instances) + " instances, t<=12)");
    }
}

void verify_oracle(SuiteResult& sr) {
    std::mt19937_64 rng(424242);
    long agree = 0, inconclusive = 0, disagree = 0;
    const long cases = 60;
    for (long i = 0; i < cases; ++i) {
        long pv = std::vector<long>{3, 5, 7, 11, 13}[rng() % 5];
        Prime p = Prime::checked(pv);
        long D;
        do
            D = 2 + static_cast<long>(rng() % 400);
        while (mpz_perfect_square_p(Int(D).get_mpz_t()) || !sqrt_exists(Int(D), p));
        long a = static_cast<long>(rng() % 41) - 20;
        long b = 1 + static_cast<long>(rng() % 5);
        long c = 1 + static_cast<long>(rng() % 30);
        QuadInt x(a, b, c, D);
        Algorithm kind = rng() % 2 == 0 ? Algorithm::browkin_i : Algorithm::browkin_ii;
        auto v = oracle::oracle_check(x, p, kind, 30, 128, 5);
        if (v == oracle::OracleAgreement::agree) ++agree;
        else if (v == oracle::OracleAgreement::inconclusive) ++inconclusive;
        else ++disagree;
    }
    sr.check(disagree == 0 && inconclusive <= cases / 100 + 1,
             "oracle vs engine on " + std::to_string(cases) + " random inputs (agree=" +
                 std::to_string(agree) + ", inconclusive=" + std::to_string(inconclusive) + ")");
}

int cmd_verify(const std::string& suite) {
    SuiteResult sr;
    bool known = false;
    if (suite == "lemmas" || suite == "all") {
        verify_lemmas(sr);
        known = true;
    }
    if (suite == "galois" || suite == "all") {
        verify_galois(sr);
        known = true;
    }
    if (suite == "parity" || suite == "all") {
        verify_parity(sr);
        known = true;
    }
    if (suite == "family" || suite == "all") {
        verify_family_suite(sr);
        known = true;
    }
    if (suite == "oracle" || suite == "all") {
        verify_oracle(sr);
        known = true;
    }
    if (!known) throw std::invalid_argument("suite: unknown suite '" + suite + "'");
    return sr.ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact p-adic continued fractions: Browkin I, II and II*"};
    app.require_subcommand(1);
    app.set_config("--config");

    auto* ex = app.add_subcommand("expand", "expand one rational or quadratic irrational");
    long ex_p = 0;
    std::string ex_alg = "browkin2", ex_input, ex_branch = "canonical", ex_fmt = "text";
    long ex_steps = 20000, ex_cap = 1L << 20;
    ex->add_option("-p,--prime", ex_p, "odd prime")->required();
    ex->add_option("-a,--algorithm", ex_alg, "browkin1|browkin2|browkin2star");
    ex->add_option("input", ex_input, "\"a/c\" or \"(a+b*sqrt(D))/c\"")->required();
    ex->add_option("--max-steps", ex_steps, "step cap before CAPPED");
    ex->add_option("--precision-cap", ex_cap, "hard cap on root digits");
    ex->add_option("--branch", ex_branch, "canonical|minus root of D");
    ex->add_option("-f,--format", ex_fmt, "text|json|csv");

    auto* fam = app.add_subcommand("family", "period-4 family instances and verification");
    long fam_p = 0, fam_tmax = 12, fam_steps = 20000;
    std::string fam_fmt = "text";
    fam->add_option("-p,--prime", fam_p, "odd prime")->required();
    fam->add_option("--t-max", fam_tmax, "largest exponent t");
    fam->add_option("--max-steps", fam_steps, "step cap per expansion");
    fam->add_option("-f,--format", fam_fmt, "text|json|csv");

    auto* sc = app.add_subcommand("scan", "expand sqrt(D) over a range of D");
    long sc_p = 0, sc_dmin = 2, sc_dmax = 100, sc_steps = 500;
    int sc_jobs = 1;
    bool sc_dedup = false;
    std::string sc_alg = "browkin2", sc_fmt = "csv";
    sc->add_option("-p,--prime", sc_p, "odd prime")->required();
    sc->add_option("--d-min", sc_dmin, "first radicand");
    sc->add_option("--d-max", sc_dmax, "last radicand");
    sc->add_option("-a,--algorithm", sc_alg, "browkin1|browkin2|browkin2star");
    sc->add_option("--max-steps", sc_steps, "step cap per expansion");
    sc->add_option("-j,--jobs", sc_jobs, "parallel workers (0 = all cores)");
    sc->add_flag("--dedup-squarefree", sc_dedup, "keep only p-coprime squarefree D");
    sc->add_option("-f,--format", sc_fmt, "csv|json|text");

    auto* ver = app.add_subcommand("verify", "run a built-in check suite");
    std::string ver_suite;
    ver->add_option("suite", ver_suite, "lemmas|galois|parity|family|oracle|all")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }

    try {
        if (app.got_subcommand(ex))
            return cmd_expand(ex_p, ex_alg, ex_input, ex_branch, ex_steps, ex_cap, ex_fmt);
        if (app.got_subcommand(fam)) return cmd_family(fam_p, fam_tmax, fam_steps, fam_fmt);
        if (app.got_subcommand(sc))
            return cmd_scan(sc_p, sc_dmin, sc_dmax, sc_alg, sc_steps, sc_jobs, sc_dedup, sc_fmt);
        if (app.got_subcommand(ver)) return cmd_verify(ver_suite);
    } catch (const PrecisionCapError& e) {
        std::cerr << "precision cap exceeded: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
