#include "pcf/theory.hpp"

#include <algorithm>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "json.hpp"

namespace pcf {

namespace {
// Checkers accept an optional root; build one on demand for irrational inputs.
HenselRoot* root_for(const QuadInt& x, Prime p, HenselRoot* root,
                     std::optional<HenselRoot>& local) {
    if (root != nullptr || x.is_rational()) return root;
    local.emplace(x.D(), p);
    return &*local;
}
}  // namespace

GaloisReport check_galois_necessary(const QuadInt& x, const Expansion& e, HenselRoot* root) {
    Prime p{e.prime};
    std::optional<HenselRoot> local;
    root = root_for(x, p, root, local);
    PadicVal v = vp_quad(x, p, root);
    PadicVal vc = vp_quad(x.conjugate(), p, root);
    GaloisReport r;
    r.algorithm = e.algorithm;
    r.norm_alpha_is_one = (v == 0);
    r.norm_conj_lt_one = (vc > 0);
    r.valuation_neg = (v < 0);
    r.conj_valuation_zero = (vc == 0);
    r.pure_periodic = (e.status == ExpStatus::periodic && e.h == 0);
    switch (e.algorithm) {
        case Algorithm::browkin_ii:
            r.implication_holds = !r.pure_periodic || (r.norm_alpha_is_one && r.norm_conj_lt_one);
            break;
        case Algorithm::browkin_ii_star:
            r.implication_holds = !r.pure_periodic || (r.valuation_neg && r.conj_valuation_zero);
            break;
        default:
            r.implication_holds = true;
    }
    return r;
}

bool check_pure_candidate_sqrt(const Int& a, const Int& D, Prime p) {
    if (!sqrt_exists(D, p))
        throw std::invalid_argument("check_pure_candidate_sqrt: sqrt(D) undefined");
    if (vp_int(D, p.value) != 0)
        throw std::invalid_argument("check_pure_candidate_sqrt: requires v_p(D) = 0");
    HenselRoot root(D, p, 4);
    long a0 = root.leading_digit();
    Int diff = a - a0;
    return mpz_divisible_ui_p(diff.get_mpz_t(), p.value) != 0;
}

bool check_preperiod_parity(const Expansion& e, const QuadInt& x, HenselRoot* root) {
    if (e.status != ExpStatus::periodic)
        throw std::invalid_argument("check_preperiod_parity: run is not periodic");
    Prime p{e.prime};
    std::optional<HenselRoot> local;
    root = root_for(x, p, root, local);
    PadicVal v = vp_quad(x, p, root);
    PadicVal vc = vp_quad(x.conjugate(), p, root);
    if (e.algorithm == Algorithm::browkin_ii && v == 0 && vc > 0) return e.h % 2 == 0;
    if (e.algorithm == Algorithm::browkin_ii_star && v < 0 && vc == 0) return e.h % 2 == 1;
    bool is_sqrt = x.a() == 0 && abs(x.b()) == 1 && x.c() == 1;
    if (e.algorithm == Algorithm::browkin_ii && is_sqrt) return e.h == 1 || e.h % 2 == 0;
    return true;
}

namespace {

// Convergent tracked over Z[1/p] as num / p^exp. No reduction is ever needed:
// only valuations and exact zero tests are read off, and the only common
// factors the recurrence accumulates are powers of p, which exp absorbs.
struct ZpFrac {
    Int num;
    long exp;
};

ZpFrac zp_step(const PartialQuotient& q, const ZpFrac& prev, const ZpFrac& prev2, long p) {
    // q·prev + prev2 with denominators aligned
    ZpFrac r;
    r.exp = q.p_exponent() + prev.exp;
    Int lhs = q.numerator() * prev.num;
    long shift = r.exp - prev2.exp;
    Int pw;
    if (shift >= 0) {
        mpz_ui_pow_ui(pw.get_mpz_t(), p, shift);
        r.num = lhs + prev2.num * pw;
    } else {
        mpz_ui_pow_ui(pw.get_mpz_t(), p, -shift);
        r.num = lhs * pw + prev2.num;
        r.exp = prev2.exp;
    }
    return r;
}

}  // namespace

ConvergentLawReport check_convergent_laws(const QuadInt& x, const Expansion& e,
                                          HenselRoot* root) {
    Prime p{e.prime};
    std::optional<HenselRoot> local;
    root = root_for(x, p, root, local);
    ConvergentLawReport r;
    bool b0_zero = !e.quotients.empty() && e.quotients.front().is_zero();
    PadicVal sumA = b0_zero ? PadicVal::infinity() : PadicVal::of(0);
    if (!b0_zero && !e.quotients.empty()) sumA = e.quotients.front().vp();
    PadicVal sumB = PadicVal::of(0);
    PadicVal prev_err = PadicVal::of(0);
    bool have_prev = false;
    ZpFrac a2{Int(0), 0}, a1{Int(1), 0}, b2{Int(1), 0}, b1{Int(0), 0};  // seeds at n-2, n-1
    Int pw;
    auto flag = [&](bool& field, size_t n) {
        field = false;
        if (r.first_bad_index < 0) r.first_bad_index = static_cast<long>(n);
    };
    for (size_t n = 0; n < e.quotients.size(); ++n) {
        ZpFrac an = zp_step(e.quotients[n], a1, a2, p.value);
        ZpFrac bn = zp_step(e.quotients[n], b1, b2, p.value);
        if (n >= 1) {
            PadicVal vb = e.quotients[n].vp();
            sumB = sumB + vb;
            if (!b0_zero) sumA = sumA + vb;
        }
        PadicVal vAn = an.num == 0 ? PadicVal::infinity()
                                   : PadicVal::of(vp_int(an.num, p.value) - an.exp);
        PadicVal vBn = bn.num == 0 ? PadicVal::infinity()
                                   : PadicVal::of(vp_int(bn.num, p.value) - bn.exp);
        if (!b0_zero && vAn != sumA) flag(r.eq4_A_ok, n);
        if (vBn != sumB) flag(r.eq4_B_ok, n);

        // |x - A_n/B_n|_p strictly decreasing ⇔ the valuation strictly grows.
        // x - A_n/B_n = ((a·Bnum - Anum·c·p^(eA-eB)) + b·Bnum·sqrt(D)) / (c·Bnum·p^(eA-eB)·...)
        // worked on raw integers; common factors cancel in the valuation.
        long shift = an.exp - bn.exp;  // scale A_n and B_n to a common p power
        Int anum = an.num, bnum = bn.num;
        if (shift >= 0) {
            mpz_ui_pow_ui(pw.get_mpz_t(), p.value, shift);
            bnum *= pw;
        } else {
            mpz_ui_pow_ui(pw.get_mpz_t(), p.value, -shift);
            anum *= pw;
        }
        // now A_n/B_n = anum/bnum exactly
        Int top_rat = x.a() * bnum - anum * x.c();
        PadicVal vtop = PadicVal::infinity();
        if (x.is_rational()) {
            vtop = top_rat == 0 ? PadicVal::infinity()
                                : PadicVal::of(vp_int(top_rat, p.value));
        } else {
            vtop = vp_root_combination(top_rat, x.b() * bnum, p, *root, x.branch());
        }
        PadicVal ve = vtop.is_infinite()
                          ? PadicVal::infinity()
                          : PadicVal::of(vtop.value() - vp_int(x.c(), p.value) -
                                         vp_int(bnum, p.value));
        if (have_prev && !(prev_err < ve)) flag(r.converging_ok, n);
        prev_err = ve;
        have_prev = true;

        a2 = std::move(a1);
        a1 = std::move(an);
        b2 = std::move(b1);
        b1 = std::move(bn);
    }
    return r;
}

std::optional<FamilyInstance> period4_family(Prime p, long t, RootBranch branch) {
    if (t < 2) throw std::invalid_argument("period4_family: t must be >= 2");
    Int pt;
    mpz_ui_pow_ui(pt.get_mpz_t(), p.value, t);
    Int num = 1 - pt;
    Int den = Int(1 - p.value) * Int(1 - p.value);
    if (!mpz_divisible_p(num.get_mpz_t(), den.get_mpz_t())) return std::nullopt;
    Int D = num / den * p.value * p.value;

    long s = branch == RootBranch::canonical ? 1 : -1;
    FamilyInstance inst;
    inst.p = p.value;
    inst.t = t;
    inst.D = D;
    inst.branch = branch;
    inst.expected_preperiod = {PartialQuotient(p), PartialQuotient(p, s, 1)};
    // b_3 numerator: 2(p^{t-1}-1)/(p-1), an integer coprime to p
    Int pt1;
    mpz_ui_pow_ui(pt1.get_mpz_t(), p.value, t - 1);
    Int num3 = 2 * (pt1 - 1) / (p.value - 1);
    inst.expected_period = {PartialQuotient(p, -s, 0), PartialQuotient(p, -s * num3, t - 1),
                            PartialQuotient(p, -s, 0), PartialQuotient(p, 2 * s, 1)};
    return inst;
}

FamilyVerification verify_family(const FamilyInstance& inst, const ExpandOptions& opts) {
    Prime p{inst.p};
    Expansion e = expand(QuadInt::sqrt_of(inst.D, inst.branch), Algorithm::browkin_ii, p, opts);
    std::ostringstream diff;
    bool ok = true;
    if (e.status != ExpStatus::periodic) {
        ok = false;
        diff << "status=" << status_name(e.status) << " expected PERIODIC; ";
    }
    if (e.h != 2 || e.k != 4) {
        ok = false;
        diff << "(h,k)=(" << e.h << "," << e.k << ") expected (2,4); ";
    }
    auto cmp = [&](std::span<const PartialQuotient> got,
                   const std::vector<PartialQuotient>& want, const char* label) {
        if (got.size() != want.size()) {
            ok = false;
            diff << label << " length " << got.size() << " != " << want.size() << "; ";
            return;
        }
        for (size_t i = 0; i < want.size(); ++i) {
            if (got[i] != want[i]) {
                ok = false;
                diff << label << "[" << i << "]=" << got[i].str() << " expected "
                     << want[i].str() << "; ";
            }
        }
    };
    if (e.status == ExpStatus::periodic) {
        cmp(e.preperiod(), inst.expected_preperiod, "preperiod");
        cmp(e.period(), inst.expected_period, "period");
    }
    return {ok, diff.str()};
}

namespace {

bool p_coprime_part_squarefree(long D, long p) {
    long n = std::abs(D);
    while (n % p == 0) n /= p;
    for (long q = 2; q * q <= n; ++q) {
        if (q == p) continue;
        if (n % (q * q) == 0) return false;
        while (n % q == 0) n /= q;
    }
    return true;
}

ScanRow scan_one(Prime p, long D, Algorithm kind, long max_steps) {
    ScanRow row;
    row.D = D;
    QuadInt x = QuadInt::sqrt_of(D);
    row.input = x.str();
    Expansion e = expand(x, kind, p, ExpandOptions{.max_steps = max_steps});
    row.status = e.status;
    row.h = e.h;
    row.k = e.k;
    row.steps = e.steps_used;
    row.sign_branch_count = static_cast<long>(e.sign_branch_indices.size());
    row.parity_ok = e.status == ExpStatus::periodic ? check_preperiod_parity(e, x) : true;
    return row;
}

bool is_square_long(long n) {
    if (n < 0) return false;
    Int z(n);
    return mpz_perfect_square_p(z.get_mpz_t()) != 0;
}

}  // namespace

ScanResult conjecture_scan(Prime p, long d_min, long d_max, Algorithm kind, long max_steps,
                           int jobs, bool dedup_squarefree) {
    if (d_min > d_max) throw std::invalid_argument("conjecture_scan: d_min > d_max");
    std::vector<long> ds;
    for (long D = d_min; D <= d_max; ++D) {
        if (D == 0 || is_square_long(D)) continue;
        if (!sqrt_exists(Int(D), p)) continue;
        if (dedup_squarefree && !p_coprime_part_squarefree(D, p.value)) continue;
        ds.push_back(D);
    }
    std::vector<ScanRow> rows(ds.size());
#ifdef _OPENMP
    int nthreads = jobs > 0 ? jobs : omp_get_max_threads();
#else
    int nthreads = 1;
#endif
#pragma omp parallel for schedule(dynamic) num_threads(nthreads) if (nthreads > 1)
    for (long i = 0; i < static_cast<long>(ds.size()); ++i)
        rows[i] = scan_one(p, ds[i], kind, max_steps);

    ScanResult res;
    res.prime = p.value;
    res.algorithm = kind;
    res.d_min = d_min;
    res.d_max = d_max;
    res.max_steps = max_steps;
    res.rows = std::move(rows);
    res.parity_all_pass = true;
    for (const auto& r : res.rows) {
        if (r.status == ExpStatus::periodic) ++res.period_histogram[r.k];
        res.parity_all_pass = res.parity_all_pass && r.parity_ok;
    }
    return res;
}

std::string ScanResult::to_csv() const {
    std::ostringstream os;
    os << "p,D,input,algorithm,status,h,k,steps,sign_branch_count\n";
    for (const auto& r : rows) {
        os << prime << "," << r.D << "," << r.input << "," << algorithm_name(algorithm) << ","
           << status_name(r.status) << "," << r.h << "," << r.k << "," << r.steps << ","
           << r.sign_branch_count << "\n";
    }
    return os.str();
}

std::string ScanResult::summary_json() const {
    nlohmann::json j;
    j["p"] = prime;
    j["algorithm"] = algorithm_name(algorithm);
    j["d_min"] = d_min;
    j["d_max"] = d_max;
    j["max_steps"] = max_steps;
    j["rows"] = rows.size();
    std::map<std::string, long> statuses;
    for (const auto& r : rows) ++statuses[status_name(r.status)];
    j["status_counts"] = statuses;
    std::map<std::string, long> hist;
    for (const auto& [k, n] : period_histogram) hist[std::to_string(k)] = n;
    j["period_histogram"] = hist;
    j["parity_all_pass"] = parity_all_pass;
    std::vector<long> violations;
    for (const auto& r : rows)
        if (!r.parity_ok) violations.push_back(r.D);
    j["parity_violations"] = violations;
    return j.dump();
}

}  // namespace pcf
