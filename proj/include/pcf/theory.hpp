#pragma once

#include <map>

#include "pcf/cf.hpp"

namespace pcf {

// Valuation profile of a run against the pure-periodicity theorems.
// For browkin2 the necessary condition is |α|_p = 1 and |ᾱ|_p < 1; for
// browkin2star it is v_p(α) < 0 and v_p(ᾱ) = 0.
struct GaloisReport {
    Algorithm algorithm;
    bool norm_alpha_is_one;
    bool norm_conj_lt_one;
    bool valuation_neg;
    bool conj_valuation_zero;
    bool pure_periodic;
    bool implication_holds;  // pure_periodic ⇒ the relevant condition pair
};

GaloisReport check_galois_necessary(const QuadInt& x, const Expansion& e,
                                    HenselRoot* root = nullptr);

// a + sqrt(D) meets |α|_p = 1, |ᾱ|_p < 1 iff a ≡ a0 (mod p), a0 the leading
// balanced digit of the canonical root. Requires v_p(D) = 0.
bool check_pure_candidate_sqrt(const Int& a, const Int& D, Prime p);

// Applies whichever preperiod-parity constraint matches the run:
// browkin2 under the Galois profile forbids odd h, browkin2star under its
// profile forbids even h, and sqrt(D) under browkin2 allows only h = 1 or even.
// Vacuously true when no constraint applies.
bool check_preperiod_parity(const Expansion& e, const QuadInt& x,
                            HenselRoot* root = nullptr);

// Convergent laws along a run: v_p(A_n) = Σ v_p(b_i) (skipped when b_0 = 0,
// where the identity's hypothesis fails), v_p(B_n) = Σ_{i>=1} v_p(b_i), and
// strictly increasing v_p(x - A_n/B_n).
struct ConvergentLawReport {
    bool eq4_A_ok = true;
    bool eq4_B_ok = true;
    bool converging_ok = true;
    long first_bad_index = -1;
};

ConvergentLawReport check_convergent_laws(const QuadInt& x, const Expansion& e,
                                          HenselRoot* root = nullptr);

// One member of the period-4 family: D = (1 - p^t)/(1 - p)^2 · p^2 together
// with the expansion the theorem predicts for the chosen branch.
struct FamilyInstance {
    long p;
    long t;
    Int D;
    RootBranch branch;
    std::vector<PartialQuotient> expected_preperiod;  // [0, ±1/p]
    std::vector<PartialQuotient> expected_period;     // [∓1, ∓2(p^{t-1}-1)/((p-1)p^{t-1}), ∓1, ±2/p]
};

// Empty when (1-p)^2 does not divide 1 - p^t (equivalently (p-1) ∤ t).
std::optional<FamilyInstance> period4_family(Prime p, long t,
                                             RootBranch branch = RootBranch::canonical);

struct FamilyVerification {
    bool ok;
    std::string detail;  // diff on mismatch
};

// Expands ±sqrt(D) with browkin2 and compares status, h, k and the quotient
// list verbatim against the instance.
FamilyVerification verify_family(const FamilyInstance& inst, const ExpandOptions& opts = {});

struct ScanRow {
    long D;
    std::string input;
    ExpStatus status;
    long h;
    long k;
    long steps;
    long sign_branch_count;
    bool parity_ok;  // check_preperiod_parity (true when not periodic)
};

struct ScanResult {
    long prime;
    Algorithm algorithm;
    long d_min, d_max, max_steps;
    std::vector<ScanRow> rows;  // sorted by D
    std::map<long, long> period_histogram;
    bool parity_all_pass;

    std::string to_csv() const;       // "p,D,input,algorithm,status,h,k,steps,sign_branch_count"
    std::string summary_json() const;
};

// Expands sqrt(D) for every non-square D in [d_min, d_max] with a p-adic
// square root. jobs > 1 distributes rows over OpenMP threads; the result is
// identical for any jobs value. With dedup_squarefree only D whose p-coprime
// part is squarefree are kept.
ScanResult conjecture_scan(Prime p, long d_min, long d_max, Algorithm kind, long max_steps,
                           int jobs = 1, bool dedup_squarefree = false);

}  // namespace pcf
