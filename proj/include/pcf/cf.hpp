#pragma once

#include <span>

#include "pcf/quad.hpp"

namespace pcf {

enum class Algorithm { browkin_i, browkin_ii, browkin_ii_star };

std::string algorithm_name(Algorithm a);
std::optional<Algorithm> algorithm_from_name(std::string_view s);

enum class ExpStatus { finite, periodic, capped };

std::string status_name(ExpStatus s);

struct ExpandOptions {
    long max_steps = 20000;
    long root_precision = 64;
    long precision_cap = 1L << 20;
};

// One algorithm step: the partial quotient b and the next complete quotient
// 1/(x - b), or termination when x = b exactly.
struct StepOutcome {
    PartialQuotient b;
    bool terminated;
    QuadInt next;
    bool sign_branch_fired;
};

StepOutcome step(const QuadInt& x, long n, Algorithm kind, Prime p, HenselRoot* root);

struct Expansion {
    Algorithm algorithm;
    long prime;
    std::string input;
    ExpStatus status;
    std::vector<PartialQuotient> quotients;  // b_0 .. b_{h+k-1} (all emitted)
    long h = 0;                              // preperiod length
    long k = 0;                              // period length, 0 unless periodic
    std::vector<long> sign_branch_indices;
    long steps_used = 0;
    std::optional<QuadInt> witness;  // α_h for periodic runs (= α_{h+k})

    std::span<const PartialQuotient> preperiod() const {
        return {quotients.data(), static_cast<size_t>(h)};
    }
    std::span<const PartialQuotient> period() const {
        return {quotients.data() + h, static_cast<size_t>(k)};
    }

    std::string to_json() const;
};

// Runs the chosen algorithm with exact finiteness/periodicity detection.
// Periodicity is witnessed by the first repeat of a canonical complete-quotient
// state, which yields the least (h, k).
Expansion expand(const QuadInt& x, Algorithm kind, Prime p, const ExpandOptions& opts = {});

// Convergents A_n/B_n with seeds A_{-1}=1, A_{-2}=0, B_{-1}=0, B_{-2}=1.
struct Convergents {
    std::vector<Rat> A, B;
    static Convergents of(std::span<const PartialQuotient> bs);
};

// Folds a FINITE expansion back to its rational, or solves the periodic tail's
// quadratic and applies the preperiod Möbius map. Exact round trip.
QuadInt reconstruct(const Expansion& e);

}  // namespace pcf
