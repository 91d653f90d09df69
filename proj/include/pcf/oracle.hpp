#pragma once

#include "pcf/cf.hpp"

namespace pcf::oracle {

// Expansion computed purely on a truncated digit window of fixed width, with
// no exact QuadInt arithmetic. Used to cross-validate the exact engine; it
// shares none of the engine's arithmetic.
struct OracleRun {
    enum class Outcome { ok, fault };
    Outcome outcome = Outcome::ok;
    std::vector<Rat> quotients;  // emitted before fault / termination / step cap
    bool terminated = false;     // window became exactly zero after a subtraction
    long fault_step = -1;
};

// Expands (a + b*sqrt(D))/c with `window` digits of working precision and a
// fixed guard margin; any operation that would consume the guard aborts with
// a precision fault instead of emitting possibly wrong digits.
OracleRun oracle_expand(const Int& a, const Int& b, const Int& c, const Int& D, Prime p,
                        Algorithm kind, long steps, long window,
                        RootBranch branch = RootBranch::canonical);

enum class OracleAgreement { agree, disagree, inconclusive };

// Runs the oracle against the exact engine's quotients, retrying with a
// doubled window on precision faults up to `retries` times.
OracleAgreement oracle_check(const QuadInt& x, Prime p, Algorithm kind, long steps,
                             long window0 = 256, int retries = 4);

}  // namespace pcf::oracle
