#pragma once
#include <iosfwd>

namespace qtherm {

/// Runs the oracle-equivalence checks (closed forms against the Fock-space
/// ground truth) and returns the number of failures. With verbose set, one
/// line per check is written to out.
int run_selftest(std::ostream& out, bool verbose);

}  // namespace qtherm
