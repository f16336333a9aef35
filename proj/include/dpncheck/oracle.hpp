#pragma once

#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "dpncheck/cost.hpp"
#include "dpncheck/dpn.hpp"
#include "dpncheck/log.hpp"

namespace dpncheck {

// A test-configuration problem: missing domain, no run within the bound, or
// a blow-up past the node cap.
struct OracleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Explicit candidate values per variable. Always supplied by the test
// fixture; guards like y' == y + 1 make silent domain inference unsound, so
// soundness of the oracle is the fixture's responsibility.
struct FiniteDomains {
  std::map<std::string, std::vector<Value>> values;

  FiniteDomains& set(const std::string& variable, std::vector<Value> vs) {
    values[variable] = std::move(vs);
    return *this;
  }
  // Convenience for integer ranges [lo, hi].
  FiniteDomains& set_int_range(const std::string& variable, long lo, long hi);
};

// Depth-first enumeration of every valid run of length <= max_len that ends
// in the final marking, with all written values drawn from the domains.
// Calls sink once per run (runs passing through the final marking early are
// reported and extended further). Throws OracleError when more than
// node_cap candidate firings are examined.
void enumerate_runs(const DPN& net, const FiniteDomains& domains,
                    size_t max_len, const std::function<void(const Run&)>& sink,
                    size_t node_cap = 1000000);

std::vector<Run> all_runs(const DPN& net, const FiniteDomains& domains,
                          size_t max_len, size_t node_cap = 1000000);

// Exact optimal alignment cost: the minimum edit distance between the trace
// and any enumerated run. Throws OracleError when no run exists within the
// bound.
Cost brute_force_optimal(const DPN& net, const LogTrace& trace,
                         const PenaltyProfile& pf, const FiniteDomains& domains,
                         size_t max_len, size_t node_cap = 1000000);

}  // namespace dpncheck
