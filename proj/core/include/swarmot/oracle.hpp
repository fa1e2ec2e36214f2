#pragma once

#include <utility>

#include "swarmot/types.hpp"

namespace swarmot {

// Exhaustive matching-mode optimum: enumerates every injective agent -> waypoint
// map over active edges and returns one maximizing aggregate utility. Among
// equal-value assignments the lexicographically smallest (by agent, then
// waypoint) is returned.
//
// Throws TooLargeError beyond 8 agents and InfeasibleError when no complete
// injective assignment exists.
std::pair<Assignment, double> brute_force_optimal(const NetworkTopology& topology,
                                                  const UtilityParams& params);

}  // namespace swarmot
