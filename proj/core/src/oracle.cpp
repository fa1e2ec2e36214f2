#include "swarmot/oracle.hpp"

#include <vector>

namespace swarmot {
namespace {

struct Search {
    const std::vector<int>& agents;
    const std::vector<std::vector<int>>& choices;
    const UtilityParams& params;
    std::vector<int> picked;
    std::set<int> used;
    Assignment best;
    double best_value = 0.0;
    bool found = false;

    // Depth-first in ascending (agent, waypoint) order with strict improvement,
    // so the first optimum reached is the lexicographically smallest.
    void run(size_t depth, double value) {
        if (depth == agents.size()) {
            if (!found || value > best_value) {
                found = true;
                best_value = value;
                best.pairs.clear();
                for (size_t i = 0; i < agents.size(); ++i) best.pairs[agents[i]] = picked[i];
            }
            return;
        }
        const int x = agents[depth];
        for (int y : choices[depth]) {
            if (used.count(y)) continue;
            used.insert(y);
            picked[depth] = y;
            run(depth + 1, value + params.gamma(x, y) + params.delta(x, y));
            used.erase(y);
        }
    }
};

}  // namespace

std::pair<Assignment, double> brute_force_optimal(const NetworkTopology& topology,
                                                  const UtilityParams& params) {
    if (topology.agent_count > 8)
        throw TooLargeError("enumeration guard: " + std::to_string(topology.agent_count) +
                            " agents exceeds 8");
    validate_params(topology, params);

    std::vector<int> agents(topology.active_agents.begin(), topology.active_agents.end());
    std::vector<std::vector<int>> choices;
    choices.reserve(agents.size());
    for (int x : agents) choices.push_back(topology.agent_edges(x));

    Search search{agents, choices, params, std::vector<int>(agents.size()), {}, {}, 0.0, false};
    search.run(0, 0.0);
    if (!search.found)
        throw InfeasibleError("no injective assignment covers every active agent");
    return {search.best, search.best_value};
}

}  // namespace swarmot
