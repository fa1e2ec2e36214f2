#include "swarmot/types.hpp"

#include <cmath>

namespace swarmot {

NetworkTopology NetworkTopology::full(int agents, int waypoints) {
    NetworkTopology t;
    t.agent_count = agents;
    t.waypoint_count = waypoints;
    for (int x = 0; x < agents; ++x) t.active_agents.insert(x);
    for (int y = 0; y < waypoints; ++y) t.active_waypoints.insert(y);
    for (int x = 0; x < agents; ++x)
        for (int y = 0; y < waypoints; ++y) t.active_edges.insert({x, y});
    return t;
}

std::vector<int> NetworkTopology::agent_edges(int agent) const {
    std::vector<int> out;
    for (int y : active_waypoints)
        if (edge_active(agent, y)) out.push_back(y);
    return out;
}

std::vector<int> NetworkTopology::waypoint_edges(int waypoint) const {
    std::vector<int> out;
    for (int x : active_agents)
        if (edge_active(x, waypoint)) out.push_back(x);
    return out;
}

void NetworkTopology::drop_agent(int agent) {
    active_agents.erase(agent);
    for (auto it = active_edges.begin(); it != active_edges.end();) {
        if (it->first == agent)
            it = active_edges.erase(it);
        else
            ++it;
    }
}

void NetworkTopology::drop_waypoint(int waypoint) {
    active_waypoints.erase(waypoint);
    for (auto it = active_edges.begin(); it != active_edges.end();) {
        if (it->second == waypoint)
            it = active_edges.erase(it);
        else
            ++it;
    }
}

void NetworkTopology::check() const {
    for (const auto& [x, y] : active_edges) {
        if (!active_agents.count(x) || !active_waypoints.count(y))
            throw Error("edge (" + std::to_string(x) + "," + std::to_string(y) +
                        ") references an inactive node");
    }
    for (int x : active_agents) {
        if (agent_edges(x).empty())
            throw InfeasibleError("agent " + std::to_string(x) + " has no active edge");
    }
}

Bounds Bounds::matching(int agents, int waypoints) {
    Bounds b;
    b.mode = BoundsMode::Matching;
    b.agent_lower.assign(agents, 1.0);
    b.agent_upper.assign(agents, 1.0);
    b.waypoint_lower.assign(waypoints, 0.0);
    b.waypoint_upper.assign(waypoints, 1.0);
    return b;
}

Bounds Bounds::general(std::vector<double> agent_lower, std::vector<double> agent_upper,
                       std::vector<double> waypoint_lower, std::vector<double> waypoint_upper) {
    Bounds b;
    b.mode = BoundsMode::General;
    b.agent_lower = std::move(agent_lower);
    b.agent_upper = std::move(agent_upper);
    b.waypoint_lower = std::move(waypoint_lower);
    b.waypoint_upper = std::move(waypoint_upper);
    for (size_t i = 0; i < b.agent_lower.size(); ++i)
        if (b.agent_lower[i] > b.agent_upper[i])
            throw Error("agent bound lower > upper at index " + std::to_string(i));
    for (size_t i = 0; i < b.waypoint_lower.size(); ++i)
        if (b.waypoint_lower[i] > b.waypoint_upper[i])
            throw Error("waypoint bound lower > upper at index " + std::to_string(i));
    return b;
}

void validate_params(const NetworkTopology& topology, const UtilityParams& params) {
    const int n = topology.agent_count;
    const int m = topology.waypoint_count;
    if (params.gamma.rows != n || params.gamma.cols != m)
        throw DimensionMismatch("gamma is " + std::to_string(params.gamma.rows) + "x" +
                                std::to_string(params.gamma.cols) + ", topology needs " +
                                std::to_string(n) + "x" + std::to_string(m));
    if (params.delta.rows != n || params.delta.cols != m)
        throw DimensionMismatch("delta is " + std::to_string(params.delta.rows) + "x" +
                                std::to_string(params.delta.cols) + ", topology needs " +
                                std::to_string(n) + "x" + std::to_string(m));
    for (const auto& [x, y] : topology.active_edges) {
        const double g = params.gamma(x, y);
        const double d = params.delta(x, y);
        if (!(g > 0.0) || !std::isfinite(g)) throw NonPositiveCoefficient(x, y, "gamma");
        if (!(d > 0.0) || !std::isfinite(d)) throw NonPositiveCoefficient(x, y, "delta");
    }
}

double aggregate_utility(const Assignment& assignment, const UtilityParams& params) {
    double total = 0.0;
    for (const auto& [x, y] : assignment.pairs) total += params.gamma(x, y) + params.delta(x, y);
    return total;
}

}  // namespace swarmot
