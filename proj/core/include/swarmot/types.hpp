#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace swarmot {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A strictly positive coefficient requirement was violated on an active edge.
class NonPositiveCoefficient : public Error {
public:
    NonPositiveCoefficient(int agent, int waypoint, const std::string& which)
        : Error(which + "[" + std::to_string(agent) + "][" + std::to_string(waypoint) +
                "] must be strictly positive and finite"),
          agent(agent), waypoint(waypoint) {}
    int agent;
    int waypoint;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class InfeasibleError : public Error {
public:
    using Error::Error;
};

class TooLargeError : public Error {
public:
    using Error::Error;
};

// Dense row-major matrix. Inactive edges keep value zero by convention.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> values;

    Matrix() = default;
    Matrix(int rows, int cols, double fill = 0.0)
        : rows(rows), cols(cols), values(static_cast<size_t>(rows) * cols, fill) {}

    double& operator()(int r, int c) { return values[static_cast<size_t>(r) * cols + c]; }
    double operator()(int r, int c) const { return values[static_cast<size_t>(r) * cols + c]; }

    bool same_shape(const Matrix& other) const {
        return rows == other.rows && cols == other.cols;
    }
};

// Bipartite agent/waypoint graph with an explicit active-edge set.
struct NetworkTopology {
    int agent_count = 0;
    int waypoint_count = 0;
    std::set<int> active_agents;
    std::set<int> active_waypoints;
    std::set<std::pair<int, int>> active_edges;

    // Fully connected topology over the given counts.
    static NetworkTopology full(int agents, int waypoints);

    bool edge_active(int agent, int waypoint) const {
        return active_edges.count({agent, waypoint}) != 0;
    }

    // Active waypoints reachable from an agent, ascending.
    std::vector<int> agent_edges(int agent) const;
    // Active agents connected to a waypoint, ascending.
    std::vector<int> waypoint_edges(int waypoint) const;

    void drop_agent(int agent);
    void drop_waypoint(int waypoint);

    // Throws InfeasibleError if an active agent has no active edge, or
    // Error on dangling edge references.
    void check() const;
};

struct UtilityParams {
    Matrix gamma;
    Matrix delta;
};

enum class BoundsMode { Matching, General };

// Per-node marginal bounds on the transport plan.
struct Bounds {
    BoundsMode mode = BoundsMode::Matching;
    std::vector<double> agent_lower;
    std::vector<double> agent_upper;
    std::vector<double> waypoint_lower;
    std::vector<double> waypoint_upper;

    // Matching mode: every agent carries exactly unit mass, every waypoint at most unit mass.
    static Bounds matching(int agents, int waypoints);
    static Bounds general(std::vector<double> agent_lower, std::vector<double> agent_upper,
                          std::vector<double> waypoint_lower, std::vector<double> waypoint_upper);
};

// Injective agent -> waypoint map.
struct Assignment {
    std::map<int, int> pairs;

    bool operator==(const Assignment& other) const { return pairs == other.pairs; }
};

// Throws NonPositiveCoefficient or DimensionMismatch when the parameter
// matrices are unusable for the given topology.
void validate_params(const NetworkTopology& topology, const UtilityParams& params);

// Sum of gamma + delta over the assigned pairs.
double aggregate_utility(const Assignment& assignment, const UtilityParams& params);

}  // namespace swarmot
