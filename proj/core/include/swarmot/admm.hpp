#pragma once

#include <limits>
#include <utility>
#include <vector>

#include "swarmot/types.hpp"

namespace swarmot {

// Iterate of the consensus solver. pi is the consensus plan, pi_d and pi_s the
// agent-side and waypoint-side ancillary plans, alpha the duals. Entries on
// inactive edges are zero.
struct AdmmState {
    Matrix pi;
    Matrix pi_d;
    Matrix pi_s;
    Matrix alpha;
    long iteration = 0;
    double eta = 10.0;
    // max |pi(k+1) - pi(k)| of the most recent iteration
    double last_drift = std::numeric_limits<double>::infinity();
};

struct ConvergenceReport {
    long iterations = 0;
    double primal_residual = std::numeric_limits<double>::infinity();
    double drift = std::numeric_limits<double>::infinity();
    // aggregate utility of pi_d after each iteration
    std::vector<double> utility_trace;
};

struct SolverConfig {
    double eta = 10.0;
    double epsilon = 1e-6;
    long max_iterations = 10000;
};

class MaxIterationsExceeded : public Error {
public:
    MaxIterationsExceeded(AdmmState state, ConvergenceReport report)
        : Error("no convergence within " + std::to_string(report.iterations) + " iterations"),
          state(std::move(state)), report(std::move(report)) {}
    AdmmState state;
    ConvergenceReport report;
};

// Uniform feasible start: pi = 1/|edges of agent| on each active edge,
// ancillary plans equal to pi, duals zero.
AdmmState init_state(const NetworkTopology& topology, double eta);

// One agent-side solve: row of pi_d becomes the capped-simplex projection of
// w[y] = pi[x][y] + (gamma[x][y] - alpha[x][y]) / eta over the agent's bounds.
void uav_subproblem(AdmmState& state, int agent, const NetworkTopology& topology,
                    const UtilityParams& params, const Bounds& bounds);

// One waypoint-side solve: column of pi_s becomes the projection of
// w[x] = pi[x][y] + (delta[x][y] + alpha[x][y]) / eta over the waypoint's bounds.
void waypoint_subproblem(AdmmState& state, int waypoint, const NetworkTopology& topology,
                         const UtilityParams& params, const Bounds& bounds);

// pi = (pi_d + pi_s) / 2 on active edges.
void consensus_update(AdmmState& state, const NetworkTopology& topology);

// alpha += (eta / 2) (pi_d - pi_s) on active edges.
void dual_update(AdmmState& state, const NetworkTopology& topology);

struct IterationResult {
    double primal_residual = 0.0;
    double drift = 0.0;
    double utility = 0.0;
};

// One full synchronous round: all agent solves, all waypoint solves, consensus,
// dual ascent. The subproblem solves read only pi and alpha of the previous
// iterate, so their order is immaterial.
IterationResult admm_iterate(AdmmState& state, const NetworkTopology& topology,
                             const UtilityParams& params, const Bounds& bounds);

// Max |pi_d - pi_s| over active edges.
double primal_residual(const AdmmState& state, const NetworkTopology& topology);

// Iterates until primal residual and iterate drift both drop below
// config.epsilon. Throws MaxIterationsExceeded (carrying the final state and
// report) when the budget runs out first.
std::pair<AdmmState, ConvergenceReport> run_until_converged(const NetworkTopology& topology,
                                                            const UtilityParams& params,
                                                            const Bounds& bounds,
                                                            const SolverConfig& config);

}  // namespace swarmot
