#include "swarmot/admm.hpp"

#include <algorithm>
#include <cmath>

#include "swarmot/projection.hpp"

namespace swarmot {

AdmmState init_state(const NetworkTopology& topology, double eta) {
    if (!(eta > 0.0)) throw Error("eta must be positive");
    AdmmState state;
    state.eta = eta;
    state.pi = Matrix(topology.agent_count, topology.waypoint_count);
    for (int x : topology.active_agents) {
        const auto edges = topology.agent_edges(x);
        if (edges.empty()) continue;
        const double mass = 1.0 / static_cast<double>(edges.size());
        for (int y : edges) state.pi(x, y) = mass;
    }
    state.pi_d = state.pi;
    state.pi_s = state.pi;
    state.alpha = Matrix(topology.agent_count, topology.waypoint_count);
    return state;
}

void uav_subproblem(AdmmState& state, int agent, const NetworkTopology& topology,
                    const UtilityParams& params, const Bounds& bounds) {
    const auto edges = topology.agent_edges(agent);
    std::vector<double> w(edges.size());
    for (size_t i = 0; i < edges.size(); ++i) {
        const int y = edges[i];
        w[i] = state.pi(agent, y) + (params.gamma(agent, y) - state.alpha(agent, y)) / state.eta;
    }
    const auto v =
        project_capped_simplex(w, bounds.agent_lower[agent], bounds.agent_upper[agent]);
    for (size_t i = 0; i < edges.size(); ++i) state.pi_d(agent, edges[i]) = v[i];
}

void waypoint_subproblem(AdmmState& state, int waypoint, const NetworkTopology& topology,
                         const UtilityParams& params, const Bounds& bounds) {
    const auto edges = topology.waypoint_edges(waypoint);
    std::vector<double> w(edges.size());
    for (size_t i = 0; i < edges.size(); ++i) {
        const int x = edges[i];
        w[i] = state.pi(x, waypoint) + (params.delta(x, waypoint) + state.alpha(x, waypoint)) / state.eta;
    }
    const auto v = project_capped_simplex(w, bounds.waypoint_lower[waypoint],
                                          bounds.waypoint_upper[waypoint]);
    for (size_t i = 0; i < edges.size(); ++i) state.pi_s(edges[i], waypoint) = v[i];
}

void consensus_update(AdmmState& state, const NetworkTopology& topology) {
    for (const auto& [x, y] : topology.active_edges)
        state.pi(x, y) = 0.5 * (state.pi_d(x, y) + state.pi_s(x, y));
}

void dual_update(AdmmState& state, const NetworkTopology& topology) {
    const double half_eta = 0.5 * state.eta;
    for (const auto& [x, y] : topology.active_edges)
        state.alpha(x, y) += half_eta * (state.pi_d(x, y) - state.pi_s(x, y));
}

double primal_residual(const AdmmState& state, const NetworkTopology& topology) {
    double r = 0.0;
    for (const auto& [x, y] : topology.active_edges)
        r = std::max(r, std::abs(state.pi_d(x, y) - state.pi_s(x, y)));
    return r;
}

IterationResult admm_iterate(AdmmState& state, const NetworkTopology& topology,
                             const UtilityParams& params, const Bounds& bounds) {
    const Matrix previous_pi = state.pi;
    for (int x : topology.active_agents) uav_subproblem(state, x, topology, params, bounds);
    for (int y : topology.active_waypoints)
        waypoint_subproblem(state, y, topology, params, bounds);
    consensus_update(state, topology);
    dual_update(state, topology);

    IterationResult result;
    for (const auto& [x, y] : topology.active_edges) {
        result.primal_residual =
            std::max(result.primal_residual, std::abs(state.pi_d(x, y) - state.pi_s(x, y)));
        result.drift = std::max(result.drift, std::abs(state.pi(x, y) - previous_pi(x, y)));
        result.utility += (params.gamma(x, y) + params.delta(x, y)) * state.pi_d(x, y);
    }
    state.iteration += 1;
    state.last_drift = result.drift;
    return result;
}

std::pair<AdmmState, ConvergenceReport> run_until_converged(const NetworkTopology& topology,
                                                            const UtilityParams& params,
                                                            const Bounds& bounds,
                                                            const SolverConfig& config) {
    if (!(config.epsilon > 0.0)) throw Error("epsilon must be positive");
    if (config.max_iterations <= 0) throw Error("max_iterations must be positive");
    topology.check();
    validate_params(topology, params);

    AdmmState state = init_state(topology, config.eta);
    ConvergenceReport report;
    for (long k = 0; k < config.max_iterations; ++k) {
        const IterationResult step = admm_iterate(state, topology, params, bounds);
        report.iterations = state.iteration;
        report.primal_residual = step.primal_residual;
        report.drift = step.drift;
        report.utility_trace.push_back(step.utility);
        if (step.primal_residual < config.epsilon && step.drift < config.epsilon)
            return {std::move(state), std::move(report)};
    }
    throw MaxIterationsExceeded(std::move(state), std::move(report));
}

}  // namespace swarmot
