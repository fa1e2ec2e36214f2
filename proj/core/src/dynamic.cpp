#include "swarmot/dynamic.hpp"

#include <algorithm>
#include <cmath>

namespace swarmot {

DynamicState DynamicState::initial(NetworkTopology topology, UtilityParams params, Bounds bounds,
                                   double eta) {
    topology.check();
    validate_params(topology, params);
    DynamicState state;
    state.admm = init_state(topology, eta);
    state.topology = std::move(topology);
    state.params = std::move(params);
    state.bounds = std::move(bounds);
    return state;
}

namespace {

// Best injective assignment using only plan entries above the support
// threshold, exhaustive with the same ascending-order tie convention as the
// oracle. Returns nothing when the support admits no complete assignment.
std::optional<Assignment> best_supported(const AdmmState& state, const NetworkTopology& topology,
                                         const UtilityParams& params, double support) {
    const std::vector<int> agents(topology.active_agents.begin(), topology.active_agents.end());
    std::vector<std::vector<int>> options(agents.size());
    for (size_t i = 0; i < agents.size(); ++i) {
        for (int y : topology.agent_edges(agents[i]))
            if (state.pi(agents[i], y) > support) options[i].push_back(y);
        if (options[i].empty()) return std::nullopt;
    }

    std::optional<Assignment> best;
    double best_value = 0.0;
    Assignment current;
    std::set<int> claimed;
    const std::function<void(size_t, double)> search = [&](size_t i, double value) {
        if (i == agents.size()) {
            if (!best || value > best_value) {
                best = current;
                best_value = value;
            }
            return;
        }
        const int x = agents[i];
        for (int y : options[i]) {
            if (claimed.count(y)) continue;
            claimed.insert(y);
            current.pairs[x] = y;
            search(i + 1, value + params.gamma(x, y) + params.delta(x, y));
            current.pairs.erase(x);
            claimed.erase(y);
        }
    };
    search(0, 0.0);
    return best;
}

}  // namespace

Assignment extract_assignment(const AdmmState& state, const NetworkTopology& topology,
                              const UtilityParams& params, double epsilon) {
    const double residual = primal_residual(state, topology);
    if (!(residual < epsilon))
        throw NotConvergedError("primal residual " + std::to_string(residual) +
                                " not below " + std::to_string(epsilon));

    // Highest-pi waypoint per agent; tie to lowest waypoint id.
    const auto pick = [&](int agent, const std::set<int>& claimed) -> std::optional<int> {
        std::optional<int> best;
        double best_pi = 0.0;
        for (int y : topology.agent_edges(agent)) {
            if (claimed.count(y)) continue;
            const double p = state.pi(agent, y);
            if (!best || p > best_pi) {
                best = y;
                best_pi = p;
            }
        }
        return best;
    };

    Assignment out;
    std::set<int> claimed;
    std::vector<int> pending(topology.active_agents.begin(), topology.active_agents.end());
    while (!pending.empty()) {
        // Current round of selections, then resolve collisions: the agent with
        // the higher pi keeps the waypoint (exact tie: lower agent id), losers
        // re-select against the grown claimed set next round.
        std::map<int, int> winner;  // waypoint -> agent
        for (int x : pending) {
            const auto y = pick(x, claimed);
            if (!y)
                throw InfeasibleError("agent " + std::to_string(x) +
                                      " has no unclaimed waypoint left");
            const auto it = winner.find(*y);
            if (it == winner.end()) {
                winner[*y] = x;
            } else if (state.pi(x, *y) > state.pi(it->second, *y)) {
                it->second = x;
            }
        }
        std::vector<int> losers;
        for (int x : pending) {
            const auto y = pick(x, claimed);
            if (winner[*y] == x)
                out.pairs[x] = *y;
            else
                losers.push_back(x);
        }
        for (const auto& [y, x] : winner) claimed.insert(y);
        pending = std::move(losers);
    }

    // A fractional plan can make the per-agent reading mix incompatible
    // optima; prefer the best completion the plan supports when it is
    // strictly better (margin excludes summation noise on exact ties).
    if (const auto refined = best_supported(state, topology, params, 100.0 * epsilon)) {
        if (aggregate_utility(*refined, params) > aggregate_utility(out, params) + 1e-9)
            return *refined;
    }
    return out;
}

namespace {

void zero_column(Matrix& m, int col) {
    for (int r = 0; r < m.rows; ++r) m(r, col) = 0.0;
}

void zero_row(Matrix& m, int row) {
    for (int c = 0; c < m.cols; ++c) m(row, c) = 0.0;
}

struct EventApplier {
    DynamicState& state;
    const DeltaRule& rule;

    void operator()(const WaypointReached& event) {
        if (state.visited.count(event.waypoint_id))
            throw RevisitAttempt("waypoint " + std::to_string(event.waypoint_id) +
                                 " was already visited");
        if (!state.topology.active_waypoints.count(event.waypoint_id))
            throw UnknownEntity("waypoint " + std::to_string(event.waypoint_id) +
                                " is not active");
        if (!state.topology.active_agents.count(event.agent_id))
            throw UnknownEntity("agent " + std::to_string(event.agent_id) + " is not active");
        state.visited.insert(event.waypoint_id);
        state.topology.drop_waypoint(event.waypoint_id);
        zero_column(state.admm.pi, event.waypoint_id);
        zero_column(state.admm.pi_d, event.waypoint_id);
        zero_column(state.admm.pi_s, event.waypoint_id);
        zero_column(state.admm.alpha, event.waypoint_id);
        if (rule) rule(state, event);
    }

    void operator()(const AgentDropout& event) {
        if (!state.topology.active_agents.count(event.agent_id))
            throw UnknownEntity("agent " + std::to_string(event.agent_id) + " is not active");
        state.topology.drop_agent(event.agent_id);
        zero_row(state.admm.pi, event.agent_id);
        zero_row(state.admm.pi_d, event.agent_id);
        zero_row(state.admm.pi_s, event.agent_id);
        zero_row(state.admm.alpha, event.agent_id);
    }

    void operator()(const ParamUpdate& event) {
        for (const auto& edit : event.edits) {
            if (!state.topology.edge_active(edit.agent_id, edit.waypoint_id))
                throw UnknownEntity("edge (" + std::to_string(edit.agent_id) + "," +
                                    std::to_string(edit.waypoint_id) + ") is not active");
            if (edit.gamma) {
                if (!(*edit.gamma > 0.0) || !std::isfinite(*edit.gamma))
                    throw NonPositiveCoefficient(edit.agent_id, edit.waypoint_id, "gamma");
                state.params.gamma(edit.agent_id, edit.waypoint_id) = *edit.gamma;
            }
            if (edit.delta) {
                if (!(*edit.delta > 0.0) || !std::isfinite(*edit.delta))
                    throw NonPositiveCoefficient(edit.agent_id, edit.waypoint_id, "delta");
                state.params.delta(edit.agent_id, edit.waypoint_id) = *edit.delta;
            }
        }
    }
};

}  // namespace

void apply_event(DynamicState& state, const SwarmEvent& event, const DeltaRule& rule) {
    std::visit(EventApplier{state, rule}, event);
}

bool check_convergence(const AdmmState& state, double epsilon) {
    // Inactive entries are zero in both ancillary plans, so the residual over
    // the full matrices equals the residual over active edges.
    double residual = 0.0;
    for (size_t i = 0; i < state.pi_d.values.size(); ++i)
        residual = std::max(residual, std::abs(state.pi_d.values[i] - state.pi_s.values[i]));
    return residual < epsilon && state.last_drift < epsilon;
}

std::vector<EpochRecord> dynamic_loop(DynamicState& state,
                                      const std::vector<ScheduledEvent>& schedule,
                                      const SolverConfig& config, const DeltaRule& rule) {
    if (!(config.epsilon > 0.0)) throw Error("epsilon must be positive");
    if (config.max_iterations <= 0) throw Error("max_iterations must be positive");

    std::vector<EpochRecord> records;
    ConvergenceReport episode;
    bool converged_latch = false;
    size_t next_event = 0;

    while (true) {
        bool perturbed = false;
        while (next_event < schedule.size() &&
               schedule[next_event].iteration <= state.admm.iteration) {
            apply_event(state, schedule[next_event].event, rule);
            ++next_event;
            perturbed = true;
        }
        if (perturbed) {
            episode = ConvergenceReport{};
            converged_latch = false;
        }
        if (state.topology.active_agents.empty() || state.topology.active_waypoints.empty())
            break;

        const IterationResult step = admm_iterate(state.admm, state.topology, state.params,
                                                  state.bounds);
        episode.iterations += 1;
        episode.primal_residual = step.primal_residual;
        episode.drift = step.drift;
        episode.utility_trace.push_back(step.utility);

        if (!converged_latch && step.primal_residual < config.epsilon &&
            step.drift < config.epsilon) {
            EpochRecord record;
            record.epoch = state.epoch;
            record.assignment =
                extract_assignment(state.admm, state.topology, state.params, config.epsilon);
            record.report = episode;
            records.push_back(record);
            state.assignment_log.emplace_back(state.epoch, record.assignment);
            state.epoch += 1;
            converged_latch = true;
            if (next_event >= schedule.size()) break;
        } else if (!converged_latch && episode.iterations >= config.max_iterations) {
            throw MaxIterationsExceeded(state.admm, episode);
        }
    }
    return records;
}

}  // namespace swarmot
