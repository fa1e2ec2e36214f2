#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "swarmot/admm.hpp"
#include "swarmot/dynamic.hpp"
#include "swarmot/oracle.hpp"
#include "swarmot/types.hpp"

using namespace swarmot;

namespace {

UtilityParams random_int_params(std::mt19937_64& rng, int agents, int waypoints) {
    UtilityParams params{Matrix(agents, waypoints), Matrix(agents, waypoints)};
    for (int r = 0; r < agents; ++r)
        for (int c = 0; c < waypoints; ++c) {
            params.gamma(r, c) = 1.0 + static_cast<double>(rng() % 10);
            params.delta(r, c) = 1.0 + static_cast<double>(rng() % 10);
        }
    return params;
}

UtilityParams flat_params(int agents, int waypoints) {
    return UtilityParams{Matrix(agents, waypoints, 1.0), Matrix(agents, waypoints, 1.0)};
}

// A consensus state at residual and drift zero whose plan is given explicitly.
AdmmState converged_state(const Matrix& pi, double eta = 10.0) {
    AdmmState state;
    state.pi = pi;
    state.pi_d = pi;
    state.pi_s = pi;
    state.alpha = Matrix(pi.rows, pi.cols);
    state.eta = eta;
    state.last_drift = 0.0;
    return state;
}

}  // namespace

TEST_CASE("extraction picks the dominant edge per agent") {
    Matrix pi(1, 3);
    pi(0, 0) = 0.001;
    pi(0, 1) = 0.998;
    pi(0, 2) = 0.001;
    const Assignment a =
        extract_assignment(converged_state(pi), NetworkTopology::full(1, 3), flat_params(1, 3));
    CHECK(a.pairs == std::map<int, int>{{0, 1}});
}

TEST_CASE("extraction breaks exact row ties toward the lower waypoint") {
    Matrix pi(1, 2, 0.5);
    const Assignment a =
        extract_assignment(converged_state(pi), NetworkTopology::full(1, 2), flat_params(1, 2));
    CHECK(a.pairs == std::map<int, int>{{0, 0}});
}

TEST_CASE("extraction resolves collisions in favor of the stronger plan entry") {
    Matrix pi(2, 2);
    pi(0, 0) = 0.6;
    pi(0, 1) = 0.4;
    pi(1, 0) = 0.7;
    pi(1, 1) = 0.3;
    const Assignment a =
        extract_assignment(converged_state(pi), NetworkTopology::full(2, 2), flat_params(2, 2));
    CHECK(a.pairs == std::map<int, int>{{0, 1}, {1, 0}});
}

TEST_CASE("extraction resolves exact collisions toward the lower agent") {
    Matrix pi(2, 2, 0.5);
    const Assignment a =
        extract_assignment(converged_state(pi), NetworkTopology::full(2, 2), flat_params(2, 2));
    CHECK(a.pairs == std::map<int, int>{{0, 0}, {1, 1}});
}

TEST_CASE("extraction stays value-exact when several optima tie") {
    // This instance admits three assignments worth 61; the consensus plan
    // stops on a fractional blend of them, and reading each row's argmax
    // independently would mix the blend into a 60-valued assignment.
    const double gamma_rows[4][6] = {{1, 9, 1, 8, 5, 9},
                                     {4, 7, 6, 9, 3, 2},
                                     {6, 10, 8, 1, 9, 1},
                                     {3, 6, 4, 5, 9, 10}};
    const double delta_rows[4][6] = {{2, 3, 8, 7, 1, 2},
                                     {5, 8, 9, 9, 7, 9},
                                     {3, 8, 5, 7, 8, 2},
                                     {4, 4, 10, 2, 3, 2}};
    UtilityParams params{Matrix(4, 6), Matrix(4, 6)};
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 6; ++c) {
            params.gamma(r, c) = gamma_rows[r][c];
            params.delta(r, c) = delta_rows[r][c];
        }

    const NetworkTopology topology = NetworkTopology::full(4, 6);
    const auto [state, report] = run_until_converged(topology, params, Bounds::matching(4, 6),
                                                     SolverConfig{10.0, 1e-6, 10000});

    bool fractional = false;
    for (double v : state.pi.values) fractional = fractional || (v > 0.05 && v < 0.95);
    CHECK(fractional);

    const Assignment assignment = extract_assignment(state, topology, params, 1e-6);
    const auto [best, value] = brute_force_optimal(topology, params);
    CHECK(value == 61.0);
    CHECK(aggregate_utility(assignment, params) == value);
}

TEST_CASE("extraction fails when collisions cannot be resolved") {
    Matrix pi(2, 1, 0.5);
    CHECK_THROWS_AS(extract_assignment(converged_state(pi), NetworkTopology::full(2, 1), flat_params(2, 1)),
                    InfeasibleError);
}

TEST_CASE("extraction refuses an unconverged plan") {
    Matrix pi(1, 2, 0.5);
    AdmmState state = converged_state(pi);
    state.pi_s(0, 0) = 0.25;  // visible primal gap
    CHECK_THROWS_AS(extract_assignment(state, NetworkTopology::full(1, 2), flat_params(1, 2)),
                    NotConvergedError);
}

TEST_CASE("convergence check needs both residual and drift below tolerance") {
    Matrix pi(1, 2, 0.5);
    AdmmState state = converged_state(pi);
    CHECK(check_convergence(state, 1e-6));

    state.pi_s(0, 0) = 0.5 + 5e-7;
    state.last_drift = 5e-7;
    CHECK(check_convergence(state, 1e-6));  // both strictly inside

    state.pi_s(0, 0) = 0.5 + 2e-6;
    CHECK_FALSE(check_convergence(state, 1e-6));

    state.pi_s(0, 0) = 0.5;
    state.last_drift = 2e-6;
    CHECK_FALSE(check_convergence(state, 1e-6));
}

TEST_CASE("a fresh instance does not pass the convergence check") {
    const NetworkTopology topology = NetworkTopology::full(3, 10);
    std::mt19937_64 rng(5);
    const UtilityParams params = random_int_params(rng, 3, 10);
    AdmmState state = init_state(topology, 10.0);
    admm_iterate(state, topology, params, Bounds::matching(3, 10));
    CHECK_FALSE(check_convergence(state, 1e-6));
}

TEST_CASE("a visit retires the waypoint and preserves the surviving warm start") {
    const NetworkTopology topology = NetworkTopology::full(3, 10);
    std::mt19937_64 rng(17);
    const UtilityParams params = random_int_params(rng, 3, 10);
    DynamicState state =
        DynamicState::initial(topology, params, Bounds::matching(3, 10), 10.0);
    for (int k = 0; k < 5; ++k)
        admm_iterate(state.admm, state.topology, state.params, state.bounds);
    const AdmmState before = state.admm;

    bool rule_ran = false;
    const DeltaRule rule = [&](DynamicState& st, const WaypointReached& ev) {
        rule_ran = true;
        CHECK(ev.waypoint_id == 4);
        CHECK_FALSE(st.topology.active_waypoints.count(4));  // runs after the drop
    };
    apply_event(state, WaypointReached{1, 4, 1}, rule);

    CHECK(rule_ran);
    CHECK(state.visited == std::set<int>{4});
    CHECK(state.topology.active_waypoints.size() == 9);
    CHECK(state.topology.active_edges.size() == 27);
    for (int x = 0; x < 3; ++x) {
        CHECK(state.admm.pi(x, 4) == 0.0);
        CHECK(state.admm.pi_d(x, 4) == 0.0);
        CHECK(state.admm.pi_s(x, 4) == 0.0);
        CHECK(state.admm.alpha(x, 4) == 0.0);
    }
    for (int x = 0; x < 3; ++x)
        for (int y = 0; y < 10; ++y) {
            if (y == 4) continue;
            CHECK(state.admm.pi(x, y) == before.pi(x, y));
            CHECK(state.admm.alpha(x, y) == before.alpha(x, y));
        }
}

TEST_CASE("dropout removes the agent row and nothing else") {
    const NetworkTopology topology = NetworkTopology::full(3, 5);
    std::mt19937_64 rng(23);
    const UtilityParams params = random_int_params(rng, 3, 5);
    DynamicState state =
        DynamicState::initial(topology, params, Bounds::matching(3, 5), 10.0);
    for (int k = 0; k < 5; ++k)
        admm_iterate(state.admm, state.topology, state.params, state.bounds);
    const AdmmState before = state.admm;

    apply_event(state, AgentDropout{2});
    CHECK(state.topology.active_agents == std::set<int>{0, 1});
    for (int y = 0; y < 5; ++y) {
        CHECK(state.admm.pi(2, y) == 0.0);
        CHECK(state.admm.alpha(2, y) == 0.0);
        CHECK(state.admm.pi(0, y) == before.pi(0, y));
        CHECK(state.admm.pi(1, y) == before.pi(1, y));
    }
}

TEST_CASE("event guards reject revisits and unknown entities") {
    const NetworkTopology topology = NetworkTopology::full(2, 3);
    UtilityParams params{Matrix(2, 3, 1.0), Matrix(2, 3, 2.0)};
    DynamicState state =
        DynamicState::initial(topology, params, Bounds::matching(2, 3), 10.0);

    apply_event(state, WaypointReached{0, 1, 0});
    CHECK_THROWS_AS(apply_event(state, WaypointReached{0, 1, 0}), RevisitAttempt);
    CHECK_THROWS_AS(apply_event(state, WaypointReached{0, 7, 0}), UnknownEntity);
    CHECK_THROWS_AS(apply_event(state, AgentDropout{5}), UnknownEntity);
    CHECK_THROWS_AS(
        apply_event(state, ParamUpdate{{ParamEdit{0, 1, std::nullopt, 3.0}}}),
        UnknownEntity);  // edits a retired edge

    ParamUpdate bad;
    bad.edits.push_back(ParamEdit{0, 0, -1.0, std::nullopt});
    CHECK_THROWS_AS(apply_event(state, bad), NonPositiveCoefficient);
}

TEST_CASE("a parameter update redirects the iteration to the new optimum") {
    const NetworkTopology topology = NetworkTopology::full(3, 6);
    std::mt19937_64 rng(31);
    const UtilityParams params = random_int_params(rng, 3, 6);
    DynamicState state =
        DynamicState::initial(topology, params, Bounds::matching(3, 6), 10.0);

    while (!check_convergence(state.admm, 1e-6))
        admm_iterate(state.admm, state.topology, state.params, state.bounds);

    // Make one column dominant for agent 0 and re-converge from the warm start.
    ParamUpdate update;
    for (int x = 0; x < 3; ++x)
        update.edits.push_back(ParamEdit{x, 3, std::nullopt, x == 0 ? 10.0 : 1.0});
    apply_event(state, update);
    long iterations = 0;
    do {
        admm_iterate(state.admm, state.topology, state.params, state.bounds);
        ++iterations;
    } while (!check_convergence(state.admm, 1e-6) && iterations < 5000);

    const Assignment assignment = extract_assignment(state.admm, state.topology, state.params, 1e-6);
    const auto [best, value] = brute_force_optimal(state.topology, state.params);
    CHECK(aggregate_utility(assignment, state.params) == value);
}

TEST_CASE("an event-free loop reproduces the one-shot solve exactly") {
    const NetworkTopology topology = NetworkTopology::full(3, 6);
    std::mt19937_64 rng(47);
    const UtilityParams params = random_int_params(rng, 3, 6);
    const Bounds bounds = Bounds::matching(3, 6);
    const SolverConfig config{10.0, 1e-6, 10000};

    const auto [ref_state, ref_report] = run_until_converged(topology, params, bounds, config);

    DynamicState state = DynamicState::initial(topology, params, bounds, config.eta);
    const std::vector<EpochRecord> records = dynamic_loop(state, {}, config);

    REQUIRE(records.size() == 1);
    CHECK(records[0].report.iterations == ref_report.iterations);
    CHECK(records[0].report.utility_trace == ref_report.utility_trace);
    CHECK(records[0].assignment == extract_assignment(ref_state, topology, params, config.epsilon));
    CHECK(state.admm.pi.values == ref_state.pi.values);
    CHECK(state.admm.pi_d.values == ref_state.pi_d.values);
    CHECK(state.admm.pi_s.values == ref_state.pi_s.values);
    CHECK(state.admm.alpha.values == ref_state.alpha.values);
    CHECK(state.admm.iteration == ref_state.iteration);
}

TEST_CASE("scheduled updates re-converge within each inter-event window") {
    const NetworkTopology topology = NetworkTopology::full(3, 10);
    std::mt19937_64 rng(61);
    const UtilityParams params = random_int_params(rng, 3, 10);
    UtilityParams live = params;

    std::vector<ScheduledEvent> schedule;
    for (int burst = 1; burst <= 2; ++burst) {
        ParamUpdate update;
        for (int k = 0; k < 4; ++k) {
            ParamEdit edit;
            edit.agent_id = static_cast<int>(rng() % 3);
            edit.waypoint_id = static_cast<int>(rng() % 10);
            edit.delta = 1.0 + static_cast<double>(rng() % 10);
            update.edits.push_back(edit);
        }
        schedule.push_back({250L * burst, SwarmEvent{update}});
    }

    DynamicState state =
        DynamicState::initial(topology, params, Bounds::matching(3, 10), 10.0);
    const SolverConfig config{10.0, 1e-6, 250};
    const std::vector<EpochRecord> records = dynamic_loop(state, schedule, config);

    REQUIRE(records.size() == 3);
    std::size_t applied = 0;
    long previous_epoch = -1;
    for (const EpochRecord& record : records) {
        CHECK(record.report.iterations <= 250);
        CHECK(record.epoch > previous_epoch);
        previous_epoch = record.epoch;
        while (applied < static_cast<std::size_t>(record.epoch)) {
            for (const ParamEdit& edit :
                 std::get<ParamUpdate>(schedule[applied].event).edits)
                live.delta(edit.agent_id, edit.waypoint_id) = *edit.delta;
            ++applied;
        }
        const auto [best, value] = brute_force_optimal(topology, live);
        CHECK(aggregate_utility(record.assignment, live) == value);
    }
}

TEST_CASE("a single agent drains both waypoints across two epochs") {
    const NetworkTopology topology = NetworkTopology::full(1, 2);
    UtilityParams params{Matrix(1, 2), Matrix(1, 2)};
    params.gamma(0, 0) = 9.0;
    params.gamma(0, 1) = 2.0;
    params.delta(0, 0) = 9.0;
    params.delta(0, 1) = 2.0;

    std::vector<ScheduledEvent> schedule;
    schedule.push_back({100, SwarmEvent{WaypointReached{0, 0, 1}}});
    schedule.push_back({200, SwarmEvent{WaypointReached{0, 1, 0}}});

    DynamicState state =
        DynamicState::initial(topology, params, Bounds::matching(1, 2), 10.0);
    const std::vector<EpochRecord> records =
        dynamic_loop(state, schedule, SolverConfig{10.0, 1e-6, 10000});

    REQUIRE(records.size() == 2);
    CHECK(records[0].assignment.pairs == std::map<int, int>{{0, 0}});
    CHECK(records[1].assignment.pairs == std::map<int, int>{{0, 1}});
    CHECK(state.visited == std::set<int>{0, 1});
    CHECK(state.topology.active_waypoints.empty());
    CHECK(state.assignment_log.size() == 2);
    CHECK(state.assignment_log[0].first < state.assignment_log[1].first);
}

TEST_CASE("the loop enforces its per-episode budget") {
    const NetworkTopology topology = NetworkTopology::full(3, 10);
    std::mt19937_64 rng(77);
    const UtilityParams params = random_int_params(rng, 3, 10);
    DynamicState state =
        DynamicState::initial(topology, params, Bounds::matching(3, 10), 10.0);
    CHECK_THROWS_AS(dynamic_loop(state, {}, SolverConfig{10.0, 1e-6, 1}),
                    MaxIterationsExceeded);
}
