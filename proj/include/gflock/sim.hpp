#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "gflock/episode.hpp"
#include "gflock/rng.hpp"
#include "gflock/rules.hpp"
#include "gflock/scenario.hpp"
#include "gflock/swarm.hpp"

namespace gflock {

// Dead when an obstacle boundary is closer than collision_radius, the agent
// is inside an obstacle, or it left the world. Sitting exactly on the
// bounds edge is alive.
inline bool check_death(const AgentState& agent, const Scenario& scenario) {
    if (!scenario.bounds.contains(agent.pos)) return true;
    for (const Obstacle& ob : scenario.obstacles) {
        const NearestPoint np = nearest_obstacle_point(agent.pos, ob);
        if (np.inside || np.dist < scenario.collision_radius) return true;
    }
    return false;
}

// Arrival on the closed disk.
inline bool check_arrival(const AgentState& agent, const TargetArea& target) {
    return distance(agent.pos, target.center) <= target.radius;
}

struct WorldState {
    std::vector<AgentState> agents;  // index == agent id
    int step = 0;
};

namespace detail {

// Death takes precedence over arrival. Appends events in agent-id order.
inline void settle_statuses(WorldState& world, const Scenario& scenario,
                            std::vector<Event>& events) {
    for (AgentState& agent : world.agents) {
        if (agent.status != AgentStatus::active) continue;
        if (check_death(agent, scenario)) {
            agent.status = AgentStatus::dead;
            events.push_back({world.step, agent.id, EventKind::died});
        } else if (check_arrival(agent, scenario.target)) {
            agent.status = AgentStatus::arrived;
            agent.arrive_step = world.step;
            events.push_back({world.step, agent.id, EventKind::arrived});
        }
    }
}

inline void append_snapshot(const WorldState& world, EpisodeLog& log) {
    StepSnapshot snap;
    snap.positions.reserve(world.agents.size());
    for (const AgentState& a : world.agents) {
        snap.positions.push_back(a.pos);
        snap.velocities.push_back(a.vel);
        snap.statuses.push_back(a.status);
    }
    log.steps.push_back(std::move(snap));
}

}  // namespace detail

// One synchronous step: every Active agent's new velocity is computed from
// the previous snapshot, then all positions move together, then deaths and
// arrivals settle. Arrived/Dead agents are frozen.
inline void step_world(WorldState& world, const Scenario& scenario, const RuleSet& ruleset,
                       EpisodeLog& log, RngStream* noise = nullptr) {
    const std::vector<AgentState> prev = world.agents;
    world.step += 1;
    for (AgentState& agent : world.agents) {
        if (agent.status != AgentStatus::active) continue;
        const AgentState& before = prev[static_cast<std::size_t>(agent.id)];
        NeighborhoodPartition part =
            partition_neighbors(before, prev, scenario.obstacles, scenario.zones);
        // still agents carry no heading; they cannot vote on alignment
        std::erase_if(part.alignment, [&](int id) {
            return prev[static_cast<std::size_t>(id)].vel.norm_sq() == 0.0;
        });
        const Context ctx =
            classify_context(part, before, scenario.target, scenario.target_context_dist);
        Vec2 v = velocity_update(before, part, prev, ruleset.for_context(ctx),
                                 scenario.target.center, scenario.zones);
        if (noise != nullptr && scenario.noise_sigma > 0.0)
            v += Vec2{noise->gaussian(0.0, scenario.noise_sigma),
                      noise->gaussian(0.0, scenario.noise_sigma)};
        agent.vel = clamp_speed(v, scenario.max_speed);
        agent.pos = agent.pos + agent.vel * scenario.dt;
    }
    detail::settle_statuses(world, scenario, log.events);
    detail::append_snapshot(world, log);
}

inline bool any_active(const WorldState& world) {
    return std::any_of(world.agents.begin(), world.agents.end(), [](const AgentState& a) {
        return a.status == AgentStatus::active;
    });
}

// Spawns agents uniformly in the spawn rectangle with zero velocity and
// steps until everyone is absorbed or max_steps elapses. Pure in
// (scenario, ruleset, seed): identical inputs give identical logs.
inline EpisodeLog run_episode(const Scenario& scenario, const RuleSet& ruleset,
                              std::uint64_t seed) {
    validate_scenario(scenario);
    EpisodeLog log;
    log.agent_count = scenario.agent_count;
    log.dt = scenario.dt;
    log.max_steps = scenario.max_steps;
    log.seed = seed;
    log.scenario_ref = scenario.name + ":" + scenario_digest(scenario);
    log.ruleset_ref = ruleset_digest(ruleset);

    WorldState world;
    world.agents.reserve(scenario.agent_count);
    RngStream spawn(seed, "spawn");
    for (int i = 0; i < scenario.agent_count; ++i) {
        AgentState a;
        a.id = i;
        a.pos = {spawn.uniform(scenario.spawn.min.x, scenario.spawn.max.x),
                 spawn.uniform(scenario.spawn.min.y, scenario.spawn.max.y)};
        world.agents.push_back(a);
    }
    // spawn-time settles catch agents born in the target or hugging a wall
    detail::settle_statuses(world, scenario, log.events);
    detail::append_snapshot(world, log);

    RngStream noise(seed, "noise");
    while (world.step < scenario.max_steps && any_active(world))
        step_world(world, scenario, ruleset, log, &noise);
    return log;
}

}  // namespace gflock
