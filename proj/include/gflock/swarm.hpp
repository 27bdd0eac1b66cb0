#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gflock/errors.hpp"
#include "gflock/geometry.hpp"
#include "gflock/rules.hpp"
#include "gflock/vec2.hpp"

namespace gflock {

enum class AgentStatus { active, arrived, dead };

inline const char* status_name(AgentStatus s) {
    switch (s) {
        case AgentStatus::active: return "active";
        case AgentStatus::arrived: return "arrived";
        case AgentStatus::dead: return "dead";
    }
    return "?";
}

struct AgentState {
    int id = 0;
    Vec2 pos;
    Vec2 vel;
    AgentStatus status = AgentStatus::active;
    std::optional<int> arrive_step;
};

// Concentric sensing zones: repulsion inside repulsion_radius, alignment up
// to alignment_radius, attraction up to attraction_radius. obstacle_radius
// bounds obstacle sensing.
struct ZoneConfig {
    double repulsion_radius = 2.0;
    double alignment_radius = 5.0;
    double attraction_radius = 7.0;
    double obstacle_radius = 3.0;
};

inline bool valid_zones(const ZoneConfig& z) {
    return z.repulsion_radius > 0.0 && z.repulsion_radius < z.alignment_radius &&
           z.alignment_radius < z.attraction_radius && z.obstacle_radius > 0.0;
}

struct ObstacleContact {
    Vec2 point;
    double dist = 0.0;
};

// Ids sorted ascending in each list; the three lists are disjoint.
struct NeighborhoodPartition {
    std::vector<int> repulsion;
    std::vector<int> alignment;
    std::vector<int> attraction;
    std::vector<ObstacleContact> obstacles;
};

// Sorts every Active agent of `swarm` (other than the focal) into the zone
// its distance falls in, half-open: [0,R_rep) repulsion, [R_rep,R_ali)
// alignment, [R_ali,R_att) attraction, farther ignored. One contact per
// obstacle whose nearest point lies inside obstacle_radius.
inline NeighborhoodPartition partition_neighbors(const AgentState& focal,
                                                 std::span<const AgentState> swarm,
                                                 std::span<const Obstacle> obstacles,
                                                 const ZoneConfig& zones) {
    if (!valid_zones(zones))
        throw config_error("zones: require 0 < repulsion < alignment < attraction and obstacle_radius > 0");
    NeighborhoodPartition out;
    for (const AgentState& other : swarm) {
        if (other.id == focal.id || other.status != AgentStatus::active) continue;
        const double r = distance(focal.pos, other.pos);
        if (r < zones.repulsion_radius)
            out.repulsion.push_back(other.id);
        else if (r < zones.alignment_radius)
            out.alignment.push_back(other.id);
        else if (r < zones.attraction_radius)
            out.attraction.push_back(other.id);
    }
    for (const Obstacle& ob : obstacles) {
        const NearestPoint np = nearest_obstacle_point(focal.pos, ob);
        if (np.dist < zones.obstacle_radius) out.obstacles.push_back({np.point, np.dist});
    }
    return out;
}

// Context dispatch: obstacle contact and target proximity each flip one
// predicate; the four combinations select the rule.
inline Context classify_context(const NeighborhoodPartition& partition,
                                const AgentState& focal, const TargetArea& target,
                                double target_context_dist) {
    const bool obstacle = !partition.obstacles.empty();
    const bool near_target = distance(focal.pos, target.center) < target_context_dist;
    if (obstacle && near_target) return Context::obstacle_and_target;
    if (obstacle) return Context::obstacle_near;
    if (near_target) return Context::target_near;
    return Context::free_flight;
}

// Candidate next velocity of the focal agent:
//
//   a * sum_rep (R_rep - r_ij) * unit(p_i - p_j)      push off close neighbors
// + b * mean_ali unit(v_j)                            align with mid-zone headings
// + c * sum_att (R_att - r_ij) * unit(p_j - p_i)      pull toward outer neighbors
// + d * sum_obs (R_obs - r_ik) * unit(p_i - p_k)      push off obstacle contacts
// + e * unit(p_tar - p_i)                             seek the target
// + v_i                                               current velocity
//
// Sums run in ascending agent id. An agent at the target gets a zero target
// term. A coincident neighbor (r_ij = 0) has no direction and contributes
// nothing. Alignment members must be moving; the step driver filters the
// still ones out, so hitting one here is a simulator bug.
inline Vec2 velocity_update(const AgentState& focal,
                            const NeighborhoodPartition& partition,
                            std::span<const AgentState> swarm,
                            const RuleWeights& weights, Vec2 target_center,
                            const ZoneConfig& zones) {
    Vec2 repulsion_sum;
    for (int id : partition.repulsion) {
        const AgentState& other = swarm[static_cast<std::size_t>(id)];
        const Vec2 away = focal.pos - other.pos;
        const double r = away.norm();
        if (r > 0.0) repulsion_sum += away * ((zones.repulsion_radius - r) / r);
    }

    Vec2 alignment_mean;
    if (!partition.alignment.empty()) {
        Vec2 heading_sum;
        for (int id : partition.alignment) {
            const AgentState& other = swarm[static_cast<std::size_t>(id)];
            const double speed = other.vel.norm();
            if (speed == 0.0)
                throw degenerate_input("velocity_update: alignment neighbor " +
                                       std::to_string(id) + " has zero speed");
            heading_sum += other.vel / speed;
        }
        alignment_mean = heading_sum / static_cast<double>(partition.alignment.size());
    }

    Vec2 attraction_sum;
    for (int id : partition.attraction) {
        const AgentState& other = swarm[static_cast<std::size_t>(id)];
        const Vec2 toward = other.pos - focal.pos;
        const double r = toward.norm();
        if (r > 0.0) attraction_sum += toward * ((zones.attraction_radius - r) / r);
    }

    Vec2 obstacle_sum;
    for (const ObstacleContact& contact : partition.obstacles) {
        const Vec2 away = focal.pos - contact.point;
        const double r = away.norm();
        if (r > 0.0) obstacle_sum += away * ((zones.obstacle_radius - r) / r);
    }

    Vec2 target_term;
    const Vec2 toward_target = target_center - focal.pos;
    const double target_dist = toward_target.norm();
    if (target_dist > 0.0) target_term = toward_target / target_dist;

    return repulsion_sum * weights.a + alignment_mean * weights.b +
           attraction_sum * weights.c + obstacle_sum * weights.d +
           target_term * weights.e + focal.vel;
}

// Rescale to max_speed when faster; direction preserved, zero stays zero.
inline Vec2 clamp_speed(Vec2 v, double max_speed) {
    const double speed = v.norm();
    if (speed <= max_speed) return v;
    return v * (max_speed / speed);
}

}  // namespace gflock
