#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "gflock/geometry.hpp"
#include "gflock/rng.hpp"
#include "gflock/swarm.hpp"

using namespace gflock;

namespace {

AgentState agent(int id, Vec2 pos, Vec2 vel = {}) {
    AgentState a;
    a.id = id;
    a.pos = pos;
    a.vel = vel;
    return a;
}

// Independent term-by-term evaluation of the velocity law, scalar x/y
// accumulators throughout. Kept free of Vec2 so it cannot share a bug with
// the implementation.
Vec2 velocity_update_oracle(const AgentState& focal, const NeighborhoodPartition& part,
                            const std::vector<AgentState>& swarm, const RuleWeights& w,
                            Vec2 target, const ZoneConfig& z) {
    double x = focal.vel.x, y = focal.vel.y;
    for (int id : part.repulsion) {
        const double dx = focal.pos.x - swarm[id].pos.x;
        const double dy = focal.pos.y - swarm[id].pos.y;
        const double r = std::sqrt(dx * dx + dy * dy);
        if (r > 0) {
            x += w.a * (z.repulsion_radius - r) * dx / r;
            y += w.a * (z.repulsion_radius - r) * dy / r;
        }
    }
    if (!part.alignment.empty()) {
        double hx = 0, hy = 0;
        for (int id : part.alignment) {
            const double s = std::sqrt(swarm[id].vel.x * swarm[id].vel.x +
                                       swarm[id].vel.y * swarm[id].vel.y);
            hx += swarm[id].vel.x / s;
            hy += swarm[id].vel.y / s;
        }
        x += w.b * hx / static_cast<double>(part.alignment.size());
        y += w.b * hy / static_cast<double>(part.alignment.size());
    }
    for (int id : part.attraction) {
        const double dx = swarm[id].pos.x - focal.pos.x;
        const double dy = swarm[id].pos.y - focal.pos.y;
        const double r = std::sqrt(dx * dx + dy * dy);
        if (r > 0) {
            x += w.c * (z.attraction_radius - r) * dx / r;
            y += w.c * (z.attraction_radius - r) * dy / r;
        }
    }
    for (const ObstacleContact& c : part.obstacles) {
        const double dx = focal.pos.x - c.point.x;
        const double dy = focal.pos.y - c.point.y;
        const double r = std::sqrt(dx * dx + dy * dy);
        if (r > 0) {
            x += w.d * (z.obstacle_radius - r) * dx / r;
            y += w.d * (z.obstacle_radius - r) * dy / r;
        }
    }
    {
        const double dx = target.x - focal.pos.x;
        const double dy = target.y - focal.pos.y;
        const double r = std::sqrt(dx * dx + dy * dy);
        if (r > 0) {
            x += w.e * dx / r;
            y += w.e * dy / r;
        }
    }
    return {x, y};
}

struct RandomConfig {
    std::vector<AgentState> swarm;
    std::vector<Obstacle> obstacles;
    ZoneConfig zones;
    RuleWeights weights;
    Vec2 target;
};

RandomConfig random_config(RngStream& r, int max_agents = 10) {
    RandomConfig c;
    const int n = 1 + static_cast<int>(r.uniform_index(max_agents));
    for (int i = 0; i < n; ++i) {
        AgentState a = agent(i, {r.uniform(-10, 10), r.uniform(-10, 10)},
                             {r.uniform(-1, 1), r.uniform(-1, 1)});
        if (a.vel.norm() < 1e-3) a.vel = {0.5, 0.25};  // keep alignment members moving
        c.swarm.push_back(a);
    }
    c.zones = {r.uniform(0.5, 2.0), r.uniform(2.5, 4.0), r.uniform(4.5, 8.0), r.uniform(1.0, 4.0)};
    if (r.uniform() < 0.7)
        c.obstacles.emplace_back(Circle{{r.uniform(-12, 12), r.uniform(-12, 12)}, r.uniform(0.5, 2.0)});
    if (r.uniform() < 0.5)
        c.obstacles.emplace_back(Polygon{{{r.uniform(10, 12), -5}, {14, -5}, {14, 5}, {r.uniform(10, 12), 5}}});
    c.weights = {r.uniform(0.05, 0.95), r.uniform(0.05, 0.95), r.uniform(0.05, 0.95),
                 r.uniform(0.05, 0.95), r.uniform(0.05, 0.95)};
    c.target = {r.uniform(-15, 15), r.uniform(-15, 15)};
    return c;
}

}  // namespace

TEST_CASE("partition with no neighbors or obstacles is empty") {
    const AgentState focal = agent(0, {1, 1});
    const NeighborhoodPartition p = partition_neighbors(focal, std::vector<AgentState>{focal}, {}, {});
    CHECK(p.repulsion.empty());
    CHECK(p.alignment.empty());
    CHECK(p.attraction.empty());
    CHECK(p.obstacles.empty());
}

TEST_CASE("partition sorts neighbors into zones by distance") {
    const ZoneConfig zones{1, 3, 6, 3};
    std::vector<AgentState> swarm = {
        agent(0, {0, 0}),
        agent(1, {0.5, 0}),  // repulsion
        agent(2, {2.0, 0}),  // alignment
        agent(3, {5.0, 0}),  // attraction
        agent(4, {7.0, 0}),  // out of range
    };
    const NeighborhoodPartition p = partition_neighbors(swarm[0], swarm, {}, zones);
    CHECK(p.repulsion == std::vector<int>{1});
    CHECK(p.alignment == std::vector<int>{2});
    CHECK(p.attraction == std::vector<int>{3});
}

TEST_CASE("zone boundaries are half-open") {
    const ZoneConfig zones{1, 3, 6, 3};
    std::vector<AgentState> swarm = {agent(0, {0, 0}), agent(1, {1.0, 0}), agent(2, {3.0, 0}),
                                     agent(3, {6.0, 0})};
    const NeighborhoodPartition p = partition_neighbors(swarm[0], swarm, {}, zones);
    CHECK(p.repulsion.empty());            // distance exactly R_rep goes to alignment
    CHECK(p.alignment == std::vector<int>{1});
    CHECK(p.attraction == std::vector<int>{2});  // exactly R_ali goes to attraction
}

TEST_CASE("partition ignores absorbed agents") {
    const ZoneConfig zones{1, 3, 6, 3};
    std::vector<AgentState> swarm = {agent(0, {0, 0}), agent(1, {0.5, 0}), agent(2, {2, 0})};
    swarm[1].status = AgentStatus::dead;
    swarm[2].status = AgentStatus::arrived;
    const NeighborhoodPartition p = partition_neighbors(swarm[0], swarm, {}, zones);
    CHECK(p.repulsion.empty());
    CHECK(p.alignment.empty());
}

TEST_CASE("partition reports one contact per obstacle inside sensing range") {
    const ZoneConfig zones{1, 3, 6, 3};
    const std::vector<AgentState> swarm = {agent(0, {0, 0})};
    const std::vector<Obstacle> obstacles = {
        Circle{{2.5, 0}, 1.0},   // boundary at distance 1.5, sensed
        Circle{{10, 0}, 1.0},    // far
    };
    const NeighborhoodPartition p = partition_neighbors(swarm[0], swarm, obstacles, zones);
    REQUIRE(p.obstacles.size() == 1);
    CHECK(p.obstacles[0].dist == Catch::Approx(1.5));
    CHECK(p.obstacles[0].point.x == Catch::Approx(1.5));
}

TEST_CASE("partition rejects invalid zones") {
    const std::vector<AgentState> swarm = {agent(0, {0, 0})};
    CHECK_THROWS_AS(partition_neighbors(swarm[0], swarm, {}, ZoneConfig{3, 2, 6, 3}), config_error);
    CHECK_THROWS_AS(partition_neighbors(swarm[0], swarm, {}, ZoneConfig{1, 3, 6, 0}), config_error);
}

TEST_CASE("partition is a partition on random configurations") {
    RngStream r(31, "partition-prop");
    for (int trial = 0; trial < 100; ++trial) {
        RandomConfig c = random_config(r);
        const NeighborhoodPartition p =
            partition_neighbors(c.swarm[0], c.swarm, c.obstacles, c.zones);
        std::vector<bool> seen(c.swarm.size(), false);
        for (const auto* list : {&p.repulsion, &p.alignment, &p.attraction}) {
            for (int id : *list) {
                REQUIRE_FALSE(seen[id]);  // pairwise disjoint
                seen[id] = true;
            }
        }
        for (const AgentState& other : c.swarm) {
            if (other.id == 0) continue;
            const double d = distance(c.swarm[0].pos, other.pos);
            const bool in_range = d < c.zones.attraction_radius;
            REQUIRE(seen[other.id] == in_range);  // exactly one zone inside range
        }
    }
}

TEST_CASE("context dispatch covers the four combinations") {
    const AgentState focal = agent(0, {0, 0});
    const TargetArea target{{4, 0}, 1.0};
    NeighborhoodPartition empty;
    NeighborhoodPartition with_obs;
    with_obs.obstacles.push_back({{1, 0}, 1.0});
    CHECK(classify_context(empty, focal, {{100, 0}, 1.0}, 5.0) == Context::free_flight);
    CHECK(classify_context(with_obs, focal, {{100, 0}, 1.0}, 5.0) == Context::obstacle_near);
    CHECK(classify_context(empty, focal, target, 5.0) == Context::target_near);
    CHECK(classify_context(with_obs, focal, target, 5.0) == Context::obstacle_and_target);
    // threshold is strict
    CHECK(classify_context(empty, focal, {{5, 0}, 1.0}, 5.0) == Context::free_flight);
}

TEST_CASE("velocity update: lone agent sees only the unit target pull") {
    const std::vector<AgentState> swarm = {agent(0, {0, 0})};
    const NeighborhoodPartition p;
    const RuleWeights w{0.5, 0.5, 0.5, 0.5, 1.0};  // e = 1 isolates the term
    const Vec2 v = velocity_update(swarm[0], p, swarm, w, {3, 4}, {});
    CHECK(v.x == Catch::Approx(0.6));
    CHECK(v.y == Catch::Approx(0.8));
}

TEST_CASE("velocity update: single repulsion neighbor, hand-computed") {
    const ZoneConfig zones{1, 3, 6, 3};
    std::vector<AgentState> swarm = {agent(0, {0.5, 0}), agent(1, {0, 0})};
    const NeighborhoodPartition p = partition_neighbors(swarm[0], swarm, {}, zones);
    REQUIRE(p.repulsion == std::vector<int>{1});
    RuleWeights w{0.5, 0.0, 0.0, 0.0, 0.0};
    const Vec2 v = velocity_update(swarm[0], p, swarm, w, swarm[0].pos, zones);
    CHECK(v.x == Catch::Approx(0.25));  // 0.5 * (1 - 0.5) * (0.5,0)/0.5
    CHECK(v.y == Catch::Approx(0.0));
}

TEST_CASE("velocity update: symmetric repulsion neighbors cancel") {
    const ZoneConfig zones{1, 3, 6, 3};
    std::vector<AgentState> swarm = {agent(0, {0, 0}), agent(1, {0.5, 0}), agent(2, {-0.5, 0})};
    const NeighborhoodPartition p = partition_neighbors(swarm[0], swarm, {}, zones);
    const RuleWeights w{0.7, 0.0, 0.0, 0.0, 0.0};
    const Vec2 v = velocity_update(swarm[0], p, swarm, w, swarm[0].pos, zones);
    CHECK(v.x == Catch::Approx(0.0).margin(1e-15));
    CHECK(v.y == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("velocity update: agent on the target gets a zero target term") {
    const std::vector<AgentState> swarm = {agent(0, {2, 3}, {0.1, 0.2})};
    const Vec2 v = velocity_update(swarm[0], {}, swarm, {0.5, 0.5, 0.5, 0.5, 0.9}, {2, 3}, {});
    CHECK(v == Vec2{0.1, 0.2});  // only the current velocity survives
}

TEST_CASE("velocity update rejects a zero-speed alignment member") {
    std::vector<AgentState> swarm = {agent(0, {0, 0}), agent(1, {2, 0}, {0, 0})};
    NeighborhoodPartition p;
    p.alignment.push_back(1);
    CHECK_THROWS_AS(velocity_update(swarm[0], p, swarm, {}, {10, 0}, {}), degenerate_input);
}

TEST_CASE("velocity update matches the scalar oracle on random configurations") {
    RngStream r(77, "vel-oracle");
    for (int trial = 0; trial < 200; ++trial) {
        RandomConfig c = random_config(r);
        const NeighborhoodPartition p =
            partition_neighbors(c.swarm[0], c.swarm, c.obstacles, c.zones);
        const Vec2 got =
            velocity_update(c.swarm[0], p, c.swarm, c.weights, c.target, c.zones);
        const Vec2 want =
            velocity_update_oracle(c.swarm[0], p, c.swarm, c.weights, c.target, c.zones);
        REQUIRE(std::abs(got.x - want.x) <= 1e-9);
        REQUIRE(std::abs(got.y - want.y) <= 1e-9);
    }
}

TEST_CASE("zeroing one weight removes exactly that term") {
    RngStream r(78, "nullity");
    for (int trial = 0; trial < 50; ++trial) {
        RandomConfig c = random_config(r);
        const NeighborhoodPartition p =
            partition_neighbors(c.swarm[0], c.swarm, c.obstacles, c.zones);
        for (int which = 0; which < 5; ++which) {
            RuleWeights w = c.weights;
            (which == 0 ? w.a : which == 1 ? w.b : which == 2 ? w.c : which == 3 ? w.d : w.e) = 0.0;
            const Vec2 got = velocity_update(c.swarm[0], p, c.swarm, w, c.target, c.zones);
            const Vec2 want = velocity_update_oracle(c.swarm[0], p, c.swarm, w, c.target, c.zones);
            REQUIRE(std::abs(got.x - want.x) <= 1e-9);
            REQUIRE(std::abs(got.y - want.y) <= 1e-9);
        }
    }
}

TEST_CASE("velocity update is translation equivariant") {
    RngStream r(79, "translate");
    for (int trial = 0; trial < 50; ++trial) {
        RandomConfig c = random_config(r);
        const Vec2 shift{r.uniform(-100, 100), r.uniform(-100, 100)};
        const NeighborhoodPartition p =
            partition_neighbors(c.swarm[0], c.swarm, c.obstacles, c.zones);
        const Vec2 base = velocity_update(c.swarm[0], p, c.swarm, c.weights, c.target, c.zones);

        RandomConfig moved = c;
        for (AgentState& a : moved.swarm) a.pos += shift;
        for (Obstacle& ob : moved.obstacles) {
            if (auto* circle = std::get_if<Circle>(&ob))
                circle->center += shift;
            else
                for (Vec2& v : std::get<Polygon>(ob).vertices) v += shift;
        }
        moved.target += shift;
        const NeighborhoodPartition mp =
            partition_neighbors(moved.swarm[0], moved.swarm, moved.obstacles, moved.zones);
        const Vec2 out =
            velocity_update(moved.swarm[0], mp, moved.swarm, moved.weights, moved.target, moved.zones);
        REQUIRE(std::abs(out.x - base.x) <= 1e-9 * std::max(1.0, std::abs(base.x)));
        REQUIRE(std::abs(out.y - base.y) <= 1e-9 * std::max(1.0, std::abs(base.y)));
    }
}

TEST_CASE("velocity update is rotation equivariant") {
    RngStream r(80, "rotate");
    for (int trial = 0; trial < 50; ++trial) {
        RandomConfig c = random_config(r);
        const double phi = r.uniform(0, 6.28318530717958647692);
        const NeighborhoodPartition p =
            partition_neighbors(c.swarm[0], c.swarm, c.obstacles, c.zones);
        const Vec2 base =
            velocity_update(c.swarm[0], p, c.swarm, c.weights, c.target, c.zones).rotated(phi);

        RandomConfig rot = c;
        for (AgentState& a : rot.swarm) {
            a.pos = a.pos.rotated(phi);
            a.vel = a.vel.rotated(phi);
        }
        for (Obstacle& ob : rot.obstacles) {
            if (auto* circle = std::get_if<Circle>(&ob))
                circle->center = circle->center.rotated(phi);
            else
                for (Vec2& v : std::get<Polygon>(ob).vertices) v = v.rotated(phi);
        }
        rot.target = rot.target.rotated(phi);
        const NeighborhoodPartition rp =
            partition_neighbors(rot.swarm[0], rot.swarm, rot.obstacles, rot.zones);
        const Vec2 out =
            velocity_update(rot.swarm[0], rp, rot.swarm, rot.weights, rot.target, rot.zones);
        const double scale = std::max(1.0, base.norm());
        REQUIRE(std::abs(out.x - base.x) <= 1e-9 * scale);
        REQUIRE(std::abs(out.y - base.y) <= 1e-9 * scale);
    }
}

TEST_CASE("velocity update is bit-deterministic") {
    RngStream r(81, "determinism");
    RandomConfig c = random_config(r);
    const NeighborhoodPartition p =
        partition_neighbors(c.swarm[0], c.swarm, c.obstacles, c.zones);
    const Vec2 first = velocity_update(c.swarm[0], p, c.swarm, c.weights, c.target, c.zones);
    for (int i = 0; i < 10; ++i) {
        const Vec2 again = velocity_update(c.swarm[0], p, c.swarm, c.weights, c.target, c.zones);
        REQUIRE(again.x == first.x);
        REQUIRE(again.y == first.y);
    }
}

TEST_CASE("clamp_speed examples") {
    CHECK(clamp_speed({3, 4}, 10.0) == Vec2{3, 4});
    const Vec2 scaled = clamp_speed({3, 4}, 1.0);
    CHECK(scaled.x == Catch::Approx(0.6));
    CHECK(scaled.y == Catch::Approx(0.8));
    CHECK(clamp_speed({0, 0}, 5.0) == Vec2{0, 0});
}

TEST_CASE("clamp_speed is idempotent and never increases magnitude") {
    RngStream r(82, "clamp");
    for (int i = 0; i < 200; ++i) {
        const Vec2 v{r.uniform(-20, 20), r.uniform(-20, 20)};
        const double cap = r.uniform(0.1, 5.0);
        const Vec2 once = clamp_speed(v, cap);
        const Vec2 twice = clamp_speed(once, cap);
        REQUIRE(once.norm() <= std::max(v.norm(), cap) + 1e-12);
        REQUIRE(once.norm() <= cap + 1e-12);
        REQUIRE(twice.x == once.x);
        REQUIRE(twice.y == once.y);
    }
}
