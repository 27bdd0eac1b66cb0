#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gflock/errors.hpp"
#include "gflock/geometry.hpp"
#include "gflock/swarm.hpp"

namespace gflock {

// A complete world description. Everything an episode needs lives here, so
// (scenario, ruleset, seed) fully determines a run.
struct Scenario {
    std::string name = "custom";
    Rect bounds{{0, 0}, {100, 60}};
    std::vector<Obstacle> obstacles;
    TargetArea target{{92, 30}, 6.0};
    Rect spawn{{2, 22}, {12, 38}};
    int agent_count = 20;
    ZoneConfig zones;
    double max_speed = 1.2;
    double dt = 1.0;             // seconds per step
    int max_steps = 800;
    double collision_radius = 0.4;
    double target_context_dist = 15.0;  // target_near threshold for rule dispatch
    double noise_sigma = 0.0;    // optional zero-mean velocity noise, off by default
};

inline void validate_scenario(const Scenario& s) {
    const auto fail = [](const std::string& field, const std::string& why) {
        throw config_error("scenario." + field + ": " + why);
    };
    if (!(s.bounds.min.x < s.bounds.max.x && s.bounds.min.y < s.bounds.max.y))
        fail("bounds", "min must be strictly below max");
    if (!(s.spawn.min.x < s.spawn.max.x && s.spawn.min.y < s.spawn.max.y))
        fail("spawn", "min must be strictly below max");
    if (!s.bounds.contains(s.spawn)) fail("spawn", "must lie inside bounds");
    if (s.target.radius <= 0.0) fail("target.radius", "must be positive");
    const Rect target_box{{s.target.center.x - s.target.radius, s.target.center.y - s.target.radius},
                          {s.target.center.x + s.target.radius, s.target.center.y + s.target.radius}};
    if (!s.bounds.contains(target_box)) fail("target", "disk must lie inside bounds");
    if (s.agent_count < 1) fail("spawn.count", "need at least one agent");
    if (!valid_zones(s.zones))
        fail("zones", "require 0 < repulsion < alignment < attraction and obstacle_radius > 0");
    if (s.max_speed <= 0.0) fail("max_speed", "must be positive");
    if (s.dt <= 0.0) fail("dt", "must be positive");
    if (s.max_steps < 1) fail("max_steps", "must be at least 1");
    if (s.collision_radius <= 0.0) fail("collision_radius", "must be positive");
    if (s.target_context_dist < 0.0) fail("target_context_dist", "must be non-negative");
    if (s.noise_sigma < 0.0) fail("noise_sigma", "must be non-negative");
    for (std::size_t i = 0; i < s.obstacles.size(); ++i) {
        const std::string field = "obstacles[" + std::to_string(i) + "]";
        if (const auto* c = std::get_if<Circle>(&s.obstacles[i])) {
            if (c->radius <= 0.0) fail(field + ".radius", "must be positive");
        } else if (!polygon_is_valid(std::get<Polygon>(s.obstacles[i]))) {
            fail(field + ".vertices", "need at least 3 non-collinear vertices");
        }
        if (rect_intersects_obstacle(s.spawn, s.obstacles[i]))
            fail("spawn", "region intersects " + field);
    }
}

// The versioned builtin test course. Along the spawn-to-target axis: a
// two-wall tunnel (gap 6), a U-shaped pocket opening toward the swarm
// (mouth 10), and a convex pentagon. 100x60 world, 20 agents.
inline Scenario gauntlet_scenario() {
    Scenario s;
    s.name = "gauntlet-v1";
    // Tunnel entrance corners are chamfered so the mouth funnels the swarm
    // into the gap instead of presenting a flat face; the pentagon leads
    // with a vertex so the flow splits around it.
    s.obstacles = {
        Polygon{{{25, 60}, {25, 37}, {29, 33}, {31, 33}, {31, 60}}},  // tunnel upper wall
        Polygon{{{25, 0}, {31, 0}, {31, 27}, {29, 27}, {25, 23}}},    // tunnel lower wall
        Polygon{{{45, 33}, {55, 33}, {55, 47}, {45, 47},     // U pocket, mouth at x=45
                 {45, 45}, {53, 45}, {53, 35}, {45, 35}}},
        Polygon{{{66, 30}, {70.146, 24.294}, {76.854, 26.473},  // convex pentagon
                 {76.854, 33.527}, {70.146, 35.706}}},
    };
    return s;
}

// Obstacle-free field with the target on the spawn center.
inline Scenario open_field_scenario() {
    Scenario s;
    s.name = "open-v1";
    s.bounds = {{0, 0}, {100, 60}};
    s.spawn = {{40, 20}, {60, 40}};
    s.target = {{50, 30}, 8.0};
    s.agent_count = 10;
    return s;
}

namespace detail {

inline Vec2 vec2_from_json(const nlohmann::json& j, const std::string& path) {
    if (!j.is_object() || !j.contains("x") || !j.contains("y") ||
        !j.at("x").is_number() || !j.at("y").is_number())
        throw config_error(path + ": expected {\"x\": number, \"y\": number}");
    return {j.at("x").get<double>(), j.at("y").get<double>()};
}

inline nlohmann::json vec2_to_json(Vec2 v) {
    return {{"x", v.x}, {"y", v.y}};
}

inline double num_field(const nlohmann::json& j, const std::string& key,
                        const std::string& parent) {
    if (!j.contains(key) || !j.at(key).is_number())
        throw config_error(parent + key + ": missing or non-numeric");
    return j.at(key).get<double>();
}

}  // namespace detail

inline nlohmann::json to_json(const Scenario& s) {
    using detail::vec2_to_json;
    nlohmann::json obstacles = nlohmann::json::array();
    for (const auto& ob : s.obstacles) {
        if (const auto* c = std::get_if<Circle>(&ob)) {
            obstacles.push_back({{"type", "circle"},
                                 {"center", vec2_to_json(c->center)},
                                 {"radius", c->radius}});
        } else {
            nlohmann::json verts = nlohmann::json::array();
            for (Vec2 v : std::get<Polygon>(ob).vertices) verts.push_back(vec2_to_json(v));
            obstacles.push_back({{"type", "polygon"}, {"vertices", verts}});
        }
    }
    return {
        {"name", s.name},
        {"bounds", {{"min", vec2_to_json(s.bounds.min)}, {"max", vec2_to_json(s.bounds.max)}}},
        {"obstacles", obstacles},
        {"target", {{"center", vec2_to_json(s.target.center)}, {"radius", s.target.radius}}},
        {"spawn",
         {{"min", vec2_to_json(s.spawn.min)}, {"max", vec2_to_json(s.spawn.max)},
          {"count", s.agent_count}}},
        {"zones",
         {{"repulsion", s.zones.repulsion_radius}, {"alignment", s.zones.alignment_radius},
          {"attraction", s.zones.attraction_radius}, {"obstacle", s.zones.obstacle_radius}}},
        {"max_speed", s.max_speed},
        {"dt", s.dt},
        {"max_steps", s.max_steps},
        {"collision_radius", s.collision_radius},
        {"target_context_dist", s.target_context_dist},
        {"noise_sigma", s.noise_sigma},
    };
}

inline Scenario scenario_from_json(const nlohmann::json& j) {
    using detail::num_field;
    using detail::vec2_from_json;
    if (!j.is_object()) throw config_error("scenario: expected a JSON object");
    Scenario s;
    if (j.contains("name")) {
        if (!j.at("name").is_string()) throw config_error("scenario.name: expected string");
        s.name = j.at("name").get<std::string>();
    }
    if (!j.contains("bounds")) throw config_error("scenario.bounds: missing");
    s.bounds.min = vec2_from_json(j.at("bounds").value("min", nlohmann::json()), "scenario.bounds.min");
    s.bounds.max = vec2_from_json(j.at("bounds").value("max", nlohmann::json()), "scenario.bounds.max");
    if (!j.contains("target")) throw config_error("scenario.target: missing");
    s.target.center = vec2_from_json(j.at("target").value("center", nlohmann::json()),
                                     "scenario.target.center");
    s.target.radius = num_field(j.at("target"), "radius", "scenario.target.");
    if (!j.contains("spawn")) throw config_error("scenario.spawn: missing");
    s.spawn.min = vec2_from_json(j.at("spawn").value("min", nlohmann::json()), "scenario.spawn.min");
    s.spawn.max = vec2_from_json(j.at("spawn").value("max", nlohmann::json()), "scenario.spawn.max");
    s.agent_count = static_cast<int>(num_field(j.at("spawn"), "count", "scenario.spawn."));
    if (j.contains("zones")) {
        const auto& z = j.at("zones");
        s.zones.repulsion_radius = num_field(z, "repulsion", "scenario.zones.");
        s.zones.alignment_radius = num_field(z, "alignment", "scenario.zones.");
        s.zones.attraction_radius = num_field(z, "attraction", "scenario.zones.");
        s.zones.obstacle_radius = num_field(z, "obstacle", "scenario.zones.");
    }
    if (j.contains("max_speed")) s.max_speed = num_field(j, "max_speed", "scenario.");
    if (j.contains("dt")) s.dt = num_field(j, "dt", "scenario.");
    if (j.contains("max_steps")) s.max_steps = static_cast<int>(num_field(j, "max_steps", "scenario."));
    if (j.contains("collision_radius"))
        s.collision_radius = num_field(j, "collision_radius", "scenario.");
    if (j.contains("target_context_dist"))
        s.target_context_dist = num_field(j, "target_context_dist", "scenario.");
    if (j.contains("noise_sigma")) s.noise_sigma = num_field(j, "noise_sigma", "scenario.");
    if (j.contains("obstacles")) {
        if (!j.at("obstacles").is_array()) throw config_error("scenario.obstacles: expected array");
        for (std::size_t i = 0; i < j.at("obstacles").size(); ++i) {
            const auto& o = j.at("obstacles")[i];
            const std::string path = "scenario.obstacles[" + std::to_string(i) + "]";
            const std::string type = o.value("type", "");
            if (type == "circle") {
                Circle c;
                c.center = vec2_from_json(o.value("center", nlohmann::json()), path + ".center");
                c.radius = num_field(o, "radius", path + ".");
                s.obstacles.emplace_back(c);
            } else if (type == "polygon") {
                if (!o.contains("vertices") || !o.at("vertices").is_array())
                    throw config_error(path + ".vertices: missing or not an array");
                Polygon p;
                for (std::size_t k = 0; k < o.at("vertices").size(); ++k)
                    p.vertices.push_back(vec2_from_json(
                        o.at("vertices")[k], path + ".vertices[" + std::to_string(k) + "]"));
                s.obstacles.emplace_back(p);
            } else {
                throw config_error(path + ".type: expected \"circle\" or \"polygon\"");
            }
        }
    }
    validate_scenario(s);
    return s;
}

// Builtin names ("gauntlet", "open") or a JSON file path. agent_override > 0
// replaces the agent count (the 20/60/100 experiment presets).
inline Scenario load_scenario(const std::string& path_or_name, int agent_override = 0) {
    Scenario s;
    if (path_or_name == "gauntlet" || path_or_name == "gauntlet-v1") {
        s = gauntlet_scenario();
    } else if (path_or_name == "open" || path_or_name == "open-v1") {
        s = open_field_scenario();
    } else {
        std::ifstream in(path_or_name);
        if (!in) throw config_error("scenario: cannot open '" + path_or_name + "'");
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw config_error("scenario: parse failure in '" + path_or_name + "': " + e.what());
        }
        s = scenario_from_json(j);
    }
    if (agent_override > 0) s.agent_count = agent_override;
    validate_scenario(s);
    return s;
}

inline std::string scenario_digest(const Scenario& s) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(to_json(s).dump())));
    return buf;
}

}  // namespace gflock
