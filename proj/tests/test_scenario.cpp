#include <catch2/catch_amalgamated.hpp>

#include "gflock/rules.hpp"
#include "gflock/scenario.hpp"

using namespace gflock;

TEST_CASE("builtin gauntlet has the three obstacle groups in course order") {
    const Scenario s = load_scenario("gauntlet");
    REQUIRE(s.obstacles.size() == 4);  // tunnel = two walls, then pocket, then pentagon
    const auto min_x = [](const Obstacle& ob) {
        const auto& poly = std::get<Polygon>(ob);
        double m = poly.vertices[0].x;
        for (Vec2 v : poly.vertices) m = std::min(m, v.x);
        return m;
    };
    const double tunnel_x = std::min(min_x(s.obstacles[0]), min_x(s.obstacles[1]));
    const double pocket_x = min_x(s.obstacles[2]);
    const double pentagon_x = min_x(s.obstacles[3]);
    CHECK(tunnel_x < pocket_x);
    CHECK(pocket_x < pentagon_x);
    // spawn sits before the course, target after it
    CHECK(s.spawn.max.x < tunnel_x);
    CHECK(s.target.center.x > pentagon_x);
    // the pocket is non-convex, opening toward the spawn side
    const auto& pocket = std::get<Polygon>(s.obstacles[2]);
    CHECK(pocket.vertices.size() == 8);
    CHECK_FALSE(point_in_polygon({(pocket_x + 53) / 2, 40}, pocket));  // cavity is hollow
    CHECK(s.name == "gauntlet-v1");
}

TEST_CASE("open-field builtin: no obstacles, target on the spawn center") {
    const Scenario s = load_scenario("open");
    CHECK(s.obstacles.empty());
    CHECK(s.target.center.x == Catch::Approx((s.spawn.min.x + s.spawn.max.x) / 2));
    CHECK(s.target.center.y == Catch::Approx((s.spawn.min.y + s.spawn.max.y) / 2));
    CHECK_NOTHROW(validate_scenario(s));
}

TEST_CASE("agent count override") {
    CHECK(load_scenario("gauntlet", 60).agent_count == 60);
    CHECK(load_scenario("gauntlet").agent_count == 20);
}

TEST_CASE("spawn overlapping an obstacle is rejected") {
    Scenario s = open_field_scenario();
    s.obstacles.emplace_back(Circle{{50, 30}, 2.0});  // inside the spawn rect
    try {
        validate_scenario(s);
        FAIL("expected config_error");
    } catch (const config_error& e) {
        CHECK(std::string(e.what()).find("spawn") != std::string::npos);
    }
}

TEST_CASE("validation names the offending field") {
    Scenario s = gauntlet_scenario();
    s.dt = 0.0;
    try {
        validate_scenario(s);
        FAIL("expected config_error");
    } catch (const config_error& e) {
        CHECK(std::string(e.what()).find("dt") != std::string::npos);
    }

    s = gauntlet_scenario();
    s.zones.alignment_radius = 100.0;  // above attraction
    CHECK_THROWS_AS(validate_scenario(s), config_error);

    s = gauntlet_scenario();
    s.spawn = {{-5, 10}, {5, 20}};  // pokes out of bounds
    CHECK_THROWS_AS(validate_scenario(s), config_error);

    s = gauntlet_scenario();
    s.target = {{99, 30}, 6.0};  // disk crosses the boundary
    CHECK_THROWS_AS(validate_scenario(s), config_error);

    s = gauntlet_scenario();
    s.obstacles.push_back(Polygon{{{60, 10}, {61, 11}, {62, 12}}});  // collinear
    CHECK_THROWS_AS(validate_scenario(s), config_error);
}

TEST_CASE("scenario JSON round-trip preserves everything") {
    const Scenario s = gauntlet_scenario();
    const Scenario back = scenario_from_json(to_json(s));
    CHECK(to_json(back).dump() == to_json(s).dump());
    CHECK(scenario_digest(back) == scenario_digest(s));
}

TEST_CASE("scenario JSON parse errors carry a field path") {
    nlohmann::json j = to_json(open_field_scenario());
    j["target"].erase("radius");
    try {
        scenario_from_json(j);
        FAIL("expected config_error");
    } catch (const config_error& e) {
        CHECK(std::string(e.what()).find("target.radius") != std::string::npos);
    }

    j = to_json(open_field_scenario());
    j["obstacles"] = nlohmann::json::array({{{"type", "blob"}}});
    try {
        scenario_from_json(j);
        FAIL("expected config_error");
    } catch (const config_error& e) {
        CHECK(std::string(e.what()).find("obstacles[0].type") != std::string::npos);
    }
}

TEST_CASE("load_scenario rejects a missing file") {
    CHECK_THROWS_AS(load_scenario("/no/such/file.json"), config_error);
}

TEST_CASE("ruleset JSON round-trip and validation") {
    const RuleSet rs = expert_ruleset();
    const RuleSet back = ruleset_from_json(to_json(rs));
    CHECK(back == rs);

    nlohmann::json j = to_json(rs);
    j["rules"][2]["c"] = 1.5;
    try {
        ruleset_from_json(j);
        FAIL("expected config_error");
    } catch (const config_error& e) {
        CHECK(std::string(e.what()).find("rules[2].c") != std::string::npos);
    }

    j = to_json(rs);
    j["rules"].erase(3);
    CHECK_THROWS_AS(ruleset_from_json(j), config_error);
}

TEST_CASE("builtin ruleset names") {
    CHECK(load_ruleset("bream") == baseline_ruleset());
    CHECK(load_ruleset("expert") == expert_ruleset());
    CHECK_THROWS_AS(load_ruleset("/no/such/rules.json"), config_error);
    // the baseline is the midpoint vector in every context
    for (const RuleWeights& w : baseline_ruleset().rules) {
        CHECK(w.a == 0.5);
        CHECK(w.b == 0.5);
        CHECK(w.c == 0.5);
        CHECK(w.d == 0.5);
        CHECK(w.e == 0.5);
    }
}

TEST_CASE("rule weight validity is the open interval") {
    CHECK(valid_rule_weights({0.1, 0.9, 0.5, 0.001, 0.999}));
    CHECK_FALSE(valid_rule_weights({0.0, 0.5, 0.5, 0.5, 0.5}));
    CHECK_FALSE(valid_rule_weights({1.0, 0.5, 0.5, 0.5, 0.5}));
    CHECK(valid_ruleset(expert_ruleset()));
}
