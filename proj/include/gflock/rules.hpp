#pragma once

#include <array>
#include <cstddef>
#include <fstream>
#include <string>

#include <json.hpp>

#include "gflock/errors.hpp"
#include "gflock/rng.hpp"

namespace gflock {

// Behavioral situation of one agent at one step. Exactly one context holds;
// it selects which of the four rules drives the velocity update.
enum class Context {
    free_flight = 0,
    obstacle_near = 1,
    target_near = 2,
    obstacle_and_target = 3,
};

inline constexpr int kContextCount = 4;
inline constexpr int kWeightsPerRule = 5;

inline const char* context_name(Context c) {
    switch (c) {
        case Context::free_flight: return "free_flight";
        case Context::obstacle_near: return "obstacle_near";
        case Context::target_near: return "target_near";
        case Context::obstacle_and_target: return "obstacle_and_target";
    }
    return "?";
}

// One rule: the five term weights of the velocity update.
//   a repulsion, b alignment, c attraction, d obstacle avoidance, e target seeking
struct RuleWeights {
    double a = 0.5;
    double b = 0.5;
    double c = 0.5;
    double d = 0.5;
    double e = 0.5;

    bool operator==(const RuleWeights&) const = default;
};

inline bool valid_rule_weights(const RuleWeights& w) {
    for (double v : {w.a, w.b, w.c, w.d, w.e})
        if (!(v > 0.0 && v < 1.0)) return false;
    return true;
}

// Four rules, one per Context. Flattened this is the 20-gene search space.
struct RuleSet {
    std::array<RuleWeights, kContextCount> rules{};

    const RuleWeights& for_context(Context c) const {
        return rules[static_cast<std::size_t>(c)];
    }

    bool operator==(const RuleSet&) const = default;
};

inline bool valid_ruleset(const RuleSet& rs) {
    for (const auto& r : rs.rules)
        if (!valid_rule_weights(r)) return false;
    return true;
}

// Reynolds-style fixed baseline: midpoint weights in every context.
inline RuleSet baseline_ruleset() {
    return RuleSet{};
}

// Hand-tuned navigation rules used to seed the optimizer. Cohesion is kept
// tiny because the attraction term sums over every neighbor in the outer
// zone and otherwise swamps target seeking.
inline RuleSet expert_ruleset() {
    RuleSet rs;
    rs.rules[0] = {0.10, 0.20, 0.004, 0.90, 0.90};   // free flight
    rs.rules[1] = {0.05, 0.30, 0.003, 0.95, 0.15};   // obstacle near
    rs.rules[2] = {0.10, 0.15, 0.004, 0.90, 0.90};   // target near
    rs.rules[3] = {0.05, 0.15, 0.003, 0.95, 0.40};   // obstacle and target
    return rs;
}

inline nlohmann::json to_json(const RuleSet& rs) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rs.rules)
        arr.push_back({{"a", r.a}, {"b", r.b}, {"c", r.c}, {"d", r.d}, {"e", r.e}});
    return nlohmann::json{{"rules", arr}};
}

inline RuleSet ruleset_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("rules"))
        throw config_error("rules: missing key 'rules'");
    const auto& arr = j.at("rules");
    if (!arr.is_array() || arr.size() != kContextCount)
        throw config_error("rules: expected exactly 4 rule objects");
    RuleSet rs;
    for (std::size_t i = 0; i < kContextCount; ++i) {
        const auto& o = arr[i];
        RuleWeights w;
        for (auto [key, dst] : {std::pair{"a", &w.a}, {"b", &w.b}, {"c", &w.c},
                                {"d", &w.d}, {"e", &w.e}}) {
            const std::string path = "rules[" + std::to_string(i) + "]." + key;
            if (!o.contains(key) || !o.at(key).is_number())
                throw config_error(path + ": missing or non-numeric");
            *dst = o.at(key).get<double>();
            if (!(*dst > 0.0 && *dst < 1.0))
                throw config_error(path + ": weight must lie strictly in (0,1)");
        }
        rs.rules[i] = w;
    }
    return rs;
}

// Accepts the builtin names "bream" (baseline) and "expert", else a file path.
inline RuleSet load_ruleset(const std::string& path_or_name) {
    if (path_or_name == "bream") return baseline_ruleset();
    if (path_or_name == "expert") return expert_ruleset();
    std::ifstream in(path_or_name);
    if (!in) throw config_error("rules: cannot open '" + path_or_name + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw config_error("rules: parse failure in '" + path_or_name + "': " + e.what());
    }
    return ruleset_from_json(j);
}

inline void save_ruleset(const RuleSet& rs, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw config_error("rules: cannot write '" + path + "'");
    out << to_json(rs).dump(2) << "\n";
}

inline std::string ruleset_digest(const RuleSet& rs) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(to_json(rs).dump())));
    return buf;
}

}  // namespace gflock
