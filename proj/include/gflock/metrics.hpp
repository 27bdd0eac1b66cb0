#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "gflock/episode.hpp"
#include "gflock/errors.hpp"
#include "gflock/vec2.hpp"

namespace gflock {

// Table-shaped summary of one episode (or a seed average of several).
// Smaller is better on every field.
struct MetricsReport {
    double aggregation = 0.0;         // time-mean centroid distance, world units
    double anisotropy = 0.0;          // time-mean heading spread, degrees
    double average_time = 0.0;        // mean arrival duration, seconds
    double uniformity = 0.0;          // time-mean nearest-neighbor dispersion
    double death_rate = 0.0;          // dead / total
    double stability_variance = 0.0;  // variance of the cohesion series
    double fitness = 0.0;
};

struct FitnessConfig {
    enum class Variant { literal, robust };
    double alpha = 1.0;
    double epsilon = 1e-3;  // smoothing for the robust variant
    Variant variant = Variant::robust;
};

inline Vec2 centroid(std::span<const Vec2> positions) {
    if (positions.empty()) throw degenerate_input("centroid: empty position list");
    Vec2 sum;
    for (Vec2 p : positions) sum += p;
    return sum / static_cast<double>(positions.size());
}

// Mean distance of the members to their centroid: the cohesion order
// parameter. 0 for a fully collapsed swarm.
inline double gamma_t(std::span<const Vec2> positions) {
    if (positions.empty()) throw degenerate_input("gamma_t: empty position list");
    const Vec2 c = centroid(positions);
    double sum = 0.0;
    for (Vec2 p : positions) sum += distance(p, c);
    return sum / static_cast<double>(positions.size());
}

// Population variance (divisor = series length) of the cohesion series.
inline double stability_variance(std::span<const double> gamma_series) {
    if (gamma_series.empty()) throw degenerate_input("stability_variance: empty series");
    const double n = static_cast<double>(gamma_series.size());
    double mean = 0.0;
    for (double g : gamma_series) mean += g;
    mean /= n;
    double sum_sq = 0.0;
    for (double g : gamma_series) sum_sq += (g - mean) * (g - mean);
    return sum_sq / n;
}

struct HeadingDeviation {
    double delta = 0.0;             // mean signed deviation, degrees
    std::vector<double> per_agent;  // signed deviation per member, degrees
};

namespace detail {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// signed angle from `reference` to `v` in (-180, 180]
inline double signed_angle_deg(Vec2 reference, Vec2 v) {
    double deg = std::atan2(reference.cross(v), reference.dot(v)) * (180.0 / kPi);
    if (deg <= -180.0) deg = 180.0;
    return deg;
}

}  // namespace detail

// Deviation of each member's heading from the group's mean-velocity
// direction. Still members deviate by 0. When the mean velocity cancels to
// zero the first moving member's heading stands in as the reference.
inline HeadingDeviation heading_deviation(std::span<const Vec2> velocities) {
    Vec2 mean_velocity;
    const Vec2* first_mover = nullptr;
    for (const Vec2& v : velocities) {
        mean_velocity += v;
        if (first_mover == nullptr && v.norm_sq() > 0.0) first_mover = &v;
    }
    if (first_mover == nullptr)
        throw degenerate_input("heading_deviation: all velocities are zero");
    const Vec2 reference =
        mean_velocity.norm_sq() > 0.0 ? mean_velocity : *first_mover;

    HeadingDeviation out;
    out.per_agent.reserve(velocities.size());
    double sum = 0.0;
    for (const Vec2& v : velocities) {
        const double theta =
            v.norm_sq() > 0.0 ? detail::signed_angle_deg(reference, v) : 0.0;
        out.per_agent.push_back(theta);
        sum += theta;
    }
    out.delta = sum / static_cast<double>(velocities.size());
    return out;
}

// Nearest-neighbor distance dispersion: population stddev over mean. 0 for
// a perfect lattice, for fewer than two members, and for a fully collapsed
// set.
inline double uniformity_t(std::span<const Vec2> positions) {
    const std::size_t n = positions.size();
    if (n < 2) return 0.0;
    std::vector<double> nn(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double best_sq = -1.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const double d_sq = (positions[i] - positions[j]).norm_sq();
            if (best_sq < 0.0 || d_sq < best_sq) best_sq = d_sq;
        }
        nn[i] = std::sqrt(best_sq);
    }
    double mean = 0.0;
    for (double d : nn) mean += d;
    mean /= static_cast<double>(n);
    if (mean == 0.0) return 0.0;
    double var = 0.0;
    for (double d : nn) var += (d - mean) * (d - mean);
    var /= static_cast<double>(n);
    return std::sqrt(var) / mean;
}

namespace detail {

inline std::vector<Vec2> active_positions(const StepSnapshot& snap) {
    std::vector<Vec2> out;
    for (std::size_t i = 0; i < snap.statuses.size(); ++i)
        if (snap.statuses[i] == AgentStatus::active) out.push_back(snap.positions[i]);
    return out;
}

inline std::vector<Vec2> active_velocities(const StepSnapshot& snap) {
    std::vector<Vec2> out;
    for (std::size_t i = 0; i < snap.statuses.size(); ++i)
        if (snap.statuses[i] == AgentStatus::active) out.push_back(snap.velocities[i]);
    return out;
}

inline std::size_t moving_count(std::span<const Vec2> velocities) {
    std::size_t n = 0;
    for (const Vec2& v : velocities)
        if (v.norm_sq() > 0.0) ++n;
    return n;
}

}  // namespace detail

// Cohesion value per step, over the Active members. Steps with no Active
// members are skipped.
inline std::vector<double> gamma_series(const EpisodeLog& log) {
    std::vector<double> out;
    for (const StepSnapshot& snap : log.steps) {
        const auto pos = detail::active_positions(snap);
        if (!pos.empty()) out.push_back(gamma_t(pos));
    }
    return out;
}

// Nearest-neighbor dispersion per step over Active members, one value per
// snapshot (degenerate steps report 0).
inline std::vector<double> uniformity_series(const EpisodeLog& log) {
    std::vector<double> out;
    out.reserve(log.steps.size());
    for (const StepSnapshot& snap : log.steps)
        out.push_back(uniformity_t(detail::active_positions(snap)));
    return out;
}

// Time-mean of the per-step heading spread (population stddev of the
// deviations, degrees). A step counts only when at least two Active members
// are moving.
inline double anisotropy(const EpisodeLog& log) {
    double sum = 0.0;
    std::size_t valid = 0;
    for (const StepSnapshot& snap : log.steps) {
        const auto vel = detail::active_velocities(snap);
        if (detail::moving_count(vel) < 2) continue;
        const HeadingDeviation hd = heading_deviation(vel);
        double var = 0.0;
        for (double theta : hd.per_agent)
            var += (theta - hd.delta) * (theta - hd.delta);
        var /= static_cast<double>(hd.per_agent.size());
        sum += std::sqrt(var);
        ++valid;
    }
    if (valid == 0) throw degenerate_input("anisotropy: no step has two moving agents");
    return sum / static_cast<double>(valid);
}

inline int arrived_count(const EpisodeLog& log) {
    int n = 0;
    for (const Event& e : log.events)
        if (e.kind == EventKind::arrived) ++n;
    return n;
}

// Mean arrival duration over the agents that arrived. With no arrivals the
// worst case max_steps*dt stands in so rankings still work.
inline double average_time(const EpisodeLog& log) {
    double sum = 0.0;
    int n = 0;
    for (const Event& e : log.events) {
        if (e.kind != EventKind::arrived) continue;
        sum += static_cast<double>(e.step) * log.dt;
        ++n;
    }
    if (n == 0) return static_cast<double>(log.max_steps) * log.dt;
    return sum / n;
}

inline double death_rate(const EpisodeLog& log) {
    if (log.agent_count < 1) throw degenerate_input("death_rate: no agents");
    int died = 0;
    for (const Event& e : log.events)
        if (e.kind == EventKind::died) ++died;
    return static_cast<double>(died) / static_cast<double>(log.agent_count);
}

namespace detail {

struct FitnessFactors {
    double mean_time = 0.0;       // mean arrival duration (worst case if none)
    double death_fraction = 0.0;
    double mean_gamma = 0.0;      // time-and-agent-mean centroid distance
    double signed_gamma_dev = 0.0;  // sum(gamma - mean)/len: ~0 over a full series
    double gamma_variance = 0.0;
    double heading_sq = 0.0;      // sum over steps and agents of squared deviation / T
};

inline FitnessFactors fitness_factors(const EpisodeLog& log) {
    if (log.steps.empty()) throw degenerate_input("fitness: log has no snapshots");
    FitnessFactors f;
    f.mean_time = average_time(log);
    f.death_fraction = death_rate(log);

    const std::vector<double> gammas = gamma_series(log);
    if (!gammas.empty()) {
        const double len = static_cast<double>(gammas.size());
        double mean = 0.0;
        for (double g : gammas) mean += g;
        mean /= len;
        f.mean_gamma = mean;
        double signed_sum = 0.0;
        for (double g : gammas) signed_sum += g - mean;
        f.signed_gamma_dev = signed_sum / len;
        f.gamma_variance = stability_variance(gammas);
    }

    double heading_total = 0.0;
    for (const StepSnapshot& snap : log.steps) {
        const auto vel = active_velocities(snap);
        if (moving_count(vel) == 0) continue;
        const HeadingDeviation hd = heading_deviation(vel);
        for (double theta : hd.per_agent)
            heading_total += (theta - hd.delta) * (theta - hd.delta);
    }
    f.heading_sq = heading_total / static_cast<double>(log.steps.size());
    return f;
}

}  // namespace detail

// Composite navigation quality, smaller is better.
//
// The literal variant multiplies the five factors as printed: mean arrival
// time, death fraction, mean centroid distance, mean signed cohesion
// deviation, and mean squared heading deviation. The signed-deviation
// factor is zero-mean over a full series and the death factor annihilates
// any deathless run, so the literal product pins at ~0; it is kept for
// regression visibility. The robust variant smooths every factor with
// epsilon and uses the cohesion variance instead of the signed sum, which
// keeps the product strictly positive and monotone in each factor. The
// optimizer minimizes the robust variant.
inline double fitness(const EpisodeLog& log, const FitnessConfig& cfg = {}) {
    const detail::FitnessFactors f = detail::fitness_factors(log);
    if (cfg.variant == FitnessConfig::Variant::literal) {
        return f.mean_time * f.death_fraction * f.mean_gamma * f.signed_gamma_dev *
               f.heading_sq * cfg.alpha;
    }
    const double e = cfg.epsilon;
    return (e + f.mean_time) * (e + f.death_fraction) * (e + f.mean_gamma) *
           (e + f.gamma_variance) * (e + f.heading_sq) * cfg.alpha;
}

inline MetricsReport metrics_report(const EpisodeLog& log, const FitnessConfig& cfg = {}) {
    if (log.steps.empty()) throw degenerate_input("metrics_report: log has no snapshots");
    MetricsReport r;
    const detail::FitnessFactors f = detail::fitness_factors(log);
    r.aggregation = f.mean_gamma;
    r.average_time = f.mean_time;
    r.death_rate = f.death_fraction;
    r.stability_variance = f.gamma_variance;
    try {
        r.anisotropy = anisotropy(log);
    } catch (const degenerate_input&) {
        r.anisotropy = 0.0;  // swarm never had two movers
    }
    const std::vector<double> u = uniformity_series(log);
    double u_sum = 0.0;
    for (double v : u) u_sum += v;
    r.uniformity = u.empty() ? 0.0 : u_sum / static_cast<double>(u.size());
    r.fitness = fitness(log, cfg);
    return r;
}

inline nlohmann::json to_json(const MetricsReport& r) {
    return {
        {"aggregation", r.aggregation},
        {"anisotropy", r.anisotropy},
        {"average_time", r.average_time},
        {"uniformity", r.uniformity},
        {"death_rate", r.death_rate},
        {"stability_variance", r.stability_variance},
        {"fitness", r.fitness},
    };
}

inline MetricsReport metrics_report_from_json(const nlohmann::json& j) {
    MetricsReport r;
    for (auto [key, dst] : {std::pair{"aggregation", &r.aggregation},
                            {"anisotropy", &r.anisotropy},
                            {"average_time", &r.average_time},
                            {"uniformity", &r.uniformity},
                            {"death_rate", &r.death_rate},
                            {"stability_variance", &r.stability_variance},
                            {"fitness", &r.fitness}}) {
        if (!j.contains(key) || !j.at(key).is_number())
            throw config_error(std::string("metrics.") + key + ": missing or non-numeric");
        *dst = j.at(key).get<double>();
    }
    return r;
}

// Side-by-side text table: one row per headline metric, one column per
// labeled report.
inline std::string render_comparison_table(std::span<const std::string> labels,
                                           std::span<const MetricsReport> reports) {
    const struct {
        const char* name;
        double MetricsReport::* field;
    } rows[] = {
        {"Aggregation", &MetricsReport::aggregation},
        {"Anisotropy", &MetricsReport::anisotropy},
        {"Averagetime", &MetricsReport::average_time},
        {"Uniformity", &MetricsReport::uniformity},
        {"Deathrate", &MetricsReport::death_rate},
        {"Fitness", &MetricsReport::fitness},
    };
    constexpr int kCol = 14;
    std::string out;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%-14s", "Evaluation");
    out += buf;
    for (const std::string& label : labels) {
        std::snprintf(buf, sizeof(buf), " %*s", kCol, label.c_str());
        out += buf;
    }
    out += '\n';
    for (const auto& row : rows) {
        std::snprintf(buf, sizeof(buf), "%-14s", row.name);
        out += buf;
        for (const MetricsReport& r : reports) {
            std::snprintf(buf, sizeof(buf), " %*.4f", kCol, r.*row.field);
            out += buf;
        }
        out += '\n';
    }
    return out;
}

}  // namespace gflock
