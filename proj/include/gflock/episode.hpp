#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "gflock/errors.hpp"
#include "gflock/swarm.hpp"
#include "gflock/text.hpp"
#include "gflock/vec2.hpp"

namespace gflock {

struct StepSnapshot {
    std::vector<Vec2> positions;
    std::vector<Vec2> velocities;
    std::vector<AgentStatus> statuses;
};

enum class EventKind { arrived, died };

struct Event {
    int step = 0;
    int agent_id = 0;
    EventKind kind = EventKind::arrived;
};

// Full record of one run: a snapshot per step (index == step number) plus
// the status-transition events. Every metric is recomputable from this
// alone.
struct EpisodeLog {
    std::vector<StepSnapshot> steps;
    std::vector<Event> events;
    int agent_count = 0;
    double dt = 1.0;
    int max_steps = 0;
    std::uint64_t seed = 0;
    std::string scenario_ref;
    std::string ruleset_ref;

    int arrive_step_of(int agent_id) const {
        for (const Event& e : events)
            if (e.agent_id == agent_id && e.kind == EventKind::arrived) return e.step;
        return -1;
    }
};

inline void write_trajectory_csv(const EpisodeLog& log, std::ostream& os) {
    os << "step,agent_id,x,y,vx,vy,status\n";
    for (std::size_t t = 0; t < log.steps.size(); ++t) {
        const StepSnapshot& snap = log.steps[t];
        for (int i = 0; i < log.agent_count; ++i) {
            os << t << ',' << i << ',' << format_double(snap.positions[i].x) << ','
               << format_double(snap.positions[i].y) << ','
               << format_double(snap.velocities[i].x) << ','
               << format_double(snap.velocities[i].y) << ','
               << status_name(snap.statuses[i]) << '\n';
        }
    }
}

inline void write_events_csv(const EpisodeLog& log, std::ostream& os) {
    os << "step,agent_id,event\n";
    for (const Event& e : log.events)
        os << e.step << ',' << e.agent_id << ','
           << (e.kind == EventKind::arrived ? "arrived" : "died") << '\n';
}

namespace detail {

inline AgentStatus status_from_name(std::string_view s) {
    if (s == "active") return AgentStatus::active;
    if (s == "arrived") return AgentStatus::arrived;
    if (s == "dead") return AgentStatus::dead;
    throw config_error("trajectory: unknown status '" + std::string(s) + "'");
}

}  // namespace detail

// Rebuilds an EpisodeLog from an exported trajectory. Events are derived
// from the status transitions, which the log invariants keep in sync with
// the snapshots. dt and max_steps are not stored in the CSV, so the caller
// supplies them (normally from the scenario the run used).
inline EpisodeLog read_trajectory_csv(std::istream& is, double dt, int max_steps) {
    EpisodeLog log;
    log.dt = dt;
    log.max_steps = max_steps;
    std::string line;
    if (!std::getline(is, line) || line != "step,agent_id,x,y,vx,vy,status")
        throw config_error("trajectory: bad or missing header");
    std::size_t row = 1;
    while (std::getline(is, line)) {
        ++row;
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 7)
            throw config_error("trajectory row " + std::to_string(row) + ": expected 7 fields");
        const long t = parse_long(fields[0]);
        const long id = parse_long(fields[1]);
        if (t < 0 || id < 0)
            throw config_error("trajectory row " + std::to_string(row) + ": negative index");
        if (static_cast<std::size_t>(t) >= log.steps.size()) log.steps.resize(t + 1);
        StepSnapshot& snap = log.steps[t];
        if (static_cast<std::size_t>(id) >= snap.positions.size()) {
            snap.positions.resize(id + 1);
            snap.velocities.resize(id + 1);
            snap.statuses.resize(id + 1, AgentStatus::active);
        }
        snap.positions[id] = {parse_double(fields[2]), parse_double(fields[3])};
        snap.velocities[id] = {parse_double(fields[4]), parse_double(fields[5])};
        snap.statuses[id] = detail::status_from_name(fields[6]);
        log.agent_count = std::max(log.agent_count, static_cast<int>(id) + 1);
    }
    if (log.steps.empty()) throw config_error("trajectory: no data rows");
    for (const StepSnapshot& snap : log.steps)
        if (static_cast<int>(snap.positions.size()) != log.agent_count)
            throw config_error("trajectory: ragged agent rows across steps");
    // recover events from transitions
    for (int i = 0; i < log.agent_count; ++i) {
        AgentStatus prev = AgentStatus::active;
        for (std::size_t t = 0; t < log.steps.size(); ++t) {
            const AgentStatus cur = log.steps[t].statuses[i];
            if (cur != prev) {
                if (prev != AgentStatus::active)
                    throw config_error("trajectory: agent " + std::to_string(i) +
                                       " leaves an absorbing status at step " + std::to_string(t));
                log.events.push_back({static_cast<int>(t), i,
                                      cur == AgentStatus::arrived ? EventKind::arrived
                                                                  : EventKind::died});
            }
            prev = cur;
        }
    }
    // keep event order identical to the simulator's (by step, then agent id)
    std::stable_sort(log.events.begin(), log.events.end(),
                     [](const Event& a, const Event& b) {
                         return a.step != b.step ? a.step < b.step : a.agent_id < b.agent_id;
                     });
    return log;
}

}  // namespace gflock
