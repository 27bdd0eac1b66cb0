#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "gflock/errors.hpp"
#include "gflock/metrics.hpp"
#include "gflock/rng.hpp"
#include "gflock/rules.hpp"
#include "gflock/scenario.hpp"
#include "gflock/sim.hpp"

namespace gflock {

inline constexpr int kGenomeLength = kContextCount * kWeightsPerRule;  // 20
inline constexpr double kGeneFloor = 1e-6;
inline constexpr double kGeneCeil = 1.0 - 1e-6;

// Flat encoding of a RuleSet: four consecutive (a,b,c,d,e) blocks in
// context order.
struct Genome {
    std::array<double, kGenomeLength> genes{};

    bool operator==(const Genome&) const = default;
};

inline bool genome_in_bounds(const Genome& g) {
    return std::all_of(g.genes.begin(), g.genes.end(),
                       [](double v) { return v >= kGeneFloor && v <= kGeneCeil; });
}

inline Genome encode_ruleset(const RuleSet& rs) {
    Genome g;
    for (int r = 0; r < kContextCount; ++r) {
        const RuleWeights& w = rs.rules[r];
        const int base = r * kWeightsPerRule;
        g.genes[base + 0] = w.a;
        g.genes[base + 1] = w.b;
        g.genes[base + 2] = w.c;
        g.genes[base + 3] = w.d;
        g.genes[base + 4] = w.e;
    }
    return g;
}

inline RuleSet decode_genome(const Genome& g) {
    RuleSet rs;
    for (int r = 0; r < kContextCount; ++r) {
        const int base = r * kWeightsPerRule;
        rs.rules[r] = {g.genes[base + 0], g.genes[base + 1], g.genes[base + 2],
                       g.genes[base + 3], g.genes[base + 4]};
    }
    return rs;
}

struct EvaluatedGenome {
    Genome genome;
    std::optional<double> fitness;  // empty until evaluated
    int episodes = 0;
    std::uint64_t seed_base = 0;
    bool degenerate = false;  // simulation rejected the run; worst-case fitness assigned
};

struct Population {
    std::vector<EvaluatedGenome> members;
    int generation = 0;
};

struct GAConfig {
    int generations = 30;        // M
    int population_size = 20;    // N_p
    int elite_count = 4;         // N_s, survive unchanged
    double mutation_rate = 0.1;  // per-gene probability
    double mutation_sigma = 0.1; // stddev of the additive Gaussian step
    int episodes_per_eval = 3;   // distinct seeds averaged per fitness
    Scenario scenario;
    std::uint64_t master_seed = 1;
    std::optional<RuleSet> expert;  // seeds member 0 when present
    double fitness_alpha = 1.0;
    double fitness_epsilon = 1e-3;
    int threads = 0;  // 0 = hardware concurrency
};

inline void validate_ga_config(const GAConfig& cfg) {
    const auto fail = [](const std::string& field, const std::string& why) {
        throw config_error("ga." + field + ": " + why);
    };
    if (cfg.generations < 0) fail("generations", "must be non-negative");
    if (cfg.population_size < 1) fail("population_size", "must be positive");
    if (!(cfg.elite_count >= 1 && cfg.elite_count < cfg.population_size))
        fail("elite_count", "require 1 <= elites < population");
    if (!(cfg.mutation_rate >= 0.0 && cfg.mutation_rate <= 1.0))
        fail("mutation_rate", "must lie in [0,1]");
    if (cfg.mutation_sigma <= 0.0) fail("mutation_sigma", "must be positive");
    if (cfg.episodes_per_eval < 1) fail("episodes_per_eval", "must be at least 1");
    if (cfg.fitness_alpha <= 0.0) fail("fitness_alpha", "must be positive");
    if (cfg.fitness_epsilon <= 0.0) fail("fitness_epsilon", "must be positive");
    validate_scenario(cfg.scenario);
}

// Digest of everything that shapes the search except the generation budget,
// so a checkpoint can resume with a larger budget but not under a
// different experiment.
inline std::string ga_config_digest(const GAConfig& cfg) {
    nlohmann::json j{
        {"population_size", cfg.population_size},
        {"elite_count", cfg.elite_count},
        {"mutation_rate", cfg.mutation_rate},
        {"mutation_sigma", cfg.mutation_sigma},
        {"episodes_per_eval", cfg.episodes_per_eval},
        {"master_seed", cfg.master_seed},
        {"fitness_alpha", cfg.fitness_alpha},
        {"fitness_epsilon", cfg.fitness_epsilon},
        {"scenario", scenario_digest(cfg.scenario)},
        {"expert", cfg.expert ? ruleset_digest(*cfg.expert) : "none"},
    };
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(j.dump())));
    return buf;
}

inline std::uint64_t eval_seed_base(const GAConfig& cfg) {
    return derive_stream_seed(cfg.master_seed, "eval");
}

// Random genomes from the mutation stream; member 0 carries the expert
// encoding when one is configured.
inline Population init_population(const GAConfig& cfg, RngStream& mutation_stream) {
    Population pop;
    pop.members.resize(cfg.population_size);
    const std::uint64_t seeds = eval_seed_base(cfg);
    for (int i = 0; i < cfg.population_size; ++i) {
        EvaluatedGenome& m = pop.members[i];
        m.seed_base = seeds;
        if (i == 0 && cfg.expert) {
            m.genome = encode_ruleset(*cfg.expert);
            for (double& g : m.genome.genes) g = std::clamp(g, kGeneFloor, kGeneCeil);
        } else {
            for (double& g : m.genome.genes)
                g = std::clamp(mutation_stream.uniform(), kGeneFloor, kGeneCeil);
        }
    }
    return pop;
}

// Fitness of one genome: mean robust fitness over episodes_per_eval
// consecutive seeds. A degenerate simulation is absorbed as worst-case
// fitness with the flag set instead of aborting the search.
inline EvaluatedGenome evaluate(const Genome& genome, const GAConfig& cfg) {
    EvaluatedGenome out;
    out.genome = genome;
    out.seed_base = eval_seed_base(cfg);
    out.episodes = cfg.episodes_per_eval;
    const RuleSet rules = decode_genome(genome);
    const FitnessConfig fc{cfg.fitness_alpha, cfg.fitness_epsilon,
                           FitnessConfig::Variant::robust};
    double sum = 0.0;
    try {
        for (int k = 0; k < cfg.episodes_per_eval; ++k) {
            const EpisodeLog log =
                run_episode(cfg.scenario, rules, out.seed_base + static_cast<std::uint64_t>(k));
            sum += fitness(log, fc);
        }
        out.fitness = sum / cfg.episodes_per_eval;
    } catch (const degenerate_input&) {
        out.fitness = 1e30;
        out.degenerate = true;
    }
    return out;
}

namespace detail {

// Fill in fitness for every pending member. Work is farmed out by index
// and merged back by index, so the result is identical to sequential
// evaluation.
inline void evaluate_pending(
    Population& pop, const GAConfig& cfg,
    const std::function<double(const Genome&)>& objective) {
    std::vector<std::size_t> pending;
    for (std::size_t i = 0; i < pop.members.size(); ++i)
        if (!pop.members[i].fitness) pending.push_back(i);
    if (pending.empty()) return;

    if (objective) {
        for (std::size_t i : pending) {
            EvaluatedGenome& m = pop.members[i];
            m.fitness = objective(m.genome);
            m.episodes = 0;
        }
        return;
    }

    unsigned workers = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads)
                                       : std::thread::hardware_concurrency();
    workers = std::max(1u, std::min<unsigned>(workers, pending.size()));
    std::vector<std::future<void>> futures;
    futures.reserve(workers);
    std::vector<EvaluatedGenome> results(pending.size());
    for (unsigned w = 0; w < workers; ++w) {
        futures.push_back(std::async(std::launch::async, [&, w] {
            for (std::size_t k = w; k < pending.size(); k += workers)
                results[k] = evaluate(pop.members[pending[k]].genome, cfg);
        }));
    }
    for (auto& f : futures) f.get();
    for (std::size_t k = 0; k < pending.size(); ++k) pop.members[pending[k]] = results[k];
}

}  // namespace detail

// The elite_count lowest-fitness members, ties broken by lower index.
inline std::vector<EvaluatedGenome> select(const Population& pop, int elite_count) {
    if (elite_count < 1 || static_cast<std::size_t>(elite_count) > pop.members.size())
        throw std::logic_error("select: elite count out of range");
    std::vector<std::size_t> order(pop.members.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (const EvaluatedGenome& m : pop.members)
        if (!m.fitness) throw std::logic_error("select: member with pending fitness");
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return *pop.members[a].fitness < *pop.members[b].fitness;
    });
    std::vector<EvaluatedGenome> out;
    out.reserve(elite_count);
    for (int i = 0; i < elite_count; ++i) out.push_back(pop.members[order[i]]);
    return out;
}

// Single-point recombination: two parents drawn uniformly (with
// replacement) from the seeds, spliced at a cut in {1..19}.
inline std::vector<Genome> crossover(const std::vector<EvaluatedGenome>& seeds,
                                     int population_size, RngStream& rng) {
    if (seeds.empty()) throw std::logic_error("crossover: no seeds");
    const int children = population_size - static_cast<int>(seeds.size());
    std::vector<Genome> out;
    out.reserve(std::max(children, 0));
    for (int c = 0; c < children; ++c) {
        const Genome& p1 = seeds[rng.uniform_index(seeds.size())].genome;
        const Genome& p2 = seeds[rng.uniform_index(seeds.size())].genome;
        const int cut = 1 + static_cast<int>(rng.uniform_index(kGenomeLength - 1));
        Genome child;
        for (int g = 0; g < kGenomeLength; ++g)
            child.genes[g] = g < cut ? p1.genes[g] : p2.genes[g];
        out.push_back(child);
    }
    return out;
}

// Per-gene additive Gaussian noise with probability `rate`, clamped to the
// gene bounds. Callers pass only non-elite genomes; elites are never
// mutated.
inline void mutate(std::vector<Genome>& genomes, double rate, double sigma,
                   RngStream& rng) {
    for (Genome& g : genomes) {
        for (double& gene : g.genes) {
            if (rng.uniform() < rate)
                gene = std::clamp(gene + rng.gaussian(0.0, sigma), kGeneFloor, kGeneCeil);
        }
    }
}

struct GenerationStats {
    int generation = 0;
    double best = 0.0;
    double mean = 0.0;
};

// Everything evolve needs to stop and pick up again later.
struct GAState {
    Population pop;
    RngStream mutation{0};
    RngStream crossover{0};
    Genome best_genome;
    double best_fitness = std::numeric_limits<double>::infinity();
    std::vector<GenerationStats> history;
};

inline void checkpoint_save(const GAState& state, const std::string& cfg_digest,
                            const std::string& path) {
    nlohmann::json members = nlohmann::json::array();
    for (const EvaluatedGenome& m : state.pop.members) {
        members.push_back({
            {"genes", m.genome.genes},
            {"fitness", m.fitness ? nlohmann::json(*m.fitness) : nlohmann::json()},
            {"episodes", m.episodes},
            {"seed_base", m.seed_base},
            {"degenerate", m.degenerate},
        });
    }
    nlohmann::json history = nlohmann::json::array();
    for (const GenerationStats& h : state.history)
        history.push_back({{"generation", h.generation}, {"best", h.best}, {"mean", h.mean}});
    const nlohmann::json j{
        {"format", "gflock-checkpoint"},
        {"version", 1},
        {"config_digest", cfg_digest},
        {"generation", state.pop.generation},
        {"rng", {{"mutation", state.mutation.save_state()},
                 {"crossover", state.crossover.save_state()}}},
        {"population", members},
        {"best", {{"genes", state.best_genome.genes}, {"fitness", state.best_fitness}}},
        {"history", history},
    };
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw config_error("checkpoint: cannot write '" + tmp + "'");
        out << j.dump(2) << "\n";
    }
    std::filesystem::rename(tmp, path);
}

inline GAState checkpoint_load_state(const std::string& path,
                                     const std::string& expected_digest) {
    std::ifstream in(path);
    if (!in) throw integrity_error("checkpoint: cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw integrity_error("checkpoint: corrupt file '" + path + "': " + e.what());
    }
    try {
        if (j.value("format", "") != "gflock-checkpoint" || j.value("version", 0) != 1)
            throw integrity_error("checkpoint: unrecognized container format");
        if (j.at("config_digest").get<std::string>() != expected_digest)
            throw compatibility_error(
                "checkpoint: config digest mismatch (file " +
                j.at("config_digest").get<std::string>() + ", expected " + expected_digest + ")");
        GAState state;
        state.pop.generation = j.at("generation").get<int>();
        state.mutation.restore_state(j.at("rng").at("mutation").get<std::string>());
        state.crossover.restore_state(j.at("rng").at("crossover").get<std::string>());
        for (const auto& m : j.at("population")) {
            EvaluatedGenome eg;
            const auto& genes = m.at("genes");
            if (genes.size() != kGenomeLength)
                throw integrity_error("checkpoint: genome of wrong length");
            for (int g = 0; g < kGenomeLength; ++g) eg.genome.genes[g] = genes[g].get<double>();
            if (!m.at("fitness").is_null()) eg.fitness = m.at("fitness").get<double>();
            eg.episodes = m.at("episodes").get<int>();
            eg.seed_base = m.at("seed_base").get<std::uint64_t>();
            eg.degenerate = m.at("degenerate").get<bool>();
            state.pop.members.push_back(eg);
        }
        const auto& best = j.at("best");
        for (int g = 0; g < kGenomeLength; ++g)
            state.best_genome.genes[g] = best.at("genes")[g].get<double>();
        state.best_fitness = best.at("fitness").get<double>();
        for (const auto& h : j.at("history"))
            state.history.push_back({h.at("generation").get<int>(), h.at("best").get<double>(),
                                     h.at("mean").get<double>()});
        return state;
    } catch (const nlohmann::json::exception& e) {
        throw integrity_error("checkpoint: missing or mistyped field: " + std::string(e.what()));
    }
}

inline Population checkpoint_load(const std::string& path, const std::string& expected_digest) {
    return checkpoint_load_state(path, expected_digest).pop;
}

struct EvolveOptions {
    std::function<void(const GenerationStats&)> on_generation;
    std::string checkpoint_path;  // written after every generation when set
    std::string resume_from;      // pick up a previous run's checkpoint
    // Test hook: replaces simulation-backed evaluation wholesale.
    std::function<double(const Genome&)> objective;
};

struct EvolveResult {
    RuleSet best_rules;
    Genome best_genome;
    double best_fitness = 0.0;
    std::vector<GenerationStats> history;
};

// Generational loop: evaluate, keep the elites, refill by crossover,
// mutate the newcomers. Elitism makes the per-generation best
// non-increasing. Deterministic in cfg; resuming from a checkpoint
// reproduces the uninterrupted run exactly.
inline EvolveResult evolve(const GAConfig& cfg, const EvolveOptions& opts = {}) {
    validate_ga_config(cfg);
    const std::string digest = ga_config_digest(cfg);

    GAState state;
    int start_generation = 0;
    if (!opts.resume_from.empty()) {
        state = checkpoint_load_state(opts.resume_from, digest);
        start_generation = state.pop.generation + 1;
    } else {
        state.mutation = RngStream(cfg.master_seed, "mutation");
        state.crossover = RngStream(cfg.master_seed, "crossover");
        state.pop = init_population(cfg, state.mutation);
    }

    const auto finish_generation = [&](int generation) {
        state.pop.generation = generation;
        double best = std::numeric_limits<double>::infinity();
        double sum = 0.0;
        std::size_t best_index = 0;
        for (std::size_t i = 0; i < state.pop.members.size(); ++i) {
            const double f = *state.pop.members[i].fitness;
            sum += f;
            if (f < best) {
                best = f;
                best_index = i;
            }
        }
        if (best < state.best_fitness) {
            state.best_fitness = best;
            state.best_genome = state.pop.members[best_index].genome;
        }
        const GenerationStats stats{generation, best,
                                    sum / static_cast<double>(state.pop.members.size())};
        state.history.push_back(stats);
        if (opts.on_generation) opts.on_generation(stats);
        if (!opts.checkpoint_path.empty()) checkpoint_save(state, digest, opts.checkpoint_path);
    };

    if (start_generation == 0) {
        detail::evaluate_pending(state.pop, cfg, opts.objective);
        finish_generation(0);
        start_generation = 1;
    }

    for (int g = start_generation; g <= cfg.generations; ++g) {
        std::vector<EvaluatedGenome> elites = select(state.pop, cfg.elite_count);
        std::vector<Genome> children =
            crossover(elites, cfg.population_size, state.crossover);
        mutate(children, cfg.mutation_rate, cfg.mutation_sigma, state.mutation);
        Population next;
        next.members = std::move(elites);
        for (Genome& child : children) {
            EvaluatedGenome m;
            m.genome = child;
            m.seed_base = eval_seed_base(cfg);
            next.members.push_back(std::move(m));
        }
        state.pop = std::move(next);
        detail::evaluate_pending(state.pop, cfg, opts.objective);
        finish_generation(g);
    }

    EvolveResult result;
    result.best_genome = state.best_genome;
    result.best_fitness = state.best_fitness;
    result.best_rules = decode_genome(state.best_genome);
    result.history = std::move(state.history);
    return result;
}

}  // namespace gflock
